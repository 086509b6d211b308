"""The entropy accounting behind the tree.

Part 1 - the ledger invariant: partition any dataset by the halting node
of any frozen tree, and the fraction-weighted plurality error never
exceeds the fraction-weighted label entropy in nats.  This holds
unconditionally (it follows from ln(1/(1-e)) >= e), so it doubles as a
self-check on the routing machinery.

Part 2 - the boosting bound: when every split of an (oracle) splitter is
guaranteed an entropy advantage of at least gamma nats and the leaf with
the largest example fraction is split first, the plurality error after t
splits is at most H1 - gamma(1 + ln t).
"""

import math

from recalltree import (
    Hyperparams,
    OracleSplitter,
    RecallTreeModel,
    SynthSpec,
    check_boost_bound,
    generate_examples,
    ledger_snapshot,
)
from recalltree.synth import raw_feature_width

# Part 1: the ledger over a trained tree
spec = SynthSpec("hierarchical-clusters", num_classes=32, dimensions=6,
                 num_examples=12_000, noise=0.03, seed=17)
data = generate_examples(spec)
model = RecallTreeModel(32, raw_feature_width(spec),
                        Hyperparams.defaults(32, bits=16, adaptive_lr=True))
model.train(data[:10_000])

ledger = ledger_snapshot(model, data[10_000:])
print(f"halting nodes: {len(ledger.records)}")
print(f"weighted entropy W = {ledger.weighted_entropy:.4f} nats")
print(f"plurality error  e = {ledger.error_rate:.4f}")
print(f"marginal entropy H1 = {ledger.marginal_entropy:.4f} nats")
print(f"invariant e <= W: {ledger.error_rate <= ledger.weighted_entropy}")

# Part 2: the boosting bound in oracle-splitter mode
gamma = 0.1
splitter = OracleSplitter({c: 1.0 for c in range(16)}, min_advantage=gamma)
history = splitter.run(12)
print(f"\noracle splitter on uniform 16 classes, enforced advantage {gamma} nats")
print(f"measured per-split advantage: {min(r.advantage for r in splitter.advantages):.4f} nats"
      f" (balanced halving gives ln 2)")
print(f"{'t':>3} {'error':>8} {'bound':>8}")
for check in check_boost_bound(history, gamma, splitter.marginal_entropy):
    flag = "ok" if check.ok else "VIOLATED"
    print(f"{check.splits:>3} {check.error_rate:>8.4f} {check.bound:>8.4f}  {flag}")
