"""Work scaling: hyperplane evaluations per example as the class count
grows.

The flat baseline scores exactly K classes per prediction.  The tree
evaluates one router per level plus the halting node's candidate set, a
budget of ceil(4 log2 K) + ceil(log2 K), so its advantage widens with K.
"""

import math

from recalltree import Hyperparams, OaaModel, RecallTreeModel, SynthSpec, generate_examples
from recalltree.synth import raw_feature_width

print(f"{'K':>6} {'tree work/ex':>14} {'budget':>8} {'flat work/ex':>14} {'ratio':>7}")
for k in (128, 512, 2048):
    spec = SynthSpec("hierarchical-clusters", num_classes=k, dimensions=12,
                     num_examples=10_000, noise=0.02, seed=k)
    data = generate_examples(spec)
    train, test = data[:9_000], data[9_000:]
    width = raw_feature_width(spec)

    tree = RecallTreeModel(k, width,
                           Hyperparams.defaults(k, bits=20, adaptive_lr=True)).train(train)
    work = []
    for x in test:
        p = tree.predict_full(x)
        work.append(p.classes_scored + p.router_evals)
    budget = math.ceil(4 * math.log2(k)) + math.ceil(math.log2(k))
    assert max(work) <= budget

    mean_work = sum(work) / len(work)
    print(f"{k:>6} {mean_work:>14.1f} {budget:>8} {k:>14} {k / mean_work:>6.1f}x")

print("\nevery single prediction stayed within the logarithmic budget")
