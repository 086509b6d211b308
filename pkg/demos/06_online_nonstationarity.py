"""Online operation pays on nonstationary streams.

Progressive validation predicts each example before training on it, so it
measures how the learner tracks the stream as it arrives.  When examples
come sorted by label in long runs, an online learner rides each run: the
current class dominates its recent updates, so the next prediction is
usually right even when the features barely separate the classes.
Permuting the same file destroys that structure.
"""

import tempfile

from recalltree import (
    Hyperparams,
    RecallTreeModel,
    SynthSpec,
    n1_chi_squared,
    progressive_eval,
    stream_dataset,
    synth_generate,
)
from recalltree.synth import raw_feature_width

spec = SynthSpec("nonstationary-blocks", num_classes=32, dimensions=10,
                 num_examples=25_000, noise=0.5, seed=41)
path = tempfile.mktemp(suffix=".txt")
synth_generate(spec, path)
width = raw_feature_width(spec)
print(f"blocks synthetic: K=32, heavy feature overlap (noise 0.5), "
      f"{spec.num_examples} examples sorted by label")

accs = {}
for permute in (False, True):
    model = RecallTreeModel(32, width,
                            Hyperparams.defaults(32, bits=18, adaptive_lr=True))
    stream = stream_dataset(path, permute=permute, seed=7)
    report = progressive_eval(stream, model)
    accs[permute] = report.progressive_accuracy

n = spec.num_examples
sig = n1_chi_squared(round(accs[False] * n), n, round(accs[True] * n), n)
print(f"\nprogressive accuracy, in-order stream: {accs[False]:.4f}")
print(f"progressive accuracy, permuted stream: {accs[True]:.4f}")
print(f"difference significant at p = {sig.p_value:.2e}")
print("\nthe permuted run is the stationary difficulty of the problem; the")
print("gap is what pure online adaptation extracts from sequential structure")
