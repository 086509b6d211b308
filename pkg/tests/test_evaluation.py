import numpy as np
import pytest

from recalltree.data import SparseExample
from recalltree.errors import DomainError
from recalltree.evaluation import (
    EvalReport,
    holdout_eval,
    n1_chi_squared,
    progressive_eval,
)
from recalltree.oaa import OaaModel
from recalltree.synth import SynthSpec, generate_examples, raw_feature_width
from recalltree.tree import Hyperparams, Prediction, RecallTreeModel


class MemorizingStub:
    """Remembers exact feature vectors; anything unseen predicts class 0.

    Its progressive accuracy on first occurrences must stay at chance: if
    the harness ever trained before predicting, repeats of the training
    example would leak and first occurrences would score perfectly.
    """

    def __init__(self):
        self.seen = {}

    @staticmethod
    def _key(x):
        return (tuple(x.indices.tolist()), tuple(x.values.tolist()))

    def predict_full(self, x):
        return Prediction(self.seen.get(self._key(x), 0), 0, 0, 0, 0)

    def train_example(self, x):
        self.seen[self._key(x)] = x.label


class TestProgressiveEval:
    def test_constant_label_stream_converges(self):
        stream = (SparseExample.from_pairs(1, [(0, 1.0)]) for _ in range(10_000))
        model = RecallTreeModel(2, 1, Hyperparams.defaults(2, bits=12))
        report = progressive_eval(stream, model)
        assert report.progressive_accuracy >= 0.99
        assert report.examples_seen == 10_000

    def test_featureless_alternating_stream_is_chance(self):
        stream = [SparseExample.from_pairs(i % 2, []) for i in range(10_000)]
        tree = RecallTreeModel(2, 1, Hyperparams.defaults(2, bits=12, path_features=False))
        report = progressive_eval(iter(stream), tree)
        assert 0.48 <= report.progressive_accuracy <= 0.52

        oaa = OaaModel(2, bits=12)
        report = progressive_eval(iter(stream), oaa)
        assert 0.48 <= report.progressive_accuracy <= 0.52

    def test_prediction_happens_strictly_before_training(self):
        rng = np.random.default_rng(3)
        firsts = [SparseExample.from_pairs(int(rng.integers(0, 10)), [(i, 1.0)])
                  for i in range(300)]
        # first occurrences only: accuracy is the chance rate of class 0
        report = progressive_eval(iter(firsts), MemorizingStub())
        assert report.progressive_accuracy < 0.25

        # the same examples repeated: firsts at chance, repeats perfect
        report = progressive_eval(iter(firsts + firsts), MemorizingStub())
        assert 0.4 < report.progressive_accuracy < 0.7

    def test_empty_stream_rejected(self):
        with pytest.raises(DomainError):
            progressive_eval(iter([]), MemorizingStub())


class TestWorkCounters:
    def test_oaa_scores_every_class(self):
        spec = SynthSpec("voronoi", num_classes=9, dimensions=4, num_examples=400,
                         noise=0.2, seed=1)
        data = generate_examples(spec)
        model = OaaModel(9, bits=12).train(data[:200])
        report = holdout_eval(data[200:], model)
        assert report.scored_classes_mean == 9.0
        assert report.router_evals_mean == 0.0

    def test_tree_counters_stay_logarithmic(self):
        spec = SynthSpec("voronoi", num_classes=40, dimensions=6, num_examples=4000,
                         noise=0.2, seed=2)
        data = generate_examples(spec)
        k = 40
        model = RecallTreeModel(k, raw_feature_width(spec),
                                Hyperparams.defaults(k, bits=14, adaptive_lr=True))
        report = progressive_eval(iter(data), model)
        import math
        assert report.scored_classes_mean <= math.ceil(4 * math.log2(k))
        assert report.router_evals_mean <= math.ceil(math.log2(k)) + 1

    def test_holdout_eval_reports_accuracy(self):
        data = [SparseExample.from_pairs(0, [(0, 1.0)]) for _ in range(50)]
        model = RecallTreeModel(2, 1, Hyperparams.defaults(2, bits=12)).train(data)
        report = holdout_eval(data, model)
        assert report.holdout_accuracy == 1.0

    def test_holdout_empty_rejected(self):
        model = RecallTreeModel(2, 1, Hyperparams.defaults(2, bits=12))
        with pytest.raises(DomainError):
            holdout_eval([], model)


class TestChiSquared:
    def test_frozen_case(self):
        # 60/100 vs 40/100: Pearson chi2 is 8.0, the N-1 variant scales by
        # 199/200, and the one-degree p-value follows from erfc
        result = n1_chi_squared(60, 100, 40, 100)
        assert result.statistic == pytest.approx(7.96, abs=1e-12)
        assert result.p_value == pytest.approx(0.004782241413390507, abs=1e-15)
        assert result.significant(0.05)

    def test_symmetry(self):
        a = n1_chi_squared(55, 200, 80, 210)
        b = n1_chi_squared(80, 210, 55, 200)
        assert a.statistic == pytest.approx(b.statistic, abs=1e-12)

    def test_identical_proportions_are_insignificant(self):
        result = n1_chi_squared(50, 100, 50, 100)
        assert result.statistic == 0.0
        assert result.p_value == 1.0

    def test_degenerate_columns(self):
        assert n1_chi_squared(0, 10, 0, 10).p_value == 1.0
        assert n1_chi_squared(10, 10, 10, 10).p_value == 1.0

    def test_validation(self):
        with pytest.raises(DomainError):
            n1_chi_squared(5, 0, 1, 10)
        with pytest.raises(DomainError):
            n1_chi_squared(11, 10, 1, 10)


class TestEvalReport:
    def test_kv_text(self):
        report = EvalReport(examples_seen=10, progressive_accuracy=0.5,
                            scored_classes_mean=3.0, router_evals_mean=1.5,
                            ledger_summary=(0.4, 0.2, 0.9))
        text = report.to_kv_text()
        assert "examples_seen=10" in text
        assert "progressive_accuracy=0.500000" in text
        assert "ledger_W=0.400000" in text

    def test_row(self):
        report = EvalReport(examples_seen=10, progressive_accuracy=0.5)
        cells = report.to_row().split("\t")
        assert cells[0] == "10"
        assert cells[1] == "0.500000"
        assert cells[2] == ""  # holdout not measured
