import numpy as np
import pytest

from recalltree.errors import CorruptedModelError, ModelFormatError, ModelTypeError
from recalltree.model_io import load_model, load_oaa, load_recall_tree, save_model
from recalltree.oaa import OaaModel
from recalltree.synth import SynthSpec, generate_examples, raw_feature_width
from recalltree.tree import Hyperparams, RecallTreeModel


@pytest.fixture(scope="module")
def trained():
    spec = SynthSpec("voronoi", num_classes=12, dimensions=6, num_examples=4000,
                     noise=0.2, seed=9)
    data = generate_examples(spec)
    width = raw_feature_width(spec)
    params = Hyperparams.defaults(12, bits=14, adaptive_lr=True)
    tree = RecallTreeModel(12, width, params).train(data[:3000])
    oaa = OaaModel(12, bits=14).train(data[:3000])
    return tree, oaa, data


class TestRoundTrip:
    def test_tree_predictions_survive_round_trip(self, trained, tmp_path):
        tree, _, data = trained
        path = tmp_path / "tree.bin"
        save_model(tree, str(path))
        loaded = load_model(str(path))
        assert isinstance(loaded, RecallTreeModel)
        for x in data[3000:]:
            assert loaded.predict(x) == tree.predict(x)

    def test_tree_state_survives_round_trip(self, trained, tmp_path):
        tree, _, _ = trained
        path = tmp_path / "tree.bin"
        save_model(tree, str(path))
        loaded = load_recall_tree(str(path))
        assert loaded.params == tree.params
        assert loaded.num_raw_features == tree.num_raw_features
        assert loaded.examples_seen == tree.examples_seen
        assert np.array_equal(loaded.router_store.weights, tree.router_store.weights)
        assert np.array_equal(loaded.class_store.weights, tree.class_store.weights)
        assert len(loaded.nodes) == len(tree.nodes)
        for a, b in zip(loaded.nodes, tree.nodes):
            assert (a.id, a.depth, a.parent, a.left, a.right) == \
                (b.id, b.depth, b.parent, b.left, b.right)
            assert a.hist == b.hist
            assert a.candidates == b.candidates
            assert a.cand_total == b.cand_total
            assert a.sum_clog2 == pytest.approx(b.sum_clog2, abs=1e-9)

    def test_oaa_round_trip(self, trained, tmp_path):
        _, oaa, data = trained
        path = tmp_path / "oaa.bin"
        save_model(oaa, str(path))
        loaded = load_oaa(str(path))
        assert loaded.num_classes == 12
        for x in data[3000:3500]:
            assert loaded.predict(x) == oaa.predict(x)

    def test_save_is_deterministic_for_identical_training(self, tmp_path):
        spec = SynthSpec("voronoi", num_classes=8, dimensions=4, num_examples=2000,
                         noise=0.2, seed=5)
        data = generate_examples(spec)
        width = raw_feature_width(spec)

        def train_and_dump(name):
            model = RecallTreeModel(8, width, Hyperparams.defaults(8, bits=14))
            model.train(data)
            path = tmp_path / name
            save_model(model, str(path))
            return path.read_bytes()

        assert train_and_dump("a.bin") == train_and_dump("b.bin")


class TestFormatErrors:
    def _tree_bytes(self, trained, tmp_path):
        tree, _, _ = trained
        path = tmp_path / "tree.bin"
        save_model(tree, str(path))
        return bytearray(path.read_bytes()), path

    def test_bad_magic(self, trained, tmp_path):
        blob, path = self._tree_bytes(trained, tmp_path)
        blob[0] = ord("X")
        path.write_bytes(bytes(blob))
        with pytest.raises(ModelFormatError):
            load_model(str(path))

    def test_version_bump_is_a_clean_format_error(self, trained, tmp_path):
        blob, path = self._tree_bytes(trained, tmp_path)
        blob[4] = 99  # the version byte follows the 4-byte magic
        path.write_bytes(bytes(blob))
        with pytest.raises(ModelFormatError):
            load_model(str(path))

    def test_unknown_type_tag(self, trained, tmp_path):
        blob, path = self._tree_bytes(trained, tmp_path)
        blob[5] = 42
        path.write_bytes(bytes(blob))
        with pytest.raises(ModelFormatError):
            load_model(str(path))

    def test_truncated_file_is_a_corruption_error(self, trained, tmp_path):
        blob, path = self._tree_bytes(trained, tmp_path)
        path.write_bytes(bytes(blob[: len(blob) // 2]))
        with pytest.raises(CorruptedModelError):
            load_model(str(path))

    def test_trailing_bytes_are_a_corruption_error(self, trained, tmp_path):
        blob, path = self._tree_bytes(trained, tmp_path)
        path.write_bytes(bytes(blob) + b"\x00")
        with pytest.raises(CorruptedModelError):
            load_model(str(path))


class TestTypeTags:
    def test_oaa_file_into_tree_loader(self, trained, tmp_path):
        _, oaa, _ = trained
        path = tmp_path / "oaa.bin"
        save_model(oaa, str(path))
        with pytest.raises(ModelTypeError):
            load_recall_tree(str(path))

    def test_tree_file_into_oaa_loader(self, trained, tmp_path):
        tree, _, _ = trained
        path = tmp_path / "tree.bin"
        save_model(tree, str(path))
        with pytest.raises(ModelTypeError):
            load_oaa(str(path))

    def test_generic_loader_dispatches_on_tag(self, trained, tmp_path):
        tree, oaa, _ = trained
        tp, op = tmp_path / "t.bin", tmp_path / "o.bin"
        save_model(tree, str(tp))
        save_model(oaa, str(op))
        assert isinstance(load_model(str(tp)), RecallTreeModel)
        assert isinstance(load_model(str(op)), OaaModel)

    def test_unserializable_object_rejected(self, tmp_path):
        with pytest.raises(ModelTypeError):
            save_model(object(), str(tmp_path / "x.bin"))
