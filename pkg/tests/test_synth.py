import gzip
from collections import Counter

import numpy as np
import pytest

from recalltree.errors import DomainError
from recalltree.oaa import OaaModel
from recalltree.synth import (
    FEATURE_SCALE,
    SynthSpec,
    generate_examples,
    hierarchical_oracle,
    nearest_center_labels,
    raw_feature_width,
    synth_generate,
    voronoi_centers,
)

from conftest import accuracy


class TestSpecValidation:
    def test_unknown_structure(self):
        with pytest.raises(DomainError):
            SynthSpec("spiral", num_classes=3, dimensions=2, num_examples=10)

    def test_bad_counts(self):
        with pytest.raises(DomainError):
            SynthSpec("voronoi", num_classes=0, dimensions=2, num_examples=10)
        with pytest.raises(DomainError):
            SynthSpec("voronoi", num_classes=2, dimensions=0, num_examples=10)
        with pytest.raises(DomainError):
            SynthSpec("voronoi", num_classes=2, dimensions=2, num_examples=10, noise=-1.0)


class TestDeterminism:
    @pytest.mark.parametrize("structure", ["voronoi", "hierarchical-clusters",
                                           "zipf-tail", "nonstationary-blocks"])
    def test_same_spec_writes_identical_bytes(self, structure, tmp_path):
        spec = SynthSpec(structure, num_classes=6, dimensions=3, num_examples=200,
                         noise=0.1, seed=7)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        synth_generate(spec, str(a))
        synth_generate(spec, str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_different_seeds_differ(self, tmp_path):
        base = dict(structure="voronoi", num_classes=6, dimensions=3,
                    num_examples=200, noise=0.1)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        synth_generate(SynthSpec(seed=1, **base), str(a))
        synth_generate(SynthSpec(seed=2, **base), str(b))
        assert a.read_bytes() != b.read_bytes()

    def test_gzip_output(self, tmp_path):
        spec = SynthSpec("voronoi", num_classes=4, dimensions=2, num_examples=50,
                         noise=0.1, seed=3)
        path = tmp_path / "data.txt.gz"
        synth_generate(spec, str(path))
        with gzip.open(path, "rt") as fh:
            assert len(fh.readlines()) == 50


class TestShape:
    def test_constant_feature_and_width(self):
        spec = SynthSpec("voronoi", num_classes=4, dimensions=5, num_examples=20,
                         noise=0.1, seed=0)
        data = generate_examples(spec)
        assert raw_feature_width(spec) == 6
        for x in data:
            assert x.indices[0] == 0 and x.values[0] == 1.0
            assert x.indices.size == 6

    def test_file_matches_in_memory_examples(self, tmp_path):
        spec = SynthSpec("zipf-tail", num_classes=10, dimensions=4, num_examples=100,
                         noise=0.1, seed=5)
        path = tmp_path / "d.txt"
        synth_generate(spec, str(path))
        from recalltree.data import read_examples
        from_file = read_examples(str(path))
        in_memory = generate_examples(spec)
        assert [x.label for x in from_file] == [x.label for x in in_memory]
        # file values go through %.6g, so compare loosely
        for a, b in zip(from_file[:10], in_memory[:10]):
            np.testing.assert_allclose(a.values, b.values, rtol=1e-4, atol=1e-5)


class TestVoronoi:
    def test_labels_match_nearest_center_oracle(self):
        spec = SynthSpec("voronoi", num_classes=8, dimensions=6, num_examples=500,
                         noise=0.3, seed=11)
        data = generate_examples(spec)
        centers = voronoi_centers(spec)
        points = np.stack([x.values[1:] for x in data]) / FEATURE_SCALE
        expected = nearest_center_labels(points, centers)
        assert [x.label for x in data] == expected.tolist()

    def test_zero_noise_is_trivially_learnable_by_oaa(self):
        spec = SynthSpec("voronoi", num_classes=6, dimensions=6, num_examples=3000,
                         noise=0.0, seed=2)
        data = generate_examples(spec)
        model = OaaModel(6, bits=14, adaptive_lr=True).train(data)
        assert accuracy(model, data) >= 0.99


class TestHierarchical:
    def test_zero_noise_partition_oracle_is_perfect(self):
        spec = SynthSpec("hierarchical-clusters", num_classes=64, dimensions=8,
                         num_examples=2000, noise=0.0, seed=5)
        data = generate_examples(spec)
        partition = hierarchical_oracle(spec)
        assert all(partition.classify(x.values[1:]) == x.label for x in data)

    def test_oracle_requires_matching_structure(self):
        spec = SynthSpec("voronoi", num_classes=4, dimensions=2, num_examples=10,
                         noise=0.0, seed=0)
        with pytest.raises(DomainError):
            hierarchical_oracle(spec)


class TestZipfTail:
    def test_rank_frequency_falls_like_inverse_rank(self):
        spec = SynthSpec("zipf-tail", num_classes=20, dimensions=3,
                         num_examples=40_000, noise=0.1, seed=9)
        counts = Counter(x.label for x in generate_examples(spec))
        ratio = counts[0] / counts[9]
        assert 6.0 < ratio < 16.0  # ideal is 10


class TestBlocks:
    def test_examples_arrive_sorted_by_label(self):
        spec = SynthSpec("nonstationary-blocks", num_classes=12, dimensions=3,
                         num_examples=1000, noise=0.2, seed=4)
        labels = [x.label for x in generate_examples(spec)]
        assert labels == sorted(labels)
        assert len(set(labels)) == 12
