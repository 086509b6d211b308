import numpy as np
import pytest

from recalltree.data import SparseExample


def quadrant_examples(n: int, seed: int, margin: float = 0.1, scale: float = 1.0):
    """4-class toy: the label is the sign quadrant of two coordinates.

    Coordinates are pushed ``margin`` away from the axes so the problem is
    separable by construction; argmax over the four sign-pattern
    directions classifies it perfectly, which is the brute-force oracle.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, size=(n, 2))
    signs = np.sign(pts)
    signs[signs == 0] = 1
    pts = signs * (margin + (1 - margin) * np.abs(pts))
    labels = (pts[:, 0] > 0).astype(int) * 2 + (pts[:, 1] > 0).astype(int)
    idx = np.arange(2)
    return [SparseExample(int(labels[i]), idx, pts[i] * scale) for i in range(n)]


def accuracy(model, examples) -> float:
    return sum(model.predict(x) == x.label for x in examples) / len(examples)


@pytest.fixture
def tmp_dataset(tmp_path):
    def write(lines, name="data.txt"):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    return write
