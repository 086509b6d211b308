"""One-against-all baseline on the same hashed feature space and base
learner as the tree, for statistical and computational comparison.  Every
prediction scores all K classes; every training example updates all K
scorers (one positive, K-1 negative)."""

from __future__ import annotations

import numpy as np

from .data import SparseExample
from .errors import DomainError, UntrainedModelError
from .linear import WeightStore, mix64_array, slot_matrix
from .tree import Prediction


class OaaModel:
    """Linear one-against-all over hashed features."""

    def __init__(self, num_classes: int, bits: int = 24, learning_rate: float = 1.0,
                 adaptive_lr: bool = False):
        if num_classes < 1:
            raise DomainError("num_classes must be >= 1")
        self.num_classes = num_classes
        self.class_store = WeightStore(bits, learning_rate, adaptive_lr)
        ids = (np.arange(num_classes, dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
        self._class_salts = mix64_array(ids)
        self._labels = np.empty(num_classes, dtype=np.float64)
        self.examples_seen = 0

    @property
    def bits(self) -> int:
        return self.class_store.bits

    @property
    def learning_rate(self) -> float:
        return self.class_store.learning_rate

    def _slots(self, x: SparseExample) -> np.ndarray:
        mixed = mix64_array(x.indices.astype(np.uint64))
        return slot_matrix(self._class_salts, mixed, self.class_store.bits)

    def train_example(self, x: SparseExample) -> None:
        y = x.label
        if y >= self.num_classes:
            raise DomainError(f"label {y} out of range for {self.num_classes} classes")
        labels = self._labels
        labels.fill(-1.0)
        labels[y] = 1.0
        self.class_store.batch_learn(self._slots(x), x.values, labels, x.importance)
        self.examples_seen += 1

    def train(self, examples) -> "OaaModel":
        for x in examples:
            self.train_example(x)
        return self

    def predict_full(self, x: SparseExample) -> Prediction:
        if self.examples_seen == 0:
            raise UntrainedModelError("model has seen no training examples")
        margins = self.class_store.batch_margins(self._slots(x), x.values)
        # ties go to the smaller class id via first-argmax
        label = int(np.argmax(margins))
        return Prediction(label, self.num_classes, 0, 0, 0)

    def predict(self, x: SparseExample) -> int:
        return self.predict_full(x).label

    def margins(self, x: SparseExample) -> np.ndarray:
        return self.class_store.batch_margins(self._slots(x), x.values)
