"""Hashed weight stores and the importance-weighted binary logistic learner.

All routers share one store and all class scorers share another, so the
whole model costs a fixed ``2 * 2^bits`` floats regardless of the number
of classes or raw features.  Slots are assigned by the published
splitmix64 finalizer applied to ``mix(index) ^ salt(role, id)``, truncated
to the low ``bits`` bits; collisions within a store are accepted silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import SparseExample
from .errors import DomainError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

ROLE_ROUTER = "router"
ROLE_CLASS = "class"
_ROLE_CODE = {ROLE_ROUTER: 0, ROLE_CLASS: 1}

MARGIN_CLAMP = 50.0


def mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit unsigned integer (scalar)."""
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & _MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & _MASK64
    return x ^ (x >> 31)


def mix64_array(a: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer; input and output are uint64."""
    x = a.astype(np.uint64, copy=True)
    x += np.uint64(_GOLDEN)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
    return x ^ (x >> np.uint64(31))


@dataclass(frozen=True)
class ScorerKey:
    """Names one binary scorer inside a shared store: a router (by node id)
    or a class scorer (by class id)."""

    role: str
    id: int

    def salt(self) -> int:
        # splitmix64 is a bijection, so distinct (role, id) pairs get
        # distinct salts.
        return mix64((self.id << 1) | _ROLE_CODE[self.role])


def key_salt(role: str, ident: int) -> np.uint64:
    return np.uint64(mix64((ident << 1) | _ROLE_CODE[role]))


def slot(key: ScorerKey, feature_index: int, bits: int) -> int:
    """Deterministic slot of (key, feature) in a ``2^bits`` table."""
    if not 10 <= bits <= 30:
        raise DomainError(f"bits must be in [10, 30], got {bits}")
    return mix64(mix64(feature_index) ^ key.salt()) & ((1 << bits) - 1)


def slots_from_mixed(salt: np.uint64, mixed: np.ndarray, bits: int) -> np.ndarray:
    """Slots for pre-mixed feature indices under one key salt."""
    x = mixed ^ salt
    x += np.uint64(_GOLDEN)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
    x ^= x >> np.uint64(31)
    return (x & np.uint64((1 << bits) - 1)).astype(np.int64)


def slot_matrix(salts: np.ndarray, mixed: np.ndarray, bits: int) -> np.ndarray:
    """(len(salts), len(mixed)) slot table, one row per key salt."""
    x = mixed[None, :] ^ salts[:, None]
    x += np.uint64(_GOLDEN)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
    x ^= x >> np.uint64(31)
    return (x & np.uint64((1 << bits) - 1)).astype(np.int64)


class WeightStore:
    """A dense ``2^bits`` float32 table of weights shared by many scorers.

    ``adaptive`` turns on an AdaGrad-style per-slot accumulator; it is off
    by default so runs are exactly reproducible, and the accumulator is
    transient (not persisted with the model).
    """

    def __init__(self, bits: int, learning_rate: float = 1.0, adaptive: bool = False):
        if not 10 <= bits <= 30:
            raise DomainError(f"bits must be in [10, 30], got {bits}")
        if not (np.isfinite(learning_rate) and learning_rate > 0):
            raise DomainError("learning_rate must be a positive finite real")
        self.bits = bits
        self.learning_rate = float(learning_rate)
        self.adaptive = bool(adaptive)
        self.weights = np.zeros(1 << bits, dtype=np.float32)
        self._grad_sq = np.zeros(1 << bits, dtype=np.float64) if adaptive else None

    def size(self) -> int:
        return self.weights.size

    def margin_at(self, slots: np.ndarray, values: np.ndarray) -> float:
        return float(np.dot(self.weights[slots].astype(np.float64), values))

    def learn_at(self, slots: np.ndarray, values: np.ndarray, importance: float, label: int) -> None:
        """One logistic SGD step on the scorer whose slots are given.

        The gradient scale uses the pre-update margin, clamped to
        ±MARGIN_CLAMP before the sigmoid so weights stay finite.
        """
        if not math.isfinite(importance):
            raise DomainError(f"importance must be finite, got {importance}")
        if importance < 0:
            raise DomainError(f"importance must be non-negative, got {importance}")
        if importance == 0.0 or slots.size == 0:
            return
        m = self.margin_at(slots, values)
        m = max(-MARGIN_CLAMP, min(MARGIN_CLAMP, m))
        g = 1.0 / (1.0 + math.exp(label * m))  # sigmoid(-label * m)
        deltas = (self.learning_rate * importance * label * g) * values
        if self.adaptive:
            grads = (importance * label * g) * values
            np.add.at(self._grad_sq, slots, grads * grads)
            deltas = (self.learning_rate * grads) / (np.sqrt(self._grad_sq[slots]) + 1e-12)
        np.add.at(self.weights, slots, deltas.astype(np.float32))

    def batch_margins(self, slots: np.ndarray, values: np.ndarray) -> np.ndarray:
        """Margins for many scorers at once; ``slots`` is (n_keys, n_feats)."""
        return self.weights[slots].astype(np.float64) @ values

    def batch_learn(self, slots: np.ndarray, values: np.ndarray, labels: np.ndarray,
                    importance: float = 1.0) -> None:
        """Logistic steps for many scorers of one example.

        All pre-update margins are read first, then every delta is applied,
        so the result does not depend on scorer order except through float
        accumulation at colliding slots.
        """
        if importance == 0.0 or slots.size == 0:
            return
        m = np.clip(self.batch_margins(slots, values), -MARGIN_CLAMP, MARGIN_CLAMP)
        g = 1.0 / (1.0 + np.exp(labels * m))
        scale = self.learning_rate * importance * labels * g
        deltas = scale[:, None] * values[None, :]
        if self.adaptive:
            grads = (importance * labels * g)[:, None] * values[None, :]
            np.add.at(self._grad_sq, slots.ravel(), (grads * grads).ravel())
            deltas = self.learning_rate * grads / (np.sqrt(self._grad_sq[slots]) + 1e-12)
        np.add.at(self.weights, slots.ravel(), deltas.ravel().astype(np.float32))


def _example_slots(store: WeightStore, key: ScorerKey, x: SparseExample) -> np.ndarray:
    mixed = mix64_array(x.indices.astype(np.uint64))
    return slots_from_mixed(np.uint64(key.salt()), mixed, store.bits)


def margin(store: WeightStore, key: ScorerKey, x: SparseExample) -> float:
    """Sum of value * weight over the example's features; duplicates add."""
    if x.indices.size == 0:
        return 0.0
    return store.margin_at(_example_slots(store, key, x), x.values)


def learn(store: WeightStore, key: ScorerKey, x: SparseExample,
          importance: float, label: int) -> None:
    """Importance-weighted logistic update of one scorer on one example.

    ``label`` is +1 or -1; ``importance == 0`` is a no-op.
    """
    if label not in (1, -1):
        raise DomainError(f"label must be +1 or -1, got {label}")
    if not math.isfinite(importance):
        raise DomainError(f"importance must be finite, got {importance}")
    if importance == 0.0 or x.indices.size == 0:
        return
    store.learn_at(_example_slots(store, key, x), x.values, importance, label)
