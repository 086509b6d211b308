"""The recall tree: a dynamically grown binary tree of routers that whittles
K classes down to a small high-recall candidate set, plus one-against-some
scorers that pick the final class from that set.

Training and prediction both descend from the root.  At each node the
router (a hashed binary logistic scorer) picks a child; descent halts when
an empirical Bernstein lower bound on the node's candidate-set recall stops
improving, when a child has never been visited, or at the depth cap.  The
halting node's candidate set (its top-F most frequent labels) is scored by
per-class scorers and the argmax wins, so the work per example stays
O(log K) instead of O(K).

Routers are trained toward the side that lowers the expected label entropy
(base-2) after routing; class scorers get a one-against-all update
restricted to the halting node's candidates.  When path features are on,
each traversed node appends an indicator feature so downstream linear
scorers can express tree-shaped decision boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import SparseExample
from .errors import DomainError, UntrainedModelError
from .linear import (
    ROLE_ROUTER,
    WeightStore,
    key_salt,
    mix64,
    mix64_array,
    slot_matrix,
    slots_from_mixed,
)

_LOG2 = math.log2
_NEG_INF = float("-inf")

# Entropy differences below this are treated as zero: no router update.
MIN_ROUTER_IMPORTANCE = 1e-12

ROUTER_SIGN_CORRECTED = "corrected"
ROUTER_SIGN_PAPER_LITERAL = "literal"
_ROUTER_SIGNS = (ROUTER_SIGN_CORRECTED, ROUTER_SIGN_PAPER_LITERAL)


def ceil_log2(n: int) -> int:
    """Smallest d with 2^d >= n; 0 for n <= 1."""
    if n <= 1:
        return 0
    return (n - 1).bit_length()


@dataclass(frozen=True)
class Hyperparams:
    """Knobs of the model.  ``defaults`` reproduces the stock settings:
    depth capped at log2(K), 4*log2(K) candidates per node, unit depth
    penalty and learning rate, logistic loss."""

    max_depth: int
    num_candidates: int
    depth_penalty: float = 1.0
    bits: int = 24
    learning_rate: float = 1.0
    path_features: bool = True
    bernstein_multiplier: float = 1.0
    router_sign: str = ROUTER_SIGN_CORRECTED
    adaptive_lr: bool = False

    def __post_init__(self):
        if self.max_depth < 0:
            raise DomainError("max_depth must be >= 0")
        if self.num_candidates < 1:
            raise DomainError("num_candidates must be >= 1")
        if self.depth_penalty < 0:
            raise DomainError("depth_penalty must be >= 0")
        if not 10 <= self.bits <= 30:
            raise DomainError("bits must be in [10, 30]")
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise DomainError("learning_rate must be positive")
        if not (math.isfinite(self.bernstein_multiplier) and self.bernstein_multiplier >= 0):
            raise DomainError("bernstein_multiplier must be >= 0")
        if self.router_sign not in _ROUTER_SIGNS:
            raise DomainError(f"router_sign must be one of {_ROUTER_SIGNS}")

    @classmethod
    def defaults(cls, num_classes: int, **overrides) -> "Hyperparams":
        base = dict(
            max_depth=ceil_log2(num_classes),
            num_candidates=max(1, math.ceil(4 * math.log2(num_classes))) if num_classes > 1 else 1,
        )
        base.update(overrides)
        return cls(**base)


@dataclass
class TreeNode:
    """One tree node: label histogram, top-F candidate set, and counters.

    ``sum_clog2`` caches sum(c * log2(c)) over histogram counts so label
    entropy (and entropy with one extra observation) is O(1) per query.
    """

    id: int
    depth: int
    parent: int | None = None
    left: int | None = None
    right: int | None = None
    hist: dict[int, int] = field(default_factory=dict)
    total: int = 0
    sum_clog2: float = 0.0
    candidates: list[int] = field(default_factory=list)
    cand_total: int = 0

    @property
    def r_hat(self) -> float:
        """Empirical candidate-set recall: fraction of labels seen at this
        node that fall in the current top-F."""
        return self.cand_total / self.total if self.total else 0.0

    @property
    def has_children(self) -> bool:
        return self.left is not None


def node_entropy(node: TreeNode, extra: int | None = None) -> float:
    """Empirical label entropy at a node, in bits.

    With ``extra`` given, the entropy is computed as if one more
    observation of that class had arrived.  An empty node has entropy 0,
    with or without the extra point mass.
    """
    total = node.total
    s = node.sum_clog2
    if extra is not None:
        c = node.hist.get(extra, 0)
        s += (c + 1) * _LOG2(c + 1) - (c * _LOG2(c) if c else 0.0)
        total += 1
    if total == 0:
        return 0.0
    h = _LOG2(total) - s / total
    return h if h > 0.0 else 0.0


def _beats(node: TreeNode, a: int, b: int) -> bool:
    # candidate ordering: larger count first, ties to the smaller class id
    ca, cb = node.hist[a], node.hist[b]
    return ca > cb or (ca == cb and a < b)


def update_candidates(node: TreeNode, label: int, num_candidates: int) -> None:
    """Count ``label`` at the node and restore the top-F candidate list.

    A single increment can only promote one class, so the ordered list is
    repaired in O(F) without a full re-sort.
    """
    c = node.hist.get(label, 0)
    node.hist[label] = c + 1
    node.total += 1
    node.sum_clog2 += (c + 1) * _LOG2(c + 1) - (c * _LOG2(c) if c else 0.0)

    cands = node.candidates
    if label in cands:
        i = cands.index(label)
    elif len(cands) < num_candidates:
        cands.append(label)
        i = len(cands) - 1
    elif _beats(node, label, cands[-1]):
        cands[-1] = label
        i = len(cands) - 1
    else:
        node.cand_total = sum(node.hist[c] for c in cands)
        return
    while i > 0 and _beats(node, cands[i], cands[i - 1]):
        cands[i], cands[i - 1] = cands[i - 1], cands[i]
        i -= 1
    node.cand_total = sum(node.hist[c] for c in cands)


def recall_lower_bound(node: TreeNode, depth_penalty: float, multiplier: float) -> float:
    """Empirical Bernstein lower confidence bound on the node's true recall.

    Returns -inf for a never-visited node so it is never preferred over its
    parent; with multiplier 0 it degenerates to the raw empirical recall.
    """
    m = node.total
    if m == 0:
        return _NEG_INF
    r = node.cand_total / m
    if multiplier == 0.0:
        return r
    var = r * (1.0 - r)
    if var < 0.0:
        var = 0.0
    return r - multiplier * (math.sqrt(depth_penalty * var / m) + depth_penalty / m)


def plurality_label(node: TreeNode) -> int:
    """Most frequent label at the node, ties to the smaller class id."""
    if not node.hist:
        raise DomainError(f"node {node.id} has an empty histogram")
    return max(node.hist.items(), key=lambda kv: (kv[1], -kv[0]))[0]


def path_feature_index(node_id: int, num_raw_features: int) -> int:
    """Raw-space index of a node's traversal indicator: a reserved block
    just past the declared data features, disjoint from them by
    construction."""
    return num_raw_features + node_id


def path_feature(node_id: int, num_raw_features: int) -> tuple[int, float]:
    return path_feature_index(node_id, num_raw_features), 1.0


@dataclass
class Prediction:
    """A predicted class plus the work done to produce it."""

    label: int
    classes_scored: int
    router_evals: int
    node_id: int
    depth: int


class RecallTreeModel:
    """Online multiclass learner with polylogarithmic work per example."""

    def __init__(self, num_classes: int, num_raw_features: int,
                 params: Hyperparams | None = None):
        if num_classes < 1:
            raise DomainError("num_classes must be >= 1")
        if num_raw_features < 0:
            raise DomainError("num_raw_features must be >= 0")
        self.num_classes = num_classes
        self.num_raw_features = num_raw_features
        self.params = params if params is not None else Hyperparams.defaults(num_classes)
        self.router_store = WeightStore(self.params.bits, self.params.learning_rate,
                                        self.params.adaptive_lr)
        self.class_store = WeightStore(self.params.bits, self.params.learning_rate,
                                       self.params.adaptive_lr)
        self.nodes: list[TreeNode] = [TreeNode(id=0, depth=0)]
        self._router_salts: list[np.uint64] = [key_salt(ROLE_ROUTER, 0)]
        ids = (np.arange(num_classes, dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
        self._class_salts = mix64_array(ids)
        self.examples_seen = 0

    # -- structure ---------------------------------------------------------

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    def is_leaf(self, node: TreeNode) -> bool:
        return node.left is None or node.depth >= self.params.max_depth

    def bound(self, node: TreeNode) -> float:
        return recall_lower_bound(node, self.params.depth_penalty,
                                  self.params.bernstein_multiplier)

    def _materialize(self, node: TreeNode) -> None:
        # children exist only below the depth cap; created on first router
        # update so the tree grows along the data distribution
        nid = len(self.nodes)
        self.nodes.append(TreeNode(id=nid, depth=node.depth + 1, parent=node.id))
        self.nodes.append(TreeNode(id=nid + 1, depth=node.depth + 1, parent=node.id))
        self._router_salts.append(key_salt(ROLE_ROUTER, nid))
        self._router_salts.append(key_salt(ROLE_ROUTER, nid + 1))
        node.left = nid
        node.right = nid + 1

    # -- feature plumbing ---------------------------------------------------

    def _check_features(self, x: SparseExample) -> None:
        if x.indices.size and int(x.indices.max()) >= self.num_raw_features:
            raise DomainError(
                f"feature index {int(x.indices.max())} outside the declared "
                f"raw feature space of width {self.num_raw_features}"
            )

    def _buffers(self, x: SparseExample) -> tuple[np.ndarray, np.ndarray, int]:
        nnz = x.indices.size
        cap = nnz + self.params.max_depth + 1
        mixed = np.empty(cap, dtype=np.uint64)
        values = np.empty(cap, dtype=np.float64)
        if nnz:
            mixed[:nnz] = mix64_array(x.indices.astype(np.uint64))
            values[:nnz] = x.values
        return mixed, values, nnz

    def _append_path_feature(self, mixed: np.ndarray, values: np.ndarray,
                             n: int, node_id: int) -> int:
        mixed[n] = mix64(path_feature_index(node_id, self.num_raw_features))
        values[n] = 1.0
        return n + 1

    # -- learning ------------------------------------------------------------

    def _update_router(self, node: TreeNode, mixed: np.ndarray, values: np.ndarray,
                       y: int, importance: float) -> np.ndarray:
        """Entropy-objective router update; returns the router's slots so the
        caller can route with the post-update weights."""
        slots = slots_from_mixed(self._router_salts[node.id], mixed, self.params.bits)
        left = self.nodes[node.left]
        right = self.nodes[node.right]
        if node.total == 0:
            return slots
        h_left = node_entropy(left)
        h_left_y = node_entropy(left, y)
        h_right = node_entropy(right)
        h_right_y = node_entropy(right, y)
        w_left = left.total / node.total
        w_right = right.total / node.total
        h_if_left = w_left * h_left_y + w_right * h_right
        h_if_right = w_left * h_left + w_right * h_right_y
        delta = h_if_left - h_if_right
        if abs(delta) < MIN_ROUTER_IMPORTANCE:
            return slots
        # train toward the side whose choice lowers expected entropy; the
        # literal variant keeps the raw sign of the difference instead
        label = -1 if delta > 0 else 1
        if self.params.router_sign == ROUTER_SIGN_PAPER_LITERAL:
            label = -label
        self.router_store.learn_at(slots, values, importance * abs(delta), label)
        return slots

    def _update_predictors(self, node: TreeNode, mixed: np.ndarray,
                           values: np.ndarray, y: int, importance: float) -> None:
        """One-against-all step restricted to the node's candidates; no
        update at all when the true label is not among them."""
        cands = node.candidates
        if y not in cands:
            return
        ids = sorted(cands)
        slots = slot_matrix(self._class_salts[np.array(ids, dtype=np.int64)],
                            mixed, self.params.bits)
        labels = np.where(np.array(ids) == y, 1.0, -1.0)
        self.class_store.batch_learn(slots, values, labels, importance)

    def train_example(self, x: SparseExample) -> None:
        y = x.label
        if y >= self.num_classes:
            raise DomainError(f"label {y} out of range for {self.num_classes} classes")
        self._check_features(x)
        mixed, values, n = self._buffers(x)
        params = self.params

        node = self.root
        update_candidates(node, y, params.num_candidates)
        while node.depth < params.max_depth:
            if node.left is None:
                self._materialize(node)
            slots = self._update_router(node, mixed[:n], values[:n], y, x.importance)
            routed = self.router_store.margin_at(slots, values[:n])
            child = self.nodes[node.left if routed > 0 else node.right]
            update_candidates(child, y, params.num_candidates)
            if self.bound(node) > self.bound(child):
                break
            node = child
            if params.path_features:
                n = self._append_path_feature(mixed, values, n, node.id)
        self._update_predictors(node, mixed[:n], values[:n], y, x.importance)
        self.examples_seen += 1

    def train(self, examples) -> "RecallTreeModel":
        for x in examples:
            self.train_example(x)
        return self

    # -- inference -----------------------------------------------------------

    def _descend(self, mixed: np.ndarray, values: np.ndarray, n: int) -> tuple[TreeNode, int, int]:
        """Route to the halting node without learning.  Returns the node,
        the number of router evaluations, and the augmented feature count."""
        params = self.params
        node = self.root
        router_evals = 0
        while node.depth < params.max_depth and node.left is not None:
            slots = slots_from_mixed(self._router_salts[node.id], mixed[:n], params.bits)
            routed = self.router_store.margin_at(slots, values[:n])
            router_evals += 1
            child = self.nodes[node.left if routed > 0 else node.right]
            if self.bound(node) > self.bound(child):
                break
            node = child
            if params.path_features:
                n = self._append_path_feature(mixed, values, n, node.id)
        return node, router_evals, n

    def predict_full(self, x: SparseExample) -> Prediction:
        if self.examples_seen == 0:
            raise UntrainedModelError("model has seen no training examples")
        self._check_features(x)
        mixed, values, n = self._buffers(x)
        node, router_evals, n = self._descend(mixed, values, n)
        cands = node.candidates
        assert len(cands) <= self.params.num_candidates
        if not cands:
            return Prediction(0, 0, router_evals, node.id, node.depth)
        ids = sorted(cands)
        slots = slot_matrix(self._class_salts[np.array(ids, dtype=np.int64)],
                            mixed[:n], self.params.bits)
        margins = self.class_store.batch_margins(slots, values[:n])
        # argmax takes the first maximum, and ids ascend, so ties go to the
        # smaller class id
        label = ids[int(np.argmax(margins))]
        return Prediction(label, len(ids), router_evals, node.id, node.depth)

    def predict(self, x: SparseExample) -> int:
        return self.predict_full(x).label

    def halting_node(self, x: SparseExample) -> TreeNode:
        """The node where a frozen descent stops for this example."""
        if self.examples_seen == 0:
            raise UntrainedModelError("model has seen no training examples")
        self._check_features(x)
        mixed, values, n = self._buffers(x)
        node, _, _ = self._descend(mixed, values, n)
        return node
