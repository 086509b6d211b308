"""Binary model persistence.

One container for both model types::

    magic "RCLT" | version u8 | model-type u8 | payload

The tree payload carries the hyperparameters, the node table (histograms
as sorted (class, count) pairs plus the ranked candidate list), and the
two weight stores; the one-against-all payload carries its class store
only.  Integers are little-endian fixed width; weight arrays are raw
little-endian float32.  Hyperparameter reals are stored as float64 so a
loaded model reproduces the original's predictions bit for bit.
"""

from __future__ import annotations

import math
import struct

import numpy as np

from .errors import CorruptedModelError, ModelFormatError, ModelTypeError
from .linear import ROLE_ROUTER, WeightStore, key_salt
from .oaa import OaaModel
from .tree import (
    ROUTER_SIGN_CORRECTED,
    ROUTER_SIGN_PAPER_LITERAL,
    Hyperparams,
    RecallTreeModel,
    TreeNode,
)

MAGIC = b"RCLT"
FORMAT_VERSION = 1
TYPE_RECALL_TREE = 1
TYPE_OAA = 2

_FLAG_PATH_FEATURES = 1
_FLAG_ROUTER_CORRECTED = 2
_FLAG_ADAPTIVE_LR = 4


def _write_store(fh, store: WeightStore) -> None:
    fh.write(struct.pack("<Bd", store.bits, store.learning_rate))
    fh.write(struct.pack("<Q", store.weights.size))
    fh.write(store.weights.astype("<f4", copy=False).tobytes())


def _read_exact(fh, n: int) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise CorruptedModelError(f"model file truncated: wanted {n} bytes, got {len(buf)}")
    return buf


def _read_struct(fh, fmt: str):
    return struct.unpack(fmt, _read_exact(fh, struct.calcsize(fmt)))


def _read_store(fh, adaptive: bool) -> WeightStore:
    bits, lr = _read_struct(fh, "<Bd")
    (length,) = _read_struct(fh, "<Q")
    if length != 1 << bits:
        raise CorruptedModelError(f"weight array length {length} does not match bits={bits}")
    store = WeightStore(bits, lr, adaptive)
    raw = _read_exact(fh, 4 * length)
    store.weights = np.frombuffer(raw, dtype="<f4").astype(np.float32).copy()
    return store


def _write_node(fh, node: TreeNode) -> None:
    fh.write(struct.pack(
        "<IiiiHQ",
        node.id,
        -1 if node.parent is None else node.parent,
        -1 if node.left is None else node.left,
        -1 if node.right is None else node.right,
        node.depth,
        node.total,
    ))
    fh.write(struct.pack("<I", len(node.hist)))
    for cls in sorted(node.hist):
        fh.write(struct.pack("<IQ", cls, node.hist[cls]))
    fh.write(struct.pack("<I", len(node.candidates)))
    for cls in node.candidates:
        fh.write(struct.pack("<I", cls))


def _read_node(fh) -> TreeNode:
    nid, parent, left, right, depth, total = _read_struct(fh, "<IiiiHQ")
    (hist_len,) = _read_struct(fh, "<I")
    hist: dict[int, int] = {}
    sum_clog2 = 0.0
    for _ in range(hist_len):
        cls, count = _read_struct(fh, "<IQ")
        hist[cls] = count
        if count:
            sum_clog2 += count * math.log2(count)
    (cand_len,) = _read_struct(fh, "<I")
    candidates = [_read_struct(fh, "<I")[0] for _ in range(cand_len)]
    node = TreeNode(
        id=nid, depth=depth,
        parent=None if parent < 0 else parent,
        left=None if left < 0 else left,
        right=None if right < 0 else right,
        hist=hist, total=total, sum_clog2=sum_clog2,
        candidates=candidates,
        cand_total=sum(hist[c] for c in candidates),
    )
    return node


def save_model(model, path: str) -> None:
    """Serialize a tree or one-against-all model."""
    if isinstance(model, RecallTreeModel):
        tag = TYPE_RECALL_TREE
    elif isinstance(model, OaaModel):
        tag = TYPE_OAA
    else:
        raise ModelTypeError(f"cannot serialize a {type(model).__name__}")

    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BB", FORMAT_VERSION, tag))
        if tag == TYPE_OAA:
            fh.write(struct.pack("<IQ", model.num_classes, model.examples_seen))
            _write_store(fh, model.class_store)
            return
        p = model.params
        flags = 0
        if p.path_features:
            flags |= _FLAG_PATH_FEATURES
        if p.router_sign == ROUTER_SIGN_CORRECTED:
            flags |= _FLAG_ROUTER_CORRECTED
        if p.adaptive_lr:
            flags |= _FLAG_ADAPTIVE_LR
        fh.write(struct.pack(
            "<IHIddBQQI",
            model.num_classes,
            p.max_depth,
            p.num_candidates,
            p.depth_penalty,
            p.bernstein_multiplier,
            flags,
            model.num_raw_features,
            model.examples_seen,
            len(model.nodes),
        ))
        for node in model.nodes:
            _write_node(fh, node)
        _write_store(fh, model.router_store)
        _write_store(fh, model.class_store)


def _check_header(fh) -> int:
    magic = _read_exact(fh, 4)
    if magic != MAGIC:
        raise ModelFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    version, tag = _read_struct(fh, "<BB")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {version}")
    if tag not in (TYPE_RECALL_TREE, TYPE_OAA):
        raise ModelFormatError(f"unknown model type tag {tag}")
    return tag


def _expect_eof(fh) -> None:
    if fh.read(1):
        raise CorruptedModelError("trailing bytes after model payload")


def _load_tree(fh) -> RecallTreeModel:
    (num_classes, max_depth, num_candidates, depth_penalty, multiplier,
     flags, num_raw_features, examples_seen, node_count) = _read_struct(fh, "<IHIddBQQI")
    nodes = [_read_node(fh) for _ in range(node_count)]
    adaptive = bool(flags & _FLAG_ADAPTIVE_LR)
    router_store = _read_store(fh, adaptive)
    class_store = _read_store(fh, adaptive)
    _expect_eof(fh)

    if not nodes or nodes[0].id != 0:
        raise CorruptedModelError("node table must start at the root (id 0)")
    for i, node in enumerate(nodes):
        if node.id != i:
            raise CorruptedModelError("node ids must be dense and in order")
        for ref in (node.parent, node.left, node.right):
            if ref is not None and not 0 <= ref < node_count:
                raise CorruptedModelError(f"node {i} references missing node {ref}")
    if router_store.bits != class_store.bits:
        raise CorruptedModelError("router and class stores must share one bit width")

    params = Hyperparams(
        max_depth=max_depth,
        num_candidates=num_candidates,
        depth_penalty=depth_penalty,
        bits=class_store.bits,
        learning_rate=class_store.learning_rate,
        path_features=bool(flags & _FLAG_PATH_FEATURES),
        bernstein_multiplier=multiplier,
        router_sign=ROUTER_SIGN_CORRECTED if flags & _FLAG_ROUTER_CORRECTED
        else ROUTER_SIGN_PAPER_LITERAL,
        adaptive_lr=adaptive,
    )
    model = RecallTreeModel(num_classes, num_raw_features, params)
    model.nodes = nodes
    model.router_store = router_store
    model.class_store = class_store
    model.examples_seen = examples_seen
    model._router_salts = [key_salt(ROLE_ROUTER, i) for i in range(node_count)]
    return model


def _load_oaa(fh) -> OaaModel:
    num_classes, examples_seen = _read_struct(fh, "<IQ")
    store = _read_store(fh, adaptive=False)
    _expect_eof(fh)
    model = OaaModel(num_classes, store.bits, store.learning_rate)
    model.class_store = store
    model.examples_seen = examples_seen
    return model


def load_model(path: str):
    """Load whichever model type the file holds."""
    with open(path, "rb") as fh:
        tag = _check_header(fh)
        return _load_tree(fh) if tag == TYPE_RECALL_TREE else _load_oaa(fh)


def load_recall_tree(path: str) -> RecallTreeModel:
    """Load a tree model; a one-against-all file is a type error."""
    with open(path, "rb") as fh:
        tag = _check_header(fh)
        if tag != TYPE_RECALL_TREE:
            raise ModelTypeError("file holds a one-against-all model, not a recall tree")
        return _load_tree(fh)


def load_oaa(path: str) -> OaaModel:
    """Load a one-against-all model; a tree file is a type error."""
    with open(path, "rb") as fh:
        tag = _check_header(fh)
        if tag != TYPE_OAA:
            raise ModelTypeError("file holds a recall tree, not a one-against-all model")
        return _load_oaa(fh)
