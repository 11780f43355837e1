"""Reverse-mode autograd over 2-D float64 matrices.

Every value is a `Tensor` wrapping a numpy array. Operations build a graph of
parent links and backward closures; `backward(loss)` walks that graph once in
reverse topological order and accumulates adjoints into `.grad`. The op set is
closed and small: matrix products, elementwise arithmetic, activations,
row-stable softmax, gathers/stacks, and row/column reductions. Sparse
structure (adjacency, incidence, selector matrices) is constant data and never
receives gradients.
"""

import numpy as np

from ..errors import ContractError, ShapeError
from .sparse import SparseMatrix


class Tensor:
    """A 2-D double-precision matrix tracked by the autograd graph."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ShapeError(f"tensors are 2-D, got shape {arr.shape}")
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    def item(self):
        if self.data.size != 1:
            raise ShapeError(f"item() on non-scalar shape {self.shape}")
        return float(self.data[0, 0])

    def detach(self):
        """Plain ndarray copy, disconnected from the graph."""
        return self.data.copy()

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        tag = ", grad" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{tag})"

    def __add__(self, other):
        return add(self, _as_tensor(other))

    def __radd__(self, other):
        return add(_as_tensor(other), self)

    def __sub__(self, other):
        return sub(self, _as_tensor(other))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scale(self, other)
        return mul(self, _as_tensor(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        return div(self, _as_tensor(other))

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return scale(self, -1.0)


def _as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _make(data, parents, backward_fn):
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward_fn
    return out


def _accumulate(t, g):
    if not t.requires_grad:
        return
    t.grad = g if t.grad is None else t.grad + g


def _unbroadcast(g, shape):
    """Sum gradient g down to `shape` (inverse of numpy broadcasting)."""
    if g.shape == shape:
        return g
    out = g
    if shape[0] == 1 and g.shape[0] != 1:
        out = out.sum(axis=0, keepdims=True)
    if shape[1] == 1 and g.shape[1] != 1:
        out = out.sum(axis=1, keepdims=True)
    if out.shape != shape:
        raise ShapeError(f"cannot reduce grad {g.shape} to {shape}")
    return out


def _check_broadcast(a, b, opname):
    ra, ca = a.shape
    rb, cb = b.shape
    if (ra != rb and 1 not in (ra, rb)) or (ca != cb and 1 not in (ca, cb)):
        raise ShapeError(f"{opname}: shapes {a.shape} and {b.shape} do not align")


# ---------------------------------------------------------------------------
# arithmetic


def add(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast(a, b, "add")
    out_data = a.data + b.data

    def backward_fn(g):
        _accumulate(a, _unbroadcast(g, a.shape))
        _accumulate(b, _unbroadcast(g, b.shape))

    return _make(out_data, (a, b), backward_fn)


def sub(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast(a, b, "sub")
    out_data = a.data - b.data

    def backward_fn(g):
        _accumulate(a, _unbroadcast(g, a.shape))
        _accumulate(b, _unbroadcast(-g, b.shape))

    return _make(out_data, (a, b), backward_fn)


def mul(a, b):
    """Elementwise (Hadamard) product with row/column broadcasting."""
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast(a, b, "mul")
    out_data = a.data * b.data

    def backward_fn(g):
        _accumulate(a, _unbroadcast(g * b.data, a.shape))
        _accumulate(b, _unbroadcast(g * a.data, b.shape))

    return _make(out_data, (a, b), backward_fn)


def div(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast(a, b, "div")
    out_data = a.data / b.data

    def backward_fn(g):
        _accumulate(a, _unbroadcast(g / b.data, a.shape))
        _accumulate(b, _unbroadcast(-g * a.data / (b.data * b.data), b.shape))

    return _make(out_data, (a, b), backward_fn)


def scale(a, c):
    a = _as_tensor(a)
    c = float(c)
    out_data = a.data * c

    def backward_fn(g):
        _accumulate(a, g * c)

    return _make(out_data, (a,), backward_fn)


def maximum_scalar(a, c):
    """max(a, c) elementwise; gradient flows only where a > c."""
    a = _as_tensor(a)
    c = float(c)
    out_data = np.maximum(a.data, c)

    def backward_fn(g):
        _accumulate(a, g * (a.data > c))

    return _make(out_data, (a,), backward_fn)


# ---------------------------------------------------------------------------
# products


def matmul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    if a.cols != b.rows:
        raise ShapeError(f"matmul: inner dims {a.shape} x {b.shape}")
    out_data = a.data @ b.data

    def backward_fn(g):
        _accumulate(a, g @ b.data.T)
        _accumulate(b, a.data.T @ g)

    return _make(out_data, (a, b), backward_fn)


def spmm(s, d):
    """Sparse @ dense. The sparse side is constant; gradient flows to d only."""
    if not isinstance(s, SparseMatrix):
        raise ContractError("spmm expects a SparseMatrix left operand")
    d = _as_tensor(d)
    if s.cols != d.rows:
        raise ShapeError(f"spmm: inner dims {s.shape} x {d.shape}")
    out_data = s.csr @ d.data
    st = s.csr.T.tocsr()

    def backward_fn(g):
        _accumulate(d, st @ g)

    return _make(out_data, (d,), backward_fn)


# ---------------------------------------------------------------------------
# nonlinearities


def relu(a):
    a = _as_tensor(a)
    out_data = np.maximum(a.data, 0.0)

    def backward_fn(g):
        _accumulate(a, g * (a.data > 0.0))

    return _make(out_data, (a,), backward_fn)


def exp(a):
    a = _as_tensor(a)
    out_data = np.exp(a.data)

    def backward_fn(g):
        _accumulate(a, g * out_data)

    return _make(out_data, (a,), backward_fn)


def log(a):
    a = _as_tensor(a)
    out_data = np.log(a.data)

    def backward_fn(g):
        _accumulate(a, g / a.data)

    return _make(out_data, (a,), backward_fn)


def sqrt(a):
    a = _as_tensor(a)
    out_data = np.sqrt(a.data)

    def backward_fn(g):
        _accumulate(a, g * (0.5 / out_data))

    return _make(out_data, (a,), backward_fn)


def softmax_rows(a):
    """Row-wise softmax with max subtraction for overflow safety."""
    a = _as_tensor(a)
    shifted = a.data - a.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    out_data = e / e.sum(axis=1, keepdims=True)

    def backward_fn(g):
        s = out_data
        _accumulate(a, s * (g - (g * s).sum(axis=1, keepdims=True)))

    return _make(out_data, (a,), backward_fn)


def log_softmax_rows(a):
    a = _as_tensor(a)
    shifted = a.data - a.data.max(axis=1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    out_data = shifted - lse
    soft = np.exp(out_data)

    def backward_fn(g):
        _accumulate(a, g - soft * g.sum(axis=1, keepdims=True))

    return _make(out_data, (a,), backward_fn)


# ---------------------------------------------------------------------------
# structure


def transpose(a):
    a = _as_tensor(a)

    def backward_fn(g):
        _accumulate(a, g.T)

    return _make(a.data.T.copy(), (a,), backward_fn)


def row_gather(a, idx):
    """Select rows of a by an integer index array (repeats allowed)."""
    a = _as_tensor(a)
    idx = np.asarray(idx, dtype=np.intp)
    if idx.ndim != 1:
        raise ShapeError("row_gather: index must be 1-D")
    if idx.size and (idx.min() < 0 or idx.max() >= a.rows):
        raise ShapeError("row_gather: index out of range")
    out_data = a.data[idx]

    def backward_fn(g):
        ga = np.zeros_like(a.data)
        np.add.at(ga, idx, g)
        _accumulate(a, ga)

    return _make(out_data, (a,), backward_fn)


def vstack(tensors):
    """Stack tensors vertically; all must share the column count."""
    tensors = [_as_tensor(t) for t in tensors]
    if not tensors:
        raise ContractError("vstack of no tensors")
    ncols = tensors[0].cols
    if any(t.cols != ncols for t in tensors):
        raise ShapeError("vstack: column counts differ")
    out_data = np.vstack([t.data for t in tensors])
    offsets = np.cumsum([0] + [t.rows for t in tensors])

    def backward_fn(g):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            _accumulate(t, g[lo:hi])

    return _make(out_data, tuple(tensors), backward_fn)


# ---------------------------------------------------------------------------
# reductions


def sum_all(a):
    a = _as_tensor(a)
    out_data = np.array([[a.data.sum()]])

    def backward_fn(g):
        _accumulate(a, np.full_like(a.data, g[0, 0]))

    return _make(out_data, (a,), backward_fn)


def row_sum(a):
    """Sum along each row, returning an (n, 1) column."""
    a = _as_tensor(a)
    out_data = a.data.sum(axis=1, keepdims=True)

    def backward_fn(g):
        _accumulate(a, np.broadcast_to(g, a.shape).copy())

    return _make(out_data, (a,), backward_fn)


def mean_rows(a):
    """Mean over rows, returning a (1, c) row."""
    a = _as_tensor(a)
    if a.rows == 0:
        raise ContractError("mean_rows of empty tensor")
    out_data = a.data.mean(axis=0, keepdims=True)

    def backward_fn(g):
        _accumulate(a, np.broadcast_to(g / a.rows, a.shape).copy())

    return _make(out_data, (a,), backward_fn)


def _extreme_rows(a, argfn):
    a = _as_tensor(a)
    if a.rows == 0:
        raise ContractError("reduction over empty tensor")
    pick = argfn(a.data, axis=0)
    out_data = a.data[pick, np.arange(a.cols)].reshape(1, -1)

    def backward_fn(g):
        ga = np.zeros_like(a.data)
        ga[pick, np.arange(a.cols)] = g[0]
        _accumulate(a, ga)

    return _make(out_data, (a,), backward_fn)


def max_rows(a):
    """Columnwise max over rows; ties route the gradient to the first row."""
    return _extreme_rows(a, np.argmax)


def min_rows(a):
    return _extreme_rows(a, np.argmin)


# ---------------------------------------------------------------------------
# backward pass


def backward(loss):
    """Populate .grad for everything reachable from the scalar `loss`.

    Each recorded op's backward closure runs exactly once, in reverse
    topological order of the recorded graph.
    """
    if loss.data.shape != (1, 1):
        raise ContractError(f"backward needs a scalar loss, got {loss.shape}")
    order = []
    seen = set()
    stack = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))
    loss.grad = np.ones((1, 1))
    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)
