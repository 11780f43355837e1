"""Numerical substrate: dense/sparse matrices, autograd tape, RNG, grad checks."""

from .tensor import (
    Tensor,
    add,
    backward,
    div,
    exp,
    log,
    log_softmax_rows,
    matmul,
    max_rows,
    maximum_scalar,
    mean_rows,
    min_rows,
    mul,
    relu,
    row_gather,
    row_sum,
    scale,
    softmax_rows,
    spmm,
    sqrt,
    sub,
    sum_all,
    transpose,
    vstack,
)
from .sparse import SparseMatrix
from .rng import Rng
from .gradcheck import central_difference_grads, grad_check

__all__ = [
    "Tensor",
    "SparseMatrix",
    "Rng",
    "add",
    "backward",
    "central_difference_grads",
    "div",
    "exp",
    "grad_check",
    "log",
    "log_softmax_rows",
    "matmul",
    "max_rows",
    "maximum_scalar",
    "mean_rows",
    "min_rows",
    "mul",
    "relu",
    "row_gather",
    "row_sum",
    "scale",
    "softmax_rows",
    "spmm",
    "sqrt",
    "sub",
    "sum_all",
    "transpose",
    "vstack",
]
