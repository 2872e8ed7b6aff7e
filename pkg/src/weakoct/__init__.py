"""weakoct: a sparse octagon abstract domain on weakly closed DBMs.

The sparse representation never materializes the strengthening step of the
classic strong closure; comparison, join, forget, constraint insertion and
integer tightening all work directly on weakly closed matrices and preserve
their sparsity without losing precision.  A dense reference implementation
(:mod:`weakoct.dense`) serves as the correctness oracle, a small abstract
interpreter (:mod:`weakoct.analyzer`) as the end-to-end client, and
:mod:`weakoct.bench` quantifies the sparsity/scaling behaviour.
"""

from .core import EMPTY, INF, Bound, Constraint, Mode, bar, neg, pos
from .domain import ConstRhs, Nondet, OctValue, VarRhs, WidenConfig
from .sparse import SparseDbm

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "INF",
    "Bound",
    "Constraint",
    "Mode",
    "OctValue",
    "SparseDbm",
    "WidenConfig",
    "ConstRhs",
    "VarRhs",
    "Nondet",
    "bar",
    "neg",
    "pos",
    "__version__",
]
