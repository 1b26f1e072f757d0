"""Intensity matrices, their embedded jump chain, and state classification."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidRateError, InvalidRowSumError, ShapeError
from .linalg import as_matrix

VALIDATION_TOL = 1e-9


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class IntensityMatrix:
    """A validated right intensity matrix.

    Off-diagonal entries are non-negative and every diagonal entry equals the
    negated sum of the off-diagonal entries in its row.  Build instances with
    :func:`validate`.
    """

    b: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "b", _frozen(self.b))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @property
    def n(self):
        return self.b.shape[0]

    def label(self, i):
        return self.labels[i] if self.labels is not None else str(i)

    def __eq__(self, other):
        if not isinstance(other, IntensityMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.b, other.b)

    __hash__ = None


def validate(raw, tol=VALIDATION_TOL, labels=None):
    """Check that `raw` is a right intensity matrix and normalize it.

    Off-diagonal entries in ``[-tol, 0)`` are set to zero; anything more
    negative is rejected.  A row is rejected when its sum deviates from zero
    by more than ``tol * n * max|raw|``.  The diagonal of the result is
    recomputed from the off-diagonal entries so row sums vanish exactly.
    """
    b = as_matrix(raw, "intensity matrix")
    n, m = b.shape
    if n != m:
        raise ShapeError(f"intensity matrix must be square, got {b.shape}")
    if labels is not None:
        labels = tuple(labels)
        if len(labels) != n:
            raise ShapeError(f"{len(labels)} labels for {n} states")
        if len(set(labels)) != n:
            raise ShapeError("state labels must be unique")

    off = ~np.eye(n, dtype=bool)
    bad = np.argwhere(off & (b < -tol))
    if len(bad):
        i, j = (int(v) for v in bad[0])
        raise InvalidRateError(i, j, float(b[i, j]))

    row_tol = tol * n * np.max(np.abs(b))
    sums = b.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums) > row_tol)
    if len(bad):
        raise InvalidRowSumError(int(bad[0]), float(sums[bad[0]]))

    b[off & (b < 0)] = 0.0
    np.fill_diagonal(b, 0.0)
    np.fill_diagonal(b, -b.sum(axis=1))
    return IntensityMatrix(b, labels)


def transpose(raw):
    """Turn a column-convention (zero column sums) matrix into row convention."""
    return np.asarray(raw, dtype=np.float64).T.copy()


@dataclass(frozen=True, eq=False)
class EmbeddedChain:
    """Holding rates `d` and jump matrix `q` with ``B = D Q - D``."""

    d: np.ndarray
    q: np.ndarray
    zero_rate_mask: np.ndarray

    def __post_init__(self):
        for name in ("d", "q", "zero_rate_mask"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def reconstruct(self):
        return self.d[:, None] * self.q - np.diag(self.d)


def embedded_chain(b):
    """Split `b` into exponential holding rates and a stochastic jump matrix.

    States with ``b_ii == 0`` get rate one and a self-loop ``q_ii = 1``; every
    other state has ``q_ii = 0`` and ``q_ij = b_ij / -b_ii``.
    """
    bm = b.b
    diag = np.diag(bm)
    zero = diag == 0.0
    d = np.where(zero, 1.0, -diag)
    q = bm / d[:, None]
    np.fill_diagonal(q, np.where(zero, 1.0, 0.0))
    return EmbeddedChain(d=d, q=q, zero_rate_mask=zero)


def adjacency(b):
    """Boolean graph with an edge ``i -> j`` iff ``i != j`` and ``b_ij > 0``."""
    bm = b.b if isinstance(b, IntensityMatrix) else np.asarray(b)
    adj = bm > 0
    np.fill_diagonal(adj, False)
    return adj


def reachability_closure(adj):
    """Transitive closure of paths of length >= 1 (Warshall, boolean)."""
    r = np.array(adj, dtype=bool)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ShapeError(f"adjacency must be square, got {r.shape}")
    for k in range(r.shape[0]):
        r |= np.outer(r[:, k], r[k, :])
    return r


@dataclass(frozen=True)
class ClassStructure:
    """Recurrence classes and transient states of an index set.

    ``class_of[i]`` is the position of state ``i``'s class in `classes`, or
    ``-1`` for a transient state.
    """

    classes: tuple
    transient: tuple
    class_of: tuple = field(repr=False)

    @property
    def n(self):
        return len(self.class_of)

    @property
    def recurrent(self):
        return tuple(sorted(i for c in self.classes for i in c))


def communicating_classes(adj):
    """Partition the nodes of `adj` into mutually reachable groups.

    Returns ``(classes, closed)`` where `classes` is ordered by smallest
    member and ``closed[k]`` tells whether no edge leaves ``classes[k]``.
    """
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    reach = reachability_closure(adj)
    mutual = (reach & reach.T) | np.eye(n, dtype=bool)
    seen = np.zeros(n, dtype=bool)
    classes, closed = [], []
    for i in range(n):
        if seen[i]:
            continue
        members = np.flatnonzero(mutual[i])
        seen[members] = True
        inside = np.zeros(n, dtype=bool)
        inside[members] = True
        classes.append(tuple(int(j) for j in members))
        closed.append(not adj[np.ix_(inside, ~inside)].any())
    return classes, closed


def classify_states(b):
    """Split the states of `b` into closed communicating classes and the rest."""
    groups, closed = communicating_classes(adjacency(b))
    classes = tuple(g for g, c in zip(groups, closed) if c)
    class_of = [-1] * b.n
    for k, members in enumerate(classes):
        for i in members:
            class_of[i] = k
    transient = tuple(i for i in range(b.n) if class_of[i] < 0)
    return ClassStructure(classes=classes, transient=transient, class_of=tuple(class_of))
