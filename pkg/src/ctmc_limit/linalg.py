"""Small dense real linear algebra kernel.

Matrices are plain ``float64`` numpy arrays of shape ``(rows, cols)``.  The
factorization and the solves are written out here (Doolittle elimination with
partial pivoting) so that singularity is *reported* rather than raised, which
lets callers name the submatrix that failed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNullSpaceError, ShapeError, SingularMatrixError

PIVOT_TOL = 1e-12


def as_matrix(a, name="matrix"):
    """Return `a` as a finite 2-D float64 array (a fresh copy)."""
    m = np.array(a, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ShapeError(f"{name} has non-finite entries")
    return m


def matmul(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


@dataclass(frozen=True)
class LuFactorization:
    """Packed result of :func:`lu_factor`, ``A[perm] = L @ U``.

    ``lu`` holds the strictly lower part of the unit lower triangular ``L``
    and the upper triangular ``U``.
    """

    perm: np.ndarray
    lu: np.ndarray
    singular: bool
    rcond: float
    name: str = "matrix"

    @property
    def n(self):
        return self.lu.shape[0]

    @property
    def lower(self):
        return np.tril(self.lu, -1) + np.eye(self.n)

    @property
    def upper(self):
        return np.triu(self.lu)

    def reconstruct(self):
        """Return ``A`` by undoing the row permutation of ``L @ U``."""
        a = np.empty_like(self.lu)
        a[self.perm] = self.lower @ self.upper
        return a


def lu_factor(a, pivot_tol=PIVOT_TOL, name="matrix"):
    """LU factorization with partial pivoting.

    A pivot is flagged singular when its magnitude is at most
    ``pivot_tol * max|a|``; elimination skips such columns so the
    factorization always completes.
    """
    lu = as_matrix(a, name)
    n, m = lu.shape
    if n != m:
        raise ShapeError(f"{name} must be square, got {lu.shape}")
    perm = np.arange(n)
    threshold = pivot_tol * np.max(np.abs(lu))
    singular = False
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        pivot = lu[k, k]
        if abs(pivot) <= threshold or pivot == 0.0:
            singular = True
            continue
        lu[k + 1:, k] /= pivot
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    diag = np.abs(np.diag(lu))
    rcond = 0.0 if singular or diag.max() == 0.0 else float(diag.min() / diag.max())
    perm.setflags(write=False)
    lu.setflags(write=False)
    return LuFactorization(perm=perm, lu=lu, singular=singular, rcond=rcond, name=name)


def solve(f, rhs):
    """Solve ``A x = rhs`` given ``f = lu_factor(A)``.

    `rhs` may be a vector or a matrix with ``n`` rows; the result has the
    same shape.
    """
    if f.singular:
        raise SingularMatrixError(f.name, f.rcond)
    rhs = np.asarray(rhs, dtype=np.float64)
    n = f.n
    if rhs.shape[0] != n:
        raise ShapeError(f"right-hand side has {rhs.shape[0]} rows, expected {n}")
    x = rhs[f.perm].astype(np.float64, copy=True)
    lu = f.lu
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] -= lu[i, i + 1:] @ x[i + 1:]
        x[i] /= lu[i, i]
    return x


def inverse(a, pivot_tol=PIVOT_TOL, name="matrix"):
    f = lu_factor(a, pivot_tol, name)
    return solve(f, np.eye(f.n))


def left_null_vector(a, tol=1e-9, pivot_tol=PIVOT_TOL):
    """Return ``x`` with ``x @ a ~ 0`` and ``sum(x) == 1``.

    The caller guarantees that `a` has a one-dimensional left null space.
    One equation of the transposed system ``a.T @ x = 0`` is swapped for the
    normalization ``sum(x) = 1``.  Candidate equations are tried in order of
    decreasing column magnitude, and the first one giving a non-singular
    system whose solution passes the residual check wins.

    Raises
    ------
    DegenerateNullSpaceError
        If no replacement gives an acceptable solution, e.g. when the null
        vector sums to zero or the nullity exceeds one.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ShapeError(f"matrix must be square, got {a.shape}")
    scale = np.max(np.sum(np.abs(a), axis=1))
    order = np.argsort(-np.sum(np.abs(a), axis=0), kind="stable")
    for k in order:
        system = a.T.copy()
        system[k, :] = 1.0
        f = lu_factor(system, pivot_tol)
        if f.singular:
            continue
        rhs = np.zeros(n)
        rhs[k] = 1.0
        x = solve(f, rhs)
        if np.max(np.abs(x @ a)) <= tol * scale * np.max(np.abs(x)):
            return x
    raise DegenerateNullSpaceError(
        f"no normalized left null vector found for {n}x{n} matrix")
