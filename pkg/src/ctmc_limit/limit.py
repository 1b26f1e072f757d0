"""Direct computation of ``P = lim_{t->oo} exp(tB)``.

Each closed class contributes a stationary row vector; each transient state
mixes those vectors with its probabilities of entering each class.  States
are never permuted into block form, all block operations gather and scatter
by index set.
"""

from dataclasses import dataclass

import numpy as np

from .chain import ClassStructure, classify_states
from .errors import NumericalDegeneracyError
from .linalg import left_null_vector, lu_factor, solve

CLAMP_TOL = 1e-12
NULL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class StationaryVector:
    class_id: int
    p: np.ndarray


@dataclass(frozen=True, eq=False)
class AbsorptionTable:
    """Probabilities ``f[a, k]`` of moving from ``transient[a]`` into ``classes[k]``."""

    transient: tuple
    f: np.ndarray

    def __getitem__(self, key):
        i, class_id = key
        return float(self.f[self.transient.index(i), class_id])

    def as_dict(self):
        return {i: {k: float(v) for k, v in enumerate(row)}
                for i, row in zip(self.transient, self.f)}


@dataclass(frozen=True, eq=False)
class FinalLimit:
    p: np.ndarray
    structure: ClassStructure
    stationary: tuple
    absorption: AbsorptionTable

    def violations(self, b, tol=1e-9):
        """List the limit properties that `p` fails for intensity matrix `b`.

        Checked: stochastic rows (within 1e-12), zero transient columns,
        identical rows within each class, ``P P = P`` and ``P B = B P = 0``.
        """
        p, bm = self.p, b.b
        out = []
        if p.min() < 0 or np.max(np.abs(p.sum(axis=1) - 1.0)) > 1e-12:
            out.append("not stochastic")
        if self.structure.transient and np.any(p[:, list(self.structure.transient)]):
            out.append("non-zero transient column")
        for members in self.structure.classes:
            rows = p[list(members)]
            if np.any(rows != rows[0]):
                out.append("unequal rows within a class")
        if np.max(np.abs(p @ p - p)) > tol:
            out.append("not idempotent")
        bmax = np.max(np.abs(bm))
        if np.max(np.abs(p @ bm)) > tol * bmax or np.max(np.abs(bm @ p)) > tol * bmax:
            out.append("does not annihilate B")
        return out


def _clamp(v, what):
    if v.min() < -CLAMP_TOL:
        raise NumericalDegeneracyError(f"{what} has negative entry {v.min():.3g}")
    return np.where(v < 0, 0.0, v)


def stationary_distribution(b, s, class_id):
    """Stationary vector of one recurrence class, embedded at full length."""
    members = list(s.classes[class_id])
    x = left_null_vector(b.b[np.ix_(members, members)], NULL_TOL)
    x = x / x.sum()
    if np.any(x <= 0):
        raise NumericalDegeneracyError(
            f"stationary vector of class {class_id} has non-positive entry {x.min():.3g}")
    p = np.zeros(b.n)
    p[members] = x
    p.setflags(write=False)
    return StationaryVector(class_id, p)


def _transient_factor(b, s):
    t = list(s.transient)
    return lu_factor(b.b[np.ix_(t, t)], name="B_T (transient block)")


def _absorption(b, s, class_id, factor):
    t = list(s.transient)
    rhs = -b.b[np.ix_(t, list(s.classes[class_id]))].sum(axis=1)
    return _clamp(solve(factor, rhs), f"absorption vector of class {class_id}")


def absorption_vector(b, s, class_id):
    """Probabilities of entering class `class_id` from each transient state.

    Solves ``B_T f = -B_{T,J} 1`` by LU; ordered like ``s.transient``.
    """
    if not s.transient:
        raise ValueError("no transient states")
    return _absorption(b, s, class_id, _transient_factor(b, s))


def final_limit(b, structure=None):
    """Limit of the transition matrix of intensity matrix `b`.

    Follows the direct construction: every row of a class ``J`` equals its
    stationary vector ``p_J``, and a transient row ``i`` gets
    ``p_ij = f_{i,J} p_jj`` for each class ``J`` and ``j`` in ``J``.
    """
    s = structure if structure is not None else classify_states(b)
    p = np.zeros((b.n, b.n))
    stationary = []
    for k, members in enumerate(s.classes):
        sv = stationary_distribution(b, s, k)
        stationary.append(sv)
        p[list(members)] = sv.p

    f = np.zeros((len(s.transient), len(s.classes)))
    if s.transient:
        factor = _transient_factor(b, s)
        t = list(s.transient)
        for k, members in enumerate(s.classes):
            f[:, k] = _absorption(b, s, k, factor)
            for j in members:
                p[t, j] = f[:, k] * p[j, j]

    for a in (p, f):
        a.setflags(write=False)
    return FinalLimit(p=p, structure=s, stationary=tuple(stationary),
                      absorption=AbsorptionTable(s.transient, f))
