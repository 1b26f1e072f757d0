"""Independent approximations of the final limit.

* :func:`transition_matrix` -- ``exp(tB)`` by uniformization,
* :func:`resolvent` -- ``z (zI - B)^{-1}`` for real ``z > 0``,
* :func:`simulate` -- Monte Carlo of the jump process at a fixed horizon.
"""

import math
from dataclasses import dataclass

import numba
import numpy as np

from .chain import embedded_chain
from .errors import ConvergenceError, SingularMatrixError
from .linalg import lu_factor, solve

TAIL_TOL = 1e-14
# Poisson mean of one uniformization step before squaring kicks in.
STEP_MEAN = 8.0
HORIZON_CAP = 2.0 ** 20


def _uniformized_step(a, lam, tail_tol):
    """``sum_k Poisson(k; lam) a^k`` truncated once the tail mass < `tail_tol`."""
    n = a.shape[0]
    term = np.eye(n)
    w = math.exp(-lam)
    acc = w * term
    mass = w
    k = 0
    # the Poisson tail beyond lam + 40 sqrt(lam) + 40 is far below 1e-16
    kmax = int(lam + 40.0 * math.sqrt(lam) + 40.0)
    while 1.0 - mass >= tail_tol and k < kmax:
        k += 1
        term = term @ a
        w *= lam / k
        acc += w * term
        mass += w
    # spread the truncated tail over each row; entries move by at most tail_tol
    return acc / acc.sum(axis=1, keepdims=True)


def transition_matrix(b, t, tail_tol=TAIL_TOL):
    """Transition matrix ``exp(tB)`` of intensity matrix `b` at time `t`.

    With ``mu = max(-b_ii)`` the matrix ``A = I + B/mu`` is stochastic and
    ``exp(tB) = sum_k e^{-mu t} (mu t)^k / k! A^k``.  Large ``mu t`` is split
    into ``2^s`` equal steps whose results are squared back together; each
    step keeps at most `STEP_MEAN` expected jumps so its series stays short.
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    bm = b.b
    n = bm.shape[0]
    mu = float(np.max(-np.diag(bm)))
    if mu == 0.0 or t == 0:
        return np.eye(n)
    a = np.eye(n) + bm / mu
    a[a < 0] = 0.0
    lam = mu * t
    squarings = max(0, math.ceil(math.log2(lam / STEP_MEAN)))
    e = _uniformized_step(a, lam / 2.0 ** squarings, tail_tol)
    for _ in range(squarings):
        e = e @ e
    return e


def adaptive_horizon(b, tol=1e-10, cap=HORIZON_CAP):
    """Smallest ``t = 2^m >= 1`` with ``max|exp(2tB) - exp(tB)| <= tol``.

    Raises
    ------
    ConvergenceError
        When `t` would exceed `cap`.
    """
    t = 1.0
    e = transition_matrix(b, t)
    while True:
        e2 = e @ e
        if np.max(np.abs(e2 - e)) <= tol:
            return t
        t *= 2.0
        if t > cap:
            raise ConvergenceError(
                f"exp(tB) still moving by {np.max(np.abs(e2 - e)):.3g} at t = {cap:g}")
        e = e2


def resolvent(b, z):
    """``z (zI - B)^{-1}`` for real ``z > 0``, obtained by an LU solve."""
    if not z > 0:
        raise ValueError(f"z must be positive, got {z}")
    n = b.n
    f = lu_factor(z * np.eye(n) - b.b, name="zI - B")
    if f.singular:
        raise SingularMatrixError(f.name, f.rcond)
    return solve(f, z * np.eye(n))


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """State frequencies at the horizon, one row per start state."""

    empirical: np.ndarray
    counts: np.ndarray
    trajectories_per_start: int
    horizon: float
    seed: int


_U64 = np.uint64
_GAMMA = _U64(0x9E3779B97F4A7C15)
_M1 = _U64(0xBF58476D1CE4E5B9)
_M2 = _U64(0x94D049BB133111EB)
_SHIFT30 = _U64(30)
_SHIFT27 = _U64(27)
_SHIFT31 = _U64(31)
_SHIFT11 = _U64(11)
_INV53 = 1.0 / 9007199254740992.0


@numba.njit(cache=True)
def _mix(z):
    # SplitMix64 finalizer
    z = (z ^ (z >> _SHIFT30)) * _M1
    z = (z ^ (z >> _SHIFT27)) * _M2
    return z ^ (z >> _SHIFT31)


@numba.njit(cache=True)
def _run(start, horizon, d, cum, absorbing, key_hi, key_lo, out):
    # trajectory r draws from its own SplitMix64 stream keyed by (seed, start, r)
    base = _mix(key_hi ^ _mix(_U64(start) + _GAMMA))
    for r in range(out.shape[0]):
        s = _mix(base ^ _mix(key_lo + _U64(r) * _GAMMA))
        state = start
        t = 0.0
        while not absorbing[state]:
            s += _GAMMA
            u = (float(_mix(s) >> _SHIFT11) + 1.0) * _INV53
            t += -math.log(u) / d[state]
            if t > horizon:
                break
            s += _GAMMA
            v = float(_mix(s) >> _SHIFT11) * _INV53
            row = cum[state]
            j = 0
            while v >= row[j]:
                j += 1
            state = j
        out[r] = state


def _jump_cdf(q):
    cum = np.cumsum(q, axis=1)
    for i in range(q.shape[0]):
        last = np.flatnonzero(q[i] > 0)[-1]
        cum[i, last:] = np.inf
    return cum


def simulate(b, horizon, trajectories, seed=0):
    """Run `trajectories` paths from every state and record where they are at `horizon`.

    In state ``i`` the path waits an exponential time with rate ``-b_ii`` and
    then jumps according to row ``i`` of the embedded chain; states with
    ``b_ii == 0`` never leave.  Results depend only on `seed`.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be non-negative, got {horizon}")
    if trajectories < 1:
        raise ValueError("need at least one trajectory")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    chain = embedded_chain(b)
    d = np.ascontiguousarray(chain.d)
    absorbing = np.ascontiguousarray(chain.zero_rate_mask)
    cum = _jump_cdf(chain.q)
    key_hi, key_lo = np.random.SeedSequence(seed).generate_state(2, np.uint64)
    n = b.n
    counts = np.zeros((n, n), dtype=np.int64)
    final = np.empty(trajectories, dtype=np.int64)
    for start in range(n):
        _run(start, float(horizon), d, cum, absorbing, key_hi, key_lo, final)
        counts[start] = np.bincount(final, minlength=n)
    empirical = counts / trajectories
    for a in (empirical, counts):
        a.setflags(write=False)
    return SimulationResult(empirical=empirical, counts=counts,
                            trajectories_per_start=trajectories,
                            horizon=float(horizon), seed=seed)
