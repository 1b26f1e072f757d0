"""Exit criteria, one test per criterion.

Each test appends a ``PASS``/``FAIL`` line that is printed in the pytest
terminal summary.
"""

import time

import numpy as np
import pytest

from ctmc_limit import (absorption_vector, adaptive_horizon, classify_states, final_limit,
                        resolvent, simulate, transition_matrix, validate)
from ctmc_limit.chain import adjacency, communicating_classes
from ctmc_limit.corpus import random_corpus

from .conftest import ACCEPTANCE_LINES
from .test_chain import remark_classes

pytestmark = pytest.mark.acceptance


def record(label, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    assert ok, detail


def spectral_gap(b, n_classes):
    """Smallest decay rate among the eigenvalues left after dropping the zero ones."""
    ev = np.linalg.eigvals(b.b)
    ev = ev[np.argsort(np.abs(ev))][n_classes:]
    return float(np.min(-ev.real)) if len(ev) else np.inf


def test_corpus_shape(corpus):
    sizes = [p.b.n for p in corpus]
    classes = [len(p.classes) for p in corpus]
    transient = [len(p.transient) for p in corpus]
    assert len(corpus) >= 200
    assert min(sizes) >= 2 and max(sizes) <= 50
    assert set(classes) == {1, 2, 3, 4}
    assert min(transient) == 0 and max(transient) == 10


def test_ac1_oracle_triangle(corpus):
    start = time.perf_counter()
    worst = 0.0
    for planted in corpus:
        b = planted.b
        p = final_limit(b).p
        t = adaptive_horizon(b, tol=1e-10)
        worst = max(worst, float(np.max(np.abs(p - transition_matrix(b, t)))))
    elapsed = time.perf_counter() - start
    record("AC1 limit vs exp(t*B)", worst <= 1e-8 and elapsed < 60,
           f"max diff {worst:.2e} (tol 1e-8) over {len(corpus)} matrices in {elapsed:.1f} s (< 60 s)")


def test_ac2_resolvent_abelian_limit(corpus):
    zs = 10.0 ** -np.arange(1, 6)
    not_monotone, over_bound, final = 0, 0, 0.0
    for planted in corpus:
        b = planted.b
        p = final_limit(b).p
        errs = np.array([np.max(np.abs(resolvent(b, z) - p)) for z in zs])
        if np.any(np.diff(errs) >= 0):
            not_monotone += 1
        gap = spectral_gap(b, len(planted.classes))
        if gap >= 0.1 and np.any(errs > 10 * zs / gap):
            over_bound += 1
        final = max(final, errs[-1])
    ok = not_monotone == 0 and over_bound == 0 and final <= 1e-3
    record("AC2 resolvent z(zI-B)^-1 -> P", ok,
           f"non-monotone {not_monotone}, over 10z/gap {over_bound}, "
           f"max error at z=1e-5 {final:.2e} (tol 1e-3)")


def test_ac3_structural_invariants(corpus):
    worst = dict(stoch=0.0, idem=0.0, annihilate=0.0, fsum=0.0)
    failures = []
    for k, planted in enumerate(corpus):
        b = planted.b
        fl = final_limit(b)
        p, bm = fl.p, b.b
        bmax = np.max(np.abs(bm))
        worst["stoch"] = max(worst["stoch"], float(np.max(np.abs(p.sum(axis=1) - 1))))
        worst["idem"] = max(worst["idem"], float(np.max(np.abs(p @ p - p))))
        worst["annihilate"] = max(worst["annihilate"],
                                  float(max(np.max(np.abs(p @ bm)), np.max(np.abs(bm @ p))) / bmax))
        if p.min() < 0:
            failures.append(f"#{k} negative entry")
        if planted.transient and np.any(p[:, list(planted.transient)] != 0):
            failures.append(f"#{k} transient column")
        for members in planted.classes:
            rows = p[list(members)]
            if np.any(rows != rows[0]):
                failures.append(f"#{k} class rows differ")
        if planted.transient:
            worst["fsum"] = max(worst["fsum"],
                                float(np.max(np.abs(fl.absorption.f.sum(axis=1) - 1))))
    ok = (not failures and worst["stoch"] <= 1e-12 and worst["idem"] <= 1e-9
          and worst["annihilate"] <= 1e-9 and worst["fsum"] <= 1e-9)
    record("AC3 structure of P", ok,
           f"row sums {worst['stoch']:.1e} (1e-12), |PP-P| {worst['idem']:.1e} (1e-9), "
           f"|PB|,|BP|/|B| {worst['annihilate']:.1e} (1e-9), sum f {worst['fsum']:.1e} (1e-9), "
           f"other failures {failures[:3]}")


def test_ac4_closed_forms(two_state, split3, ruin):
    errs = [
        np.max(np.abs(final_limit(two_state).p - [[0.75, 0.25], [0.75, 0.25]])),
        np.max(np.abs(final_limit(split3).p[2] - [1 / 3, 2 / 3, 0])),
        np.max(np.abs(absorption_vector(ruin, classify_states(ruin), 0) - [2 / 3, 1 / 3])),
    ]
    record("AC4 closed forms", max(errs) <= 1e-12,
           "two-state {:.1e}, split {:.1e}, gambler's ruin {:.1e} (tol 1e-12)".format(*errs))


def test_ac5_classification_matches_power_sums():
    rng = np.random.default_rng(5)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(500):
        n = int(rng.integers(1, 9))
        adj = rng.random((n, n)) < rng.uniform(0.05, 0.6)
        np.fill_diagonal(adj, False)
        raw = adj.astype(float)
        np.fill_diagonal(raw, -raw.sum(axis=1))
        b = validate(raw)
        groups, closed = remark_classes(adj)
        s = classify_states(b)
        same_groups = communicating_classes(adjacency(b))[0] == groups
        same_closed = list(s.classes) == [g for g, c in zip(groups, closed) if c]
        mismatches += not (same_groups and same_closed)
    elapsed = time.perf_counter() - start
    record("AC5 classification vs A+...+A^(n-1)", mismatches == 0 and elapsed < 5,
           f"{mismatches} mismatches over 500 digraphs in {elapsed:.2f} s (< 5 s)")


def test_ac6_simulation_consistency():
    corpus = random_corpus(606, count=20, max_n=6)
    trajectories = 100_000
    worst_z, outside, not_identical = 0.0, 0, 0
    for planted in corpus:
        b = planted.b
        p = final_limit(b).p
        t = adaptive_horizon(b)
        first = simulate(b, t, trajectories, seed=2024)
        again = simulate(b, t, trajectories, seed=2024)
        not_identical += not np.array_equal(first.counts, again.counts)
        sigma = np.sqrt(np.clip(p * (1 - p), 0.0, None) / trajectories)
        # entries of P that are 0 or 1 up to rounding have sigma = 0
        dev = np.abs(first.empirical - p)
        dev[dev <= 1e-12] = 0.0
        outside += int(np.sum(dev > 4 * sigma))
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(sigma > 0, dev / sigma, np.where(dev > 0, np.inf, 0.0))
        worst_z = max(worst_z, float(z.max()))
    record("AC6 simulation within 4 sigma", outside == 0 and not_identical == 0,
           f"{outside} entries outside 4 sigma (worst {worst_z:.2f} sigma), "
           f"{not_identical} non-identical reruns, 20 matrices x 1e5 paths")


def test_ac7_semigroup_and_derivative(corpus):
    grid = (0.1, 1.0, 5.0)
    hs = (1e-3, 1e-4, 1e-5)
    semigroup, nonlinear = 0.0, 0
    for planted in corpus:
        b = planted.b
        e = {t: transition_matrix(b, t) for t in grid}
        for s in grid:
            for t in grid:
                semigroup = max(semigroup,
                                float(np.max(np.abs(transition_matrix(b, s + t) - e[s] @ e[t]))))
        eye = np.eye(b.n)
        errs = [np.max(np.abs((transition_matrix(b, h) - eye) / h - b.b)) for h in hs]
        ratios = [errs[0] / errs[1], errs[1] / errs[2]]
        nonlinear += not all(8 <= r <= 12 for r in ratios)
    record("AC7 semigroup and derivative", semigroup <= 1e-10 and nonlinear == 0,
           f"semigroup defect {semigroup:.1e} (tol 1e-10), "
           f"{nonlinear} matrices without linear decay in h")
