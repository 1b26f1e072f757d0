"""Random intensity matrices with planted class structure, for testing."""

from dataclasses import dataclass

import numpy as np

from .chain import validate


@dataclass(frozen=True, eq=False)
class Planted:
    b: object
    classes: tuple
    transient: tuple


def random_intensity(rng, class_sizes, n_transient, rates=(0.1, 10.0), density=0.3):
    """Intensity matrix with closed classes of the given sizes plus transient states.

    Each class is made strongly connected by a random cycle, then extra
    edges are added with probability `density`.  Transient state number
    ``a`` (in a random order) gets an edge into a class or into an earlier
    transient state, so every transient state drains into some class.
    State indices are shuffled so the blocks are not contiguous.
    """
    n = sum(class_sizes) + n_transient
    order = rng.permutation(n)
    lo, hi = rates
    b = np.zeros((n, n))

    def rate():
        return rng.uniform(lo, hi)

    classes, pos = [], 0
    for m in class_sizes:
        members = [int(i) for i in order[pos:pos + m]]
        pos += m
        classes.append(tuple(sorted(members)))
        if m > 1:
            cycle = [members[i] for i in rng.permutation(m)]
            for u, v in zip(cycle, cycle[1:] + cycle[:1]):
                b[u, v] = rate()
            for u in members:
                for v in members:
                    if u != v and b[u, v] == 0 and rng.random() < density:
                        b[u, v] = rate()
    recurrent = [i for c in classes for i in c]
    transient = [int(i) for i in order[pos:]]
    for a, u in enumerate(transient):
        targets = recurrent + transient[:a]
        b[u, targets[rng.integers(len(targets))]] = rate()
        for v in recurrent + transient:
            if v != u and b[u, v] == 0 and rng.random() < density / 2:
                b[u, v] = rate()
    np.fill_diagonal(b, -b.sum(axis=1))
    classes.sort()
    return Planted(validate(b), tuple(classes), tuple(sorted(transient)))


def random_corpus(seed, count=200, max_n=50, max_classes=4, max_transient=10):
    """`count` planted matrices with ``2 <= n <= max_n``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        k = int(rng.integers(1, max_classes + 1))
        nt = int(rng.integers(0, max_transient + 1))
        room = max_n - nt
        if room < k:
            continue
        sizes = [int(s) for s in rng.integers(1, max(2, room // k) + 1, size=k)]
        if sum(sizes) + nt < 2 or sum(sizes) + nt > max_n:
            continue
        out.append(random_intensity(rng, sizes, nt))
    return out
