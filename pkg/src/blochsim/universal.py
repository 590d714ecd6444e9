"""Exact averages over cellular membranes.

A cellular membrane divides ``[-1, 1]`` into ``n`` equal cells, each either
breakable (``1``) or not (``0``).  With the particle between cells so that
region ``A_1`` holds the leftmost ``n - i`` cells, the outcome probability is
the fraction of breakable cells lying in ``A_1``.  Averaging over all
``2**n - 1`` non-empty structures gives exactly ``(n - i) / n``, the value of
the uniform membrane.

Everything here is integer or :class:`fractions.Fraction` arithmetic.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from typing import NamedTuple

import numpy as np

from .exceptions import ResourceCapError, ValidationError

ENUMERATION_CAP = 20
CHUNK_BITS = 16


@dataclass(frozen=True)
class CellularDensity:
    """Bit pattern of breakable (1) and unbreakable (0) cells, left to right."""

    cells: tuple

    def __post_init__(self):
        cells = tuple(int(c) for c in self.cells)
        if not cells:
            raise ValidationError("a cellular density needs at least one cell")
        if any(c not in (0, 1) for c in cells):
            raise ValidationError("cells must be 0 or 1")
        if not any(cells):
            raise ValidationError("at least one cell must be breakable")
        object.__setattr__(self, "cells", cells)

    @property
    def n(self):
        return len(self.cells)

    @property
    def n_d(self):
        return sum(self.cells)

    def __str__(self):
        return "".join("d" if c else "-" for c in self.cells)


def cellular_probability(cells, i):
    """Breakable cells among the leftmost ``n - i``, over all breakable cells."""
    if not isinstance(cells, CellularDensity):
        cells = CellularDensity(tuple(cells))
    i = int(i)
    if not 0 <= i <= cells.n:
        raise ValidationError(f"split index must lie in 0..{cells.n}")
    return Fraction(sum(cells.cells[:cells.n - i]), cells.n_d)


def _chunk_table(n, start, stop):
    """Integer table ``T[k, j]``: over masks in ``[start, stop)`` with ``k``
    breakable cells, the summed count of breakable cells among the first ``j``."""
    masks = np.arange(start, stop, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n, dtype=np.int64)) & 1
    prefix = np.zeros((len(masks), n + 1), dtype=np.int64)
    np.cumsum(bits, axis=1, out=prefix[:, 1:])
    onehot = (prefix[:, -1][:, None] == np.arange(n + 1)).astype(np.int64)
    return onehot.T @ prefix


def structure_table(n, workers=1, cap=ENUMERATION_CAP):
    """Enumerate every non-empty structure of ``n`` cells.

    Returns a nested list ``T`` of Python integers where ``T[k][j]`` sums, over
    all structures with ``k`` breakable cells, the number of breakable cells
    among the leftmost ``j``.  Chunks are merged by integer addition, so the
    result does not depend on ``workers``.
    """
    n = int(n)
    if n < 1:
        raise ValidationError("n must be >= 1")
    if n > cap:
        raise ResourceCapError(
            f"n = {n} exceeds the enumeration cap {cap}; the closed form (n - i)/n applies")
    total = 1 << n
    step = 1 << CHUNK_BITS
    bounds = [(max(s, 1), min(s + step, total)) for s in range(0, total, step)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda b: _chunk_table(n, *b), bounds))
    else:
        parts = [_chunk_table(n, *b) for b in bounds]
    table = [[0] * (n + 1) for _ in range(n + 1)]
    for part in parts:
        for k, row in enumerate(part.tolist()):
            for j, v in enumerate(row):
                table[k][j] += v
    return table


def average_profile(n, workers=1, cap=ENUMERATION_CAP):
    """Exhaustive averages for every split index ``i = 0..n``."""
    table = structure_table(n, workers, cap)
    norm = (1 << n) - 1
    out = []
    for i in range(n + 1):
        j = n - i
        s = sum((Fraction(table[k][j], k) for k in range(1, n + 1)), Fraction(0))
        out.append(s / norm)
    return out


def average_over_structures(n, i, workers=1, cap=ENUMERATION_CAP):
    """Average of :func:`cellular_probability` over all ``2**n - 1`` structures.

    Examples
    --------
    >>> average_over_structures(2, 1)
    Fraction(1, 2)
    """
    n, i = int(n), int(i)
    if n >= 1 and not 0 <= i <= n:
        raise ValidationError(f"split index must lie in 0..{n}")
    return average_profile(n, workers, cap)[i]


def uniform_reference(n, i):
    return Fraction(n - i, n)


class IdentityReport(NamedTuple):
    n: int
    weighted_lhs: Fraction
    weighted_rhs: Fraction
    plain_lhs: Fraction
    plain_rhs: Fraction

    @property
    def holds(self):
        return self.weighted_lhs == self.weighted_rhs and self.plain_lhs == self.plain_rhs


def identity_check(n):
    """Check both binomial sums with exact arithmetic.

    ``sum_k k/(k+1) C(n,k) = (2^n (n-1) + 1)/(n+1)`` and
    ``sum_k 1/(k+1) C(n,k) = (2^(n+1) - 1)/(n+1)``.
    """
    n = int(n)
    if n < 0:
        raise ValidationError("n must be >= 0")
    w = sum((Fraction(k * comb(n, k), k + 1) for k in range(n + 1)), Fraction(0))
    p = sum((Fraction(comb(n, k), k + 1) for k in range(n + 1)), Fraction(0))
    return IdentityReport(n, w, Fraction(2 ** n * (n - 1) + 1, n + 1),
                          p, Fraction(2 ** (n + 1) - 1, n + 1))


def boundary_position(n, i):
    """Position ``x_p`` on ``[-1, 1]`` that leaves ``n - i`` cells on its left."""
    return Fraction(-1) + Fraction(2 * (n - i), n)


def split_index(x_p, n):
    """Inverse of :func:`boundary_position`; ``x_p`` must fall on a cell boundary."""
    x = Fraction(x_p)
    left = (x + 1) * n / 2
    if left.denominator != 1 or not 0 <= left <= n:
        raise ValidationError(f"x_p = {x_p} is not a cell boundary for n = {n}")
    return n - int(left)


def _coarse_masses(target, m):
    """Exact mass of each of ``m`` equal coarse cells (last cell closed)."""
    edges = [Fraction(-1) + Fraction(2 * k, m) for k in range(m + 1)]
    masses = []
    for k in range(m):
        lo, hi = edges[k], edges[k + 1]
        mass = Fraction(0)
        for a, b, h in target.pieces:
            a, b, h = Fraction(a), Fraction(b), Fraction(h)
            overlap = min(b, hi) - max(a, lo)
            if overlap > 0:
                mass += h * overlap
        for x0, w in target.atoms:
            x0 = Fraction(x0)
            if lo <= x0 < hi or (k == m - 1 and x0 == hi):
                mass += Fraction(w)
        masses.append(mass)
    total = sum(masses, Fraction(0))
    if total <= 0:
        raise ValidationError("target density has zero mass")
    return [x / total for x in masses]


def _feasible_counts(num, Q, T, D, ell):
    """Integer counts ``c_i`` in ``[0, ell]`` with ``sum c_i = T`` and
    ``|c_i Q - num_i T| <= D`` for every ``i``, or ``None``."""
    lo = [max(0, -((D - a * T) // Q)) for a in num]
    hi = [min(ell, (a * T + D) // Q) for a in num]
    if any(l > h for l, h in zip(lo, hi)) or not sum(lo) <= T <= sum(hi):
        return None
    counts = list(lo)
    rest = T - sum(lo)
    for idx in range(len(counts)):
        add = min(rest, hi[idx] - counts[idx])
        counts[idx] += add
        rest -= add
    return counts


def _spread(count, ell):
    # evenly spaced positions of `count` breakable cells among `ell`
    row = [0] * ell
    for j in range(count):
        row[(2 * j + 1) * ell // (2 * count)] = 1
    return row


class Approximation(NamedTuple):
    density: CellularDensity
    deviation: Fraction


def approximate_density(target, m, ell):
    """Cellular membrane with ``m * ell`` cells mimicking ``target``.

    Each coarse cell ``S_i`` (``ell`` elementary cells) receives ``c_i``
    breakable cells, chosen so that ``max_i |c_i / sum(c) - rho(S_i)|`` is as
    small as possible over all admissible counts; ties go to the largest
    total.  Breakable cells are spaced evenly inside their coarse cell.

    Returns
    -------
    Approximation
        ``(density, deviation)`` with the realized maximal deviation.
    """
    m, ell = int(m), int(ell)
    if m < 1 or ell < 1:
        raise ValidationError("m and ell must be >= 1")
    w = _coarse_masses(target, m)
    Q = lcm(*(x.denominator for x in w))
    num = [x.numerator * (Q // x.denominator) for x in w]
    best = None
    # largest total first: among equally good fits keep the finest structure
    for T in range(m * ell, 0, -1):
        lo_D, hi_D = 0, T * Q
        while lo_D < hi_D:
            mid = (lo_D + hi_D) // 2
            if _feasible_counts(num, Q, T, mid, ell) is None:
                lo_D = mid + 1
            else:
                hi_D = mid
        dev = Fraction(lo_D, T * Q)
        if best is None or dev < best[0]:
            best = (dev, _feasible_counts(num, Q, T, lo_D, ell))
    dev, counts = best
    cells = [c for k in counts for c in _spread(k, ell)]
    return Approximation(CellularDensity(tuple(cells)), dev)


def flatten_multidim(grid, region_mask):
    """Linearize a grid of cells so a region becomes a left interval.

    Cells inside the region are placed first (row-major order), then the
    cells outside, so the region is exactly the leftmost ``n - i`` cells.

    Returns
    -------
    (CellularDensity, int)
        The linear structure and the split index ``i`` (number of outside
        cells).
    """
    g = np.asarray(grid)
    mask = np.asarray(region_mask)
    if g.size == 0:
        raise ValidationError("grid is empty")
    if g.shape != mask.shape:
        raise ValidationError("grid and region mask must have the same shape")
    g = g.astype(bool).ravel()
    mask = mask.astype(bool).ravel()
    inside = [int(c) for c in g[mask]]
    outside = [int(c) for c in g[~mask]]
    return CellularDensity(tuple(inside + outside)), len(outside)
