"""Monte Carlo model of a measurement as the breaking of an elastic membrane.

The state's projection ``r_par`` on the measurement simplex splits the
simplex into ``N`` regions ``A_i`` (vertex ``i`` replaced by ``r_par``).  A
uniformly random disintegration point ``lambda`` selects the region, and
hence the outcome, with probability equal to the barycentric coordinate of
``r_par``; that is the Born rule.

A single run follows three straight segments: decoherence ``r -> r_par``,
collapse ``r_par -> s_par`` and purification ``s_par -> s`` where ``s`` is the
Lüders state of the obtained outcome.

Randomness
----------
Sample index ``n`` lives in block ``n // BLOCK_SIZE``; each block draws from
its own generator keyed by ``(seed, stream_id, block)``.  Counts are summed as
integers, so estimates do not depend on how blocks are spread over workers.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_real_vector
from .bloch import state_to_vector, vector_to_state
from .exceptions import BoundaryDegenerateError, ValidationError
from .observables import decompose, luders_update, outcome_probabilities

BLOCK_SIZE = 1 << 16
DEFAULT_SEED = 20240917
DEFAULT_SCHEDULE = (1.0, 1.0, 2.0, 2.0, 3.0)
PHASES = ("decoherence", "collapse", "purification")
MAX_RESAMPLES = 1000


@dataclass(frozen=True)
class RngSpec:
    """Seed plus stream label; ``stream_id`` separates independent experiments."""

    seed: int = DEFAULT_SEED
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if int(self.stream_id) < 0:
            raise ValidationError("stream_id must be non-negative")

    def generator(self, *key):
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),) + tuple(key))
        return np.random.Generator(np.random.PCG64(ss))


def default_workers():
    env = os.environ.get("BLOCHSIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"BLOCHSIM_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def sample_simplex(gen, size, N):
    """Uniform points on the probability simplex (flat Dirichlet)."""
    e = gen.standard_exponential((size, N))
    return e / e.sum(axis=1, keepdims=True)


def sample_uniform_lambda(obs, rng, index=0):
    """One uniform disintegration point in barycentric coordinates."""
    return sample_simplex(rng.generator(index), 1, obs.N)[0]


def classify_region(lambda_bary, point_bary):
    """Index ``i`` of the region ``A_i`` containing ``lambda``.

    Returns ``None`` when the minimum of ``lambda_k / p_k`` is attained more
    than once (a boundary point, to be resampled).
    """
    lam = np.asarray(lambda_bary, dtype=float)
    p = np.asarray(point_bary, dtype=float)
    if lam.shape != p.shape:
        raise ValidationError("barycentric vectors differ in length")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p > 0, lam / np.where(p > 0, p, 1.0), np.inf)
    if np.any((p <= 0) & (lam <= 0)):
        raise BoundaryDegenerateError("lambda lies on a face that contains the collapsed point")
    best = np.min(ratio)
    hits = np.flatnonzero(ratio == best)
    return int(hits[0]) if hits.size == 1 else None


def _classify_many(lam, p):
    """Vectorized :func:`classify_region`; ties are returned as ``-1``."""
    with np.errstate(divide="ignore"):
        ratio = lam / p
    ratio[:, p <= 0] = np.inf
    idx = np.argmin(ratio, axis=1)
    best = ratio[np.arange(len(idx)), idx]
    ties = np.count_nonzero(ratio == best[:, None], axis=1) > 1
    idx[ties] = -1
    return idx


def _region_point(r, obs):
    p = np.clip(decompose(r, obs).barycentric, 0.0, None)
    return p / p.sum()


def _classify_density(x, x_p, gen):
    # an atom sitting exactly on the split point goes either way with equal odds
    idx = np.where(x < x_p, 0, 1)
    tie = x == x_p
    if np.any(tie):
        idx[tie] = (gen.random(np.count_nonzero(tie)) >= 0.5).astype(idx.dtype)
    return idx


def _count_block(p, group_of, M, gen, size, density=None, x_p=None):
    counts = np.zeros(M, dtype=np.int64)
    resamples = 0
    todo = size
    while todo:
        if density is None:
            idx = _classify_many(sample_simplex(gen, todo, len(p)), p)
        else:
            idx = _classify_density(density.sample(gen, todo), x_p, gen)
        good = idx[idx >= 0]
        counts += np.bincount(group_of[good], minlength=M)
        resamples += todo - good.size
        todo -= good.size
    return counts, resamples


@dataclass(frozen=True)
class FrequencyReport:
    """Empirical outcome frequencies with their Born reference."""

    counts: np.ndarray
    samples: int
    born: np.ndarray
    resamples: int

    @property
    def frequencies(self):
        return self.counts / self.samples

    @property
    def sigma(self):
        return np.sqrt(self.born * (1 - self.born) / self.samples)

    @property
    def z_scores(self):
        diff = self.frequencies - self.born
        sig = self.sigma
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(sig > 0, diff / np.where(sig > 0, sig, 1.0),
                         np.where(diff == 0, 0.0, np.inf))
        return z

    def within(self, nsigma=4.0, atol=1e-12):
        # atol absorbs round-off in Born values that should be exactly 0 or 1
        diff = np.abs(self.frequencies - self.born)
        return bool(np.all(diff <= nsigma * self.sigma + atol))


def estimate_probabilities(r, obs, samples, rng=None, workers=None, density=None):
    """Run ``samples`` independent membrane breakings and tally the outcomes.

    Parameters
    ----------
    r : array_like
        Bloch vector of the state.
    obs : Observable
    samples : int
    rng : RngSpec, optional
    workers : int, optional
        Thread count; defaults to ``BLOCHSIM_THREADS`` or the CPU count.
        The result does not depend on it.
    density : DisintegrationDensity, optional
        Non-uniform membrane, only for two-level systems.

    Returns
    -------
    FrequencyReport
    """
    samples = int(samples)
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    rng = rng or RngSpec()
    if density is not None and obs.N != 2:
        raise ValidationError("a non-uniform membrane is only supported for N = 2")
    p = _region_point(r, obs)
    x_p = None if density is None else float(obs.vertex_vectors[0] @ r)
    group_of = np.empty(obs.N, dtype=np.int64)
    for k, g in enumerate(obs.partition):
        group_of[list(g)] = k
    n_blocks = -(-samples // BLOCK_SIZE)

    def run(b):
        size = min(BLOCK_SIZE, samples - b * BLOCK_SIZE)
        return _count_block(p, group_of, obs.M, rng.generator(b), size, density, x_p)

    workers = min(workers or default_workers(), n_blocks)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, range(n_blocks)))
    else:
        results = [run(b) for b in range(n_blocks)]
    counts = sum(c for c, _ in results)
    resamples = sum(s for _, s in results)
    if density is None:
        born = outcome_probabilities(r, obs)
    else:
        born = np.array(density.probability(x_p))
    return FrequencyReport(counts, samples, born, resamples)


def decohered_state(r, obs):
    """``r_par``: the state with coherences in the eigenbasis removed."""
    return decompose(r, obs).r_parallel


def collapse_target(r, obs, k):
    """On-simplex end point of the collapse for outcome group ``k``.

    It is the barycentric point of the face spanned by ``I_k`` with weights
    proportional to the transition probabilities of ``r``.
    """
    p = np.clip(decompose(r, obs).barycentric, 0.0, None)
    g = list(obs.partition[obs._check_k(k)])
    w = p[g]
    if w.sum() <= 0:
        raise ValidationError(f"outcome {k} has zero probability")
    return (w / w.sum()) @ obs.vertex_vectors[g]


def final_state(r, obs, k):
    """Bloch vector of the Lüders state for outcome group ``k``."""
    g = obs.partition[obs._check_k(k)]
    if len(g) == 1:
        return obs.vertex_vectors[g[0]].copy()
    D = vector_to_state(r)
    return state_to_vector(luders_update(D, obs, k), validate=False)


def check_schedule(schedule):
    t = as_real_vector(schedule, "schedule", 5)
    if t[0] < 0 or np.any(np.diff(t) < 0):
        raise ValidationError("schedule must satisfy 0 <= t1 <= t2 <= t3 <= t4 <= t5")
    return t


@dataclass(frozen=True)
class MeasurementTrace:
    """Waypoints of one simulated measurement.

    ``waypoints`` holds ``(time, vector)`` pairs at ``0, t1, ..., t5`` so that
    the path is r, r_par, r_par, s_par, s_par, s.
    """

    schedule: tuple
    waypoints: tuple
    lambda_bary: np.ndarray
    outcome: int
    resamples: int = 0
    phases: tuple = field(default=PHASES)

    @property
    def initial(self):
        return self.waypoints[0][1]

    @property
    def decohered(self):
        return self.waypoints[1][1]

    @property
    def collapsed(self):
        return self.waypoints[3][1]

    @property
    def final(self):
        return self.waypoints[-1][1]

    def phase_at(self, t):
        t1, _, t3, _, _ = self.schedule
        if t <= t1:
            return PHASES[0]
        if t <= t3:
            return PHASES[1]
        return PHASES[2]

    def position(self, t):
        """Piecewise-linear interpolation of the path at time ``t``."""
        times = [w[0] for w in self.waypoints]
        pts = [w[1] for w in self.waypoints]
        if t <= times[0]:
            return pts[0].copy()
        for (ta, a), (tb, b) in zip(zip(times, pts), zip(times[1:], pts[1:])):
            if t <= tb:
                if tb == ta:
                    return b.copy()
                s = (t - ta) / (tb - ta)
                return (1 - s) * a + s * b
        return pts[-1].copy()

    def sample(self, points_per_segment=32):
        """Rows ``(t, vector, phase)`` along the three phases."""
        t = (0.0,) + tuple(self.schedule)
        # segments: [0, t1] decoherence, [t1, t3] collapse, [t3, t5] purification
        spans = [(t[0], t[1]), (t[1], t[3]), (t[3], t[5])]
        rows = []
        for phase, (a, b) in zip(PHASES, spans):
            for s in np.linspace(a, b, points_per_segment, endpoint=False):
                rows.append((float(s), self.position(s), phase))
        rows.append((t[5], self.final.copy(), PHASES[2]))
        return rows


def run_measurement(r, obs, rng=None, schedule=DEFAULT_SCHEDULE, index=0):
    """Simulate one measurement and return ``(outcome_group, trace)``."""
    r = as_real_vector(r, "Bloch vector", obs.vertex_vectors.shape[1])
    rng = rng or RngSpec()
    t = check_schedule(schedule)
    p = _region_point(r, obs)
    gen = rng.generator(index)
    resamples = 0
    while True:
        lam = sample_simplex(gen, 1, obs.N)[0]
        i = classify_region(lam, p)
        if i is not None:
            break
        resamples += 1
        if resamples > MAX_RESAMPLES:
            raise BoundaryDegenerateError("could not draw a point off the region boundaries")
    k = obs.group_of(i)
    r_par = decohered_state(r, obs)
    s_par = collapse_target(r, obs, k)
    s = final_state(r, obs, k)
    points = [r, r_par, r_par, s_par, s_par, s]
    times = (0.0,) + tuple(float(x) for x in t)
    trace = MeasurementTrace(tuple(float(x) for x in t),
                             tuple(zip(times, (np.array(v, dtype=float) for v in points))),
                             lam, k, resamples)
    return k, trace


@dataclass(frozen=True)
class MembraneState:
    """Membrane with the collapsed particle at barycentric point ``point_bary``."""

    obs: object
    point_bary: np.ndarray

    @classmethod
    def from_vector(cls, r, obs):
        return cls(obs, _region_point(r, obs))

    def region_probabilities(self):
        return self.point_bary.copy()

    def fused_probabilities(self):
        return np.array([self.point_bary[list(g)].sum() for g in self.obs.partition])

    def region_vertices(self, i):
        V = np.array(self.obs.vertex_vectors, dtype=float)
        V[i] = self.point_bary @ self.obs.vertex_vectors
        return V

