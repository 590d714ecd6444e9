"""Two-outcome measurements with a non-uniform membrane.

For a two-level system the membrane is the segment ``[-1, 1]`` along ``n_1``
and the state sits at ``x_p = r . n_1``.  A disintegration density ``rho``
gives outcome 1 with probability ``rho([-1, x_p])``.  The uniform density
reproduces the Born rule; the epsilon-model, uniform on ``[-eps, eps]``,
interpolates between classical (``eps -> 0``) and quantum (``eps = 1``)
statistics.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import as_real_vector
from .exceptions import (
    InvalidDensityError,
    UnstableEquilibriumError,
    UnstableEquilibriumWarning,
    ValidationError,
)

MASS_TOL = 1e-12


class OutcomeProbabilities(NamedTuple):
    p1: float
    p2: float


@dataclass(frozen=True)
class DisintegrationDensity:
    """Piecewise-constant density on ``[-1, 1]`` plus point masses.

    Parameters
    ----------
    pieces : sequence of (lo, hi, height)
    atoms : sequence of (x0, mass)
    """

    pieces: tuple = ()
    atoms: tuple = ()

    def __post_init__(self):
        pieces = tuple((float(a), float(b), float(h)) for a, b, h in self.pieces)
        atoms = tuple((float(x), float(m)) for x, m in self.atoms)
        for a, b, h in pieces:
            if not -1.0 <= a <= b <= 1.0:
                raise InvalidDensityError(f"piece [{a}, {b}] is not inside [-1, 1]")
            if h < 0:
                raise InvalidDensityError("heights must be non-negative")
        for x, m in atoms:
            if not -1.0 <= x <= 1.0 or m < 0:
                raise InvalidDensityError("atoms need a location in [-1, 1] and a non-negative mass")
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "atoms", atoms)
        if abs(self.total_mass() - 1.0) > MASS_TOL:
            raise InvalidDensityError(f"total mass is {self.total_mass()!r}, not 1")

    @classmethod
    def uniform(cls):
        return cls(pieces=((-1.0, 1.0, 0.5),))

    @classmethod
    def epsilon(cls, eps):
        """Uniform on ``[-eps, eps]``; a single atom at 0 when ``eps = 0``."""
        eps = float(eps)
        if not 0 <= eps <= 1:
            raise ValidationError("epsilon must lie in [0, 1]")
        if eps == 0:
            return cls(atoms=((0.0, 1.0),))
        return cls(pieces=((-eps, eps, 1 / (2 * eps)),))

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(pieces=tuple(data.get("pieces", ())), atoms=tuple(data.get("atoms", ())))
        except (TypeError, ValueError, AttributeError) as exc:
            raise InvalidDensityError(f"malformed density document: {exc}") from exc

    def to_dict(self):
        return {"pieces": [list(p) for p in self.pieces], "atoms": [list(a) for a in self.atoms]}

    def total_mass(self):
        return sum((b - a) * h for a, b, h in self.pieces) + sum(m for _, m in self.atoms)

    def mass_below(self, x, strict=True):
        """Mass of ``[-1, x)`` (``strict``) or ``[-1, x]``."""
        cont = sum(h * (min(max(x, a), b) - a) for a, b, h in self.pieces)
        at = sum(m for x0, m in self.atoms if (x0 < x if strict else x0 <= x))
        return cont + at

    def mass_between(self, lo, hi):
        """Mass of ``[lo, hi)``, with the closed end at ``hi = 1``."""
        return self.mass_below(hi, strict=hi < 1.0) - self.mass_below(lo, strict=True)

    def atom_mass_at(self, x):
        return sum(m for x0, m in self.atoms if x0 == x)

    def probability(self, x_p):
        return density_probability(x_p, self)

    def sample(self, gen, size):
        """Draw ``size`` points by picking a component, then a point in it."""
        weights = [(b - a) * h for a, b, h in self.pieces] + [m for _, m in self.atoms]
        w = np.array(weights, dtype=float)
        comp = gen.choice(len(w), size=size, p=w / w.sum())
        u = gen.random(size)
        lo = np.array([a for a, _, _ in self.pieces] + [x for x, _ in self.atoms])
        width = np.array([b - a for a, b, _ in self.pieces] + [0.0] * len(self.atoms))
        return lo[comp] + u * width[comp]


def density_probability(x_p, rho):
    """Outcome probabilities ``(rho([-1, x_p]), rho([x_p, 1]))``.

    An atom exactly at ``x_p`` is split evenly between the outcomes and an
    :class:`UnstableEquilibriumWarning` is emitted.
    """
    x_p = float(x_p)
    if not -1.0 <= x_p <= 1.0:
        raise ValidationError("x_p must lie in [-1, 1]")
    p1 = rho.mass_below(x_p, strict=True)
    at = rho.atom_mass_at(x_p)
    if at > 0:
        warnings.warn(f"atom of mass {at} sits on x_p = {x_p}; split evenly",
                      UnstableEquilibriumWarning, stacklevel=2)
        p1 += at / 2
    p1 = min(max(p1, 0.0), 1.0)
    return OutcomeProbabilities(p1, 1.0 - p1)


def epsilon_probability(x_p, epsilon, at_equilibrium="raise"):
    """Closed form for the density uniform on ``[-epsilon, epsilon]``.

    Works with floats or :class:`fractions.Fraction` inputs; with fractions
    the result is exact.  For ``epsilon = 0`` and ``x_p = 0`` the outcome is
    undetermined: ``at_equilibrium="raise"`` raises
    :class:`UnstableEquilibriumError`, ``"split"`` returns the one-sided
    limit ``(1/2, 1/2)``.
    """
    if not 0 <= epsilon <= 1:
        raise ValidationError("epsilon must lie in [0, 1]")
    if not -1 <= x_p <= 1:
        raise ValidationError("x_p must lie in [-1, 1]")
    if epsilon == 0 and x_p == 0:
        if at_equilibrium == "split":
            half = (x_p + 1) / 2  # x_p is zero; keeps the input number type
            return OutcomeProbabilities(half, half)
        raise UnstableEquilibriumError("x_p sits on the single disintegration point")
    zero = x_p - x_p  # 0 of the input type, never -0.0
    if x_p <= -epsilon:
        p1 = zero
    elif x_p >= epsilon:
        p1 = zero + 1
    else:
        p1 = (1 + x_p / epsilon) / 2
    return OutcomeProbabilities(p1, 1 - p1)


@dataclass(frozen=True)
class DirectionObservable2D:
    """Two-outcome spin observable along a unit vector of ``R^3``."""

    direction: np.ndarray

    def __post_init__(self):
        d = as_real_vector(self.direction, "direction", 3)
        if abs(np.linalg.norm(d) - 1.0) > 1e-12:
            raise ValidationError("direction must be a unit vector")
        object.__setattr__(self, "direction", d)

    def eigenstate(self, sign):
        return _sign(sign) * self.direction


def _sign(sign):
    if sign not in (1, -1, "+", "-"):
        raise ValidationError("outcome sign must be +1 or -1")
    return 1 if sign in (1, "+") else -1


def sequential_probability(initial, steps, epsilon, at_equilibrium="raise"):
    """Probability of a sequence of outcomes with first-kind state updates.

    Parameters
    ----------
    initial : array_like, shape (3,)
        Unit Bloch vector of the starting eigenstate.
    steps : sequence of (DirectionObservable2D, sign)
    epsilon : float
    """
    if not steps:
        raise ValidationError("at least one step is required")
    state = as_real_vector(initial, "initial state", 3)
    prob = 1.0
    for obs, sign in steps:
        s = _sign(sign)
        # fsum avoids fused multiply-add residue, e.g. b . a must be exactly 0
        x_p = min(max(math.fsum(state * obs.direction), -1.0), 1.0)
        p1, p2 = epsilon_probability(x_p, epsilon, at_equilibrium)
        prob *= p1 if s == 1 else p2
        state = obs.eigenstate(s)
    return prob


def abc_geometry():
    """Coplanar unit vectors with angle(c, b) = pi/4 and angle(b, a) = pi/2.

    Returns the observables ``(A, B, C)``.
    """
    h = math.sqrt(0.5)
    c = np.array([0.0, 0.0, 1.0])
    b = np.array([h, 0.0, h])
    a = np.array([h, 0.0, -h])
    return DirectionObservable2D(a), DirectionObservable2D(b), DirectionObservable2D(c)


@dataclass(frozen=True)
class KolmogorovReport:
    epsilon: float
    p_c_and_b: float
    p_c_and_a: float
    p_b_and_not_a: float
    in_proof_range: bool

    @property
    def lhs(self):
        return self.p_c_and_b - self.p_c_and_a

    @property
    def rhs(self):
        return self.p_b_and_not_a

    @property
    def violated(self):
        return self.lhs > self.rhs


def kolmogorov_check(epsilon):
    """Evaluate ``P(c and b) - P(c and a) <= P(b and not a)`` for the epsilon-model.

    All joint probabilities start from the ``c`` eigenstate.  At
    ``epsilon = 0`` the ``b -> not a`` step uses the one-sided limit.
    """
    A, B, C = abc_geometry()
    c = C.direction
    p_cb = sequential_probability(c, [(C, +1), (B, +1)], epsilon, "split")
    p_ca = sequential_probability(c, [(C, +1), (A, +1)], epsilon, "split")
    p_bna = sequential_probability(c, [(B, +1), (A, -1)], epsilon, "split")
    in_range = 0 <= epsilon <= math.sqrt(0.5) + 1e-15
    return KolmogorovReport(float(epsilon), p_cb, p_ca, p_bna, in_range)


def classical_check(joint):
    """Same inequality for a classical joint distribution over ``(a, b, c)``.

    Parameters
    ----------
    joint : mapping from (bool, bool, bool) to probability
    """
    total = sum(joint.values())
    if abs(total - 1.0) > 1e-12 or any(v < 0 for v in joint.values()):
        raise ValidationError("joint distribution must be non-negative and normalized")

    def prob(pred):
        return sum(v for k, v in joint.items() if pred(*k))

    lhs = prob(lambda a, b, c: b and c) - prob(lambda a, b, c: a and c)
    rhs = prob(lambda a, b, c: b and not a)
    return lhs, rhs, lhs > rhs + 1e-15


@dataclass(frozen=True)
class HilbertReport:
    premises_met: bool
    forced_p_ab: float
    p_ab: float
    contradiction: bool


def hilbert_consistency_check(p_bc, p_nac, p_ab, tol=1e-9):
    """Check the three numbers against a two-dimensional Hilbert model.

    If ``p(b|c) = 1`` then ``b`` and ``c`` span the same ray, and
    ``p(not a|c) = 1`` puts ``c`` orthogonal to ``a``; hence ``p(a|b)`` must
    vanish.  A contradiction is reported only under those premises.
    """
    for v in (p_bc, p_nac, p_ab):
        if not 0 <= v <= 1:
            raise ValidationError("probabilities must lie in [0, 1]")
    premises = abs(p_bc - 1) <= tol and abs(p_nac - 1) <= tol
    contradiction = premises and abs(p_ab) > tol
    return HilbertReport(premises, 0.0 if premises else math.nan, float(p_ab), contradiction)


def epsilon_model_inputs(epsilon):
    """``(p_bc, p_nac, p_ab)`` as produced by the epsilon-model from ``c``."""
    A, B, C = abc_geometry()
    c = C.direction
    p_bc = sequential_probability(c, [(B, +1)], epsilon, "split")
    p_nac = sequential_probability(c, [(A, -1)], epsilon, "split")
    p_ab = sequential_probability(B.direction, [(A, +1)], epsilon, "split")
    return p_bc, p_nac, p_ab
