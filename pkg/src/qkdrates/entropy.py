"""Shannon entropy of bit/phase error patterns on virtual entangled pairs.

The security analysis tracks three error classes on each pair, identified
with Bell-state outcomes: a bit error means the pair is Psi+ or Psi-, a
phase error means Phi- or Psi-, and a Y error means Phi- or Psi+.  Privacy
amplification cost is the conditional entropy of the phase error given the
bit error, maximized over the Y error rate interval the protocol leaves
unconstrained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .protocols import ProtocolSpec

__all__ = [
    "InfeasibleRatesError",
    "PauliDistribution",
    "binary_entropy",
    "distribution_from_rates",
    "joint_bit_phase_entropy",
    "conditional_phase_entropy",
    "worst_case_conditional_phase_entropy",
    "feasible_y_interval",
]

# Probabilities this far below zero are treated as rounding noise.
NEG_TOL = 1e-12

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


class InfeasibleRatesError(ValueError):
    """Raised when error rates imply a negative Bell-outcome probability."""


def _clamp_probability(p: float, what: str) -> float:
    if p < 0.0:
        if p < -NEG_TOL:
            raise InfeasibleRatesError(f"{what} is negative: {p}")
        return 0.0
    return p


def binary_entropy(p: float) -> float:
    """Binary Shannon entropy ``H(p)`` in bits.

    Parameters
    ----------
    p : float
        Probability in [0, 1].  Values within 1e-12 outside the interval
        are clamped; anything further raises ``ValueError``.

    Returns
    -------
    float
        ``-p*log2(p) - (1-p)*log2(1-p)`` with the convention ``0*log2(0) = 0``.

    Examples
    --------
    >>> binary_entropy(0.5)
    1.0
    >>> binary_entropy(0.0)
    0.0
    """
    if p < 0.0 or p > 1.0:
        if p < -NEG_TOL or p > 1.0 + NEG_TOL:
            raise ValueError(f"probability {p} outside [0, 1]")
        p = min(max(p, 0.0), 1.0)
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


@dataclass(frozen=True)
class PauliDistribution:
    """Probabilities of the four Bell-pair outcomes.

    ``p_identity`` is the error-free outcome (Phi+), ``p_psi_plus`` a pure
    bit error, ``p_phi_minus`` a pure phase error, and ``p_psi_minus`` a
    joint bit-and-phase error.  Fields must be non-negative and sum to 1
    within 1e-12; negatives within 1e-12 of zero are clamped on
    construction.
    """

    p_identity: float
    p_psi_plus: float
    p_psi_minus: float
    p_phi_minus: float

    def __post_init__(self) -> None:
        for field in ("p_identity", "p_psi_plus", "p_psi_minus", "p_phi_minus"):
            value = _clamp_probability(getattr(self, field), field)
            object.__setattr__(self, field, value)
        total = self.p_identity + self.p_psi_plus + self.p_psi_minus + self.p_phi_minus
        if abs(total - 1.0) > 1e-12:
            raise InfeasibleRatesError(f"outcome probabilities sum to {total}, not 1")

    @property
    def e_x(self) -> float:
        """Bit error rate."""
        return self.p_psi_plus + self.p_psi_minus

    @property
    def e_z(self) -> float:
        """Phase error rate."""
        return self.p_phi_minus + self.p_psi_minus

    @property
    def e_y(self) -> float:
        """Y error rate."""
        return self.p_phi_minus + self.p_psi_plus


def distribution_from_rates(e_x: float, e_y: float, e_z: float) -> PauliDistribution:
    """Invert the three error-rate definitions to outcome probabilities.

    Solves the linear system ``e_x = p_psi_plus + p_psi_minus``,
    ``e_z = p_phi_minus + p_psi_minus``, ``e_y = p_phi_minus + p_psi_plus``.

    Raises
    ------
    InfeasibleRatesError
        If any implied probability is negative beyond rounding tolerance.
    """
    p_psi_plus = (e_x + e_y - e_z) / 2.0
    p_psi_minus = (e_x + e_z - e_y) / 2.0
    p_phi_minus = (e_y + e_z - e_x) / 2.0
    p_identity = 1.0 - p_psi_plus - p_psi_minus - p_phi_minus
    return PauliDistribution(
        p_identity=p_identity,
        p_psi_plus=p_psi_plus,
        p_psi_minus=p_psi_minus,
        p_phi_minus=p_phi_minus,
    )


def joint_bit_phase_entropy(d: PauliDistribution) -> float:
    """Entropy in bits of the four-outcome bit/phase error pattern."""
    total = 0.0
    for p in (d.p_identity, d.p_psi_plus, d.p_phi_minus, d.p_psi_minus):
        if p > 0.0:
            total -= p * math.log2(p)
    return total


def conditional_phase_entropy(d: PauliDistribution) -> float:
    """Entropy of the phase error given the bit error, ``H(e_z | e_x)``.

    Equals the joint pattern entropy minus ``H(e_x)``; always in [0, 1].
    """
    value = joint_bit_phase_entropy(d) - binary_entropy(d.e_x)
    return max(value, 0.0)


def feasible_y_interval(e_x: float, e_z: float) -> tuple[float, float]:
    """Y error rates for which all four outcome probabilities are >= 0."""
    lo = abs(e_x - e_z)
    hi = min(e_x + e_z, 2.0 - e_x - e_z)
    return lo, hi


def _golden_max(f, a: float, b: float, tol: float) -> float:
    """Golden-section maximum of a unimodal ``f`` on [a, b] to width ``tol``."""
    h = b - a
    if h <= tol:
        return f((a + b) / 2.0)
    n = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c = a + _INV_PHI_SQ * h
    d = a + _INV_PHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(n - 1):
        h *= _INV_PHI
        if yc > yd:
            b, d, yd = d, c, yc
            c = a + _INV_PHI_SQ * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            d = a + _INV_PHI * h
            yd = f(d)
    return max(yc, yd)


@lru_cache(maxsize=65536)
def worst_case_conditional_phase_entropy(spec: ProtocolSpec, e_x: float) -> float:
    """Largest ``H(e_z | e_x)`` consistent with the protocol's constraints.

    The phase error rate is ``spec.phase_ratio * e_x``; the Y error rate
    ranges over the protocol's admissible interval intersected with the
    feasible set.  The six-state protocol pins the Y rate, so no
    maximization happens.  The search is a 256-point bracketing grid
    followed by golden-section refinement to 1e-9 in the Y rate; the grid
    guards against maxima at the interval edges.

    Raises
    ------
    InfeasibleRatesError
        If the admissible interval does not intersect the feasible set.
    ValueError
        If ``e_x`` exceeds the protocol's largest meaningful bit error rate.
    """
    if e_x < 0.0 or e_x > spec.max_bit_error + NEG_TOL:
        raise ValueError(
            f"e_x={e_x} outside [0, {spec.max_bit_error}] for {spec.name}"
        )
    e_x = min(max(e_x, 0.0), spec.max_bit_error)
    e_z = spec.phase_ratio * e_x

    def objective(e_y: float) -> float:
        return conditional_phase_entropy(distribution_from_rates(e_x, e_y, e_z))

    if spec.y_pinned:
        return objective(spec.y_lo_ratio * e_x)

    lo, hi = spec.y_interval(e_x)
    feas_lo, feas_hi = feasible_y_interval(e_x, e_z)
    lo = max(lo, feas_lo)
    hi = min(hi, feas_hi)
    if hi < lo - NEG_TOL:
        raise InfeasibleRatesError(
            f"admissible Y interval empty for {spec.name} at e_x={e_x}"
        )
    if hi <= lo:
        return objective(lo)

    # Coarse bracket around the grid argmax, then refine.
    n_grid = 256
    step = (hi - lo) / (n_grid - 1)
    best_i = 0
    best_v = -1.0
    for i in range(n_grid):
        v = objective(lo + i * step)
        if v > best_v:
            best_v = v
            best_i = i
    a = lo + max(best_i - 1, 0) * step
    b = lo + min(best_i + 1, n_grid - 1) * step
    return max(best_v, _golden_max(objective, a, b, 1e-9))
