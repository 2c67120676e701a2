"""Secret key generation rate bounds and bit-error-rate thresholds.

Five per-pulse rate expressions, ordered from least to most informed about
where conclusive results come from:

* ``rate_shor_preskill``: one-way CSS rate ``p_c * [1 - H(e_x) - H(e_z|e_x)]``
  treating every conclusive result as a single-photon qubit.
* ``rate_gllp``: discounts multi-photon pulses via the fractions ``omega0``
  (empty-pulse results) and ``omega1`` (single-photon-pulse results).
* ``rate_bob`` / ``rate_alice``: additionally credit dark-count results,
  which carry no information usable by an eavesdropper, either on the
  receiver's or the sender's side of the key.
* ``rate_improved``: the better of the last two; never below ``rate_gllp``
  when dark-count results have error rate 1/2.

Rates may be negative; callers clamp at zero for display so that root
finding on the raw value stays well posed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .entropy import (
    InfeasibleRatesError,
    binary_entropy,
    worst_case_conditional_phase_entropy,
)
from .protocols import ProtocolSpec

__all__ = [
    "RateBreakdown",
    "single_photon_class_error",
    "rate_shor_preskill",
    "rate_gllp",
    "rate_bob",
    "rate_alice",
    "rate_improved",
    "nonuniform_dark_bound",
    "threshold_bit_error",
    "max_distance",
]

_TOL = 1e-12


@dataclass(frozen=True)
class RateBreakdown:
    """Conclusive-result rates split by physical origin.

    ``p_sq``, ``p_mq``, ``p_emp``, ``p_dk`` are the per-pulse rates of
    conclusive results from single-photon qubits, multi-photon qubits,
    qubits received on empty pulses, and dark counts.  ``omega0`` and
    ``omega1`` are the fractions of conclusive results originating from
    empty and single-photon pulses.  ``e_x`` is the bit error rate over all
    conclusive results, ``e_x_sq`` the rate restricted to single-photon
    qubit results, and ``e_x_dk`` the dark-count error rate (1/2 for
    uniform detectors).
    """

    p_emp: float
    p_sq: float
    p_mq: float
    p_dk: float
    omega0: float
    omega1: float
    e_x: float
    e_x_sq: float
    e_x_dk: float = 0.5

    def __post_init__(self) -> None:
        for field in ("p_emp", "p_sq", "p_mq", "p_dk"):
            if getattr(self, field) < -_TOL:
                raise ValueError(f"{field} is negative")
        if self.p_c <= 0.0:
            raise ValueError("total conclusive rate must be positive")
        if not (-_TOL <= self.omega0 and -_TOL <= self.omega1):
            raise ValueError("omega fractions must be non-negative")
        if self.omega0 + self.omega1 > 1.0 + 1e-9:
            raise ValueError("omega0 + omega1 exceeds 1")
        for field in ("e_x", "e_x_sq", "e_x_dk"):
            value = getattr(self, field)
            if not -_TOL <= value <= 1.0 + _TOL:
                raise ValueError(f"{field}={value} outside [0, 1]")

    @property
    def p_c(self) -> float:
        """Total conclusive rate."""
        return self.p_emp + self.p_sq + self.p_mq + self.p_dk


def single_photon_class_error(b: RateBreakdown) -> float:
    """Bit error rate over conclusive results from single-photon pulses.

    Mixes single-photon qubit results (rate ``e_x_sq``) with dark counts on
    pulses whose photon was lost (rate ``e_x_dk``), in the proportions
    implied by ``omega1``.
    """
    w1pc = b.omega1 * b.p_c
    if w1pc <= 0.0:
        raise InfeasibleRatesError("no single-photon conclusive results")
    dark_single = w1pc - b.p_sq
    if dark_single < -1e-9 * max(w1pc, 1.0):
        raise InfeasibleRatesError(
            "omega1 inconsistent with single-photon qubit rate"
        )
    dark_single = max(dark_single, 0.0)
    return (b.p_sq * b.e_x_sq + dark_single * b.e_x_dk) / w1pc


def rate_shor_preskill(p_c: float, e_x: float, spec: ProtocolSpec) -> float:
    """One-way CSS key rate with every result treated as a qubit result."""
    if p_c <= 0.0:
        raise ValueError("p_c must be positive")
    h_worst = worst_case_conditional_phase_entropy(spec, e_x)
    return p_c * (1.0 - binary_entropy(e_x) - h_worst)


def rate_gllp(b: RateBreakdown, spec: ProtocolSpec) -> float:
    """Key rate discounting multi-photon pulses but not dark counts.

    ``p_c * [omega0 + omega1 - H(e_x) - omega1 * H(e_z^1 | e_x^1)]`` where
    the conditional entropy is the protocol worst case at the
    single-photon-pulse error rate.
    """
    value = b.omega0 + b.omega1 - binary_entropy(b.e_x)
    if b.omega1 > 0.0:
        e_x_1 = single_photon_class_error(b)
        value -= b.omega1 * worst_case_conditional_phase_entropy(spec, e_x_1)
    return b.p_c * value


def rate_bob(b: RateBreakdown, spec: ProtocolSpec) -> float:
    """Key rate bounding the eavesdropper's knowledge of the receiver's key.

    Dark counts are intrinsically random at the receiver, so they join the
    single-photon qubit results as extractable:
    ``p_sq + p_dk - p_c*H(e_x) - p_sq*H(e_z^sq | e_x^sq)``.
    """
    h_worst = worst_case_conditional_phase_entropy(spec, b.e_x_sq)
    return (
        b.p_sq
        + b.p_dk
        - b.p_c * binary_entropy(b.e_x)
        - b.p_sq * h_worst
    )


def rate_alice(b: RateBreakdown, spec: ProtocolSpec) -> float:
    """Key rate bounding the eavesdropper's knowledge of the sender's key.

    Empty pulses carry no information about the sender's bit, so their
    share of conclusive results is extractable instead of the dark counts:
    ``p_sq + p_c*omega0 - p_c*H(e_x) - p_sq*H(e_z^sq | e_x^sq)``.
    """
    h_worst = worst_case_conditional_phase_entropy(spec, b.e_x_sq)
    return (
        b.p_sq
        + b.p_c * b.omega0
        - b.p_c * binary_entropy(b.e_x)
        - b.p_sq * h_worst
    )


def rate_improved(b: RateBreakdown, spec: ProtocolSpec) -> float:
    """Best of the sender-side and receiver-side bounds."""
    return max(rate_alice(b, spec), rate_bob(b, spec))


def nonuniform_dark_bound(q: float) -> float:
    """Eavesdropper information per dark-count bit with biased detectors.

    With two detectors where one fires with probability ``q`` on a dark
    count, the leaked fraction is ``1 - H(q)``: zero for uniform detectors,
    one full bit for a deterministic detector.
    """
    return 1.0 - binary_entropy(q)


def threshold_bit_error(spec: ProtocolSpec, e_x_sq: float) -> float | None:
    """Largest tolerable bit error rate for a single-photon source.

    As the dark-count share ``f = p_dk / p_c`` sweeps [0, 1], the observed
    error rate is ``e_x(f) = (1-f)*e_x_sq + f/2`` and the normalized key
    rate is ``1 - H(e_x(f)) - (1-f)*H(e_z^sq | e_x^sq)`` (conclusive-rate
    factors cancel).  Returns ``e_x`` at the first downward zero crossing,
    found by bisection on ``f`` to 1e-9 after a bracketing scan, or 0.5 if
    the rate stays non-negative on the whole sweep.  Returns ``None`` when
    the rate is already negative at ``f = 0``.
    """
    if not 0.0 <= e_x_sq < 0.5:
        raise ValueError(f"e_x_sq={e_x_sq} outside [0, 0.5)")
    h_worst = worst_case_conditional_phase_entropy(spec, e_x_sq)

    def mixed_error(f: float) -> float:
        return (1.0 - f) * e_x_sq + f / 2.0

    def margin(f: float) -> float:
        return 1.0 - binary_entropy(mixed_error(f)) - (1.0 - f) * h_worst

    if margin(0.0) < 0.0:
        return None

    # The margin is convex in f and exactly zero at f = 1, so the negative
    # region, when present, is a single interval ending at 1.  Scan for its
    # left edge; the extra point just below 1 catches very narrow dips.
    n_scan = 2048
    grid = [i / n_scan for i in range(n_scan + 1)]
    grid[-1] = 1.0 - 1e-7
    lo = 0.0
    hi = None
    for f in grid[1:]:
        if margin(f) < 0.0:
            hi = f
            break
        lo = f
    if hi is None:
        return 0.5

    while hi - lo > 1e-9:
        mid = (lo + hi) / 2.0
        if margin(mid) < 0.0:
            hi = mid
        else:
            lo = mid
    return mixed_error((lo + hi) / 2.0)


def max_distance(
    scn,
    rate_fn: str = "improved",
    cap_km: float = 1e4,
    tol_km: float = 0.01,
) -> float:
    """Largest channel length with a positive key rate, in km.

    ``rate_fn`` selects ``"gllp"`` or ``"improved"``.  Exponential
    bracketing from 1 km is followed by bisection to ``tol_km``.  Returns
    ``math.inf`` when the rate is still positive at ``cap_km`` and 0.0 when
    it is non-positive already at zero length.
    """
    from .scenario import breakdown  # deferred: scenario imports this module

    if rate_fn == "improved":
        rate = rate_improved
    elif rate_fn == "gllp":
        rate = rate_gllp
    else:
        raise ValueError(f"rate_fn must be 'gllp' or 'improved', got {rate_fn!r}")

    def rate_at(length_km: float) -> float:
        return rate(breakdown(scn.at_length(length_km)), scn.protocol)

    if rate_at(0.0) <= 0.0:
        return 0.0
    if rate_at(cap_km) > 0.0:
        return math.inf

    lo = 0.0
    hi = 1.0
    while hi < cap_km and rate_at(hi) > 0.0:
        lo = hi
        hi *= 2.0
    hi = min(hi, cap_km)

    while hi - lo > tol_km:
        mid = (lo + hi) / 2.0
        if rate_at(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo
