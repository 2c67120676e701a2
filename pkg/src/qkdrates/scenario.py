"""Physical channel and source models feeding the rate formulas.

A :class:`Scenario` bundles protocol, source, fiber link, and detector
parameters and fully determines a :class:`~qkdrates.keyrate.RateBreakdown`
for an honest (eavesdropper-free) channel.  Dark counts use the linearized
conclusive rate ``2C`` per pulse with no arriving photon; simultaneous
fires of two detectors are discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

from . import keyrate
from .keyrate import RateBreakdown
from .protocols import ProtocolSpec

__all__ = [
    "LinkModel",
    "DetectorModel",
    "SourceKind",
    "SourceModel",
    "Scenario",
    "DecoyInversionError",
    "NoDecoyEstimate",
    "SweepRow",
    "transmittance",
    "single_photon_breakdown",
    "poisson_breakdown",
    "breakdown",
    "decoy_invert",
    "intrinsic_error_from_decoy",
    "worst_case_no_decoy",
    "distance_sweep",
]

_DB_TO_NEPER = math.log(10.0) / 10.0


class DecoyInversionError(ValueError):
    """Raised when decoy statistics admit no physical single-photon solution."""


@dataclass(frozen=True)
class LinkModel:
    """Fiber link with exponential loss ``eta = exp(-A * l)``."""

    attenuation_db_per_km: float
    length_km: float

    def __post_init__(self) -> None:
        if self.attenuation_db_per_km < 0.0:
            raise ValueError("attenuation must be >= 0 dB/km")
        if self.length_km < 0.0:
            raise ValueError("length must be >= 0 km")


@dataclass(frozen=True)
class DetectorModel:
    """Threshold detectors with per-pulse dark count probability ``C``."""

    dark_count_prob: float
    detector_count: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.dark_count_prob < 1.0:
            raise ValueError("dark count probability must be in [0, 1)")
        if self.detector_count < 1:
            raise ValueError("detector count must be >= 1")


class SourceKind(Enum):
    SINGLE_PHOTON = "single-photon"
    POISSONIAN = "poissonian"


@dataclass(frozen=True)
class SourceModel:
    """Photon-number statistics of the sender's source."""

    kind: SourceKind
    mean_photon_number: float | None = None

    def __post_init__(self) -> None:
        if self.kind is SourceKind.POISSONIAN:
            if self.mean_photon_number is None or self.mean_photon_number <= 0.0:
                raise ValueError("Poissonian source needs mean photon number > 0")
        elif self.mean_photon_number is not None:
            raise ValueError("single-photon source takes no mean photon number")

    @classmethod
    def single_photon(cls) -> "SourceModel":
        return cls(kind=SourceKind.SINGLE_PHOTON)

    @classmethod
    def poissonian(cls, mean_photon_number: float) -> "SourceModel":
        return cls(kind=SourceKind.POISSONIAN, mean_photon_number=mean_photon_number)


@dataclass(frozen=True)
class Scenario:
    """Complete parameter set for one operating point.

    ``e_x_sq`` is the intrinsic, distance-independent bit error rate of
    received qubit states (optics misalignment, channel decoherence).
    """

    protocol: ProtocolSpec
    source: SourceModel
    link: LinkModel
    detector: DetectorModel
    e_x_sq: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.e_x_sq <= 0.5:
            raise ValueError("e_x_sq must be in [0, 0.5]")
        if self.detector.detector_count != self.protocol.detector_count:
            raise ValueError(
                f"{self.protocol.name} uses {self.protocol.detector_count} "
                f"detectors, got {self.detector.detector_count}"
            )

    def at_length(self, length_km: float) -> "Scenario":
        """Copy of this scenario at a different channel length."""
        return replace(self, link=replace(self.link, length_km=length_km))


def transmittance(link: LinkModel) -> float:
    """Probability that a photon traverses the link."""
    return math.exp(-link.attenuation_db_per_km * _DB_TO_NEPER * link.length_km)


def single_photon_breakdown(scn: Scenario) -> RateBreakdown:
    """Conclusive-rate decomposition for an ideal single-photon source.

    Every pulse carries exactly one photon, so every conclusive result is
    either a received qubit (``conclusive_factor * eta``) or a dark count
    on a lost photon (``2C * (1 - eta)``), and ``omega1 = 1``.
    """
    if scn.source.kind is not SourceKind.SINGLE_PHOTON:
        raise ValueError("scenario does not use a single-photon source")
    eta = transmittance(scn.link)
    c = scn.detector.dark_count_prob
    m = scn.protocol.dark_conclusive_multiplier
    p_sq = scn.protocol.conclusive_factor(scn.e_x_sq) * eta
    p_dk = m * c * (1.0 - eta)
    p_c = p_sq + p_dk
    e_x = (p_sq * scn.e_x_sq + p_dk * 0.5) / p_c
    return RateBreakdown(
        p_emp=0.0,
        p_sq=p_sq,
        p_mq=0.0,
        p_dk=p_dk,
        omega0=0.0,
        omega1=1.0,
        e_x=e_x,
        e_x_sq=scn.e_x_sq,
    )


def poisson_breakdown(scn: Scenario) -> RateBreakdown:
    """Conclusive-rate decomposition for a Poissonian source.

    With emission probabilities ``P_k = exp(-mu) mu^k / k!``:

    * single-photon qubit results: ``cf * P_1 * eta``,
    * multi-photon qubit results: ``cf * sum_{k>=2} P_k (1 - (1-eta)^k)``,
    * dark counts: ``2C`` times the no-arrival probability ``exp(-eta*mu)``,
    * empty-pulse qubit results: zero on an honest channel.

    Single-photon and empty-pulse conclusive fractions follow from splitting
    the dark counts by emitted photon number: ``omega1 * p_c = p_sq +
    2C * P_1 * (1 - eta)`` and ``omega0 * p_c = 2C * P_0``.  Multi-photon
    qubit results carry the same intrinsic error rate as single-photon ones;
    the rate formulas still grant the eavesdropper full information on them.
    """
    if scn.source.kind is not SourceKind.POISSONIAN:
        raise ValueError("scenario does not use a Poissonian source")
    mu = scn.source.mean_photon_number
    eta = transmittance(scn.link)
    c = scn.detector.dark_count_prob
    m = scn.protocol.dark_conclusive_multiplier
    cf = scn.protocol.conclusive_factor(scn.e_x_sq)

    p0 = math.exp(-mu)
    p1 = mu * math.exp(-mu)
    no_arrival = math.exp(-eta * mu)

    p_sq = cf * p1 * eta
    p_mq = cf * max(1.0 - no_arrival - p1 * eta, 0.0)
    p_dk = m * c * no_arrival
    p_c = p_sq + p_mq + p_dk

    omega1 = (p_sq + m * c * p1 * (1.0 - eta)) / p_c
    omega0 = m * c * p0 / p_c
    e_x = ((p_sq + p_mq) * scn.e_x_sq + p_dk * 0.5) / p_c
    return RateBreakdown(
        p_emp=0.0,
        p_sq=p_sq,
        p_mq=p_mq,
        p_dk=p_dk,
        omega0=omega0,
        omega1=omega1,
        e_x=e_x,
        e_x_sq=scn.e_x_sq,
    )


def breakdown(scn: Scenario) -> RateBreakdown:
    """Dispatch to the breakdown matching the scenario's source kind."""
    if scn.source.kind is SourceKind.SINGLE_PHOTON:
        return single_photon_breakdown(scn)
    return poisson_breakdown(scn)


def decoy_invert(
    p_c_omega1: float,
    e_x_1: float,
    mu_bar: float,
    eta: float,
    c: float,
) -> tuple[float, float]:
    """Recover single-photon qubit rate and error rate from decoy estimates.

    Inverts the two relations linking the decoy-estimated single-photon
    conclusive rate ``p_c * omega1`` and error rate ``e_x^1`` to the
    underlying qubit quantities, assuming dark counts carry error rate 1/2:

    ``p_sq = p_c*omega1 - 2C * exp(-mu) * mu * (1 - eta)``
    ``e_x_sq = (e_x^1 * p_c*omega1 / (exp(-mu) * mu) - C * (1 - eta)) / eta``

    The relations apply to protocols whose conclusive factor is 1; see
    :func:`intrinsic_error_from_decoy` for the PBC00 correction.

    Raises
    ------
    DecoyInversionError
        If the estimates fall below the dark-count floor or the recovered
        error rate is outside [0, 1] beyond 1e-9.
    """
    if mu_bar <= 0.0 or not 0.0 < eta <= 1.0:
        raise ValueError("mu_bar must be > 0 and eta in (0, 1]")
    p1 = math.exp(-mu_bar) * mu_bar
    dark_single = 2.0 * c * p1 * (1.0 - eta)
    if p_c_omega1 <= dark_single:
        raise DecoyInversionError(
            "single-photon conclusive rate below the dark-count floor"
        )
    p_sq = p_c_omega1 - dark_single
    e_x_sq = (e_x_1 * p_c_omega1 / p1 - c * (1.0 - eta) * 1.0) / eta
    if e_x_sq < -1e-9 or e_x_sq > 1.0 + 1e-9:
        raise DecoyInversionError(f"recovered e_x_sq={e_x_sq} outside [0, 1]")
    return p_sq, min(max(e_x_sq, 0.0), 1.0)


def intrinsic_error_from_decoy(spec: ProtocolSpec, e_x_sq_raw: float) -> float:
    """Undo the conclusive factor folded into a decoy-recovered error rate.

    For protocols with conclusive factor 1 this is the identity.  For PBC00
    the inversion returns ``e / (2 - e)``; solving for ``e`` gives
    ``2*raw / (1 + raw)``.
    """
    if spec.name != "pbc00":
        return e_x_sq_raw
    return 2.0 * e_x_sq_raw / (1.0 + e_x_sq_raw)


@dataclass(frozen=True)
class NoDecoyEstimate:
    """Worst-case single-photon statistics without decoy states."""

    omega1_lower: float
    e_x_1_upper: float
    usable: bool


def worst_case_no_decoy(p_c: float, e_x: float, mu_bar: float) -> NoDecoyEstimate:
    """Pessimistic single-photon fraction assuming multi-photon pulses
    always yield conclusive results.

    ``omega1 >= (p_c - p_multi) / p_c`` with ``p_multi = 1 - exp(-mu)(1+mu)``,
    and all observed errors are attributed to the single-photon class.  When
    the multi-photon emission rate exceeds ``p_c`` no usable bound remains.
    """
    if p_c <= 0.0:
        raise ValueError("p_c must be positive")
    p_multi = 1.0 - math.exp(-mu_bar) * (1.0 + mu_bar)
    if p_multi >= p_c:
        return NoDecoyEstimate(omega1_lower=0.0, e_x_1_upper=0.5, usable=False)
    omega1_lower = (p_c - p_multi) / p_c
    e_x_1_upper = min(0.5, e_x / omega1_lower)
    return NoDecoyEstimate(
        omega1_lower=omega1_lower, e_x_1_upper=e_x_1_upper, usable=True
    )


@dataclass(frozen=True)
class SweepRow:
    """One distance grid point with display-clamped rates."""

    length_km: float
    eta: float
    breakdown: RateBreakdown = field(repr=False)
    rate_old: float
    rate_new: float


def distance_sweep(
    scn: Scenario, l_min: float, l_max: float, step: float
) -> list[SweepRow]:
    """Evaluate breakdown and key rates on a distance grid.

    Returns one row per grid point ``l_min, l_min + step, ... <= l_max``
    with ``rate_old`` (multi-photon discount only) and ``rate_new`` (dark
    counts credited), both clamped at zero for display.
    """
    if not 0.0 <= l_min <= l_max:
        raise ValueError("need 0 <= l_min <= l_max")
    if step <= 0.0:
        raise ValueError("step must be positive")
    n_rows = int(math.floor((l_max - l_min) / step + 1e-9)) + 1
    rows = []
    for i in range(n_rows):
        length = l_min + i * step
        point = scn.at_length(length)
        b = breakdown(point)
        rows.append(
            SweepRow(
                length_km=length,
                eta=transmittance(point.link),
                breakdown=b,
                rate_old=max(keyrate.rate_gllp(b, scn.protocol), 0.0),
                rate_new=max(keyrate.rate_improved(b, scn.protocol), 0.0),
            )
        )
    return rows
