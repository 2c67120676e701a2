"""Protocol catalog: error-rate relations and sifting constants for BB84,
the six-state protocol, and PBC00.

Each protocol pins the phase error rate of single-photon qubit results to a
multiple of the bit error rate and constrains the Y error rate to an
interval (a single point for the six-state protocol, whose full tomography
fixes all three rates to be equal).
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "ProtocolSpec",
    "BB84",
    "SIX_STATE",
    "PBC00",
    "protocol_catalog",
    "get_protocol",
    "conclusive_factor",
]


@dataclass(frozen=True)
class ProtocolSpec:
    """Constants describing one prepare-and-measure protocol.

    Attributes
    ----------
    name : str
        Canonical identifier, one of ``"bb84"``, ``"six-state"``, ``"pbc00"``.
    phase_ratio : float
        Phase error rate of single-photon qubit results as a multiple of
        their bit error rate.
    y_lo_ratio, y_hi_ratio : float
        Admissible Y error rate interval ``[y_lo_ratio * e_x, y_hi_ratio * e_x]``.
        Equal ratios mean the Y rate is pinned (six-state).
    detector_count : int
        Number of single-photon detectors at the receiver.
    dark_conclusive_multiplier : float
        Factor m in the dark-count conclusive rate ``m * C * (1 - eta)``.
    basis_count : int
        Number of encoding bases, used by the intercept-resend attack model.
    max_bit_error : float
        Largest bit error rate with a feasible Bell-outcome distribution.
    """

    name: str
    phase_ratio: float
    y_lo_ratio: float
    y_hi_ratio: float
    detector_count: int
    dark_conclusive_multiplier: float
    basis_count: int
    max_bit_error: float

    @property
    def y_pinned(self) -> bool:
        return self.y_lo_ratio == self.y_hi_ratio

    def y_interval(self, e_x: float) -> tuple[float, float]:
        """Admissible Y error rate interval for bit error rate ``e_x``."""
        return (self.y_lo_ratio * e_x, self.y_hi_ratio * e_x)

    def conclusive_factor(self, e_x: float) -> float:
        """Fraction of received qubit states yielding a conclusive result.

        BB84 and the six-state protocol use strongly biased basis choice,
        so asymptotically every received qubit is kept.  PBC00's trine
        measurement is conclusive at rate ``1 / (2 - e_x)``.
        """
        if not 0.0 <= e_x <= 1.0:
            raise ValueError(f"e_x={e_x} outside [0, 1]")
        if self.name == "pbc00":
            return 1.0 / (2.0 - e_x)
        return 1.0


BB84 = ProtocolSpec(
    name="bb84",
    phase_ratio=1.0,
    y_lo_ratio=0.0,
    y_hi_ratio=2.0,
    detector_count=2,
    dark_conclusive_multiplier=2.0,
    basis_count=2,
    max_bit_error=1.0,
)

# Full basis tomography makes all three error rates equal, hence the pinned
# Y interval and the feasibility ceiling at 2/3.
SIX_STATE = ProtocolSpec(
    name="six-state",
    phase_ratio=1.0,
    y_lo_ratio=1.0,
    y_hi_ratio=1.0,
    detector_count=2,
    dark_conclusive_multiplier=2.0,
    basis_count=3,
    max_bit_error=2.0 / 3.0,
)

# Three detectors, but a dark count survives basis reconciliation only 2/3
# of the time, so the conclusive dark rate is 3C * (2/3) = 2C.
PBC00 = ProtocolSpec(
    name="pbc00",
    phase_ratio=1.25,
    y_lo_ratio=0.25,
    y_hi_ratio=2.25,
    detector_count=3,
    dark_conclusive_multiplier=2.0,
    basis_count=3,
    max_bit_error=0.8,
)

_CATALOG = (BB84, SIX_STATE, PBC00)


def protocol_catalog() -> tuple[ProtocolSpec, ...]:
    """All supported protocols."""
    return _CATALOG


def get_protocol(name: str) -> ProtocolSpec:
    """Look up a protocol by its canonical name."""
    for spec in _CATALOG:
        if spec.name == name:
            return spec
    valid = ", ".join(s.name for s in _CATALOG)
    raise ValueError(f"unknown protocol {name!r}; expected one of: {valid}")


def conclusive_factor(spec: ProtocolSpec, e_x: float) -> float:
    """Module-level alias for :meth:`ProtocolSpec.conclusive_factor`."""
    return spec.conclusive_factor(e_x)
