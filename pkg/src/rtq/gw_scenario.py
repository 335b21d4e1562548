"""Gravitational-wave excitation of phonons in an elongated condensate.

A wave of strain ``epsilon`` modulates the condensate length and resonantly
creates phonon pairs in modes ``(k, k')`` with ``k + k' = Omega`` (drive
frequency in units of ``pi c_s / L``). To leading order in ``epsilon`` the only
growing Bogoliubov coefficient is ``beta_kk' = (pi epsilon / 4) sqrt(k k') tau``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ._validation import check_xi
from .bogoliubov import PerturbativeBogoliubov
from .errors import NonResonantError, PerturbativeValidityWarning
from .gaussian_core import ModePartition, SqueezeSpec, ThermalParam
from .thermo_efficiency import efficiency_sms, structure_functions

#: Boltzmann constant in J/K (exact in the 2019 SI).
K_B = 1.380649e-23
#: Reduced Planck constant in J s.
HBAR = 1.054571817e-34
#: Above this value of ``epsilon * tau`` the leading-order coefficient is unreliable.
VALIDITY_THRESHOLD = 0.1

STATE_FAMILIES = ("passive", "sms")


def xi_parameter(temperature_k: float, length_m: float, speed_mps: float) -> ThermalParam:
    """Dimensionless temperature ``k_B T L / (pi hbar c)``.

    Args:
        temperature_k: Temperature in kelvin.
        length_m: Cavity (condensate) length in meters.
        speed_mps: Propagation speed in m/s (speed of sound for phonons).

    Returns:
        The corresponding :class:`ThermalParam`.
    """
    for name, value in (("temperature", temperature_k), ("length", length_m), ("speed", speed_mps)):
        if not np.isfinite(value) or value < 0:
            raise ValueError(f"{name} must be finite and nonnegative, got {value}")
    if temperature_k == 0:
        return ThermalParam(0.0)
    if speed_mps == 0:
        raise ValueError("speed must be positive for a nonzero temperature")
    return ThermalParam(K_B * temperature_k * length_m / (math.pi * HBAR * speed_mps))


@dataclass(frozen=True)
class GWScenario:
    """Physical and dimensionless parameters of one gravitational-wave run.

    ``omega_drive`` defaults to the resonant value ``k + k'``.
    """

    epsilon: float
    tau: float
    pair: tuple
    omega_drive: float | None = None
    temperature_k: float = 0.0
    length_m: float | None = None
    sound_speed_mps: float | None = None

    def __post_init__(self):
        pair = tuple(int(k) for k in self.pair)
        if len(pair) != 2 or pair[0] == pair[1] or min(pair) < 1:
            raise ValueError("pair must be two distinct positive mode indices")
        object.__setattr__(self, "pair", pair)
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise ValueError(f"epsilon must be finite and nonnegative, got {self.epsilon}")
        if not np.isfinite(self.tau) or self.tau < 0:
            raise ValueError(f"tau must be finite and nonnegative, got {self.tau}")
        if self.omega_drive is None:
            object.__setattr__(self, "omega_drive", float(sum(pair)))

    @property
    def kappa(self) -> int:
        return sum(self.pair)

    @property
    def xi(self) -> float:
        if self.temperature_k == 0:
            return 0.0
        if self.length_m is None or self.sound_speed_mps is None:
            raise ValueError("length and sound speed are needed to convert a nonzero temperature")
        return xi_parameter(self.temperature_k, self.length_m, self.sound_speed_mps).xi

    @classmethod
    def from_document(cls, doc: Mapping) -> "GWScenario":
        """Build a scenario from the JSON layout with nK / um units."""
        return cls(
            epsilon=float(doc["epsilon"]),
            tau=float(doc["tau"]),
            pair=tuple(doc["pair"]),
            omega_drive=None if doc.get("omega_drive") is None else float(doc["omega_drive"]),
            temperature_k=float(doc.get("temperature_nK", 0.0)) * 1e-9,
            length_m=None if doc.get("length_um") is None else float(doc["length_um"]) * 1e-6,
            sound_speed_mps=None if doc.get("sound_speed_mps") is None else float(doc["sound_speed_mps"]),
        )


def gw_coefficient(pair: Sequence[int], tau: float) -> float:
    """Resonant pair-creation coefficient per unit strain, ``(pi/4) sqrt(k k') tau``."""
    k, kp = pair
    return math.pi / 4.0 * math.sqrt(k * kp) * tau


def gw_transform(scenario: GWScenario, n_modes: int | None = None) -> PerturbativeBogoliubov:
    """Perturbative series for the resonant pair with ``h = epsilon``.

    ``beta1`` couples only the pair. ``alpha2 = beta1 beta1^dagger / 2`` is the
    minimal completion that keeps the second-order identity satisfied, so the
    series evolves covariance matrices consistently to second order.

    Args:
        scenario: The gravitational-wave parameters.
        n_modes: Number of cavity modes (defaults to the larger pair index).

    Raises:
        NonResonantError: If the drive frequency differs from ``k + k'``.
    """
    if not math.isclose(scenario.omega_drive, scenario.kappa, rel_tol=0, abs_tol=1e-12):
        raise NonResonantError(
            f"non-resonant pair: drive frequency {scenario.omega_drive:g} != k + k' = {scenario.kappa}"
        )
    n = max(scenario.pair) if n_modes is None else int(n_modes)
    if n < max(scenario.pair):
        raise ValueError(f"n_modes = {n} does not contain the pair {scenario.pair}")
    product = scenario.epsilon * scenario.tau
    if product > VALIDITY_THRESHOLD:
        warnings.warn(f"epsilon * tau = {product:.3g} is not small", PerturbativeValidityWarning, stacklevel=2)
    k, kp = (m - 1 for m in scenario.pair)
    beta1 = np.zeros((n, n), dtype=complex)
    beta1[k, kp] = beta1[kp, k] = gw_coefficient(scenario.pair, scenario.tau)
    zeros = np.zeros((n, n), dtype=complex)
    return PerturbativeBogoliubov(
        alpha0=np.eye(n, dtype=complex),
        alpha1=zeros,
        alpha2=beta1 @ beta1.conj().T / 2,
        beta1=beta1,
        beta2=zeros,
        h=scenario.epsilon,
    )


def gw_efficiency(
    xi,
    kappa: int,
    state_family: str = "passive",
    *,
    r: float = 0.5,
    tau: float = 100.0,
    pair: Sequence[int] | None = None,
) -> float:
    """Closed-form efficiency ``1 - xi/kappa`` for a resonant pair forming the system.

    For ``state_family == "sms"`` the structure functions of a squeezed pair are
    evaluated first and checked against their leading-order forms
    (``Z_S = 2|b|^2``, ``Z'_S = -kappa |b|^2``, ``C_S = 4|b|^2 sinh^2 r``,
    ``C'_S = -2 kappa |b|^2 sinh^2 r``) before returning.

    Args:
        xi: Dimensionless temperature.
        kappa: Sum of the pair's mode indices, ``>= 2``.
        state_family: ``"passive"`` or ``"sms"``.
        r: Squeezing used for the check on the ``sms`` path.
        tau: Dimensionless time used for the check on the ``sms`` path.
        pair: Pair used for the check; defaults to ``(1, kappa - 1)``.

    Returns:
        The efficiency.
    """
    xi = xi.xi if isinstance(xi, ThermalParam) else check_xi(xi)
    if int(kappa) != kappa or kappa < 2:
        raise ValueError(f"kappa must be an integer >= 2, got {kappa}")
    if state_family not in STATE_FAMILIES:
        raise ValueError(f"state_family must be one of {STATE_FAMILIES}, got {state_family!r}")
    eta = 1.0 - xi / kappa
    if state_family == "sms":
        if pair is None:
            if kappa < 3:
                # a distinct pair needs kappa >= 3; nothing to check
                return eta
            pair = (1, int(kappa) - 1)
        _check_squeezed_pair(xi, pair, r, tau, eta)
    return eta


def _check_squeezed_pair(xi: float, pair: Sequence[int], r: float, tau: float, expected: float) -> None:
    scenario = GWScenario(epsilon=0.0, tau=tau, pair=tuple(pair))
    series = gw_transform(scenario)
    part = ModePartition.from_system(pair, series.n_modes)
    squeeze = SqueezeSpec("single_mode", r, 0.0, tuple(pair))
    sf = structure_functions(series, part, squeeze)
    b2 = gw_coefficient(pair, tau) ** 2
    kappa = sum(pair)
    s2 = math.sinh(r) ** 2
    checks = {
        "Z_S": (sf.z["S"][0], 2 * b2),
        "dZ_S": (sf.z["S"][1], -kappa * b2),
        "C_S": (sf.c_s[0], 4 * b2 * s2),
        "dC_S": (sf.c_s[1], -2 * kappa * b2 * s2),
    }
    for name, (got, want) in checks.items():
        if not math.isclose(got, want, rel_tol=1e-12, abs_tol=1e-300):
            raise RuntimeError(f"squeezed-pair asymptotics failed for {name}: {got!r} != {want!r}")
    got_eta = efficiency_sms(series.with_h(1.0), part, squeeze, xi).eta
    if not math.isclose(got_eta, expected, rel_tol=0, abs_tol=1e-12):
        raise RuntimeError(f"squeezed-pair efficiency {got_eta!r} differs from {expected!r}")
