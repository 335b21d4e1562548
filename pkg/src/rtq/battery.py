"""Gaussian-computable bounds for charging a battery from a perturbed thermal mode.

A single cavity mode ``n`` starts thermal and is perturbed by a Bogoliubov
transformation. To second order its reduced state splits into a slightly hotter
thermal part and a small squeezing part. The local temperature rise sets a
Carnot efficiency for a cycle against the unperturbed reservoir, which bounds
the work storable per cycle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import check_xi, mode_indices
from .bogoliubov import PerturbativeBogoliubov, evolve_perturbative
from .errors import PerturbativeValidityWarning, ZeroTemperatureError
from .gaussian_core import CovarianceMatrix, ThermalParam, thermal_nu, thermal_state

CSV_COLUMNS = ("n", "xi", "h", "a_n", "delta_t_over_t", "eta_cyc", "w4_n", "w_c_bound_over_kbt")
#: Smallness conditions above this value trigger a PerturbativeValidityWarning.
SMALLNESS_THRESHOLD = 0.1


def _positive_xi(xi) -> float:
    xi = xi.xi if isinstance(xi, ThermalParam) else check_xi(xi)
    if xi == 0:
        raise ZeroTemperatureError("zero-temperature limit unsupported: the local temperature shift diverges")
    return xi


@dataclass(frozen=True)
class BatteryCycleReport:
    """Per-cycle quantities for the battery-charging protocol on mode ``n``."""

    n: int
    xi: float
    h: float
    a_n: float
    b_n: complex
    nu_n: float
    delta_t_over_t: float
    eta_cyc: float
    w4_n: float
    w_c_bound_over_kbt: float

    def to_dict(self) -> dict:
        out = {name: getattr(self, name) for name in CSV_COLUMNS}
        out["b_n"] = [self.b_n.real, self.b_n.imag]
        out["nu_n"] = self.nu_n
        return out

    def csv_row(self) -> list:
        return [getattr(self, name) for name in CSV_COLUMNS]


@dataclass(frozen=True)
class ReducedModeDecomposition:
    """Second-order reduced state of mode ``n`` and its thermal/squeezing split.

    ``a_n_direct`` and ``b_n_direct`` are read off the second-order blocks of the
    evolved state (``U_f,nn = nu_n (1 + 2 A h^2)``, ``V_f,nn = 2 nu_n B h^2``) and
    serve as a cross-check of the coefficient formulas.
    """

    a_n: float
    b_n: complex
    state: CovarianceMatrix
    delta_t_over_t: float
    a_n_direct: float
    b_n_direct: complex


def local_temperature_shift(a_n: float, n: int, xi) -> float:
    """Relative local temperature rise per unit ``h^2``: ``2 (A_n / n) xi sinh(n / xi)``."""
    xi = _positive_xi(xi)
    with np.errstate(over="ignore"):
        return float(2.0 * (a_n / n) * xi * np.sinh(n / xi))


def reduced_state_decomposition(series: PerturbativeBogoliubov, xi, n: int) -> ReducedModeDecomposition:
    """Decompose the perturbed reduced state of mode ``n`` of an initially thermal cavity.

    ``A_n = 1/2 sum_m (1 + nu_m/nu_n)|beta1_mn|^2 + 1/2 sum_m (1 - nu_m/nu_n)|alpha1_mn|^2``
    and ``B_n = sum_m (nu_m/nu_n) alpha1*_mn beta1_mn + alpha0*_nn beta2_nn``.

    Args:
        series: Perturbative coefficients (its ``h`` is used for the state).
        xi: Dimensionless temperature, must be positive.
        n: 1-indexed mode.

    Returns:
        A :class:`ReducedModeDecomposition`.

    Raises:
        ZeroTemperatureError: If ``xi == 0``.
    """
    xi = _positive_xi(xi)
    (i,) = mode_indices([n], series.n_modes, "n")
    nu = thermal_nu(np.arange(1, series.n_modes + 1), xi)
    ratio = nu / nu[i]
    a1, b1 = series.alpha1[:, i], series.beta1[:, i]
    a_n = float(0.5 * np.sum((1 + ratio) * np.abs(b1) ** 2) + 0.5 * np.sum((1 - ratio) * np.abs(a1) ** 2))
    b_n = complex(np.sum(ratio * a1.conj() * b1) + series.alpha0[i, i].conj() * series.beta2[i, i])

    perturbed = evolve_perturbative(thermal_state(series.n_modes, xi), series)
    a_direct = float(perturbed.u2[i, i].real / (2 * nu[i]))
    b_direct = complex(perturbed.v2[i, i] / (2 * nu[i]))

    h2 = series.h**2
    state = CovarianceMatrix(
        np.array([[nu[i] * (1 + 2 * a_n * h2)]], dtype=complex),
        np.array([[2 * nu[i] * b_n * h2]], dtype=complex),
    )
    shift = local_temperature_shift(a_n, n, xi)
    if shift * h2 > SMALLNESS_THRESHOLD:
        warnings.warn(
            f"local temperature shift not small: (dT/T) h^2 = {shift * h2:.3g}",
            PerturbativeValidityWarning,
            stacklevel=2,
        )
    return ReducedModeDecomposition(a_n, b_n, state, shift, a_direct, b_direct)


def cycle_bound(a_n: float, n: int, xi, h: float, *, b_n: complex = 0j) -> BatteryCycleReport:
    """Carnot efficiency, fourth-order work and storable-work bound for one cycle.

    ``eta_cyc = 2 (A/n) xi sinh(n/xi) h^2``, ``W4 = 2 A^2 cosh^2(n/xi)`` and
    ``W_c / k_B T <= 2 A^3 (xi/n) sinh(2n/xi) cosh(n/xi) h^6``.

    Args:
        a_n: Thermal-part coefficient ``A_n >= 0``.
        n: Mode index (frequency).
        xi: Dimensionless temperature, must be positive.
        h: Expansion parameter ``>= 0``.
        b_n: Squeezing coefficient, carried into the report only.

    Raises:
        ZeroTemperatureError: If ``xi == 0``.
    """
    xi = _positive_xi(xi)
    if a_n < 0:
        raise ValueError(f"a_n must be nonnegative, got {a_n}")
    if h < 0:
        raise ValueError(f"h must be nonnegative, got {h}")
    y = n / xi
    if math.exp(min(y, 700.0)) * h * h > SMALLNESS_THRESHOLD:
        warnings.warn(
            f"thermal smallness condition not met: exp(n/xi) h^2 = {math.exp(min(y, 700.0)) * h * h:.3g}",
            PerturbativeValidityWarning,
            stacklevel=2,
        )
    with np.errstate(over="ignore"):
        sinh_y, cosh_y, sinh_2y = np.sinh(y), np.cosh(y), np.sinh(2 * y)
        shift = 2.0 * (a_n / n) * xi * sinh_y
        eta_cyc = float(shift * h**2)
        w4 = float(2.0 * a_n**2 * cosh_y**2)
        bound = float(2.0 * a_n**3 * (xi / n) * sinh_2y * cosh_y * h**6)
    return BatteryCycleReport(
        n=int(n),
        xi=xi,
        h=float(h),
        a_n=float(a_n),
        b_n=complex(b_n),
        nu_n=float(thermal_nu(n, xi)),
        delta_t_over_t=float(shift),
        eta_cyc=eta_cyc,
        w4_n=w4,
        w_c_bound_over_kbt=bound,
    )
