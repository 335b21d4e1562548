r"""Energy bookkeeping, entropy changes and work-extraction efficiencies.

The efficiency of transferring energy into an accessible subsystem ``S`` of the
cavity ``C = S + E`` is

.. math::

    \eta = 1 - \frac{\Delta E_E}{\Delta E_C} - w\,\xi\,\frac{\Delta S_S}{\Delta E_C},

with energies in units where mode ``k`` has frequency ``k``. Two entropy
conventions are available:

``"exact"`` (``w = 1``)
    ``Delta S_S`` is the change of the von Neumann entropy of the reduced
    Gaussian state of ``S``.
``"perturbative"`` (``w = 1/2``)
    ``Delta S_S = 1/2 sum_{k in S} (nu_k,f - nu_k,i)`` built from the local
    single-mode symplectic eigenvalues. This is the lowest-order surrogate that
    the closed-form expressions below are written in.

The closed forms (passive, single-mode squeezed, two-mode squeezed initial
states) are expressed through the structure functions :func:`z_function`,
:func:`c_function`, :func:`g_function`, :func:`d_function` and :func:`r_function`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._validation import DENOMINATOR_TOL, check_xi, mode_indices
from .bogoliubov import PerturbativeBogoliubov, PerturbedState, evolve_perturbative
from .errors import (
    DenominatorOscillationZeroError,
    DimensionMismatchError,
    FirstOrderInapplicableError,
    NoEnergyTransferError,
    NonPhysicalStateError,
    PerturbativeHierarchyError,
)
from .gaussian_core import (
    CovarianceMatrix,
    ModePartition,
    SqueezeSpec,
    ThermalParam,
    reduce,
    symplectic_metric,
    von_neumann_entropy,
)

ENTROPY_CONVENTIONS = {"exact": 1.0, "perturbative": 0.5}
CSV_COLUMNS = ("scenario_id", "h", "xi", "delta_e_s", "delta_e_e", "delta_e_c", "delta_s_s", "eta", "method")
#: Squeezing must exceed the expansion parameter by this factor for the two-mode closed form.
TMS_HIERARCHY_FACTOR = 100.0


@dataclass(frozen=True)
class ThermoReport:
    """Energy, entropy and efficiency figures for one scenario.

    ``diagnostics`` holds cross-checks (alternative conventions, structure
    function values, scenario class) and never feeds back into ``eta``.
    """

    delta_e_s: float
    delta_e_e: float
    delta_e_c: float
    delta_s_s: float
    eta: float
    method: str
    xi: float = 0.0
    h: float = float("nan")
    scenario_id: str = ""
    diagnostics: Mapping = field(default_factory=dict)

    def __post_init__(self):
        scale = max(1.0, abs(self.delta_e_c))
        if abs(self.delta_e_c - (self.delta_e_s + self.delta_e_e)) > 1e-10 * scale:
            raise ValueError("energy bookkeeping violated: delta_e_c != delta_e_s + delta_e_e")

    def to_dict(self) -> dict:
        """Flat JSON-compatible mapping; diagnostics are prefixed with ``diag_``."""
        out = {name: getattr(self, name) for name in CSV_COLUMNS}
        for key, value in self.diagnostics.items():
            out[f"diag_{key}"] = value
        return out

    def csv_row(self) -> list:
        return [getattr(self, name) for name in CSV_COLUMNS]


def _xi(xi) -> float:
    return xi.xi if isinstance(xi, ThermalParam) else check_xi(xi)


def _partition_indices(part: ModePartition, n_modes: int):
    if part.count != n_modes:
        raise DimensionMismatchError(f"partition covers {part.count} modes, state has {n_modes}")
    s = mode_indices(part.system, n_modes, "partition.system")
    e = mode_indices(part.environment, n_modes, "partition.environment")
    return s, e


def _energies(delta_u_diag: np.ndarray, part: ModePartition) -> tuple[float, float, float]:
    s, e = _partition_indices(part, delta_u_diag.size)
    per_mode = np.arange(1, delta_u_diag.size + 1) * np.real(delta_u_diag) / 2.0
    de_s = float(np.sum(per_mode[s]))
    de_e = float(np.sum(per_mode[e])) if e else 0.0
    return de_s, de_e, de_s + de_e


def energy_change(initial: CovarianceMatrix, final: CovarianceMatrix, part: ModePartition) -> tuple[float, float, float]:
    """Energy absorbed by S, E and the whole cavity.

    Args:
        initial: State before the transformation.
        final: State after the transformation.
        part: System/environment split.

    Returns:
        ``(dE_S, dE_E, dE_C)`` with ``dE_C = dE_S + dE_E`` by construction.
    """
    if initial.n_modes != final.n_modes:
        raise DimensionMismatchError("initial and final states have different mode counts")
    return _energies(np.diag(final.u - initial.u), part)


def _local_entropy_change(initial: CovarianceMatrix, du: np.ndarray, dv: np.ndarray, system: list[int]) -> float:
    """Half the summed change of local symplectic eigenvalues, free of cancellation."""
    u_i = np.real(np.diag(initial.u))[system]
    v_i = np.diag(initial.v)[system]
    du = np.real(du[system])
    dv = dv[system]
    nu_i = np.sqrt(np.clip(u_i * u_i - np.abs(v_i) ** 2, 0.0, None))
    d_nu_sq = du * (2 * u_i + du) - np.real(np.conj(dv) * (2 * v_i + dv))
    nu_f = np.sqrt(np.clip(nu_i * nu_i + d_nu_sq, 0.0, None))
    return float(0.5 * np.sum(d_nu_sq / (nu_f + nu_i)))


def system_entropy_change(initial: CovarianceMatrix, final: CovarianceMatrix, part: ModePartition, convention: str = "exact") -> float:
    """Entropy change of S under the chosen convention (see module docstring)."""
    s, _ = _partition_indices(part, initial.n_modes)
    if convention == "exact":
        return von_neumann_entropy(reduce(final, part.system)) - von_neumann_entropy(reduce(initial, part.system))
    if convention == "perturbative":
        return _local_entropy_change(initial, np.diag(final.u - initial.u), np.diag(final.v - initial.v), s)
    raise ValueError(f"unknown entropy convention {convention!r}; expected one of {sorted(ENTROPY_CONVENTIONS)}")


def _general_report(
    initial: CovarianceMatrix,
    final: CovarianceMatrix,
    du: np.ndarray,
    dv: np.ndarray,
    part: ModePartition,
    xi: float,
    entropy: str,
    h: float,
    scenario_id: str,
) -> ThermoReport:
    if entropy not in ENTROPY_CONVENTIONS:
        raise ValueError(f"unknown entropy convention {entropy!r}; expected one of {sorted(ENTROPY_CONVENTIONS)}")
    s, _ = _partition_indices(part, initial.n_modes)
    de_s, de_e, de_c = _energies(du, part)
    if abs(de_c) <= DENOMINATOR_TOL:
        raise NoEnergyTransferError(f"no energy transfer: delta_E_C = {de_c:.3e}; the efficiency is undefined")

    ds = {"perturbative": _local_entropy_change(initial, du, dv, s)}
    try:
        ds["exact"] = von_neumann_entropy(reduce(final, part.system)) - von_neumann_entropy(reduce(initial, part.system))
    except NonPhysicalStateError:
        if entropy == "exact":
            raise
        ds["exact"] = None

    def eta_for(conv):
        if ds[conv] is None:
            return None
        return 1.0 - de_e / de_c - ENTROPY_CONVENTIONS[conv] * xi * ds[conv] / de_c

    diagnostics = {
        "entropy_convention": entropy,
        "entropy_prefactor": ENTROPY_CONVENTIONS[entropy],
        "delta_s_exact": ds["exact"],
        "delta_s_perturbative": ds["perturbative"],
        "eta_exact": eta_for("exact"),
        "eta_perturbative": eta_for("perturbative"),
    }
    return ThermoReport(de_s, de_e, de_c, ds[entropy], eta_for(entropy), "general", xi, h, scenario_id, diagnostics)


def efficiency_general(
    initial: CovarianceMatrix,
    final: CovarianceMatrix,
    part: ModePartition,
    xi,
    *,
    entropy: str = "exact",
    h: float = float("nan"),
    scenario_id: str = "",
) -> ThermoReport:
    """Efficiency from the full initial and final covariance matrices.

    Args:
        initial: State before the transformation.
        final: State after the transformation.
        part: System/environment split.
        xi: Dimensionless temperature (float or :class:`ThermalParam`).
        entropy: ``"exact"`` or ``"perturbative"``; both values are always
            reported in ``diagnostics``.
        h: Expansion parameter, recorded in the report only.
        scenario_id: Label copied to the report.

    Returns:
        A :class:`ThermoReport` with ``method == "general"``.

    Raises:
        NoEnergyTransferError: If ``|dE_C| <= 1e-14``.
    """
    if initial.n_modes != final.n_modes:
        raise DimensionMismatchError("initial and final states have different mode counts")
    du, dv = np.diag(final.u - initial.u), np.diag(final.v - initial.v)
    return _general_report(initial, final, du, dv, part, _xi(xi), entropy, h, scenario_id)


def efficiency_perturbed(
    perturbed: PerturbedState,
    part: ModePartition,
    xi,
    *,
    h: float | None = None,
    entropy: str = "exact",
    scenario_id: str = "",
) -> ThermoReport:
    """General efficiency of a perturbatively evolved state at expansion parameter ``h``.

    Population changes are taken from the order-by-order blocks, so they stay
    accurate when ``h`` is so small that ``U_f - U_i`` would cancel catastrophically.
    """
    h = perturbed.h if h is None else float(h)
    final = perturbed.assemble(h)
    du, dv = np.diag(perturbed.delta_u(h)), np.diag(perturbed.delta_v(h))
    return _general_report(perturbed.base, final, du, dv, part, _xi(xi), entropy, h, scenario_id)


def _second_order_nu_sum(perturbed: PerturbedState, system: Sequence[int]) -> float:
    """Sum of second-order symplectic eigenvalue shifts of the reduced S state.

    Uses ``sum_k nu_k^2 = Tr((K sigma)^2) / 2``; with an initially pure S state every
    ``nu_k = 1 + nu_k^(2) h^2`` so ``sum nu^(2)`` is a quarter of the ``h^2``
    coefficient of ``Tr((K sigma)^2)``.
    """
    idx = mode_indices(system, perturbed.base.n_modes, "partition.system")
    sel = np.ix_(idx, idx)

    def block(u, v):
        u, v = u[sel], v[sel]
        return np.block([[u, v], [v.conj(), u.conj()]])

    s0 = block(perturbed.u0, perturbed.v0)
    s1 = block(perturbed.u1, perturbed.v1)
    s2 = block(perturbed.u2, perturbed.v2)
    k = symplectic_metric(len(idx))
    ks0, ks1, ks2 = k @ s0, k @ s1, k @ s2
    nu_sq_sum = np.trace(ks0 @ ks0).real / 2
    if abs(nu_sq_sum - len(idx)) > 1e-9 * nu_sq_sum:
        warnings.warn(
            "reduced S state is not initially pure; the second-order eigenvalue sum is only approximate",
            RuntimeWarning,
            stacklevel=3,
        )
    coeff = np.trace(2 * ks0 @ ks2 + ks1 @ ks1).real
    return float(coeff / 4.0)


def efficiency_first_order(
    series: PerturbativeBogoliubov,
    initial: CovarianceMatrix,
    part: ModePartition,
    xi,
    *,
    scenario_id: str = "",
) -> ThermoReport:
    """Efficiency when population changes start at first order in ``h``.

    ``eta = 1 - N/D - (xi/2) sum_{k in S} nu_k^(2) h / D`` where ``D`` (``N``) is the
    frequency-weighted first-order population change of C (E).

    Raises:
        FirstOrderInapplicableError: If ``|D| <= 1e-14``, as for passive initial
            states; use :func:`efficiency_passive` or :func:`efficiency_sms` then.
    """
    xi = _xi(xi)
    perturbed = evolve_perturbative(initial, series)
    s, e = _partition_indices(part, initial.n_modes)
    first = np.arange(1, initial.n_modes + 1) * np.real(np.diag(perturbed.u1)) / 2.0
    numerator = float(np.sum(first[e])) if e else 0.0
    denominator = float(np.sum(first[s])) + numerator
    if abs(denominator) <= DENOMINATOR_TOL:
        raise FirstOrderInapplicableError(
            "first-order formula inapplicable: the first-order energy transfer vanishes; "
            "use the passive or single-mode-squeezed closed forms"
        )
    h = series.h
    nu2 = _second_order_nu_sum(perturbed, part.system)
    eta = 1.0 - numerator / denominator - (xi / 2.0) * nu2 * h / denominator
    diagnostics = {
        "scenario_class": "ii",
        "entropy_prefactor": 1.0,
        "first_order_denominator": denominator,
        "first_order_numerator": numerator,
        "nu2_sum": nu2,
        # value with the entropy normalisation used by the general formula
        "eta_entropy_half_weight": 1.0 - numerator / denominator - (xi / 4.0) * nu2 * h / denominator,
    }
    return ThermoReport(
        delta_e_s=(denominator - numerator) * h,
        delta_e_e=numerator * h,
        delta_e_c=(denominator - numerator) * h + numerator * h,
        delta_s_s=0.5 * nu2 * h * h,
        eta=eta,
        method="first-order",
        xi=xi,
        h=h,
        scenario_id=scenario_id,
        diagnostics=diagnostics,
    )


# Structure functions ---------------------------------------------------------------


def _labels_to_idx(labels, n: int) -> list[int]:
    return mode_indices(labels, n, "modes")


def z_function(series: PerturbativeBogoliubov, part: ModePartition, set_label: str, x: float = 0.0) -> tuple[float, float]:
    """Weighted particle-creation sum ``Z_A(x) = sum_{k in A, n in C} |beta1_nk|^2 e^{-k x}``.

    Returns:
        ``(Z_A(x), dZ_A/dx)``.
    """
    n = series.n_modes
    _partition_indices(part, n)
    idx = _labels_to_idx(part.labels(set_label), n)
    if not idx:
        return 0.0, 0.0
    k = np.arange(1, n + 1, dtype=float)[idx]
    weights = np.sum(np.abs(series.beta1[:, idx]) ** 2, axis=0) * np.exp(-k * x)
    return float(np.sum(weights)), float(-np.sum(k * weights))


def _squeeze_arrays(squeeze: SqueezeSpec, part: ModePartition):
    if squeeze.kind != "single_mode":
        raise ValueError("single-mode-squeezed closed form needs a single_mode SqueezeSpec")
    if set(squeeze.modes) != set(part.system):
        raise ValueError("single-mode-squeezed closed form needs every S mode (and only those) squeezed")
    order = {m: i for i, m in enumerate(squeeze.modes)}
    labels = sorted(squeeze.modes)
    r = np.array([squeeze.r[order[m]] for m in labels])
    theta = np.array([squeeze.theta[order[m]] for m in labels])
    return labels, r, theta


def c_function(series: PerturbativeBogoliubov, part: ModePartition, squeeze: SqueezeSpec, x: float = 0.0) -> tuple[float, float]:
    """Squeezing contribution ``C_S(x)`` for single-mode-squeezed S modes.

    ``C_S(x) = sum_{m in S, k in C} [Re(alpha0_km beta2_mk e^{-i theta_m}) delta_km
    + Re(alpha1_mk beta1_mk e^{-i theta_m}) + |beta1_mk|^2 tanh r_m] sinh(2 r_m) e^{-k x}``.

    Returns:
        ``(C_S(x), dC_S/dx)``.
    """
    n = series.n_modes
    _partition_indices(part, n)
    labels, r, theta = _squeeze_arrays(squeeze, part)
    k = np.arange(1, n + 1, dtype=float)
    decay = np.exp(-k * x)
    value = 0.0
    deriv = 0.0
    for m, rm, tm in zip(_labels_to_idx(labels, n), r, theta):
        phase = np.exp(-1j * tm)
        row = np.real(series.alpha1[m] * series.beta1[m] * phase) + np.abs(series.beta1[m]) ** 2 * np.tanh(rm)
        row = row.copy()
        row[m] += np.real(series.alpha0[m, m] * series.beta2[m, m] * phase)
        term = row * math.sinh(2 * rm) * decay
        value += float(np.sum(term))
        deriv += float(-np.sum(k * term))
    return value, deriv


def _pair_indices(pair: Sequence[int], n: int) -> tuple[int, int]:
    if len(pair) != 2 or pair[0] == pair[1]:
        raise ValueError("pair must contain two distinct modes")
    mode_indices(pair, n, "pair")
    return int(pair[0]) - 1, int(pair[1]) - 1


def g_function(series: PerturbativeBogoliubov, pair: Sequence[int], r: float, theta: float) -> float:
    """Leakage term ``G_S(r)`` for a two-mode-squeezed pair with environment = all other modes."""
    n = series.n_modes
    k, kp = _pair_indices(pair, n)
    env = [j for j in range(n) if j not in (k, kp)]
    if not env:
        return 0.0
    freq = np.arange(1, n + 1, dtype=float)
    a1, b1 = series.alpha1, series.beta1
    pops = np.abs(a1[np.ix_([k, kp], env)]) ** 2 + np.abs(b1[np.ix_([k, kp], env)]) ** 2
    first = float(np.sum(freq[env] * np.tanh(r) * pops))
    cross = (a1[k, env] * b1[kp, env] + a1[kp, env] * b1[k, env]) * np.exp(-1j * theta)
    second = float(np.sum(freq[env] * np.real(cross)))
    return math.sinh(2 * r) * (first + second)


def d_function(series: PerturbativeBogoliubov, pair: Sequence[int], r: float, theta: float) -> float:
    """Entropy-side term ``D_S(r)`` for a two-mode-squeezed pair.

    The final sum runs over ``m`` in the pair and over every cavity mode.
    """
    n = series.n_modes
    k, kp = _pair_indices(pair, n)
    a0, a1, b1, b2 = series.alpha0, series.alpha1, series.beta1, series.beta2
    phase = np.exp(-1j * theta)
    first = math.sinh(2 * r) * np.real((a0[k, k] * b2[kp, k] + a0[kp, kp] * b2[k, kp]) * phase)
    second = 2 * math.sinh(r) ** 2 * (abs(a1[k, kp]) ** 2 + abs(b1[kp, k]) ** 2)
    cols = [k, kp]
    third = math.sinh(r) ** 2 * float(np.sum(np.abs(b1[:, cols]) ** 2 - np.abs(a1[:, cols]) ** 2))
    return float(first + second + third)


def r_function(series: PerturbativeBogoliubov, pair: Sequence[int], theta: float) -> float:
    """First-order overlap ``R_S = Re[alpha0_k'k' beta1_kk' e^{-i theta}]``."""
    k, kp = _pair_indices(pair, series.n_modes)
    return float(np.real(series.alpha0[kp, kp] * series.beta1[k, kp] * np.exp(-1j * theta)))


@dataclass(frozen=True)
class StructureFunctionSet:
    """Evaluated structure functions at ``x = 0``; absent entries are ``None``."""

    z: dict
    c_s: tuple | None = None
    g_s: float | None = None
    d_s: float | None = None
    r_s: float | None = None


def structure_functions(
    series: PerturbativeBogoliubov,
    part: ModePartition,
    squeeze: SqueezeSpec | None = None,
) -> StructureFunctionSet:
    """Evaluate every structure function applicable to ``squeeze``.

    Args:
        series: Perturbative coefficients.
        part: System/environment split.
        squeeze: ``None`` for passive states; a ``single_mode`` squeeze adds ``C_S``;
            a ``two_mode`` squeeze on the S pair adds ``G_S``, ``D_S`` and ``R_S``.
    """
    z = {label: z_function(series, part, label) for label in ("S", "E", "C")}
    if squeeze is None or squeeze.kind == "thermal":
        return StructureFunctionSet(z)
    if squeeze.kind == "single_mode":
        return StructureFunctionSet(z, c_s=c_function(series, part, squeeze))
    pair, r, theta = squeeze.modes, squeeze.r, squeeze.theta
    return StructureFunctionSet(
        z,
        g_s=g_function(series, pair, r, theta),
        d_s=d_function(series, pair, r, theta),
        r_s=r_function(series, pair, theta),
    )


# Closed forms -------------------------------------------------------------------------


def _closed_form_eta(zdot_e: float, denominator: float, entropy_sum: float, xi: float) -> float:
    if abs(denominator) <= DENOMINATOR_TOL:
        raise NoEnergyTransferError("no energy transfer: the particle-creation rate vanishes; efficiency undefined")
    return 1.0 - zdot_e / denominator + (xi / 2.0) * entropy_sum / denominator


def _second_order_report(zdot_e, denominator, entropy_sum, xi, h, method, scenario_id, diagnostics) -> ThermoReport:
    diagnostics = {**diagnostics, "entropy_prefactor": 0.5}
    eta = _closed_form_eta(zdot_e, denominator, entropy_sum, xi)
    de_e = -zdot_e * h * h
    de_c = -denominator * h * h
    de_s = de_c - de_e
    return ThermoReport(de_s, de_e, de_s + de_e, entropy_sum * h * h, eta, method, xi, h, scenario_id, diagnostics)


def efficiency_passive(series: PerturbativeBogoliubov, part: ModePartition, xi, *, scenario_id: str = "") -> ThermoReport:
    """Lowest-order efficiency for a low-temperature passive (thermal) initial state.

    ``eta = 1 - Z'_E(0)/Z'_C(0) + (xi/2) Z_S(0)/Z'_C(0)``.

    Raises:
        NoEnergyTransferError: If ``Z'_C(0)`` vanishes (no particle creation).
    """
    xi = _xi(xi)
    z_s, _ = z_function(series, part, "S")
    _, zdot_e = z_function(series, part, "E")
    _, zdot_c = z_function(series, part, "C")
    diagnostics = {"scenario_class": "iii", "z_s": z_s, "zdot_e": zdot_e, "zdot_c": zdot_c}
    return _second_order_report(zdot_e, zdot_c, z_s, xi, series.h, "passive", scenario_id, diagnostics)


def efficiency_sms(
    series: PerturbativeBogoliubov,
    part: ModePartition,
    squeeze: SqueezeSpec,
    xi,
    *,
    scenario_id: str = "",
) -> ThermoReport:
    """Lowest-order efficiency when every S mode starts single-mode squeezed.

    ``eta = 1 - Z'_E/(Z'_C + C'_S) + (xi/2) (Z_S + C_S)/(Z'_C + C'_S)`` at ``x = 0``.
    With all ``r = 0`` this reproduces :func:`efficiency_passive` exactly.
    """
    xi = _xi(xi)
    z_s, _ = z_function(series, part, "S")
    _, zdot_e = z_function(series, part, "E")
    _, zdot_c = z_function(series, part, "C")
    c_s, cdot_s = c_function(series, part, squeeze)
    diagnostics = {"scenario_class": "iii", "z_s": z_s, "zdot_e": zdot_e, "zdot_c": zdot_c, "c_s": c_s, "cdot_s": cdot_s}
    return _second_order_report(zdot_e, zdot_c + cdot_s, z_s + c_s, xi, series.h, "sms", scenario_id, diagnostics)


def efficiency_tms(
    series: PerturbativeBogoliubov,
    pair: Sequence[int],
    r: float,
    theta: float,
    xi,
    h: float | None = None,
    *,
    scenario_id: str = "",
) -> ThermoReport:
    """First-order efficiency when S is a two-mode-squeezed pair and E is every other mode.

    ``eta = 1 + 2 (Z'_E - G_S) h / (kappa sinh 2r R_S) - (xi/2)(Z_S + D_S) h / (kappa sinh 2r R_S)``
    with ``kappa = k + k'``.

    Args:
        series: Perturbative coefficients.
        pair: The squeezed S modes ``(k, k')``.
        r: Squeezing parameter; must satisfy ``r >= 100 h``.
        theta: Squeezing phase.
        xi: Dimensionless temperature.
        h: Expansion parameter (defaults to ``series.h``).

    Raises:
        PerturbativeHierarchyError: If ``r < 100 h``.
        DenominatorOscillationZeroError: If ``|R_S| <= 1e-14``.
    """
    xi = _xi(xi)
    h = series.h if h is None else float(h)
    if r < TMS_HIERARCHY_FACTOR * h:
        raise PerturbativeHierarchyError(f"perturbative hierarchy violated: r = {r:g} < {TMS_HIERARCHY_FACTOR:g} * h = {TMS_HIERARCHY_FACTOR * h:g}")
    part = ModePartition.from_system(pair, series.n_modes)
    kappa = float(sum(pair))
    r_s = r_function(series, pair, theta)
    if abs(r_s) <= DENOMINATOR_TOL:
        raise DenominatorOscillationZeroError("denominator oscillation zero (R_S = 0), evaluate at a different time")
    z_s, _ = z_function(series, part, "S")
    _, zdot_e = z_function(series, part, "E")
    g_s = g_function(series, pair, r, theta)
    d_s = d_function(series, pair, r, theta)
    sh = math.sinh(2 * r)
    energy_term = 2.0 * (zdot_e - g_s) / (kappa * sh * r_s) * h
    entropy_term = (xi / 2.0) * (z_s + d_s) / (kappa * sh * r_s) * h
    eta = 1.0 + energy_term - entropy_term

    # Main-text variant: no G_S, no factor 2, opposite phase sign in R_S, entropy sign +.
    k, kp = _pair_indices(pair, series.n_modes)
    r_main = float(np.real(series.alpha0[kp, kp] * series.beta1[k, kp] * np.exp(1j * theta)))
    eta_main = None
    if abs(r_main) > DENOMINATOR_TOL:
        eta_main = 1.0 + zdot_e * h / (kappa * sh * r_main) + (xi / 2.0) * (z_s + d_s) * h / (kappa * sh * r_main)
    de_c = kappa * r_s * sh * h
    de_e = -2.0 * (zdot_e - g_s) * h * h
    diagnostics = {
        "scenario_class": "ii",
        "entropy_prefactor": 0.5,
        "r_s": r_s,
        "g_s": g_s,
        "d_s": d_s,
        "z_s": z_s,
        "zdot_e": zdot_e,
        "eta_main_text": eta_main,
    }
    de_s = de_c - de_e
    return ThermoReport(de_s, de_e, de_s + de_e, (z_s + d_s) * h * h, eta, "tms", xi, h, scenario_id, diagnostics)


def instantaneous_efficiency(power_e: float, power_c: float, entropy_rate_s: float, xi) -> float:
    """Instantaneous efficiency ``1 - P_E/P_C - xi * dS_S/dt / P_C``.

    Raises:
        NoEnergyTransferError: If ``|P_C| <= 1e-14``.
    """
    xi = _xi(xi)
    if abs(power_c) <= DENOMINATOR_TOL:
        raise NoEnergyTransferError("no energy transfer: cavity power vanishes; instantaneous efficiency undefined")
    return 1.0 - power_e / power_c - xi * entropy_rate_s / power_c


def instantaneous_from_reports(times: Sequence[float], reports: Sequence[ThermoReport], xi) -> np.ndarray:
    """Instantaneous efficiency along a time series of reports.

    Rates are second-order finite differences (:func:`numpy.gradient`). The
    entropy rate is scaled by each report's ``entropy_prefactor`` diagnostic so
    that the result is consistent with the convention that produced ``eta``.
    """
    times = np.asarray(times, dtype=float)
    if len(times) != len(reports) or len(times) < 2:
        raise ValueError("need matching times and reports, at least two of each")
    e_e = np.gradient([r.delta_e_e for r in reports], times)
    e_c = np.gradient([r.delta_e_c for r in reports], times)
    weights = np.array([r.diagnostics.get("entropy_prefactor", 1.0) for r in reports])
    s_s = np.gradient(weights * np.array([r.delta_s_s for r in reports]), times)
    return np.array([instantaneous_efficiency(pe, pc, ss, xi) for pe, pc, ss in zip(e_e, e_c, s_s)])
