r"""Multimode zero-mean Gaussian states in the covariance-matrix picture.

Mode operators are ordered as :math:`(a_1, \dots, a_N, a_1^\dagger, \dots, a_N^\dagger)`
and the covariance matrix has the block form

.. math::

    \sigma = \begin{pmatrix} U & V \\ V^* & U^* \end{pmatrix},
    \qquad U_{nm} = \langle\{a_n, a_m^\dagger\}\rangle,\;
    V_{nm} = \langle\{a_n, a_m\}\rangle .

The symplectic form is :math:`\Omega = \mathrm{diag}(-i, \dots, -i, i, \dots, i)`, so
:math:`i\Omega = \mathrm{diag}(1, \dots, 1, -1, \dots, -1)`. Energies are measured in units
where mode ``k`` has frequency ``k``, and temperature enters only through the
dimensionless parameter ``xi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.special import xlogy

from ._validation import as_square, check_xi, frozen, mode_indices
from .errors import DimensionMismatchError, NonPhysicalStateError

#: Default tolerance for the physicality test ``min eig(sigma + i Omega) >= -tol``.
PHYSICAL_TOL = 1e-9
#: Tolerance on Hermiticity of U and symmetry of V, relative to the block norm.
STRUCTURE_TOL = 1e-12

SQUEEZE_KINDS = ("thermal", "single_mode", "two_mode")


@dataclass(frozen=True)
class ModeSpec:
    """Set of retained cavity modes ``1..count``; mode ``k`` has frequency ``k``."""

    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"mode count must be a positive integer, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(1, self.count + 1, dtype=float)


@dataclass(frozen=True)
class ModePartition:
    """Split of the cavity modes into an accessible system and an environment.

    The union of ``system`` and ``environment`` must be exactly ``{1..count}``.
    """

    system: frozenset
    environment: frozenset = frozenset()

    def __post_init__(self):
        system = frozenset(int(k) for k in self.system)
        environment = frozenset(int(k) for k in self.environment)
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "environment", environment)
        if not system:
            raise ValueError("partition: system must contain at least one mode")
        overlap = system & environment
        if overlap:
            raise ValueError(f"partition: system and environment overlap on {sorted(overlap)}")
        cavity = system | environment
        if cavity != set(range(1, len(cavity) + 1)):
            raise ValueError(f"partition: modes must cover 1..{len(cavity)} exactly, got {sorted(cavity)}")

    @classmethod
    def from_system(cls, system: Iterable[int], count: int) -> "ModePartition":
        """Build a partition whose environment is every mode not in ``system``."""
        system = frozenset(int(k) for k in system)
        return cls(system, frozenset(range(1, count + 1)) - system)

    @property
    def count(self) -> int:
        return len(self.system) + len(self.environment)

    @property
    def cavity(self) -> frozenset:
        return self.system | self.environment

    def labels(self, which: str) -> frozenset:
        """Return the mode set for ``which`` in ``{"S", "E", "C"}``."""
        try:
            return {"S": self.system, "E": self.environment, "C": self.cavity}[which]
        except KeyError:
            raise ValueError(f"unknown set label {which!r}; expected S, E or C") from None


@dataclass(frozen=True)
class ThermalParam:
    """Dimensionless temperature ``xi``; ``xi == 0`` is zero temperature."""

    xi: float

    def __post_init__(self):
        object.__setattr__(self, "xi", check_xi(self.xi))


@dataclass(frozen=True)
class SqueezeSpec:
    """Squeezing applied on top of the thermal state.

    For ``single_mode`` the parameters ``r`` and ``theta`` may be scalars (shared
    by every squeezed mode) or sequences with one entry per mode. For
    ``two_mode`` exactly two distinct modes are required.
    """

    kind: str
    r: Union[float, Sequence[float]] = 0.0
    theta: Union[float, Sequence[float]] = 0.0
    modes: tuple = ()

    def __post_init__(self):
        if self.kind not in SQUEEZE_KINDS:
            raise ValueError(f"squeeze kind must be one of {SQUEEZE_KINDS}, got {self.kind!r}")
        modes = tuple(int(m) for m in self.modes)
        object.__setattr__(self, "modes", modes)
        if self.kind == "two_mode" and (len(modes) != 2 or modes[0] == modes[1]):
            raise ValueError("two_mode squeezing needs exactly two distinct modes")
        n = len(modes) if self.kind == "single_mode" else 1
        r = _broadcast(self.r, n, "r")
        theta = _broadcast(self.theta, n, "theta")
        if np.any(r < 0):
            raise ValueError("squeezing parameter r must be nonnegative")
        if np.any((theta < 0) | (theta >= 2 * np.pi)):
            raise ValueError("squeezing phase theta must lie in [0, 2*pi)")
        object.__setattr__(self, "r", tuple(r.tolist()) if self.kind == "single_mode" else float(r[0]))
        object.__setattr__(self, "theta", tuple(theta.tolist()) if self.kind == "single_mode" else float(theta[0]))


def _broadcast(value, n: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        arr = np.full(n, arr[0])
    if arr.size != n:
        raise ValueError(f"squeeze {name} must be a scalar or have one entry per mode")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"squeeze {name} must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Second moments of a zero-mean Gaussian state, stored as the U and V blocks."""

    u: np.ndarray
    v: np.ndarray = field(default=None)

    def __post_init__(self):
        u = as_square(self.u, "U")
        v = np.zeros_like(u) if self.v is None else as_square(self.v, "V")
        if u.shape != v.shape:
            raise DimensionMismatchError(f"U and V shapes differ: {u.shape} vs {v.shape}")
        scale = max(1.0, np.linalg.norm(u), np.linalg.norm(v))
        if np.linalg.norm(u - u.conj().T) > STRUCTURE_TOL * scale:
            raise ValueError("U block is not Hermitian")
        if np.linalg.norm(v - v.T) > STRUCTURE_TOL * scale:
            raise ValueError("V block is not symmetric")
        object.__setattr__(self, "u", frozen(u))
        object.__setattr__(self, "v", frozen(v))

    @property
    def n_modes(self) -> int:
        return self.u.shape[0]

    @property
    def sigma(self) -> np.ndarray:
        """Full ``2N x 2N`` covariance matrix."""
        return np.block([[self.u, self.v], [self.v.conj(), self.u.conj()]])

    @classmethod
    def from_sigma(cls, sigma: np.ndarray, symmetrize: bool = True) -> "CovarianceMatrix":
        """Split a full covariance matrix into its U and V blocks.

        Args:
            sigma: ``2N x 2N`` complex matrix.
            symmetrize: Remove rounding-level asymmetry before validation.
        """
        sigma = as_square(sigma, "sigma")
        if sigma.shape[0] % 2:
            raise DimensionMismatchError("sigma must have even dimension")
        n = sigma.shape[0] // 2
        u, v = sigma[:n, :n], sigma[:n, n:]
        if symmetrize:
            u = (u + u.conj().T) / 2
            v = (v + v.T) / 2
        return cls(u, v)

    def allclose(self, other: "CovarianceMatrix", atol: float = 1e-10) -> bool:
        return (
            self.u.shape == other.u.shape
            and np.allclose(self.u, other.u, rtol=0, atol=atol)
            and np.allclose(self.v, other.v, rtol=0, atol=atol)
        )


def symplectic_metric(n_modes: int) -> np.ndarray:
    """Return ``i * Omega = diag(1, ..., 1, -1, ..., -1)`` for ``n_modes`` modes."""
    return np.diag(np.concatenate([np.ones(n_modes), -np.ones(n_modes)])).astype(complex)


def _count(spec) -> int:
    return spec.count if isinstance(spec, ModeSpec) else ModeSpec(spec).count


def _xi(thermal) -> float:
    return thermal.xi if isinstance(thermal, ThermalParam) else check_xi(thermal)


def thermal_nu(n, xi: float) -> np.ndarray:
    """Symplectic eigenvalue ``coth(n / (2 xi))`` of a thermal mode of frequency ``n``.

    Args:
        n: Mode frequency (scalar or array).
        xi: Dimensionless temperature; ``0`` gives the vacuum value 1.

    Returns:
        Array of symplectic eigenvalues (>= 1).
    """
    n = np.asarray(n, dtype=float)
    xi = check_xi(xi)
    if xi == 0:
        return np.ones_like(n)
    return 1.0 / np.tanh(n / (2.0 * xi))


def vacuum(n_modes: int) -> CovarianceMatrix:
    return CovarianceMatrix(np.eye(n_modes, dtype=complex))


def thermal_state(spec, thermal) -> CovarianceMatrix:
    """Thermal (Williamson-diagonal) state ``U = diag(nu_k)``, ``V = 0``."""
    count = _count(spec)
    return CovarianceMatrix(np.diag(thermal_nu(np.arange(1, count + 1), _xi(thermal))).astype(complex))


def make_state(spec, thermal, squeeze: SqueezeSpec | None = None) -> CovarianceMatrix:
    """Construct a thermal, single-mode squeezed or two-mode squeezed state.

    Squeezing acts on top of the thermal state of all modes, so at ``xi = 0`` the
    squeezed modes carry ``U_mm = cosh 2r_m`` and ``V_mm = e^{i theta_m} sinh 2r_m``
    (single mode) or ``U_kk = U_k'k' = cosh 2r`` and ``V_kk' = e^{i theta} sinh 2r``
    (two mode).

    Args:
        spec: :class:`ModeSpec` or mode count.
        thermal: :class:`ThermalParam` or ``xi`` value.
        squeeze: Optional squeezing description; ``None`` or kind ``thermal`` gives
            the plain thermal state.

    Returns:
        The covariance matrix of the requested state.
    """
    from .bogoliubov import evolve, single_mode_squeezer, two_mode_squeezer

    count = _count(spec)
    state = thermal_state(count, thermal)
    if squeeze is None or squeeze.kind == "thermal":
        return state
    mode_indices(squeeze.modes, count, "squeeze.modes")
    if squeeze.kind == "single_mode":
        t = single_mode_squeezer(count, squeeze.modes, squeeze.r, squeeze.theta)
    else:
        t = two_mode_squeezer(count, squeeze.modes, squeeze.r, squeeze.theta)
    return evolve(state, t)


def check_physical(state: CovarianceMatrix, tol: float = PHYSICAL_TOL) -> tuple[bool, float]:
    """Test the uncertainty relation ``sigma + i Omega >= 0``.

    Returns:
        ``(is_physical, min_eigenvalue)``.
    """
    metric = symplectic_metric(state.n_modes)
    min_eig = float(np.linalg.eigvalsh(state.sigma + metric)[0])
    return min_eig >= -tol, min_eig


def symplectic_eigenvalues(state: CovarianceMatrix, tol: float = PHYSICAL_TOL) -> np.ndarray:
    """Return the ``N`` symplectic eigenvalues of ``state``, sorted descending.

    They are the positive eigenvalues of ``i Omega sigma``, obtained from the
    Hermitian matrix ``sigma^{1/2} (i Omega) sigma^{1/2}``, which has the same spectrum.

    Raises:
        NonPhysicalStateError: If the state violates the uncertainty relation.
    """
    ok, min_eig = check_physical(state, tol)
    if not ok:
        raise NonPhysicalStateError(f"state is not physical (min eig of sigma + i Omega = {min_eig:.3e})")
    w, q = np.linalg.eigh(state.sigma)
    root = (q * np.sqrt(np.clip(w, 0.0, None))) @ q.conj().T
    spectrum = np.linalg.eigvalsh(root @ symplectic_metric(state.n_modes) @ root)
    return spectrum[::-1][: state.n_modes].copy()


def entropy_from_nu(nu) -> np.ndarray:
    r"""Entropy ``f_+(nu) - f_-(nu)`` of a mode with symplectic eigenvalue ``nu``.

    Uses ``x ln x -> 0`` at ``nu = 1``; values marginally below 1 from rounding are clipped.
    """
    nu = np.clip(np.asarray(nu, dtype=float), 1.0, None)
    plus, minus = (nu + 1) / 2, (nu - 1) / 2
    return xlogy(plus, plus) - xlogy(minus, minus)


def von_neumann_entropy(state: CovarianceMatrix) -> float:
    """Von Neumann entropy (units of k_B) of a Gaussian state."""
    return float(np.sum(entropy_from_nu(symplectic_eigenvalues(state))))


def mode_number(state: CovarianceMatrix, k: int) -> float:
    """Mean excitation number ``(U_kk - 1) / 2`` of mode ``k`` (1-indexed)."""
    (i,) = mode_indices([k], state.n_modes, "k")
    return float((state.u[i, i].real - 1.0) / 2.0)


def reduce(state: CovarianceMatrix, keep: Iterable[int]) -> CovarianceMatrix:
    """Reduced state on the 1-indexed modes ``keep`` (kept in ascending order)."""
    keep = list(keep)
    if not keep:
        raise ValueError("reduce: keep set must be nonempty")
    idx = mode_indices(keep, state.n_modes, "keep")
    sel = np.ix_(idx, idx)
    return CovarianceMatrix(state.u[sel], state.v[sel])


def local_symplectic_eigenvalues(state: CovarianceMatrix) -> np.ndarray:
    """Single-mode symplectic eigenvalues ``sqrt(U_kk^2 - |V_kk|^2)`` in mode order."""
    u = np.real(np.diag(state.u))
    v = np.abs(np.diag(state.v))
    return np.sqrt(np.clip(u * u - v * v, 0.0, None))
