r"""Exact and perturbative Bogoliubov transformations acting on covariance matrices.

A transformation is stored as the pair :math:`(\alpha, \beta)` forming

.. math::

    S = \begin{pmatrix} \alpha & \beta \\ \beta^* & \alpha^* \end{pmatrix},
    \qquad \sigma_f = S^\dagger \sigma_i S .

The Bogoliubov identities :math:`\alpha\alpha^\dagger - \beta\beta^\dagger = 1` and
:math:`\alpha\beta^T - \beta\alpha^T = 0` are equivalent to
:math:`S K S^\dagger = K` with :math:`K = \mathrm{diag}(1, \dots, -1, \dots)`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.linalg import expm

from ._validation import as_square, frozen, mode_indices
from .errors import DimensionMismatchError, IdentityViolationError
from .gaussian_core import CovarianceMatrix, ModeSpec, symplectic_metric

#: Identity tolerance for generated series.
SERIES_TOL = 1e-12
#: Identity tolerance for exact (user-supplied or constructed) transforms.
EXACT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class BogoliubovTransform:
    """Exact Bogoliubov transformation given by its ``alpha`` and ``beta`` blocks."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = as_square(self.alpha, "alpha")
        beta = as_square(self.beta, "beta")
        if alpha.shape != beta.shape:
            raise DimensionMismatchError(f"alpha and beta shapes differ: {alpha.shape} vs {beta.shape}")
        object.__setattr__(self, "alpha", frozen(alpha))
        object.__setattr__(self, "beta", frozen(beta))

    @property
    def n_modes(self) -> int:
        return self.alpha.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """Full ``2N x 2N`` transformation matrix ``S``."""
        return np.block([[self.alpha, self.beta], [self.beta.conj(), self.alpha.conj()]])

    @classmethod
    def identity(cls, n_modes: int) -> "BogoliubovTransform":
        return cls(np.eye(n_modes, dtype=complex), np.zeros((n_modes, n_modes), dtype=complex))

    @classmethod
    def from_matrix(cls, s: np.ndarray) -> "BogoliubovTransform":
        s = as_square(s, "S")
        n = s.shape[0] // 2
        return cls(s[:n, :n], s[:n, n:])

    def then(self, other: "BogoliubovTransform") -> "BogoliubovTransform":
        """Transformation equivalent to applying ``self`` and then ``other``."""
        return BogoliubovTransform.from_matrix(self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class PerturbativeBogoliubov:
    """Bogoliubov coefficients expanded to second order in a small parameter ``h``.

    ``alpha = alpha0 + alpha1 h + alpha2 h^2`` and ``beta = beta1 h + beta2 h^2``.
    """

    alpha0: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    h: float = 0.0

    def __post_init__(self):
        arrays = {}
        for name in ("alpha0", "alpha1", "alpha2", "beta1", "beta2"):
            arrays[name] = as_square(getattr(self, name), name)
        shapes = {a.shape for a in arrays.values()}
        if len(shapes) != 1:
            raise DimensionMismatchError(f"series coefficient shapes differ: {sorted(shapes)}")
        if not np.isfinite(self.h) or self.h < 0:
            raise ValueError(f"expansion parameter h must be finite and >= 0, got {self.h}")
        for name, arr in arrays.items():
            object.__setattr__(self, name, frozen(arr))
        object.__setattr__(self, "h", float(self.h))

    @property
    def n_modes(self) -> int:
        return self.alpha0.shape[0]

    @classmethod
    def zero(cls, n_modes: int, h: float = 0.0, alpha0: np.ndarray | None = None) -> "PerturbativeBogoliubov":
        """Series with no perturbative content (``alpha0`` defaults to the identity)."""
        zeros = np.zeros((n_modes, n_modes), dtype=complex)
        a0 = np.eye(n_modes, dtype=complex) if alpha0 is None else alpha0
        return cls(a0, zeros, zeros, zeros, zeros, h)

    def with_h(self, h: float) -> "PerturbativeBogoliubov":
        return PerturbativeBogoliubov(self.alpha0, self.alpha1, self.alpha2, self.beta1, self.beta2, h)

    def truncated(self, h: float | None = None) -> BogoliubovTransform:
        """Second-order truncation evaluated at ``h`` (not exactly symplectic)."""
        h = self.h if h is None else h
        return BogoliubovTransform(
            self.alpha0 + self.alpha1 * h + self.alpha2 * h**2,
            self.beta1 * h + self.beta2 * h**2,
        )

    def generator(self) -> tuple[np.ndarray, np.ndarray]:
        """First-order generator blocks ``(a, b) = (alpha0^-1 alpha1, alpha0^-1 beta1)``."""
        inv = np.linalg.inv(self.alpha0)
        return inv @ self.alpha1, inv @ self.beta1

    def exponential_completion(self, h: float | None = None) -> BogoliubovTransform:
        """Exact transform ``S0 expm(h K)`` sharing this series' zeroth and first orders.

        ``K = [[a, b], [b*, a*]]`` is built from :meth:`generator`. The result is exactly
        symplectic; its second-order terms coincide with ``alpha2``/``beta2`` only when
        the series was produced from the same generator (as the random generator and
        the gravitational-wave series are).
        """
        h = self.h if h is None else h
        a, b = self.generator()
        k = np.block([[a, b], [b.conj(), a.conj()]])
        n = self.n_modes
        s0 = np.zeros((2 * n, 2 * n), dtype=complex)
        s0[:n, :n] = self.alpha0
        s0[n:, n:] = self.alpha0.conj()
        return BogoliubovTransform.from_matrix(s0 @ expm(h * k))


@dataclass(frozen=True)
class IdentityReport:
    """Frobenius-norm residuals of the Bogoliubov identities."""

    residuals: dict
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def worst(self) -> tuple[str, float]:
        name = max(self.residuals, key=self.residuals.get)
        return name, self.residuals[name]

    def failures(self) -> list[str]:
        return [name for name, r in self.residuals.items() if r > self.tol]


def _fro(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def validate_identities(
    t: Union[BogoliubovTransform, PerturbativeBogoliubov],
    tol: float | None = None,
    order: int = 2,
) -> IdentityReport:
    """Evaluate the Bogoliubov identities exactly or order by order.

    Args:
        t: Exact transform or perturbative series.
        tol: Pass threshold on each residual. Defaults to ``1e-10`` for exact
            transforms and ``1e-12`` for series.
        order: For series, the highest perturbative order checked (1 or 2).

    Returns:
        An :class:`IdentityReport`. Exact transforms report ``unitarity`` and
        ``symmetry``; series report ``order0``, ``order1_alpha``, ``order1_beta``,
        ``order2_alpha`` and ``order2_beta`` together with the structural
        ``alpha0_offdiagonal`` and ``alpha1_diagonal`` checks.
    """
    if isinstance(t, BogoliubovTransform):
        n = t.n_modes
        a, b = t.alpha, t.beta
        residuals = {
            "unitarity": _fro(a @ a.conj().T - b @ b.conj().T - np.eye(n)),
            "symmetry": _fro(a @ b.T - b @ a.T),
        }
        return IdentityReport(residuals, EXACT_TOL if tol is None else tol)

    if not isinstance(t, PerturbativeBogoliubov):
        raise TypeError(f"cannot validate object of type {type(t).__name__}")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    a0, a1, a2, b1, b2 = t.alpha0, t.alpha1, t.alpha2, t.beta1, t.beta2
    dag = lambda m: m.conj().T
    residuals = {
        "alpha0_offdiagonal": _fro(a0 - np.diag(np.diag(a0))),
        "alpha1_diagonal": _fro(np.diag(a1)),
        "order0": _fro(a0 @ dag(a0) - np.eye(t.n_modes)),
        "order1_alpha": _fro(a0 @ dag(a1) + a1 @ dag(a0)),
        "order1_beta": _fro(a0 @ b1.T - b1 @ a0.T),
    }
    if order == 2:
        residuals["order2_alpha"] = _fro(a0 @ dag(a2) + a2 @ dag(a0) + a1 @ dag(a1) - b1 @ dag(b1))
        residuals["order2_beta"] = _fro(a1 @ b1.T + a0 @ b2.T - b1 @ a1.T - b2 @ a0.T)
    return IdentityReport(residuals, SERIES_TOL if tol is None else tol)


def symplectic_residual(t: BogoliubovTransform) -> float:
    """Frobenius norm of ``S^dagger K S - K``: zero for a symplectic transform."""
    s = t.matrix
    k = symplectic_metric(t.n_modes)
    return _fro(s.conj().T @ k @ s - k)


def free_evolution(spec, tau: float) -> BogoliubovTransform:
    """Free evolution ``alpha = diag(e^{i k tau})``, ``beta = 0`` for dimensionless time ``tau``."""
    count = spec.count if isinstance(spec, ModeSpec) else ModeSpec(spec).count
    k = np.arange(1, count + 1)
    return BogoliubovTransform(np.diag(np.exp(1j * k * float(tau))), np.zeros((count, count), dtype=complex))


def single_mode_squeezer(
    n_modes: int,
    modes: Sequence[int],
    r: Union[float, Sequence[float]],
    theta: Union[float, Sequence[float]] = 0.0,
) -> BogoliubovTransform:
    """Exact single-mode squeezer ``alpha_mm = cosh r_m``, ``beta_mm = e^{i theta_m} sinh r_m``.

    Args:
        n_modes: Total number of modes.
        modes: 1-indexed modes to squeeze.
        r: Squeezing parameter(s), scalar or one per mode.
        theta: Squeezing phase(s), scalar or one per mode.
    """
    idx = mode_indices(modes, n_modes, "modes")
    order = np.argsort([int(m) for m in modes], kind="stable")
    r = np.broadcast_to(np.asarray(r, dtype=float), (len(idx),))[order]
    theta = np.broadcast_to(np.asarray(theta, dtype=float), (len(idx),))[order]
    alpha = np.eye(n_modes, dtype=complex)
    beta = np.zeros((n_modes, n_modes), dtype=complex)
    for i, rm, tm in zip(idx, r, theta):
        alpha[i, i] = np.cosh(rm)
        beta[i, i] = np.exp(1j * tm) * np.sinh(rm)
    return BogoliubovTransform(alpha, beta)


def two_mode_squeezer(n_modes: int, pair: Sequence[int], r: float, theta: float = 0.0) -> BogoliubovTransform:
    """Exact two-mode squeezer on ``pair``: ``alpha = cosh r``, ``beta_kk' = beta_k'k = e^{i theta} sinh r``."""
    if len(pair) != 2 or pair[0] == pair[1]:
        raise ValueError("two-mode squeezer needs two distinct modes")
    i, j = mode_indices(pair, n_modes, "pair")
    alpha = np.eye(n_modes, dtype=complex)
    beta = np.zeros((n_modes, n_modes), dtype=complex)
    alpha[i, i] = alpha[j, j] = np.cosh(r)
    beta[i, j] = beta[j, i] = np.exp(1j * theta) * np.sinh(r)
    return BogoliubovTransform(alpha, beta)


def generator_transform(a_matrix: np.ndarray, b_matrix: np.ndarray | None = None) -> BogoliubovTransform:
    r"""Transform induced by the unitary ``exp(-i G)`` with quadratic generator.

    ``G = sum A_ij a_i^dag a_j + 1/2 sum (B_ij a_i^dag a_j^dag + h.c.)`` with ``A``
    Hermitian and ``B`` symmetric. This links Fock-space unitaries to the
    covariance-matrix evolution ``sigma_f = S^dagger sigma S``.
    """
    a_matrix = as_square(a_matrix, "A")
    b_matrix = np.zeros_like(a_matrix) if b_matrix is None else as_square(b_matrix, "B")
    heisenberg = np.block([[-1j * a_matrix, -1j * b_matrix], [1j * b_matrix.conj(), 1j * a_matrix.conj()]])
    return BogoliubovTransform.from_matrix(expm(heisenberg).conj().T)


def evolve(state: CovarianceMatrix, t: BogoliubovTransform, tol: float = EXACT_TOL) -> CovarianceMatrix:
    """Evolve a covariance matrix with an exact transform, ``sigma_f = S^dagger sigma S``.

    Raises:
        IdentityViolationError: If ``t`` violates the Bogoliubov identities beyond ``tol``.
    """
    if t.n_modes != state.n_modes:
        raise DimensionMismatchError(f"transform acts on {t.n_modes} modes, state has {state.n_modes}")
    report = validate_identities(t, tol)
    if not report.passed:
        name, value = report.worst
        raise IdentityViolationError(f"Bogoliubov identity {name!r} violated: residual {value:.3e} > {tol:.1e}")
    s = t.matrix
    return CovarianceMatrix.from_sigma(s.conj().T @ state.sigma @ s)


@dataclass(frozen=True, eq=False)
class PerturbedState:
    """Order-by-order blocks of a perturbatively evolved covariance matrix.

    ``U_f = u0 + u1 h + u2 h^2`` and ``V_f = v0 + v1 h + v2 h^2``. ``du0`` and
    ``dv0`` are the zeroth-order changes ``u0 - U_i`` and ``v0 - V_i`` evaluated in
    commutator form, so they vanish exactly when the initial state commutes with
    the zeroth-order phases.
    """

    u0: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    v0: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    h: float
    base: CovarianceMatrix
    du0: np.ndarray = None
    dv0: np.ndarray = None

    def __post_init__(self):
        if self.du0 is None:
            object.__setattr__(self, "du0", self.u0 - self.base.u)
        if self.dv0 is None:
            object.__setattr__(self, "dv0", self.v0 - self.base.v)
        for name in ("u0", "u1", "u2", "v0", "v1", "v2", "du0", "dv0"):
            object.__setattr__(self, name, frozen(getattr(self, name)))

    def delta_u(self, h: float | None = None) -> np.ndarray:
        """``U_f - U_i`` at ``h``, computed without cancellation against ``U_i``."""
        h = self.h if h is None else h
        return self.du0 + self.u1 * h + self.u2 * h**2

    def delta_v(self, h: float | None = None) -> np.ndarray:
        h = self.h if h is None else h
        return self.dv0 + self.v1 * h + self.v2 * h**2

    def assemble(self, h: float | None = None) -> CovarianceMatrix:
        """Second-order covariance matrix at ``h`` (defaults to the series' ``h``)."""
        h = self.h if h is None else h
        u = self.u0 + self.u1 * h + self.u2 * h**2
        v = self.v0 + self.v1 * h + self.v2 * h**2
        return CovarianceMatrix((u + u.conj().T) / 2, (v + v.T) / 2)


def _poly_mul(*factors: list) -> list:
    """Multiply matrix polynomials given as coefficient lists, truncating at order 2."""
    out = [np.asarray(c) for c in factors[0]]
    for f in factors[1:]:
        new = [np.zeros_like(out[0]) for _ in range(3)]
        for i, x in enumerate(out):
            for j, y in enumerate(f):
                if i + j <= 2:
                    new[i + j] = new[i + j] + x @ y
        out = new
    return out


def evolve_perturbative(state: CovarianceMatrix, series: PerturbativeBogoliubov) -> PerturbedState:
    """Expand ``S(h)^dagger sigma S(h)`` to second order in ``h``.

    Args:
        state: Initial covariance matrix.
        series: Perturbative coefficients; its ``h`` becomes the default evaluation point.

    Returns:
        A :class:`PerturbedState` with the order-0, order-1 and order-2 blocks.
    """
    if series.n_modes != state.n_modes:
        raise DimensionMismatchError(f"series acts on {series.n_modes} modes, state has {state.n_modes}")
    zero = np.zeros_like(series.alpha0)
    alpha = [series.alpha0, series.alpha1, series.alpha2]
    beta = [zero, series.beta1, series.beta2]
    dag = lambda p: [c.conj().T for c in p]
    conj = lambda p: [c.conj() for c in p]
    trans = lambda p: [c.T for c in p]
    const = lambda m: [m, zero, zero]
    u, v = state.u, state.v
    u_f = [
        sum(terms)
        for terms in zip(
            _poly_mul(dag(alpha), const(u), alpha),
            _poly_mul(dag(alpha), const(v), conj(beta)),
            _poly_mul(trans(beta), const(v.conj()), alpha),
            _poly_mul(trans(beta), const(u.conj()), conj(beta)),
        )
    ]
    v_f = [
        sum(terms)
        for terms in zip(
            _poly_mul(dag(alpha), const(u), beta),
            _poly_mul(dag(alpha), const(v), conj(alpha)),
            _poly_mul(trans(beta), const(v.conj()), beta),
            _poly_mul(trans(beta), const(u.conj()), conj(alpha)),
        )
    ]
    a0, a0_dag = series.alpha0, series.alpha0.conj().T
    du0 = a0_dag @ (u @ a0 - a0 @ u)
    dv0 = a0_dag @ (v @ a0.conj() - a0 @ v)
    return PerturbedState(*u_f, *v_f, h=series.h, base=state, du0=du0, dv0=dv0)


def random_symplectic_series(
    seed: int,
    spec,
    *,
    h: float = 1e-2,
    scale: float = 1.0,
    tau: float | None = None,
) -> PerturbativeBogoliubov:
    """Random perturbative series obeying the Bogoliubov identities order by order.

    The series is the Taylor expansion of ``S(h) = S0 expm(h K)`` where ``K`` has an
    anti-Hermitian particle-preserving block and a symmetric particle-creating
    block, both with zero diagonal. ``S0`` is the identity or, when ``tau`` is
    given, free evolution for that time.

    Args:
        seed: Seed for :func:`numpy.random.default_rng`.
        spec: :class:`ModeSpec` or mode count.
        h: Expansion parameter stored on the series.
        scale: Typical magnitude of the generator entries; ``0`` gives a series
            with only the zeroth order.
        tau: Optional free-evolution time fixing the zeroth-order phases.

    Returns:
        A :class:`PerturbativeBogoliubov`.
    """
    count = spec.count if isinstance(spec, ModeSpec) else ModeSpec(spec).count
    rng = np.random.default_rng(seed)
    shape = (count, count)
    x = np.triu(rng.standard_normal(shape) + 1j * rng.standard_normal(shape), 1)
    y = np.triu(rng.standard_normal(shape) + 1j * rng.standard_normal(shape), 1)
    a = scale * (x - x.conj().T)
    b = scale * (y + y.T)
    if tau is None:
        alpha0 = np.eye(count, dtype=complex)
    else:
        alpha0 = free_evolution(count, tau).alpha
    return PerturbativeBogoliubov(
        alpha0=alpha0,
        alpha1=alpha0 @ a,
        alpha2=alpha0 @ (a @ a + b @ b.conj()) / 2,
        beta1=alpha0 @ b,
        beta2=alpha0 @ (a @ b + b @ a.conj()) / 2,
        h=h,
    )
