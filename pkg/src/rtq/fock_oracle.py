"""Brute-force truncated-Fock-space reference for the Gaussian formalism.

States are dense density matrices on ``d**N`` basis states. Squeezing and
general quadratic evolutions are applied as unitaries ``exp(-i G)`` of the
truncated quadratic generator ``G``, entirely independently of the covariance
matrix code. Only small systems (``N <= 3``, ``d**N <= 4096``) are supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce as _fold

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from ._validation import as_square, check_xi, mode_indices
from .errors import OracleBudgetError, OracleUnconvergedError
from .gaussian_core import CovarianceMatrix, ModeSpec, SqueezeSpec, ThermalParam

DEFAULT_TRUNCATION = 40
MAX_TRUNCATION = 64
MAX_MODES = 3
MAX_DIMENSION = 4096
#: Population of the top two levels of any mode above this flags the state as unconverged.
LEAKAGE_TOL = 1e-6
#: Allowed drift of the trace after applying a truncated unitary.
TRACE_DRIFT_TOL = 1e-8
#: Mixture weights below this are dropped before evolving vectors.
WEIGHT_CUTOFF = 1e-18


@dataclass(frozen=True, eq=False)
class FockState:
    """Density matrix of ``n_modes`` modes, each truncated to ``d`` levels.

    ``components`` optionally holds the mixture ``(weights, vectors)`` with
    ``rho = vectors diag(weights) vectors^dagger``, which lets later evolutions
    and the global entropy avoid diagonalizing ``rho``.
    """

    rho: np.ndarray
    d: int
    n_modes: int
    leakage: float
    trace_drift: float = 0.0
    components: tuple | None = None

    @property
    def converged(self) -> bool:
        return self.leakage <= LEAKAGE_TOL and self.trace_drift <= TRACE_DRIFT_TOL

    @property
    def dims(self) -> tuple:
        return (self.d,) * self.n_modes


def _annihilators(n_modes: int, d: int) -> list:
    a = sp.diags(np.sqrt(np.arange(1, d, dtype=float)), 1, shape=(d, d), format="csr", dtype=complex)
    eye = sp.identity(d, format="csr", dtype=complex)
    ops = []
    for k in range(n_modes):
        factors = [a if j == k else eye for j in range(n_modes)]
        ops.append(_fold(lambda x, y: sp.kron(x, y, format="csr"), factors))
    return ops


def _check_budget(n_modes: int, d: int) -> None:
    if n_modes > MAX_MODES or d > MAX_TRUNCATION or d < 2 or d**n_modes > MAX_DIMENSION:
        raise OracleBudgetError(
            f"oracle budget exceeded: N = {n_modes}, d = {d} (limits N <= {MAX_MODES}, "
            f"d <= {MAX_TRUNCATION}, d**N <= {MAX_DIMENSION})"
        )


def _thermal_weights(n_modes: int, d: int, xi: float) -> np.ndarray:
    per_mode = []
    for k in range(1, n_modes + 1):
        if xi == 0:
            p = np.zeros(d)
            p[0] = 1.0
        else:
            levels = np.arange(d)
            p = np.exp(-k * levels / xi)
            p /= p.sum()
        per_mode.append(p)
    return _fold(np.kron, per_mode)


def _mode_populations(rho: np.ndarray, n_modes: int, d: int) -> np.ndarray:
    diag = np.real(np.diag(rho)).reshape((d,) * n_modes)
    return np.array([diag.sum(axis=tuple(j for j in range(n_modes) if j != k)) for k in range(n_modes)])


def _leakage(rho: np.ndarray, n_modes: int, d: int) -> float:
    # top two levels: squeezing populates only one parity of a mode
    return float(np.max(_mode_populations(rho, n_modes, d)[:, -2:]))


def quadratic_generator(a_matrix: np.ndarray, b_matrix: np.ndarray, d: int) -> sp.csr_matrix:
    """Truncated ``G = sum A_ij a_i^dag a_j + 1/2 sum (B_ij a_i^dag a_j^dag + h.c.)``."""
    a_matrix = as_square(a_matrix, "A")
    b_matrix = as_square(b_matrix, "B")
    n = a_matrix.shape[0]
    ops = _annihilators(n, d)
    dim = d**n
    g = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(n):
        for j in range(n):
            if a_matrix[i, j] != 0:
                g = g + a_matrix[i, j] * (ops[i].getH() @ ops[j])
            if b_matrix[i, j] != 0:
                pair = ops[i].getH() @ ops[j].getH()
                g = g + 0.5 * (b_matrix[i, j] * pair + np.conj(b_matrix[i, j]) * pair.getH())
    return g.tocsr()


def _basis_columns(weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keep = np.nonzero(weights > WEIGHT_CUTOFF)[0]
    basis = np.zeros((weights.size, keep.size), dtype=complex)
    basis[keep, np.arange(keep.size)] = 1.0
    return weights[keep], basis


def _apply_unitary(weights: np.ndarray, vectors: np.ndarray, generator: sp.csr_matrix):
    """Evolve the mixture ``sum_j w_j |v_j><v_j|`` with ``U = exp(-i G)``.

    Returns the density matrix, its trace drift and the evolved ``(weights, vectors)``.
    """
    cols = expm_multiply((-1j) * generator, vectors)
    rho = (cols * weights) @ cols.conj().T
    rho = (rho + rho.conj().T) / 2
    drift = abs(float(np.real(np.trace(rho))) - float(np.sum(weights)))
    return rho, drift, (weights, cols)


def _squeeze_generator(count: int, squeeze: SqueezeSpec) -> tuple[np.ndarray, np.ndarray]:
    b = np.zeros((count, count), dtype=complex)
    if squeeze.kind == "single_mode":
        for m, r, t in zip(squeeze.modes, squeeze.r, squeeze.theta):
            b[m - 1, m - 1] = 1j * r * np.exp(1j * t)
    elif squeeze.kind == "two_mode":
        k, kp = (m - 1 for m in squeeze.modes)
        b[k, kp] = b[kp, k] = 1j * squeeze.r * np.exp(1j * squeeze.theta)
    return np.zeros((count, count), dtype=complex), b


def build_oracle_state(spec, thermal, squeeze: SqueezeSpec | None = None, d: int = DEFAULT_TRUNCATION) -> FockState:
    """Thermal, single-mode squeezed or two-mode squeezed state in a truncated Fock basis.

    Args:
        spec: :class:`ModeSpec` or mode count (``<= 3``).
        thermal: :class:`ThermalParam` or ``xi``; each mode ``k`` gets Boltzmann
            weights ``exp(-k n / xi)``.
        squeeze: Optional squeezing applied as ``exp(-i G)`` on the thermal state.
        d: Levels per mode.

    Returns:
        A :class:`FockState`; inspect ``converged`` for the truncation flag.

    Raises:
        OracleBudgetError: If the Hilbert space exceeds the supported size.
    """
    count = spec.count if isinstance(spec, ModeSpec) else ModeSpec(spec).count
    xi = thermal.xi if isinstance(thermal, ThermalParam) else check_xi(thermal)
    _check_budget(count, d)
    weights = _thermal_weights(count, d, xi)
    if squeeze is None or squeeze.kind == "thermal":
        rho = np.diag(weights).astype(complex)
        return FockState(rho, d, count, _leakage(rho, count, d), 0.0, _basis_columns(weights))
    mode_indices(squeeze.modes, count, "squeeze.modes")
    a_mat, b_mat = _squeeze_generator(count, squeeze)
    rho, drift, parts = _apply_unitary(*_basis_columns(weights), quadratic_generator(a_mat, b_mat, d))
    return FockState(rho, d, count, _leakage(rho, count, d), drift, parts)


def oracle_evolve(state: FockState, a_matrix: np.ndarray, b_matrix: np.ndarray | None = None) -> FockState:
    """Apply ``exp(-i G)`` for the quadratic generator with blocks ``A`` (Hermitian) and ``B`` (symmetric)."""
    a_matrix = as_square(a_matrix, "A")
    b_matrix = np.zeros_like(a_matrix) if b_matrix is None else as_square(b_matrix, "B")
    if a_matrix.shape[0] != state.n_modes:
        raise ValueError("generator size does not match the number of modes")
    generator = quadratic_generator(a_matrix, b_matrix, state.d)
    if state.components is not None:
        weights, vectors = state.components
    else:
        weights, vectors = np.linalg.eigh(state.rho)
        keep = weights > WEIGHT_CUTOFF
        weights, vectors = weights[keep], vectors[:, keep]
    rho, drift, parts = _apply_unitary(weights, vectors, generator)
    leakage = _leakage(rho, state.n_modes, state.d)
    return FockState(rho, state.d, state.n_modes, leakage, state.trace_drift + drift, parts)


def _require_converged(state: FockState) -> None:
    if not state.converged:
        raise OracleUnconvergedError(
            f"oracle state unconverged: top-level population {state.leakage:.2e}, trace drift {state.trace_drift:.2e}"
        )


def oracle_covariance(state: FockState) -> CovarianceMatrix:
    """Covariance matrix from ladder-operator expectation values.

    ``U_nm = 2 <a_m^dag a_n> + delta_nm`` and ``V_nm = 2 <a_n a_m>`` (the modes commute
    for ``n != m`` and ``[a_n, a_n^dag] = 1`` is used instead of the truncated commutator).

    Raises:
        OracleUnconvergedError: If the truncation leakage flag is set.
    """
    _require_converged(state)
    ops = _annihilators(state.n_modes, state.d)
    rho_t = state.rho.T

    def expect(op) -> complex:
        # Tr(rho O) as an element-wise sum with the sparse operator
        return complex(op.multiply(rho_t).sum())

    n = state.n_modes
    u = np.eye(n, dtype=complex)
    v = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            u[i, j] += 2 * expect(ops[j].getH() @ ops[i])
            v[i, j] = 2 * expect(ops[i] @ ops[j])
    return CovarianceMatrix((u + u.conj().T) / 2, (v + v.T) / 2)


def oracle_mode_number(state: FockState, k: int) -> float:
    """Mean excitation number of mode ``k`` (1-indexed)."""
    _require_converged(state)
    (i,) = mode_indices([k], state.n_modes, "k")
    pops = _mode_populations(state.rho, state.n_modes, state.d)[i]
    return float(np.dot(np.arange(state.d), pops))


def reduced_density_matrix(state: FockState, modes) -> np.ndarray:
    """Partial trace keeping the 1-indexed ``modes`` (in ascending order)."""
    keep = mode_indices(modes, state.n_modes, "modes")
    n, d = state.n_modes, state.d
    tensor = state.rho.reshape((d,) * (2 * n))
    traced = [k for k in range(n) if k not in keep]
    letters = "abcdefghijklmnop"
    row = [letters[k] for k in range(n)]
    col = [letters[k] if k in traced else letters[k].upper() for k in range(n)]
    out = "".join(letters[k] for k in keep) + "".join(letters[k].upper() for k in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, tensor)
    size = d ** len(keep)
    return reduced.reshape(size, size)


def oracle_entropy(state: FockState, modes=None) -> float:
    """Von Neumann entropy ``-sum lambda ln lambda`` of the reduced state on ``modes``.

    Args:
        state: Converged oracle state.
        modes: 1-indexed modes to keep; ``None`` keeps all.
    """
    _require_converged(state)
    if modes is None or sorted(modes) == list(range(1, state.n_modes + 1)):
        if state.components is not None:
            # nonzero spectrum of C W C^dagger equals that of W^1/2 C^dagger C W^1/2
            weights, vectors = state.components
            root = np.sqrt(weights)
            eigs = np.linalg.eigvalsh(root[:, None] * (vectors.conj().T @ vectors) * root[None, :])
        else:
            eigs = np.linalg.eigvalsh(state.rho)
    else:
        eigs = np.linalg.eigvalsh(reduced_density_matrix(state, modes))
    eigs = eigs[eigs > 1e-300]
    return float(-np.sum(eigs * np.log(eigs)))
