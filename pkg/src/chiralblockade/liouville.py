"""Lindblad master equation on the truncated Fock space.

Density matrices are column-stacked, ``vec(rho)[i + j*d] = rho[i, j]``, so
``vec(A X B) = kron(B.T, A) @ vec(X)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    EmptyModeError,
    InvalidHamiltonianError,
    NonUniqueSteadyStateError,
    ShapeError,
    StepSizeError,
    ValidationError,
)
from .fock import FockSpace, Operator, destroy, embed, expectation, mode_operators
from .model import SystemParams, build_h_r

# RK4 is stable for |h*lambda| up to ~2.78 on the negative real axis and
# ~2.83 on the imaginary axis; the row-sum norm bounds every |lambda|.
RK4_STABILITY_LIMIT = 2.5
PIVOT_RTOL = 1e-13


def vec(matrix: np.ndarray) -> np.ndarray:
    return np.asarray(matrix).reshape(-1, order="F")


def unvec(vector: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vector).reshape(dim, dim, order="F")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ShapeError(f"density matrix shape {m.shape} does not match {self.space}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_state(cls, space: FockSpace, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(space, np.outer(psi, psi.conj()))

    @classmethod
    def fock(cls, space: FockSpace, occupations) -> "DensityMatrix":
        return cls.from_state(space, space.basis_state(occupations))

    @classmethod
    def vacuum(cls, space: FockSpace) -> "DensityMatrix":
        return cls.fock(space, (0,) * space.n_modes)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def check(self, tol: float = 1e-10) -> None:
        """Raise ValidationError unless Hermitian, unit trace and positive to ``tol``."""
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T))
        if herm > tol:
            raise ValidationError(f"density matrix not Hermitian (deviation {herm:.3e})")
        if abs(self.trace - 1) > tol:
            raise ValidationError(f"density matrix trace {self.trace} != 1")
        lam = np.linalg.eigvalsh((m + m.conj().T) / 2).min()
        if lam < -tol:
            raise ValidationError(f"density matrix has negative eigenvalue {lam:.3e}")


@dataclass(frozen=True, eq=False)
class Superoperator:
    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        d2 = self.space.dim ** 2
        if self.matrix.shape != (d2, d2):
            raise ShapeError(f"superoperator shape {self.matrix.shape}, expected {(d2, d2)}")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """L(rho) for a plain matrix ``rho``."""
        return unvec(self.matrix @ vec(rho), self.space.dim)


def build_liouvillian(h: Operator, decays) -> Superoperator:
    """Generator of rho' = -i[H, rho] + sum_k rate_k (x rho x^+ - {x^+ x, rho}/2).

    ``decays`` is a sequence of ``(Operator, rate)`` pairs. Written as
    ``-i (K rho - rho K^+) + sum rate x rho x^+`` with the non-Hermitian
    ``K = H - (i/2) sum rate x^+ x``, which needs only one kron per term.
    """
    hm = h.matrix
    scale = max(1.0, float(np.max(np.abs(hm))))
    if not h.is_hermitian(atol=1e-12 * scale):
        raise InvalidHamiltonianError(
            "Hamiltonian must be Hermitian; dissipation enters through the decay list only"
        )
    d = h.space.dim
    eye = np.eye(d, dtype=complex)
    k = hm.astype(complex)
    jumps = []
    for op, rate in decays:
        if op.space != h.space:
            raise ShapeError(f"decay operator space {op.space} != {h.space}")
        rate = float(rate)
        if rate < 0:
            raise ValidationError(f"decay rates must be non-negative, got {rate}")
        if rate == 0:
            continue
        x = op.matrix
        k = k - 0.5j * rate * (x.conj().T @ x)
        jumps.append((rate, x))
    lmat = np.kron(eye, -1j * k)
    lmat += np.kron(1j * k.conj(), eye)
    for rate, x in jumps:
        lmat += rate * np.kron(x.conj(), x)
    return Superoperator(h.space, lmat)


def population_rows(dim: int) -> np.ndarray:
    """Indices of the vec(rho) entries holding rho[k, k]."""
    return np.arange(dim) * (dim + 1)


def residual(l: Superoperator, rho: DensityMatrix) -> float:
    return float(np.max(np.abs(l.matrix @ vec(rho.matrix))))


def _extended_residual(a: np.ndarray, x: np.ndarray, b: np.ndarray, block: int = 512) -> np.ndarray:
    """b - a @ x accumulated in long double, a row block at a time."""
    xe = x.astype(np.clongdouble)
    r = np.empty(len(b), dtype=complex)
    for start in range(0, len(b), block):
        stop = start + block
        r[start:stop] = (b[start:stop] - a[start:stop].astype(np.clongdouble) @ xe).astype(complex)
    return r


def steady_state(l: Superoperator, tol: float = 1e-10, refine: int = 2) -> DensityMatrix:
    """Unit-trace null vector of ``l`` by a bordered dense solve.

    One population equation is replaced by Tr(rho) = 1. Population rows are
    the only candidates: their sum is the trace functional, so dropping any
    one of them loses no information, whereas dropping a coherence row does.
    Among them the row with the largest diagonal entry is used.

    Weak drives leave two-photon populations many orders of magnitude below
    rho_00, under the round-off of a plain double LU. ``refine`` rounds of
    iterative refinement with the residual accumulated in long double
    recover them.
    """
    d = l.space.dim
    lmat = l.matrix
    pops = population_rows(d)
    row = pops[np.argmax(np.abs(lmat[pops, pops]))]
    a = lmat.copy()
    a[row, :] = 0.0
    a[row, pops] = 1.0
    rhs = np.zeros(d * d, dtype=complex)
    rhs[row] = 1.0

    with warnings.catch_warnings():
        # exact singularity is diagnosed from the pivots below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    tiny = pivots < PIVOT_RTOL * pivots.max()
    if tiny.any():
        raise NonUniqueSteadyStateError(
            f"Liouvillian null space is not one-dimensional "
            f"(estimated dimension {1 + int(tiny.sum())})",
            null_dim=1 + int(tiny.sum()),
        )
    x = sla.lu_solve((lu, piv), rhs, check_finite=False)
    for _ in range(refine):
        x = x + sla.lu_solve((lu, piv), _extended_residual(a, x, rhs), check_finite=False)
    del a, lu

    rho = unvec(x, d)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    out = DensityMatrix(l.space, rho)

    res = residual(l, out)
    if not math.isfinite(res) or res > tol * max(1.0, float(np.max(np.abs(lmat)))):
        raise NonUniqueSteadyStateError(
            f"steady-state residual {res:.3e} exceeds tolerance; the null space is "
            "likely degenerate or numerically ill-conditioned"
        )
    return out


def g2_zero(rho: DensityMatrix, mode) -> float:
    """Equal-time <x+ x+ x x> / <x+ x>^2 for mode ``'a'``, ``'b'`` or ``'m'``."""
    space = rho.space
    idx = ("a", "m", "b").index(mode) if isinstance(mode, str) else int(mode)
    x = embed(destroy(space.mode_dims[idx]), idx, space)
    xd = x.dag()
    n = expectation(xd @ x, rho).real
    if not n > 1e-300:
        raise EmptyModeError(f"mode {mode!r} is empty (<n> = {n:.3e})")
    num = expectation(xd @ xd @ x @ x, rho).real
    return max(num, 0.0) / n**2


def occupation(rho: DensityMatrix, mode) -> float:
    space = rho.space
    idx = ("a", "m", "b").index(mode) if isinstance(mode, str) else int(mode)
    x = embed(destroy(space.mode_dims[idx]), idx, space)
    return expectation(x.dag() @ x, rho).real


def evolve(rho0: DensityMatrix, l: Superoperator, t_final: float, dt: float) -> DensityMatrix:
    """Classical RK4 for vec(rho)' = L vec(rho).

    ``t_final`` is split into ``ceil(t_final/dt)`` equal steps, so the step
    actually taken never exceeds ``dt``.
    """
    if dt <= 0:
        raise StepSizeError(f"dt must be positive, got {dt}")
    if t_final < 0:
        raise ValidationError(f"t_final must be non-negative, got {t_final}")
    if rho0.space != l.space:
        raise ShapeError("initial state and Liouvillian live on different spaces")
    if t_final == 0:
        return rho0
    lmat = l.matrix
    norm = float(np.max(np.sum(np.abs(lmat), axis=1)))
    if dt * norm > RK4_STABILITY_LIMIT:
        raise StepSizeError(
            f"dt*||L|| = {dt * norm:.3g} exceeds the RK4 stability limit "
            f"{RK4_STABILITY_LIMIT}; use dt <= {RK4_STABILITY_LIMIT / norm:.3g}"
        )
    n_steps = math.ceil(t_final / dt)
    h = t_final / n_steps
    y = vec(rho0.matrix).astype(complex)
    for _ in range(n_steps):
        k1 = lmat @ y
        k2 = lmat @ (y + 0.5 * h * k1)
        k3 = lmat @ (y + 0.5 * h * k2)
        k4 = lmat @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return DensityMatrix(l.space, unvec(y, l.space.dim))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    diff = rho.matrix - sigma.matrix
    diff = (diff + diff.conj().T) / 2
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def model_liouvillian(params: SystemParams, n_max: int = 2) -> Superoperator:
    """Liouvillian of the three-mode model: H_r plus decay of a, b and m."""
    space = FockSpace.truncated(n_max)
    a, m, b = mode_operators(space)
    h = build_h_r(params, space)
    return build_liouvillian(h, [(a, params.kappa_a), (b, params.kappa_b), (m, params.kappa_m)])


@dataclass(frozen=True)
class MasterResult:
    rho: DensityMatrix
    g2: dict
    occupation: dict


def solve_master(params: SystemParams, n_max: int = 2, modes=("a", "b")) -> MasterResult:
    """Steady state of the model plus g2(0) and <x+ x> for each requested mode.

    A mode with no population gets ``nan`` for g2 instead of an exception.
    """
    rho = steady_state(model_liouvillian(params, n_max))
    g2, occ = {}, {}
    for mode in modes:
        occ[mode] = occupation(rho, mode)
        try:
            g2[mode] = g2_zero(rho, mode)
        except EmptyModeError:
            g2[mode] = float("nan")
    return MasterResult(rho, g2, occ)


def master_g2(params: SystemParams, mode: str = "a", n_max: int = 2) -> float:
    rho = steady_state(model_liouvillian(params, n_max))
    return g2_zero(rho, mode)

