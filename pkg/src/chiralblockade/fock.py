"""Truncated bosonic operators on a product Fock space.

Modes are stored in the fixed order (a, m, b): CCW cavity, magnon, CW cavity.
Basis states are enumerated row-major over (n_a, n_m, n_b) with the vacuum
first, which is exactly the ordering produced by ``kron(A, kron(M, B))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InvalidDimensionError, ShapeError

MODE_NAMES = ("a", "m", "b")


@dataclass(frozen=True)
class FockSpace:
    mode_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.mode_dims)
        if not dims:
            raise InvalidDimensionError("FockSpace needs at least one mode")
        if any(d < 2 for d in dims):
            raise InvalidDimensionError(f"every mode dimension must be >= 2, got {dims}")
        object.__setattr__(self, "mode_dims", dims)

    @classmethod
    def truncated(cls, n_max: int, n_modes: int = 3) -> "FockSpace":
        """Space holding up to ``n_max`` quanta in each of ``n_modes`` modes."""
        return cls((n_max + 1,) * n_modes)

    @property
    def dim(self) -> int:
        return int(np.prod(self.mode_dims))

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    def index(self, occupations) -> int:
        """Flat basis index of the Fock state with the given occupations."""
        occ = tuple(occupations)
        if len(occ) != self.n_modes:
            raise ShapeError(f"expected {self.n_modes} occupations, got {occ}")
        return int(np.ravel_multi_index(occ, self.mode_dims))

    def occupations(self, index: int) -> tuple[int, ...]:
        return tuple(int(n) for n in np.unravel_index(index, self.mode_dims))

    def basis_state(self, occupations) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(occupations)] = 1.0
        return v


def _mode_index(mode) -> int:
    if isinstance(mode, str):
        try:
            return MODE_NAMES.index(mode)
        except ValueError:
            raise ShapeError(f"unknown mode {mode!r}; expected one of {MODE_NAMES}") from None
    return int(mode)


@dataclass(frozen=True, eq=False)
class Operator:
    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ShapeError(
                f"matrix shape {m.shape} does not match space dimension {self.space.dim}"
            )
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def _check(self, other: "Operator"):
        if other.space != self.space:
            raise ShapeError(f"space mismatch: {self.space} vs {other.space}")

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.space, self.matrix @ other.matrix)
        return self.matrix @ other

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.matrix - other.matrix)

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.matrix)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=atol))

    def element(self, bra, ket) -> complex:
        """Matrix element between two Fock states given as occupation tuples."""
        return complex(self.matrix[self.space.index(bra), self.space.index(ket)])


def identity(space: FockSpace) -> Operator:
    return Operator(space, np.eye(space.dim, dtype=complex))


def zero(space: FockSpace) -> Operator:
    return Operator(space, np.zeros((space.dim, space.dim), dtype=complex))


def destroy(n_levels: int) -> Operator:
    """Single-mode lowering operator with sqrt(n) on the first superdiagonal."""
    if int(n_levels) != n_levels or n_levels < 2:
        raise InvalidDimensionError(f"n_levels must be an integer >= 2, got {n_levels}")
    n_levels = int(n_levels)
    mat = np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), k=1).astype(complex)
    return Operator(FockSpace((n_levels,)), mat)


def embed(op: Operator, mode_index, space: FockSpace) -> Operator:
    """Lift a single-mode operator into ``space`` with identities on the other modes."""
    idx = _mode_index(mode_index)
    if not 0 <= idx < space.n_modes:
        raise ShapeError(f"mode index {idx} out of range for {space.n_modes} modes")
    if op.space.n_modes != 1 or op.space.dim != space.mode_dims[idx]:
        raise ShapeError(
            f"operator dimension {op.space.dim} does not match mode {idx} "
            f"dimension {space.mode_dims[idx]}"
        )
    factors = [np.eye(d, dtype=complex) for d in space.mode_dims]
    factors[idx] = op.matrix
    return Operator(space, reduce(np.kron, factors))


def mode_operators(space: FockSpace) -> tuple[Operator, ...]:
    """Annihilation operators for every mode, in space order (a, m, b)."""
    return tuple(embed(destroy(d), i, space) for i, d in enumerate(space.mode_dims))


def number(space: FockSpace, mode) -> Operator:
    x = embed(destroy(space.mode_dims[_mode_index(mode)]), mode, space)
    return x.dag() @ x


def expectation(observable: Operator, rho) -> complex:
    """Tr(observable . rho); ``rho`` is a DensityMatrix or anything with space/matrix."""
    if observable.space != rho.space:
        raise ShapeError(f"space mismatch: {observable.space} vs {rho.space}")
    # Tr(A B) without forming the product.
    return complex(np.einsum("ij,ji->", observable.matrix, rho.matrix))
