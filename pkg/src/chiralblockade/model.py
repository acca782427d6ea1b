"""Physical parameters and Hamiltonians of the chiral cavity-magnon system.

The lab-frame model has two degenerate counter-rotating cavity modes a (CCW)
and b (CW) at omega_c, a Kittel magnon m at omega_m, two-photon drives at
omega_e on both waveguide ports and a magnon probe at omega_o. With
omega_e = 2 omega_o and the frame rotating at omega_o on all three modes,
every drive becomes time independent and only the detunings

    delta_c = omega_c - omega_o,    delta_m = omega_m - omega_o

survive. Everything below lives in that rotating frame.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedAsymmetryError, ValidationError
from .fock import FockSpace, Operator, mode_operators

# Fields carrying a frequency/rate dimension; rescaled by normalized().
RATE_FIELDS = (
    "delta_c", "delta_m", "j", "g_a", "g_b", "e_l", "e_r", "o_drive",
    "kappa_a", "kappa_b", "kappa_m",
)
PARAM_FIELDS = RATE_FIELDS + ("phi",)


@dataclass(frozen=True)
class SystemParams:
    """All rates and detunings, in units of kappa_m once normalized.

    ``e_l``/``e_r`` are the two-photon drive amplitudes on the left/right
    ports (sharing the phase ``phi``) and ``o_drive`` is the magnon probe.
    The truncated two-excitation treatment is only meaningful when both the
    pair drives and the probe are small compared with every decay rate.
    ``unit_scale_mhz`` is the physical value of kappa_m and is used for
    reporting only.
    """

    delta_c: float = 0.0
    delta_m: float = 0.0
    j: float = 0.0
    g_a: float = 0.0
    g_b: float = 0.0
    e_l: float = 0.0
    e_r: float = 0.0
    phi: float = 0.0
    o_drive: float = 0.0
    kappa_a: float = 1.0
    kappa_b: float = 1.0
    kappa_m: float = 1.0
    unit_scale_mhz: float | None = None

    def __post_init__(self):
        for name in PARAM_FIELDS:
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        for name in ("kappa_a", "kappa_b", "kappa_m"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative, got {getattr(self, name)}")
        for name in ("e_l", "e_r", "o_drive"):
            if getattr(self, name) < 0:
                raise ValidationError(
                    f"{name} must be non-negative (the phase is carried by phi), "
                    f"got {getattr(self, name)}"
                )

    @classmethod
    def symmetric(cls, *, kappa_c: float, e: float = 0.0, **kwargs) -> "SystemParams":
        """Build params with kappa_a = kappa_b = kappa_c and E_L = E_R = e."""
        return cls(kappa_a=kappa_c, kappa_b=kappa_c, e_l=e, e_r=e, **kwargs)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def normalized(self) -> "SystemParams":
        """Rescale every rate by kappa_m so that kappa_m == 1."""
        if self.kappa_m <= 0:
            raise ValidationError("kappa_m must be positive to serve as the unit")
        k = self.kappa_m
        changes = {name: getattr(self, name) / k for name in RATE_FIELDS}
        if self.unit_scale_mhz is not None:
            changes["unit_scale_mhz"] = self.unit_scale_mhz * k
        return self.replace(**changes)

    def swapped(self) -> "SystemParams":
        """Exchange the roles of a and b, i.e. reverse the bias field."""
        return self.replace(
            g_a=self.g_b, g_b=self.g_a,
            e_l=self.e_r, e_r=self.e_l,
            kappa_a=self.kappa_b, kappa_b=self.kappa_a,
        )

    @property
    def kappa_c(self) -> float:
        if self.kappa_a != self.kappa_b:
            raise UnsupportedAsymmetryError(
                f"closed forms assume kappa_a == kappa_b, got {self.kappa_a} and {self.kappa_b}"
            )
        return self.kappa_a

    @property
    def e(self) -> float:
        if self.e_l != self.e_r:
            raise UnsupportedAsymmetryError(
                f"closed forms assume E_L == E_R, got {self.e_l} and {self.e_r}"
            )
        return self.e_l

    def with_drive(self, e: float, phi: float | None = None) -> "SystemParams":
        changes = {"e_l": e, "e_r": e}
        if phi is not None:
            changes["phi"] = phi
        return self.replace(**changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def fig2_params(**overrides) -> SystemParams:
    """Base point of the phase scans: kappa_c = 2.5, g_a = 2, O = 0.01, detunings 2.

    Physical scale kappa_c = 10 pi MHz, kappa_m = 0.4 kappa_c = 4 pi MHz.
    The drive is left at zero; callers set it (usually to the optimum).
    """
    base = dict(
        delta_c=2.0, delta_m=2.0, j=0.0, g_a=2.0, g_b=0.0,
        o_drive=0.01, kappa_a=2.5, kappa_b=2.5, kappa_m=1.0,
        unit_scale_mhz=4 * math.pi,
    )
    base.update(overrides)
    return SystemParams(**base)


@dataclass(frozen=True)
class ComplexDetunings:
    dt_c: complex
    dt_m: complex


def complex_detunings(params: SystemParams) -> ComplexDetunings:
    """Detunings with half the decay folded in as a negative imaginary part."""
    return ComplexDetunings(
        dt_c=complex(params.delta_c, -params.kappa_c / 2),
        dt_m=complex(params.delta_m, -params.kappa_m / 2),
    )


def build_h_r(params: SystemParams, space: FockSpace) -> Operator:
    """Rotating-frame Hamiltonian on ``space`` (modes ordered a, m, b)."""
    if space.n_modes != 3:
        raise ValidationError(f"expected a three-mode space (a, m, b), got {space.mode_dims}")
    a, m, b = (x.matrix for x in mode_operators(space))
    ad, md, bd = a.conj().T, m.conj().T, b.conj().T
    # z and conj(z) keep the pair-drive term exactly Hermitian
    z = np.exp(1j * params.phi)
    h = (
        params.delta_c * (ad @ a + bd @ b)
        + params.delta_m * (md @ m)
        + params.j * (ad @ b + bd @ a)
        + params.g_a * (ad @ m + md @ a)
        + params.g_b * (bd @ m + md @ b)
        + params.e_l * (z * (ad @ ad) + np.conj(z) * (a @ a))
        + params.e_r * (z * (bd @ bd) + np.conj(z) * (b @ b))
        + params.o_drive * (md + m)
    )
    return Operator(space, h)


def damping_operator(params: SystemParams, space: FockSpace) -> Operator:
    """Diagonal -i/2 (kappa_a n_a + kappa_m n_m + kappa_b n_b)."""
    occ = np.array([space.occupations(i) for i in range(space.dim)], dtype=float)
    rates = occ @ np.array([params.kappa_a, params.kappa_m, params.kappa_b])
    return Operator(space, np.diag(-0.5j * rates))


def build_h_eff(params: SystemParams, space: FockSpace) -> Operator:
    """Non-Hermitian effective Hamiltonian: H_r with the decays as imaginary energies."""
    return build_h_r(params, space) + damping_operator(params, space)
