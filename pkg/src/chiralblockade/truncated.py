"""Weak-drive two-excitation solution of the non-Hermitian Schroedinger equation.

The pure state is expanded on the ten Fock states with at most two quanta,
``|psi> = sum C_amb |n_a n_m n_b>``, and the steady state is found with the
vacuum amplitude pinned to one. Two independent routes are provided:

* :func:`truncated_solve` reads the one- and two-excitation blocks straight
  out of the H_eff matrix and solves them numerically;
* :func:`closed_form_amplitudes` evaluates explicit rational expressions in
  the complex detunings and couplings.

The two agree to rounding; see ``docs/amplitude_equations.md`` for the
equations and for the corrections applied to the commonly quoted forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import (
    NoOptimumError,
    ResonanceSingularityError,
    SingularDenominatorError,
    UndefinedCorrelationError,
)
from .fock import FockSpace
from .model import SystemParams, build_h_eff, complex_detunings

SQRT2 = math.sqrt(2.0)
SINGULAR_RTOL = 1e-12

ONE_EXCITATION = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
TWO_EXCITATION = ((1, 1, 0), (1, 0, 1), (0, 1, 1), (2, 0, 0), (0, 2, 0), (0, 0, 2))


@dataclass(frozen=True)
class Amplitudes:
    """Steady-state C_amb, labelled by (n_a, n_m, n_b); c000 is fixed to 1."""

    c000: complex
    c100: complex
    c010: complex
    c001: complex
    c110: complex
    c101: complex
    c011: complex
    c200: complex
    c020: complex
    c002: complex

    @classmethod
    def labels(cls) -> tuple[str, ...]:
        return tuple(f.name[1:] for f in fields(cls))

    def __getitem__(self, key) -> complex:
        if not isinstance(key, str):
            key = "".join(str(n) for n in key)
        return getattr(self, "c" + key)

    def as_dict(self) -> dict[str, complex]:
        return {label: self[label] for label in self.labels()}

    def as_array(self) -> np.ndarray:
        return np.array([self[label] for label in self.labels()], dtype=complex)

    def one_photon(self, mode: str) -> complex:
        return {"a": self.c100, "m": self.c010, "b": self.c001}[mode]

    def two_photon(self, mode: str) -> complex:
        return {"a": self.c200, "m": self.c020, "b": self.c002}[mode]


@dataclass(frozen=True)
class CoefficientSet:
    z: complex
    p: complex
    q: complex
    m_coef: complex
    y: complex
    k0: complex
    k1: complex
    k2: complex
    a0: complex
    a1: complex
    a2: complex
    b0: complex
    b1: complex
    b2: complex
    f0: complex
    f1: complex
    f2: complex
    r0: complex
    r1: complex
    l0: complex
    l1: complex
    l2: complex


@dataclass(frozen=True)
class DriveCondition:
    """Pair-drive amplitude and phase that cancel C_200.

    ``degenerate`` is set when the probe is off: then e_opt = 0 and the
    phase carries no meaning (reported as 0).
    """

    e_opt: float
    phi_opt: float
    degenerate: bool = False

    @property
    def complex_drive(self) -> complex:
        return self.e_opt * np.exp(1j * self.phi_opt)


def coefficient_set(params: SystemParams) -> CoefficientSet:
    det = complex_detunings(params)
    dc, dm = det.dt_c, det.dt_m
    ga, gb, j = params.g_a, params.g_b, params.j
    # (-J + dc + dm)(J + dc + dm) appears in Q, K0 and L0
    s_minus_plus = (-j + dc + dm) * (j + dc + dm)
    return CoefficientSet(
        z=gb * j - ga * dc,
        p=-2 * ga * gb * j + ga**2 * dc + gb**2 * dc + (j - dc) * (j + dc) * dm,
        q=2 * ga * gb * j + (ga**2 + gb**2) * (dc + dm) - 2 * dc * s_minus_plus,
        m_coef=-(j**2) + dc**2,
        y=ga * j - gb * dc,
        k2=j**2 * dm + (gb**2 - dc * (dc + dm)) * (2 * dc + dm),
        k1=2 * gb * j * (gb**2 + 2 * dc**2),
        k0=gb**4 * (dc + dm)
        - gb**2 * (j**2 * dm + dc * (dc + dm) * (2 * dc + 3 * dm))
        + 2 * dc**2 * dm * s_minus_plus,
        a2=gb * j * (-2 * dc + dm),
        a1=dc * dm * (-(gb**2) + 2 * (j**2 + dc * (dc + dm))),
        a0=gb * j * (2 * dc + dm) * (gb**2 - 2 * dc * dm),
        b2=ga * j * (-2 * dc + dm),
        b1=dc * dm * (-(ga**2) + 2 * (j**2 + dc * (dc + dm))),
        b0=ga * j * (2 * dc + dm) * (ga**2 - 2 * dc * dm),
        # the factor multiplying dc^2 is 2, not 2J; only this form solves the
        # two-excitation block (checked against truncated_solve)
        f2=-j * (2 * dc**2 + 2 * dc * dm + dm**2),
        f1=j**2 * (4 * dc - 2 * dm) - 2 * dc * dm * (dc + dm),
        f0=2 * j * dc * dm * (-(j**2) + (dc + dm) ** 2),
        r1=-2 * j**2 * dc - 2 * dc**3 - 2 * dc**2 * dm,
        r0=8 * j * dc**2 + 4 * j * dc * dm,
        l2=j**2 * dm + (ga**2 - dc * (dc + dm)) * (2 * dc + dm),
        l1=2 * ga * j * (ga**2 + 2 * dc**2),
        l0=ga**4 * (dc + dm)
        - ga**2 * (j**2 * dm + dc * (dc + dm) * (2 * dc + 3 * dm))
        + 2 * dc**2 * dm * s_minus_plus,
    )


def _block_indices(space: FockSpace, states) -> np.ndarray:
    return np.array([space.index(s) for s in states])


def _solve_block(block: np.ndarray, rhs: np.ndarray, name: str) -> np.ndarray:
    s = np.linalg.svd(block, compute_uv=False)
    if s[-1] <= SINGULAR_RTOL * s[0]:
        raise ResonanceSingularityError(
            f"{name} block is singular (sigma_min/sigma_max = {s[-1] / s[0]:.2e})", block=name
        )
    return np.linalg.solve(block, rhs)


def truncated_solve(params: SystemParams) -> Amplitudes:
    """Amplitudes from the H_eff sub-blocks, with C_000 = 1.

    Steady state means H_eff psi = 0 row by row. Keeping only the leading
    order in the weak drives: the one-excitation rows are fed by the probe
    acting on the vacuum, the two-excitation rows by the probe acting on the
    one-excitation amplitudes plus the pair drive acting on the vacuum.
    Couplings back down to lower manifolds (and the vacuum row) are dropped.
    Works for any kappa_a, kappa_b, E_L, E_R.
    """
    space = FockSpace.truncated(2)
    h = build_h_eff(params, space).matrix
    i0 = space.index((0, 0, 0))
    i1 = _block_indices(space, ONE_EXCITATION)
    i2 = _block_indices(space, TWO_EXCITATION)

    c1 = _solve_block(h[np.ix_(i1, i1)], -h[i1, i0], "one-excitation")
    c2 = _solve_block(h[np.ix_(i2, i2)], -(h[i2, i0] + h[np.ix_(i2, i1)] @ c1), "two-excitation")
    c100, c010, c001 = c1
    c110, c101, c011, c200, c020, c002 = c2
    return Amplitudes(1.0 + 0j, c100, c010, c001, c110, c101, c011, c200, c020, c002)


def _check_denominator(value: complex, terms, name: str) -> None:
    scale = max(abs(t) for t in terms)
    if scale == 0 or abs(value) <= SINGULAR_RTOL * scale:
        raise SingularDenominatorError(f"{name} vanishes (|{name}| = {abs(value):.3e})")


def _p_terms(params: SystemParams):
    det = complex_detunings(params)
    dc, dm = det.dt_c, det.dt_m
    ga, gb, j = params.g_a, params.g_b, params.j
    return (-2 * ga * gb * j, ga**2 * dc, gb**2 * dc, (j - dc) * (j + dc) * dm)


def _q_terms(params: SystemParams):
    det = complex_detunings(params)
    dc, dm = det.dt_c, det.dt_m
    ga, gb, j = params.g_a, params.g_b, params.j
    return (
        2 * ga * gb * j,
        ga**2 * (dc + dm),
        gb**2 * (dc + dm),
        -2 * dc * (-j + dc + dm) * (j + dc + dm),
    )


def _c200_drive_terms(params: SystemParams, c: CoefficientSet):
    dc = complex_detunings(params).dt_c
    ga, gb, j = params.g_a, params.g_b, params.j
    return (dc * ga**4, -2 * j * gb * ga**3, c.k2 * ga**2, c.k1 * ga, c.k0)


def closed_form_amplitudes(params: SystemParams) -> Amplitudes:
    """Explicit rational expressions for all ten amplitudes (C_000 = 1).

    Needs kappa_a == kappa_b and E_L == E_R.
    """
    c = coefficient_set(params)
    _check_denominator(c.p, _p_terms(params), "P")
    _check_denominator(c.q, _q_terms(params), "Q")
    det = complex_detunings(params)
    dc, dm = det.dt_c, det.dt_m
    ga, gb, j = params.g_a, params.g_b, params.j
    o = params.o_drive
    drive = params.e * np.exp(1j * params.phi)
    p, q = c.p, c.q
    # every E-driven piece carries E e^{i phi} P / Q
    w = drive * p / q

    x200 = sum(_c200_drive_terms(params, c))
    x002 = dc * gb**4 - 2 * j * ga * gb**3 + c.l2 * gb**2 + c.l1 * gb + c.l0
    x110 = -dc * dm * ga**3 + c.a2 * ga**2 + c.a1 * ga + c.a0
    x011 = -dc * dm * gb**3 + c.b2 * gb**2 + c.b1 * gb + c.b0
    x101 = (
        dm * (ga**3 * gb + ga * gb**3)
        + 4 * j * ga**2 * gb**2
        + c.f2 * (ga**2 + gb**2)
        + c.f1 * ga * gb
        + c.f0
    )
    x020 = (
        dc * (ga**4 + gb**4)
        - 2 * j * (ga**3 * gb + ga * gb**3)
        + 2 * dc * ga**2 * gb**2
        + c.r1 * (ga**2 + gb**2)
        + c.r0 * ga * gb
    )
    p2 = p * p
    return Amplitudes(
        c000=1.0 + 0j,
        c100=o * c.z / p,
        c010=o * c.m_coef / p,
        c001=o * c.y / p,
        c110=(o**2 * c.z * c.m_coef + w * x110) / p2,
        c101=(o**2 * c.z * c.y + w * x101) / p2,
        c011=(o**2 * c.y * c.m_coef + w * x011) / p2,
        c200=(o**2 * c.z**2 - w * x200) / (SQRT2 * p2),
        c020=(o**2 * c.m_coef**2 + w * x020) / (SQRT2 * p2),
        c002=(o**2 * c.y**2 - w * x002) / (SQRT2 * p2),
    )


def g2_analytic(amps: Amplitudes, mode: str = "a") -> float:
    """Weak-drive g2(0) = 2 |C_2|^2 / |C_1|^4 for cavity mode ``'a'`` or ``'b'``."""
    if mode not in ("a", "b"):
        raise ValueError(f"analytic g2 is defined for modes 'a' and 'b', got {mode!r}")
    c1 = amps.one_photon(mode)
    c2 = amps.two_photon(mode)
    scale = max(abs(amps.c100), abs(amps.c010), abs(amps.c001))
    if scale == 0 or abs(c1) <= 1e-15 * scale:
        raise UndefinedCorrelationError(
            f"mode {mode!r} has no one-photon amplitude; it is decoupled from the probe"
        )
    return 2 * abs(c2) ** 2 / abs(c1) ** 4


def optimal_drive(params: SystemParams) -> DriveCondition:
    """(E, phi) at which the pair-drive path cancels the probe path into |200>.

    Setting the numerator of C_200 to zero gives
    ``E e^{i phi} = O^2 Z^2 Q / (P X)`` with
    ``X = dc ga^4 - 2 J gb ga^3 + K2 ga^2 + K1 ga + K0``.
    """
    c = coefficient_set(params)
    o = params.o_drive
    if o == 0:
        return DriveCondition(0.0, 0.0, degenerate=True)
    x_terms = _c200_drive_terms(params, c)
    x = sum(x_terms)
    try:
        _check_denominator(c.p, _p_terms(params), "P")
        _check_denominator(x, x_terms, "X")
    except SingularDenominatorError as exc:
        raise NoOptimumError(f"no finite optimal drive: {exc}") from None
    if c.z == 0:
        # probe path into |200> is absent; only E = 0 cancels it
        return DriveCondition(0.0, 0.0, degenerate=True)
    rhs = o**2 * c.z**2 * c.q / (c.p * x)
    phi = float(np.angle(rhs))
    if phi <= -math.pi:
        phi = math.pi
    return DriveCondition(float(abs(rhs)), phi)


def with_optimal_drive(params: SystemParams) -> SystemParams:
    cond = optimal_drive(params)
    return params.with_drive(cond.e_opt, cond.phi_opt)


def analytic_g2(params: SystemParams, mode: str = "a") -> float:
    return g2_analytic(closed_form_amplitudes(params), mode)
