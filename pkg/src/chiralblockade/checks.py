"""Fast built-in invariant suite, run by ``chiralblockade check``.

Each check returns ``(ok, detail)``. The suite takes a few seconds at the
default truncation and is meant as a smoke test of an installation; the
full test suite lives under tests/.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fock import FockSpace, destroy, embed, mode_operators
from .liouville import (
    DensityMatrix,
    build_liouvillian,
    g2_zero,
    model_liouvillian,
    occupation,
    residual,
    steady_state,
    vec,
)
from .model import SystemParams, build_h_r, fig2_params
from .truncated import (
    closed_form_amplitudes,
    coefficient_set,
    optimal_drive,
    truncated_solve,
    with_optimal_drive,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def random_params(rng: np.random.Generator, o_drive: float = 1e-3, e: float = 0.0) -> SystemParams:
    """Random canonical params over the ranges used by the oracle comparisons."""
    g_a, g_b, j, dc, dm = rng.uniform(-5, 5, 5)
    kappa_c = rng.uniform(0.5, 5)
    return SystemParams.symmetric(
        kappa_c=kappa_c, e=e, delta_c=dc, delta_m=dm, j=j, g_a=g_a, g_b=g_b,
        phi=rng.uniform(-math.pi, math.pi), o_drive=o_drive,
    )


def _commutators():
    space = FockSpace.truncated(2)
    x = destroy(3).matrix
    comm = x @ x.conj().T - x.conj().T @ x
    # exact below the top level only
    worst = np.max(np.abs(comm[:2, :2] - np.eye(2)))
    ops = mode_operators(space)
    for i in range(3):
        for k in range(i + 1, 3):
            for p in (ops[i], ops[i].dag()):
                for q in (ops[k], ops[k].dag()):
                    worst = max(worst, np.max(np.abs((p @ q - q @ p).matrix)))
    return worst <= 1e-14, f"max deviation {worst:.1e}"


def _hermitian_h():
    p = fig2_params(e_l=0.3, e_r=0.1, phi=0.7, g_b=0.4, j=0.5)
    h = build_h_r(p, FockSpace.truncated(2)).matrix
    dev = np.max(np.abs(h - h.conj().T))
    return dev <= 1e-14, f"|H - H^+|_max = {dev:.1e}"


def _trace_preservation():
    rng = np.random.default_rng(1)
    l = model_liouvillian(with_optimal_drive(fig2_params(j=0.3, g_b=0.2)))
    d = l.space.dim
    row = vec(np.eye(d))
    worst = np.max(np.abs(row @ l.matrix)) / np.max(np.abs(l.matrix))
    for _ in range(10):
        x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = x + x.conj().T
        worst = max(worst, abs(np.trace(l.apply(rho))) / np.max(np.abs(rho)))
    return worst <= 1e-12, f"max relative trace leak {worst:.1e}"


def _steady_state():
    l = model_liouvillian(with_optimal_drive(fig2_params()))
    rho = steady_state(l)
    res = residual(l, rho)
    lam = np.linalg.eigvalsh(rho.matrix).min()
    ok = res <= 1e-10 and lam >= -1e-10 and abs(rho.trace - 1) <= 1e-10
    return ok, f"residual {res:.1e}, min eigenvalue {lam:.1e}"


def _coherent_state():
    # single driven damped cavity: alpha = -i eps / (kappa/2 + i delta)
    eps, kappa, delta = 0.05, 1.3, 0.7
    space = FockSpace((8,))
    a = embed(destroy(8), 0, space)
    h = (a.dag() @ a) * delta + (a + a.dag()) * eps
    rho = steady_state(build_liouvillian(h, [(a, kappa)]))
    n_exact = abs(2 * eps / kappa) ** 2 / (1 + 4 * delta**2 / kappa**2)
    n = occupation(rho, 0)
    g2 = g2_zero(rho, 0)
    ok = abs(n - n_exact) <= 1e-9 * n_exact and abs(g2 - 1) <= 1e-6
    return ok, f"n rel err {abs(n - n_exact) / n_exact:.1e}, g2 - 1 = {g2 - 1:.1e}"


def _oracle():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        p = random_params(rng, o_drive=rng.uniform(0.001, 0.1), e=rng.uniform(0, 0.01))
        ref = truncated_solve(p).as_array()
        got = closed_form_amplitudes(p).as_array()
        scale = np.abs(ref)
        mask = scale > 0
        worst = max(worst, np.max(np.abs(got - ref)[mask] / scale[mask]))
    return worst <= 1e-8, f"max relative amplitude error {worst:.1e} over 50 draws"


def _blockade_zero():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(50):
        p = random_params(rng)
        c = coefficient_set(p)
        ref = abs(p.o_drive**2 * c.z**2 / (math.sqrt(2) * c.p**2))
        amps = closed_form_amplitudes(with_optimal_drive(p))
        worst = max(worst, abs(amps.c200) / ref)
    return worst <= 1e-12, f"max |c200| / |c200(E=0)| = {worst:.1e}"


def _chirality():
    p = with_optimal_drive(fig2_params(g_b=0.3, j=0.4))
    ga = g2_zero(steady_state(model_liouvillian(p)), "a")
    gb = g2_zero(steady_state(model_liouvillian(p.swapped())), "b")
    dev = abs(ga - gb) / abs(ga)
    return dev <= 1e-8, f"relative difference {dev:.1e}"


def _dip():
    p = fig2_params()
    cond = optimal_drive(p)
    rho = steady_state(model_liouvillian(p.with_drive(cond.e_opt, cond.phi_opt)))
    ga, gb = g2_zero(rho, "a"), g2_zero(rho, "b")
    ok = ga <= 1e-2 and gb > 1
    return ok, f"g2_a = {ga:.2e}, g2_b = {gb:.2e} at phi_opt = {cond.phi_opt / math.pi:.4f} pi"


CHECKS: list[tuple[str, Callable]] = [
    ("commutation relations", _commutators),
    ("Hamiltonian is Hermitian", _hermitian_h),
    ("Liouvillian preserves trace", _trace_preservation),
    ("steady state residual and positivity", _steady_state),
    ("driven cavity is coherent", _coherent_state),
    ("closed forms match linear solve", _oracle),
    ("optimal drive cancels c200", _blockade_zero),
    ("a/b reversal symmetry", _chirality),
    ("blockade dip at optimal drive", _dip),
]


def run_checks() -> list[CheckResult]:
    results = []
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # report, don't abort the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results
