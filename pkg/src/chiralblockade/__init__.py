"""Unidirectional photon blockade in a chiral cavity-magnon system.

Two counter-rotating cavity modes (a: CCW, b: CW) share a magnon mode m that
couples to them with strengths g_a and g_b. Two-photon drives on both ports
plus a weak magnon probe produce antibunching in one direction only.
"""

__version__ = "0.1.0"

from .fock import FockSpace, Operator, destroy, embed, expectation, identity, mode_operators
from .model import SystemParams, build_h_eff, build_h_r, complex_detunings, fig2_params
from .liouville import (
    DensityMatrix,
    Superoperator,
    build_liouvillian,
    evolve,
    g2_zero,
    model_liouvillian,
    solve_master,
    steady_state,
)
from .truncated import (
    Amplitudes,
    closed_form_amplitudes,
    coefficient_set,
    g2_analytic,
    optimal_drive,
    truncated_solve,
    with_optimal_drive,
)
