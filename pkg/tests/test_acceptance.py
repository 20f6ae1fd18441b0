"""Acceptance gate: one test and one printed verdict line per criterion.

Each criterion is checked at its stated tolerance on the stated grids.
Run with `pytest -v -s tests/test_acceptance.py` to see the verdict lines
even when everything passes; on failure the line is in the captured output.
"""

import math

import numpy as np
import pytest

from bolab.evolution import EvolutionConfig, evolve
from bolab.harness import ExperimentConfig, measure_inequalities, run_sweep
from bolab.modulation import decompose, modulation_jacobian
from bolab.operators import (
    EXCITED_STATE_EIGENVALUE,
    GROUND_STATE_EIGENVALUE,
    assemble_h,
    constrained_gap,
    eigen_spectrum,
    projection_kk,
)
from bolab.solitons import (
    SolitonParams,
    SolitonTrain,
    action_functional,
    energy,
    mass,
    soliton_profile,
    soliton_profile_dx,
    soliton_residual,
    soliton_sum,
)
from bolab.spectral import Grid, RealField, d_power, inner_product, l2_norm

GRID = Grid(256.0, 4096)
FINE = Grid(512.0, 8192)


def _verdict(number, name, ok, detail):
    print(f"[{'pass' if ok else 'FAIL'}] criterion {number} ({name}): {detail}")
    assert ok, f"criterion {number} ({name}): {detail}"


def _functional_errors(grid):
    q = soliton_profile(grid, SolitonParams(1.0, 0.0))
    cubic = grid.spacing * float(np.sum(q.values**3))
    return np.array(
        [
            abs(mass(q) - math.pi),
            abs(energy(q) + 0.5 * math.pi),
            abs(cubic - 3.0 * math.pi),
            abs(inner_product(q, d_power(q, 1.0)) - math.pi),
        ]
    )


def test_criterion_1_soliton_functionals():
    e1 = _functional_errors(GRID)
    e2 = _functional_errors(FINE)
    res = soliton_residual(GRID, SolitonParams(1.0, 0.0))
    ok = (
        bool(np.all(e1 < np.array([2e-2, 2e-2, 5e-2, 2e-2])))
        and bool(np.all(e2 < 0.5 * e1))
        and res < 5e-3
    )
    _verdict(
        1,
        "soliton functionals",
        ok,
        f"errors {np.array2string(e1, precision=2)} -> "
        f"{np.array2string(e2, precision=2)} on box doubling, residual {res:.2e}",
    )


def test_criterion_2_action_expansion():
    f_base = action_functional(soliton_profile(GRID, SolitonParams(1.0, 0.0)), 1.0)
    worst = 0.0
    for c in (0.8, 0.9, 1.1, 1.2):
        qc = soliton_profile(GRID, SolitonParams(c, 0.0))
        drop = f_base - action_functional(qc, 1.0)
        worst = max(worst, abs(drop - 0.5 * math.pi * (c - 1.0) ** 2))
    _verdict(2, "action expansion", worst <= 1e-3, f"worst deviation {worst:.2e} <= 1e-3")


def test_criterion_3_linearized_spectrum():
    agrid = Grid(256.0, 1024)
    rep = eigen_spectrum(assemble_h(agrid, 1.0), 256)
    eig_errs = (
        abs(rep.eigenvalues[0] - GROUND_STATE_EIGENVALUE),
        abs(rep.eigenvalues[1]),
        abs(rep.eigenvalues[2] - EXCITED_STATE_EIGENVALUE),
    )
    kk_err = abs(projection_kk(agrid) - (0.5 - 1.0 / math.sqrt(5.0)))
    ok = (
        max(eig_errs) <= 1e-3
        and all(rep.overlaps[n] >= 0.999 for n in ("ground", "translation", "excited"))
        and rep.overlaps["threshold_cluster"] >= 0.99
        and kk_err <= 1e-3
    )
    _verdict(
        3,
        "linearized spectrum",
        ok,
        f"eigenvalue errors {tuple(f'{e:.1e}' for e in eig_errs)}, "
        f"min overlap {min(rep.overlaps.values()):.5f}, kk error {kk_err:.1e}",
    )


def test_criterion_4_coercivity_gaps():
    agrid = Grid(256.0, 1024)
    h = assemble_h(agrid, 1.0)
    q = soliton_profile(agrid, SolitonParams(1.0, 0.0))
    qx = soliton_profile_dx(agrid, SolitonParams(1.0, 0.0))
    gap0 = constrained_gap(h, [q, qx], 0.0)
    gap_half = constrained_gap(h, [q, qx], 0.5)
    gap_drop = constrained_gap(h, [qx], 0.0)
    ok = (
        gap0 >= 0.5 - 1e-2
        and gap_half >= 1.0 / 9.0 - 1e-2
        and abs(gap_drop - GROUND_STATE_EIGENVALUE) <= 1e-2
    )
    _verdict(
        4,
        "coercivity gaps",
        ok,
        f"gap(L2) {gap0:.4f} >= 0.49, gap(H1/2) {gap_half:.4f} >= {1/9 - 1e-2:.4f}, "
        f"unconstrained-in-profile gap {gap_drop:.4f} vs {GROUND_STATE_EIGENVALUE:.4f}",
    )


def test_criterion_5_modulation_fit():
    u = soliton_sum(
        GRID, SolitonTrain((SolitonParams(1.0, -30.0), SolitonParams(2.0, 30.0)))
    )
    guess = SolitonTrain((SolitonParams(0.98, -30.2), SolitonParams(2.03, 30.2)))
    state = decompose(u, guess)
    rec_err = max(
        float(np.max(np.abs(state.speeds - [1.0, 2.0]))),
        float(np.max(np.abs(state.centers - [-30.0, 30.0]))),
    )

    q = soliton_profile(GRID, SolitonParams(1.0, 0.0))
    jac1 = modulation_jacobian(q, SolitonTrain((SolitonParams(1.0, 0.0),)))
    block = math.pi * np.array([[0.0, -1.0], [1.0, 0.0]])
    jac_err = float(np.abs(jac1 - block).max())

    def off_diag(sep):
        train = SolitonTrain(
            (SolitonParams(1.0, -0.5 * sep), SolitonParams(2.0, 0.5 * sep))
        )
        jac = modulation_jacobian(soliton_sum(GRID, train), train)
        # entries pairing soliton j's conditions with soliton l != j, in
        # each of the four (speed/center) quadrants
        cross = np.zeros_like(jac, dtype=bool)
        for j in range(2):
            l = 1 - j
            cross[j, l] = cross[j, 2 + l] = True
            cross[2 + j, l] = cross[2 + j, 2 + l] = True
        return float(np.abs(jac[cross]).max())

    decay = off_diag(40.0) / off_diag(80.0)

    ok = rec_err <= 1e-10 and jac_err <= 2e-2 and decay >= 3.0
    _verdict(
        5,
        "modulation fit",
        ok,
        f"recovery error {rec_err:.1e} <= 1e-10, single-soliton block error "
        f"{jac_err:.1e} <= 2e-2, cross-block decay x{decay:.1f} per doubling",
    )


def test_criterion_6_evolution_fidelity():
    q = soliton_profile(GRID, SolitonParams(1.0, -20.0))
    traj = evolve(q, EvolutionConfig(dt=0.0025, t_end=10.0, record_every=4000))
    n_rel = abs(traj.mass_series[-1] - traj.mass_series[0]) / traj.mass_series[0]
    e_rel = abs(traj.energy_series[-1] - traj.energy_series[0]) / abs(
        traj.energy_series[0]
    )
    final = traj.snapshots[-1]
    state = decompose(final, SolitonTrain((SolitonParams(1.0, -10.0),)))
    translate = soliton_profile(GRID, SolitonParams(1.0, float(state.centers[0])))
    trans_err = l2_norm(RealField(GRID, final.values - translate.values)) / l2_norm(q)

    ref = evolve(q, EvolutionConfig(dt=0.00125, t_end=1.0, record_every=800))
    errs = []
    for dt in (0.02, 0.01, 0.005):
        t = evolve(q, EvolutionConfig(dt=dt, t_end=1.0, record_every=int(1 / dt)))
        errs.append(
            l2_norm(RealField(GRID, t.snapshots[-1].values - ref.snapshots[-1].values))
        )
    order = min(math.log2(errs[i] / errs[i + 1]) for i in range(2))

    ok = n_rel < 1e-8 and e_rel < 1e-7 and trans_err <= 1e-4 and order >= 3.7
    _verdict(
        6,
        "evolution fidelity",
        ok,
        f"mass drift {n_rel:.1e} < 1e-8, energy drift {e_rel:.1e} < 1e-7, "
        f"translate error {trans_err:.1e} <= 1e-4, convergence order {order:.2f} >= 3.7",
    )


def test_criterion_7_stability_envelopes(tmp_path):
    base = ExperimentConfig(
        speeds0=(1.0, 2.0),
        centers0=(-60.0, -12.0),
        perturbation_amplitude=0.01,
        perturbation_seed=7,
    )
    alpha_rows = run_sweep(base, [0.005, 0.01, 0.02], [40.0], tmp_path / "alpha")
    sep_rows = run_sweep(base, [0.01], [80.0, 160.0], tmp_path / "sep")

    base_row = alpha_rows[1]
    all_passed = all(r["passed"] for r in alpha_rows + sep_rows)
    alpha_eps = [r["sup_eps_h12"] for r in alpha_rows]
    sep_eps = [base_row["sup_eps_h12"]] + [r["sup_eps_h12"] for r in sep_rows]
    alpha_monotone = alpha_eps[0] < alpha_eps[1] < alpha_eps[2]
    sep_monotone = sep_eps[0] >= sep_eps[1] >= sep_eps[2]

    ok = all_passed and alpha_monotone and sep_monotone
    _verdict(
        7,
        "stability envelopes",
        ok,
        f"all runs within 10x envelopes: {all_passed}; sup eps_h12 rises with alpha "
        f"{[f'{v:.4f}' for v in alpha_eps]} and does not rise with separation "
        f"{[f'{v:.4f}' for v in sep_eps]}",
    )


def test_criterion_8_inequality_constants():
    coarse = measure_inequalities(n=1024, samples=500, seed=0)
    fine = measure_inequalities(n=2048, samples=500, seed=0)

    gn_err = abs(coarse["gn_soliton"] - 5.0 / (2.0 * math.pi))
    comm_dev = max(
        abs(coarse["commutator_by_width"][w] - fine["commutator_by_width"][w])
        / coarse["commutator_by_width"][w]
        for w in ("1", "4", "16")
    )
    slope_dev = abs(coarse["besov_slope"] - coarse["besov_slope_expected"]) / abs(
        coarse["besov_slope_expected"]
    )

    ok = gn_err <= 2e-2 and comm_dev <= 0.2 and slope_dev <= 0.1
    _verdict(
        8,
        "inequality constants",
        ok,
        f"quartic-ratio error {gn_err:.1e} <= 2e-2, commutator refinement drift "
        f"{comm_dev:.1%} <= 20%, plateau decay slope off by {slope_dev:.1%} <= 10%",
    )
