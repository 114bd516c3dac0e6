"""End-to-end acceptance gate.

Ten headline guarantees, each run at its stated tolerance and wall-clock
budget.  Every test prints a single pass/fail line (run with -s to watch
them stream) and then asserts, so the terse pytest report and the lines
agree.  Heavier fixtures are shared through the session-scoped battery so
spectral caches built by one criterion are reused by the next.
"""

import math
import time

import numpy as np
import pytest

from barrierkets import (
    Channel,
    GaussianPacket,
    Observable,
    QuadratureSpec,
    SignLabel,
    apply_observable,
    build_test_function,
    check_commutators,
    evaluate,
    check_delta_normalization,
    check_non_member,
    energy_transform,
    inner_product,
    momentum_transform,
    parseval_defect,
    s_matrix,
    seminorm,
    solve_matching,
    spectral_probability,
    synthesize_energy,
)

from oracles import rk4_scattering

ORACLE_GRID = np.linspace(0.01, 100.0, 50)
SEMINORM_ORDERS = [(n, m, l)
                   for l in range(5)
                   for m in range(9)
                   for n in range(9)
                   if n + m + 2 * l <= 8]

_start = {}


def _begin(key):
    _start[key] = time.perf_counter()


def _finish(key, label, worst, limit, budget_s):
    elapsed = time.perf_counter() - _start.pop(key)
    ok = worst < limit and elapsed < budget_s
    print(f"[{'PASS' if ok else 'FAIL'}] {label}: "
          f"worst {worst:.3e} (limit {limit:.0e}), "
          f"{elapsed:.1f}s (budget {budget_s:.0f}s)")
    assert worst < limit, f"{label}: residual {worst:.3e} >= {limit:.0e}"
    assert elapsed < budget_s, f"{label}: {elapsed:.1f}s over budget"


def _packet_norm(f, spec):
    return math.sqrt(inner_product(f, f, spec).real)


def _random_packets(seed, count, model):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        side = 1.0 if rng.random() < 0.5 else -1.0
        center = side * rng.uniform(16.0, 25.0) + (side < 0) * 2.0
        packet = GaussianPacket(center=float(center),
                                width=float(rng.uniform(0.8, 2.0)),
                                momentum=float(rng.uniform(-4.0, 4.0)),
                                poly_degree=int(rng.integers(0, 3)))
        out.append(build_test_function(model, packet))
    return out


def test_criterion_01_matching_agrees_with_ode_oracle(model):
    _begin("c1")
    oracle = rk4_scattering(model, ORACLE_GRID)
    worst = 0.0
    names = ("t", "t_right", "r_l", "r_r", "a_l", "b_l", "a_r", "b_r")
    for i, energy in enumerate(ORACLE_GRID):
        sol = solve_matching(model, float(energy))
        got = {"t": sol.t, "t_right": sol.t, "r_l": sol.r_l, "r_r": sol.r_r,
               "a_l": sol.a_l, "b_l": sol.b_l, "a_r": sol.a_r, "b_r": sol.b_r}
        for name in names:
            ref = oracle[name][i]
            worst = max(worst, abs(got[name] - ref) / abs(ref))
    _finish("c1", "criterion 01 coefficients vs ODE oracle", worst, 1e-8, 10.0)


def test_criterion_02_s_matrix_unitarity(model):
    _begin("c2")
    worst = 0.0
    for energy in np.logspace(-3.0, 4.0, 200):
        s = s_matrix(model, float(energy))
        defect = np.max(np.abs(s.conj().T @ s - np.eye(2)))
        worst = max(worst, float(defect))
    _finish("c2", "criterion 02 S-matrix unitarity", worst, 1e-10, 5.0)


def test_criterion_03_tunneling_and_resonance_spot_values(model):
    _begin("c3")
    tunnel = abs(solve_matching(model, 1.0).t) ** 2
    resonance_energy = 11.869604401089358619
    resonant = abs(solve_matching(model, resonance_energy).t) ** 2
    worst = max(abs(tunnel - 0.41997434161402606939), abs(resonant - 1.0))
    _finish("c3", "criterion 03 tunneling and resonance values", worst,
            1e-8, 1.0)


def test_criterion_04_reconstruction_both_sign_families(model, spec, battery):
    _begin("c4")
    worst = 0.0
    for f in battery:
        lo, hi = f.support_interval(spec.spatial_radius)
        probes = np.linspace(lo, hi, 50)
        reference = evaluate(f, probes)
        scale = _packet_norm(f, spec)
        for sign in (SignLabel.PLUS, SignLabel.MINUS):
            amp = energy_transform(f, sign, spec)
            rebuilt = synthesize_energy(amp, probes, spec)
            worst = max(worst, float(np.max(np.abs(rebuilt - reference))) / scale)
    _finish("c4", "criterion 04 reconstruction, both sign families", worst,
            1e-6, 120.0)


def test_criterion_05_parseval_energy_and_momentum(model, spec):
    _begin("c5")
    packets = _random_packets(20260815, 20, model)
    pairs = list(zip(packets[:10], packets[10:]))
    worst_ratio = 0.0
    for f, g in pairs:
        scale = _packet_norm(f, spec) * _packet_norm(g, spec)
        energy = parseval_defect(f, g, "energy+", spec) / scale
        momentum = parseval_defect(f, g, "momentum", spec) / scale
        worst_ratio = max(worst_ratio, energy / 1e-6, momentum / 1e-8)
    _finish("c5", "criterion 05 Parseval in energy and momentum bases",
            worst_ratio, 1.0, 60.0)


def test_criterion_06_distributional_eigen_equations(model, spec, battery):
    _begin("c6")
    energies = np.linspace(0.5, 25.0, 10)
    momenta = np.linspace(-4.5, 4.5, 10)
    worst_ratio = 0.0
    for f in battery:
        nf = _packet_norm(f, spec)
        hf = apply_observable(Observable.H, f)
        famp = energy_transform(f, SignLabel.PLUS, spec)
        hamp = energy_transform(hf, SignLabel.PLUS, spec)
        for channel in (Channel.LEFT, Channel.RIGHT):
            lhs = hamp.amplitude(energies, channel)
            rhs = energies * famp.amplitude(energies, channel)
            resid = np.abs(lhs - rhs) / ((1.0 + energies) * nf)
            worst_ratio = max(worst_ratio, float(resid.max()) / 1e-6)
        pf = apply_observable(Observable.P, f)
        fmom = momentum_transform(f, "analysis", spec)
        pmom = momentum_transform(pf, "analysis", spec)
        lhs = pmom.amplitude(momenta)
        rhs = momenta * fmom.amplitude(momenta)
        resid = np.abs(lhs - rhs) / ((1.0 + np.abs(momenta)) * nf)
        worst_ratio = max(worst_ratio, float(resid.max()) / 1e-8)
    _finish("c6", "criterion 06 eigen-equations for H and P", worst_ratio,
            1.0, 120.0)


def test_criterion_07_delta_normalization(model, spec):
    _begin("c7")
    energy = check_delta_normalization(model, SignLabel.PLUS, (5.0, 0.5),
                                       Channel.LEFT, spec, mode="energy")
    momentum = check_delta_normalization(model, SignLabel.PLUS, (2.0, 0.5),
                                         Channel.LEFT, spec, mode="momentum")
    leakage = max(r for name, r in energy.witnesses
                  if name.endswith("leakage"))
    returned = max(r for name, r in energy.witnesses
                   if name.endswith("return"))
    worst_ratio = max(returned / 1e-5, leakage / 1e-5,
                      momentum.residual / 1e-8)
    assert energy.passed and momentum.passed
    _finish("c7", "criterion 07 delta normalization with leakage",
            worst_ratio, 1.0, 60.0)


def test_criterion_08_commutators_on_random_pairs(model, spec):
    _begin("c8")
    packets = _random_packets(20260816, 20, model)
    worst = 0.0
    for f, g in zip(packets[:10], packets[10:]):
        report = check_commutators(f, g, spec)
        worst = max(worst, report.residual)
        assert report.passed
    _finish("c8", "criterion 08 commutators on 10 random pairs", worst,
            1e-8, 30.0)


def test_criterion_09_membership_and_invariance(model, spec, battery):
    _begin("c9")
    functions = list(battery)
    for f in battery:
        for observable in (Observable.Q, Observable.P, Observable.H):
            functions.append(apply_observable(observable, f))
    largest = 0.0
    for f in functions:
        for n, m, l in SEMINORM_ORDERS:
            value = seminorm(f, n, m, l, spec)
            assert math.isfinite(value), f"seminorm {(n, m, l)} diverged"
            largest = max(largest, value)
    report = check_non_member(model, spec)
    assert report.passed
    assert math.isfinite(largest)
    _finish("c9", "criterion 09 seminorm battery finite, non-member flagged",
            0.0, 0.5, 120.0)


def test_criterion_10_total_spectral_probability(model, spec, battery):
    _begin("c10")
    worst = 0.0
    for f in battery:
        unit = f.scaled(1.0 / _packet_norm(f, spec))
        totals = {}
        for sign in (SignLabel.PLUS, SignLabel.MINUS):
            totals[sign] = spectral_probability(unit, 0.0, math.inf, sign,
                                                spec)
            worst = max(worst, abs(totals[sign] - 1.0))
        worst = max(worst,
                    abs(totals[SignLabel.PLUS] - totals[SignLabel.MINUS]))
    _finish("c10", "criterion 10 total probability, sign families agree",
            worst, 1e-6, 60.0)
