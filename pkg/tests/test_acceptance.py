"""Acceptance criteria, one test each. Every test prints a single
``PASS``/``FAIL`` line (visible without ``-s``) before asserting."""
import subprocess
import sys
import time

import numpy as np
import pytest

from cohnonlocal import lab
from cohnonlocal import nonlocality as nl
from cohnonlocal.coherence import c_l1, dephasing_kraus, is_incoherent_kraus, unitary_kraus
from cohnonlocal.incoherent_ops import ConversionSpec, cnot, convert, fanout_unitary
from cohnonlocal.qstate import PureState, ghz_state, random_density_matrix

SQRT2 = np.sqrt(2)


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, message):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {message}")
        assert ok, message
    return emit


def test_criterion_01_cnot_horodecki_identity(verdict):
    rng = np.random.default_rng([2026, 1])
    spec = ConversionSpec(2, 2)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        rho_s = random_density_matrix(2, rng)
        M = nl.horodecki_M(convert(rho_s, spec))
        worst = max(worst, abs(M - (1 + 4 * abs(rho_s[0, 1]) ** 2)))
    elapsed = time.perf_counter() - start
    verdict(1, worst < 1e-10 and elapsed < 5,
            f"1000 qubit sources, max |M - (1 + 4|rho01|^2)| = {worst:.2e}, {elapsed:.2f} s")


def test_criterion_02_oracle_agreement(verdict):
    rng = np.random.default_rng([2026, 2])
    start = time.perf_counter()
    worst = 0.0
    for t in range(200):
        rho = random_density_matrix(4, rng, dims=(2, 2))
        orc = nl.chsh_grid_oracle(rho, seed=t)
        worst = max(worst, abs(orc.value - 2 * np.sqrt(nl.horodecki_M(rho))))
    elapsed = time.perf_counter() - start
    verdict(2, worst < 1e-3 and elapsed < 60,
            f"200 two-qubit states, max |oracle - 2 sqrt(M)| = {worst:.2e}, {elapsed:.2f} s")


def test_criterion_03_projected_chsh_boundary(verdict):
    spec = ConversionSpec(3, 2)
    values = {}
    for c in (0.29, 0.3, 0.31):
        rho_s = lab._boundary_source(3, c)
        assert abs(np.real(rho_s[0, 0] + rho_s[1, 1]) - 0.8) < 1e-15
        values[c] = nl.projected_chsh(convert(rho_s, spec), nl.ProjectorPair.diagonal(0, 1, 3)).value
    ok = abs(values[0.3] - 2) < 1e-10 and values[0.31] > 2 and values[0.29] < 2
    verdict(3, ok, "projected CHSH at |rho01| = 0.29 / 0.30 / 0.31: "
            + " / ".join(f"{values[c]:.12f}" for c in (0.29, 0.3, 0.31)))


def test_criterion_04_rank2_violation_iff_coherent(verdict):
    rng = np.random.default_rng([2026, 4])
    spec = ConversionSpec(3, 2)
    exceptions = coherent = 0
    for t in range(500):
        rho_s = lab.rank2_source(3, rng, coherent=(t % 4 != 3))
        assert np.linalg.matrix_rank(rho_s.matrix, tol=1e-12) <= 2
        flag = nl.theorem2_witness(rho_s).violated
        proj = max(nl.projected_chsh(convert(rho_s, spec), nl.ProjectorPair.diagonal(i, j, 3)).violated
                   for i, j in ((0, 1), (0, 2), (1, 2)))
        is_coherent = c_l1(rho_s) > 1e-9
        coherent += is_coherent
        exceptions += not (flag == proj == is_coherent)
    verdict(4, exceptions == 0,
            f"500 rank-2 qutrit sources ({coherent} coherent), violation <=> c_l1 > 1e-9, {exceptions} exceptions")


def test_criterion_05_coherence_monotone(verdict):
    res = lab.verify_theorem3_chain(500, seed=2026, dims=(2, 3, 4))
    verdict(5, res.passed,
            f"500 (state, incoherent channel) pairs over d = 2, 3, 4, {res.failures} failures, "
            f"worst C_r increase {res.detail['worst_monotonicity_slack']:.2e}")


def test_criterion_06_gme_closed_form(verdict):
    res = lab.verify_theorem4(500, seed=2026, dims=(2, 3))
    plus = PureState.normalized([1, 1]).density()
    ghz_err = np.max(np.abs(convert(plus, ConversionSpec(2, 3)).matrix - ghz_state(3).density().matrix))
    ok = res.passed and ghz_err < 1e-12 and res.detail["max_converted_l1"] <= 1 < res.detail["w_l1"]
    verdict(6, ok,
            f"500 pure sources, max |closed form - bipartition min| = {res.worst_residual:.2e}; "
            f"|convert(|+>) - GHZ3| = {ghz_err:.1e}; max converted c_l1 {res.detail['max_converted_l1']:.4f} "
            f"< W's {res.detail['w_l1']:.1f}")


def test_criterion_07_tripartite_thresholds(verdict):
    spec = ConversionSpec(2, 3)
    rng = np.random.default_rng([2026, 7])
    failed = []

    # singular-value identity on the rho00 = rho11 slice, where the coherence
    # block carries the largest singular value
    worst = 0.0
    for _ in range(200):
        r, phi = 0.5 * np.sqrt(rng.random()), rng.uniform(0, 2 * np.pi)
        rho_s = lab.qubit_source(r * np.cos(phi), r * np.sin(phi))
        worst = max(worst, abs(nl.svetlichny_lambda1(convert(rho_s, spec)) - SQRT2 * c_l1(rho_s)))
    if worst >= 1e-10:
        failed.append(f"lambda1 identity {worst:.1e}")

    above = nl.converted(lab.qubit_source((1 / SQRT2 + 0.02) / 2), 3)
    below = nl.converted(lab.qubit_source((1 / SQRT2 - 0.02) / 2), 3)
    s_above = nl.svetlichny_oracle(above).value
    if not s_above > 4:
        failed.append(f"S oracle above = {s_above:.6f}")
    s_bound_below = nl.svetlichny_bound(below)
    s_orc_below = nl.svetlichny_oracle(below).value
    if s_bound_below.violated or s_orc_below > 4 + 1e-6:
        failed.append(f"S below: 4 lambda1 = {s_bound_below.value:.6f}, oracle = {s_orc_below:.6f}")

    a_t = (SQRT2 - 1) / 2
    t_hi = nl.t_certificate(nl.converted(lab.qubit_source(a_t + 0.01), 3))
    t_lo = nl.t_certificate(nl.converted(lab.qubit_source(a_t - 0.01), 3))
    if not t_hi.violated or t_lo.violated:
        failed.append(f"T threshold: {t_lo.value:.6f} / {t_hi.value:.6f}")

    ns_hi = nl.ns_oracle(nl.converted(lab.qubit_source(0.05), 3)).value
    ns_zero = nl.ns_oracle(nl.converted(lab.qubit_source(0.0), 3)).value
    if not ns_hi > 3:
        failed.append(f"NS oracle at a = 0.05 is {ns_hi:.12f}, not above 3")
    if ns_zero > 3 + 1e-6:
        failed.append(f"NS oracle at a = 0 is {ns_zero:.6f}")

    table = lab.verify_theorem5_and_table1(10, seed=2026).to_dict()["detail"]["table1"]
    expected = {"S": 1 / SQRT2, "T": SQRT2 - 1, "NS": 0.0, "GME": 0.0}
    if table != expected:
        failed.append(f"table {table}")

    summary = (f"lambda1 residual {worst:.1e}; S oracle {s_above:.4f} above, {s_orc_below:.4f} below; "
               f"T {t_lo.value:.4f} / {t_hi.value:.4f}; NS {ns_zero:.6f} at a=0, {ns_hi:.6f} at a=0.05; "
               f"table {table}")
    verdict(7, not failed, summary + ("" if not failed else " -- failed: " + "; ".join(failed)))


def test_criterion_08_t_closed_form(verdict):
    spec = ConversionSpec(2, 3)
    worst, points = 0.0, 0
    for a in np.linspace(-0.5, 0.5, 101):
        for b in np.linspace(-0.5, 0.5, 101):
            if a * a + b * b > 0.25 + 1e-12:
                continue
            rho = convert(lab.qubit_source(a, b), spec)
            worst = max(worst, abs(nl.t_value(rho) - (1 + SQRT2 + 2 * SQRT2 * a)))
            points += 1
    ghz = nl.t_value(ghz_state(3).density())
    ok = worst < 1e-12 and abs(ghz - (1 + 2 * SQRT2)) < 1e-12
    verdict(8, ok, f"{points} grid points, max |<T> - (1 + sqrt2 + 2 sqrt2 a)| = {worst:.1e}; GHZ <T> = {ghz:.12f}")


def test_criterion_09_incoherence_validator(verdict):
    hadamard = np.array([[1, 1], [1, -1]]) / SQRT2
    results = {
        "CNOT": is_incoherent_kraus(unitary_kraus(cnot())),
        "fan-out d=2 n=3": is_incoherent_kraus(unitary_kraus(fanout_unitary(ConversionSpec(2, 3)))),
        "fan-out d=3 n=3": is_incoherent_kraus(unitary_kraus(fanout_unitary(ConversionSpec(3, 3)))),
        "dephasing d=3": is_incoherent_kraus(dephasing_kraus(3)),
        "Hadamard": is_incoherent_kraus(unitary_kraus(hadamard)),
    }
    ok = all(v for k, v in results.items() if k != "Hadamard") and not results["Hadamard"]
    verdict(9, ok, ", ".join(f"{k} {'incoherent' if v else 'rejected'}" for k, v in results.items()))


def test_criterion_10_determinism(verdict):
    cmd = [sys.executable, "-m", "cohnonlocal", "verify", "--theorem", "all", "--seed", "7"]
    outs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    verdict(10, outs[0] == outs[1] and len(outs[0]) > 0,
            f"two runs of verify --theorem all --seed 7, {len(outs[0])} bytes each, identical: {outs[0] == outs[1]}")
