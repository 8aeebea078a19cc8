import json
import math

import numpy as np
import pytest
import scipy.linalg as sla

from matfunc.clocks import (Circuit, ClockInstance, acceptance_probability, build_instance,
                            circuit_unitary, cycle_power_sum, hardness_criterion, hhl_constants,
                            janzing_E0, mixing_bound, mixing_distance, peres_amplitudes,
                            predicted_dense_value, statevector, walk_chain, walk_distribution)
from matfunc.gates import Gate
from matfunc.pauli import to_dense
from matfunc.polynomials import monomial

H1 = Gate("H", (1,))
CIRCUITS = [
    Circuit(2, (Gate("H", (0,)),)),
    Circuit(2, (H1, Gate("CNOT", (1, 0)))),
    Circuit(3, (H1, Gate("H", (2,)), Gate("TOFFOLI", (1, 2, 0)))),
]


def test_circuit_statevector_matches_unitary(rng):
    for c in CIRCUITS:
        u = circuit_unitary(c)
        assert np.allclose(u.conj().T @ u, np.eye(1 << c.r))
        assert np.allclose(statevector(c), u[:, 0])
    # H then CNOT: the output qubit is 1 with probability one half
    assert acceptance_probability(CIRCUITS[1]) == pytest.approx(0.5)
    # Toffoli after two Hadamards fires on one of four branches
    assert acceptance_probability(CIRCUITS[2]) == pytest.approx(0.25)


def test_circuit_json_and_validation():
    c = CIRCUITS[2]
    assert Circuit.from_json(json.loads(json.dumps(c.to_json()))) == c
    assert Circuit.from_json([g.to_json() for g in c.gates]).r == 3
    with pytest.raises(ValueError):
        Circuit(1, (Gate("CNOT", (0, 1)),))
    with pytest.raises(ValueError):
        Circuit(2, ())


@pytest.mark.parametrize("M,k", [(5, 3), (7, 10), (9, 0), (4, 6)])
def test_cycle_power_sum(M, k):
    ref = np.mean(np.cos(2 * np.pi * np.arange(M) / M) ** k)
    assert float(cycle_power_sum(M, k)) == pytest.approx(ref, abs=1e-14)


def test_hardness_criterion_matches_float_sum():
    M = 7
    f = monomial(M ** 3)
    ls = np.arange(1, (M - 1) // 2 + 1)
    ref = abs((1 + 2 * np.sum(np.cos(2 * np.pi * ls / M) ** (M ** 3)))) / M
    assert float(hardness_criterion(f, M)) == pytest.approx(ref, rel=1e-12, abs=1e-300)
    # even functions have no odd part
    assert hardness_criterion(monomial(4), M) == 0
    with pytest.raises(ValueError):
        hardness_criterion(f, 4)


def test_janzing_E0_closed_form():
    M, m = 5, 125
    ref = np.mean(np.cos(2 * np.pi * np.arange(M) / M) ** m)
    assert janzing_E0(M, m) == pytest.approx(ref, abs=1e-15)


def test_walk_distribution_matches_chain():
    M, m = 9, 40
    p = np.zeros(M)
    p[0] = 1
    ref = np.linalg.matrix_power(walk_chain(M), m) @ p
    assert np.allclose([float(v) for v in walk_distribution(M, m)], ref, atol=1e-15)
    assert float(mixing_distance(M, m)) == pytest.approx(np.sum(np.abs(ref - 1 / M)), abs=1e-14)
    assert mixing_bound(M, m) == pytest.approx(0.5 * math.exp(-math.pi ** 2 * m / (2 * M * M)))


@pytest.mark.parametrize("c", CIRCUITS[:2])
def test_janzing_prediction_against_dense(c):
    inst = build_instance("janzing", c)
    d = inst.dense()
    assert np.allclose(d, d.conj().T)
    w, v = np.linalg.eigh(d)
    tgt = inst.target
    f = (v * w ** inst.function.m) @ v.conj().T
    assert abs(f[tgt.i, tgt.j] - inst.predicted) <= 1e-10
    assert abs(predicted_dense_value(inst) - inst.predicted) <= 1e-10


def test_walk_lm_prediction_against_dense():
    inst = build_instance("walk-lm", CIRCUITS[1])
    d = inst.dense()
    m = inst.function.m
    col = np.linalg.matrix_power(d, m)[:, inst.target.i]
    mask = inst.target.projector.mask(inst.dim)
    assert float(np.sum(np.abs(col[mask]) ** 2)) == pytest.approx(inst.predicted.real, abs=1e-10)


def test_cheby_ballistic_prediction_against_dense():
    c = CIRCUITS[1]
    inst = build_instance("cheby-ballistic", c)
    assert abs(predicted_dense_value(inst) - inst.predicted) <= 1e-10
    assert inst.predicted.real == pytest.approx(acceptance_probability(c))


def test_peres_entry_is_phase_times_acceptance():
    c = CIRCUITS[1]
    inst = build_instance("peres", c)
    d = inst.dense()
    u = sla.expm(-1j * inst.info["t"] * d)
    tgt = inst.target
    tau = inst.info["tau"]
    p1 = acceptance_probability(c)
    # the entry has magnitude |a1|^2 and phase (-i)^tau
    assert abs(u[tgt.i, tgt.j] - (-1j) ** tau * p1) <= 1e-9
    assert abs(inst.predicted - (-1j) ** tau * p1) <= 1e-12
    c0, ct = peres_amplitudes(2 * math.pi * tau, tau)
    assert abs(c0) <= 1e-12 and ct == pytest.approx((-1j) ** tau)


def test_hhl_normalized_measurement():
    c = CIRCUITS[1]
    inst = build_instance("hhl", c)
    d = inst.dense()
    x = np.linalg.solve(d, np.eye(inst.dim)[:, inst.target.i])
    mask = inst.target.projector.mask(inst.dim)
    got = np.sum(np.abs(x[mask]) ** 2) / np.sum(np.abs(x) ** 2)
    k = hhl_constants(inst.info["T"])
    want = acceptance_probability(c) * math.exp(-2) * (1 - math.exp(-2)) / (1 - math.exp(-6))
    assert k["normalized_factor"] == pytest.approx(want / acceptance_probability(c))
    assert got == pytest.approx(inst.predicted.real, abs=1e-12)
    assert got == pytest.approx(want, abs=1e-12)
    assert np.linalg.cond(d) <= inst.info["kappa"] * (1 + 1e-9)


@pytest.mark.parametrize("family", ["janzing", "cheby-ballistic", "peres"])
def test_unary_encoding_matches_compact(family):
    c = CIRCUITS[0]
    compact = build_instance(family, c)
    unary = build_instance(family, c, encoding="unary")
    assert unary.pauli is not None
    d = to_dense(unary.pauli.operator)
    assert np.allclose(d, d.conj().T)
    tgt = unary.active_target()
    fn = unary.function.scalar
    w, v = np.linalg.eigh(d)
    f = (v * fn(w)) @ v.conj().T
    if tgt.kind == "entry":
        got = f[tgt.i, tgt.j]
    else:
        col = f[:, tgt.i]
        got = np.sum(np.abs(col[tgt.projector.mask(len(col))]) ** 2)
    assert abs(got - compact.predicted) <= 1e-9


@pytest.mark.parametrize("family", ["janzing", "walk-lm", "cheby-ballistic", "peres", "hhl"])
def test_json_round_trip(family):
    inst = build_instance(family, CIRCUITS[1])
    obj = json.loads(json.dumps(inst.to_json()))
    back = ClockInstance.from_json(obj, check=True)
    assert back.predicted == pytest.approx(inst.predicted)
    assert back.dim == inst.dim
    assert back.entries == inst.entries
    obj["predicted"] = {"re": 0.123, "im": 0.0}
    with pytest.raises(ValueError):
        ClockInstance.from_json(obj, check=True)


def test_unknown_family():
    with pytest.raises(ValueError):
        build_instance("nope", CIRCUITS[0])
