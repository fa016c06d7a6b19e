import numpy as np
import pytest

from conftest import all_assignments, make_toy, random_instance
from evsiting import Qubo, ValidationError, Weights, build_qubo, default_weights, energy, objective_components
from evsiting.model import cardinality_penalty
from evsiting.qubo import read_qubo, write_qubo


def close(a, b, rel=1e-9):
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def test_toy_expansion():
    q = build_qubo(make_toy(), Weights(1, 1, 1, lambda_card=10))
    assert q.linear.tolist() == [-9.0, -9.0]
    assert q.couplings == {(0, 1): 14.0}
    assert q.offset == 10.0


def test_zero_weights_give_zero_model():
    q = build_qubo(make_toy(), Weights(0, 0, 0, 0))
    assert not q.linear.any() and not q.quadratic.any() and q.offset == 0.0


@pytest.mark.parametrize("x, expected", [([0, 0], 10.0), ([1, 0], 1.0), ([1, 1], 6.0)])
def test_toy_energies(x, expected):
    inst = make_toy()
    w = Weights(1, 1, 1, lambda_card=10)
    assert energy(build_qubo(inst, w), x) == pytest.approx(expected)
    z = objective_components(inst, w, x).total
    assert z + cardinality_penalty(inst, w, x) == pytest.approx(expected)


def test_energy_length_mismatch():
    with pytest.raises(ValidationError):
        energy(build_qubo(make_toy(), Weights(1, 1, 1, 1)), [1, 0, 1])


def test_energy_identity_exhaustive():
    rng = np.random.default_rng(11)
    for _ in range(50):
        inst = random_instance(rng, e_max=10)
        w = Weights(*rng.uniform(0, 50, 3), lambda_card=float(rng.uniform(0, 500)))
        q = build_qubo(inst, w)
        for x in all_assignments(inst.n_candidates):
            want = objective_components(inst, w, x).total + w.lambda_card * (x.sum() - inst.cs_count) ** 2
            assert close(energy(q, x), want)


def test_default_lambda_makes_minimizers_feasible():
    rng = np.random.default_rng(5)
    for _ in range(15):
        inst = random_instance(rng, e_max=16, e_min=10, cs_max=6)
        q = build_qubo(inst, default_weights(inst.n_candidates, inst))
        X = all_assignments(inst.n_candidates).astype(float)
        energies = q.offset + X @ q.linear + np.einsum("ij,jk,ik->i", X, q.quadratic, X)
        minimizers = np.flatnonzero(np.isclose(energies, energies.min(), rtol=1e-12, atol=0))
        assert (X[minimizers].sum(axis=1) == inst.cs_count).all()


def test_offset_shift_keeps_argmin():
    rng = np.random.default_rng(2)
    inst = random_instance(rng, e_max=8, e_min=8)
    q = build_qubo(inst, default_weights(inst.n_candidates, inst))
    shifted = Qubo(q.linear, q.quadratic, q.offset + 123.5)
    X = all_assignments(q.n)
    a = np.array([energy(q, x) for x in X])
    b = np.array([energy(shifted, x) for x in X])
    assert np.allclose(b - a, 123.5)
    assert a.argmin() == b.argmin()


def test_qubo_rejects_lower_triangle():
    with pytest.raises(ValidationError):
        Qubo([0.0, 0.0], [[0.0, 0.0], [1.0, 0.0]])


def test_text_round_trip(tmp_path):
    rng = np.random.default_rng(8)
    inst = random_instance(rng, e_max=9, e_min=9)
    q = build_qubo(inst, default_weights(inst.n_candidates, inst))
    path = tmp_path / "model.qubo"
    write_qubo(q, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "evsiting-qubo 1" and lines[1] == "9" and lines[-1].startswith("offset ")
    back = read_qubo(path)
    assert np.array_equal(back.linear, q.linear)
    assert np.array_equal(back.quadratic, q.quadratic)
    assert back.offset == q.offset
