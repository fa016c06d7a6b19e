import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_toy
from evsiting import (
    GeoPoint,
    GridSpec,
    ProblemInstance,
    ValidationError,
    Weights,
    default_weights,
    generate_grid_instance,
    objective_components,
    validate_instance,
)
from evsiting.model import default_lambda, max_objective_coefficient

import oracles

UNIT = Weights(1.0, 1.0, 1.0)


def _with(inst, **changes):
    kw = dict(
        pois=inst.pois, existing=inst.existing, candidates=inst.candidates,
        cs_count=inst.cs_count, d=inst.d, e=inst.e, q=inst.q,
    )
    kw.update(changes)
    return ProblemInstance(**kw)


instances = st.builds(
    lambda e, p, x, seed, cs: generate_grid_instance(
        GridSpec(10, 10, p, x, e, min(cs, e), seed)
    ),
    e=st.integers(1, 8),
    p=st.integers(1, 4),
    x=st.integers(0, 3),
    seed=st.integers(0, 2**32 - 1),
    cs=st.integers(1, 4),
)
weights = st.builds(
    Weights,
    st.floats(0, 100),
    st.floats(0, 100),
    st.floats(0, 100),
)


class TestValidate:
    def test_well_formed_instance_returned_unchanged(self):
        inst = _with(make_toy(), existing=(), e=np.zeros((0, 2)))
        assert validate_instance(inst) is inst

    def test_cs_exceeds_candidates(self):
        inst = generate_grid_instance(GridSpec(5, 5, 2, 1, 4, 4, seed=1))
        with pytest.raises(ValidationError) as exc:
            validate_instance(_with(inst, cs_count=5))
        assert exc.value.code == "cs-exceeds-candidates"

    def test_asymmetric_q(self, toy):
        with pytest.raises(ValidationError) as exc:
            validate_instance(_with(toy, q=[[0, 2], [3, 0]]))
        assert exc.value.code == "asymmetric-q"
        assert "q[0][1]" in str(exc.value)

    def test_negative_distance_names_cell(self, toy):
        with pytest.raises(ValidationError) as exc:
            validate_instance(_with(toy, d=[[2.0, -1.0]]))
        assert exc.value.code == "negative-distance"
        assert "d[0, 1]" in str(exc.value)

    def test_dimension_mismatch(self, toy):
        with pytest.raises(ValidationError) as exc:
            validate_instance(_with(toy, e=[[1.0, 3.0, 5.0]]))
        assert exc.value.code == "dimension-mismatch"
        assert "e has shape" in str(exc.value)

    def test_nonzero_diagonal(self, toy):
        with pytest.raises(ValidationError) as exc:
            validate_instance(_with(toy, q=[[1.0, 6.0], [6.0, 0.0]]))
        assert exc.value.code == "nonzero-diagonal"

    def test_bad_coordinates(self):
        with pytest.raises(ValidationError):
            GeoPoint(91.0, 0.0)
        with pytest.raises(ValidationError):
            GeoPoint(0.0, -180.5)

    def test_negative_weight_rejected(self):
        with pytest.raises(ValidationError):
            Weights(1.0, -1.0, 1.0)


class TestDefaultWeights:
    @pytest.mark.parametrize(
        "E, expected",
        [(148, (592.0, 148 / 3, 251.6)), (3, (12.0, 1.0, 5.1)), (1, (4.0, 1 / 3, 1.7))],
    )
    def test_gamma_rule(self, E, expected):
        w = default_weights(E)
        assert w.gammas == pytest.approx(expected, rel=1e-15)
        assert w.lambda_card == 0.0

    def test_lambda_from_instance(self, toy):
        w = default_weights(2, toy)
        # gamma = (8, 2/3, 3.4); linear coefs 8*2 - 2/3*1 and 8*4 - 2/3*3; pair 3.4*6
        top = max(abs(16 - 2 / 3), abs(32 - 2.0), 3.4 * 6)
        assert max_objective_coefficient(toy, w.gammas) == pytest.approx(top)
        assert w.lambda_card == pytest.approx(2 * 1 * top * 2)

    def test_lambda_positive_when_all_distances_zero(self, toy):
        flat = _with(toy, d=[[0.0, 0.0]], e=[[0.0, 0.0]], q=np.zeros((2, 2)))
        assert default_lambda(flat, (1.0, 1.0, 1.0)) > 0


class TestObjective:
    @pytest.mark.parametrize(
        "x, expected",
        [([1, 0], (2, -1, 0, 1)), ([0, 0], (0, 0, 0, 0)), ([1, 1], (6, -4, -6, -4))],
    )
    def test_hand_evaluated(self, toy, x, expected):
        assert tuple(objective_components(toy, UNIT, x)) == pytest.approx(expected)

    def test_length_mismatch(self, toy):
        with pytest.raises(ValidationError) as exc:
            objective_components(toy, UNIT, [1, 0, 0])
        assert exc.value.code == "length-mismatch"

    def test_no_existing_stations_has_zero_z2(self):
        inst = generate_grid_instance(GridSpec(10, 10, 3, 0, 5, 2, seed=3))
        z = objective_components(inst, Weights(1, 5, 1), [1, 1, 0, 0, 1])
        assert z.z2 == 0.0
        assert np.isfinite(z.total)

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(0)
        for seed in range(30):
            inst = generate_grid_instance(GridSpec(15, 10, 3, seed % 3, 6, 2, seed))
            g = tuple(rng.uniform(0, 10, 3))
            x = rng.integers(0, 2, 6)
            got = objective_components(inst, Weights(*g), x)
            want = oracles.objective(inst.d.tolist(), inst.e.tolist(), inst.q.tolist(), g, x.tolist())
            assert tuple(got) == pytest.approx(want, rel=1e-12, abs=1e-12)


class TestObjectiveProperties:
    @settings(max_examples=60, deadline=None)
    @given(instances, weights)
    def test_zero_assignment_is_zero(self, inst, w):
        assert tuple(objective_components(inst, w, np.zeros(inst.n_candidates))) == (0, 0, 0, 0)

    @settings(max_examples=60, deadline=None)
    @given(instances, weights, st.data())
    def test_linear_terms_are_additive(self, inst, w, data):
        E = inst.n_candidates
        x = np.array(data.draw(st.lists(st.integers(0, 1), min_size=E, max_size=E)))
        j = data.draw(st.integers(0, E - 1))
        x[j] = 0
        y = x.copy()
        y[j] = 1
        a, b = objective_components(inst, w, x), objective_components(inst, w, y)
        assert b.z1 - a.z1 == pytest.approx(w.gamma1 * inst.d[:, j].sum() / inst.n_pois, abs=1e-9)
        if inst.n_existing:
            step = -w.gamma2 * inst.e[:, j].sum() / inst.n_existing
            assert b.z2 - a.z2 == pytest.approx(step, abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(instances, weights, st.data())
    def test_candidate_permutation_invariance(self, inst, w, data):
        E = inst.n_candidates
        x = np.array(data.draw(st.lists(st.integers(0, 1), min_size=E, max_size=E)))
        perm = np.array(data.draw(st.permutations(range(E))))
        permuted = _with(
            inst,
            candidates=[inst.candidates[k] for k in perm],
            d=inst.d[:, perm], e=inst.e[:, perm], q=inst.q[np.ix_(perm, perm)],
        )
        a = objective_components(inst, w, x).total
        b = objective_components(permuted, w, x[perm]).total
        assert b == pytest.approx(a, rel=1e-9, abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(instances, weights, st.floats(0.01, 100), st.data())
    def test_gamma_scaling(self, inst, w, c, data):
        E = inst.n_candidates
        x = np.array(data.draw(st.lists(st.integers(0, 1), min_size=E, max_size=E)))
        scaled = Weights(c * w.gamma1, c * w.gamma2, c * w.gamma3)
        a = objective_components(inst, w, x).total
        b = objective_components(inst, scaled, x).total
        assert b == pytest.approx(c * a, rel=1e-9, abs=1e-9)
