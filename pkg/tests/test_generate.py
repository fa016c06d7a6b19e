import numpy as np
import pytest

from evsiting import GridSpec, SiteKind, ValidationError, edwardsville_like_instance, generate_grid_instance


def test_case_study_counts():
    inst = generate_grid_instance(GridSpec(20, 20, 5, 7, 148, 4, seed=7))
    assert (inst.n_pois, inst.n_existing, inst.n_candidates, inst.cs_count) == (5, 7, 148, 4)


def test_same_seed_same_instance():
    a = generate_grid_instance(GridSpec(20, 20, 5, 7, 40, 4, seed=99))
    b = generate_grid_instance(GridSpec(20, 20, 5, 7, 40, 4, seed=99))
    c = generate_grid_instance(GridSpec(20, 20, 5, 7, 40, 4, seed=100))
    for m in ("d", "e", "q"):
        assert getattr(a, m).tobytes() == getattr(b, m).tobytes()
    assert a.sites == b.sites
    assert not np.array_equal(a.q, c.q)


def test_distances_bounded_by_rectangle_diagonal():
    inst = generate_grid_instance(GridSpec(20, 20, 5, 7, 148, 4, seed=1))
    limit = np.hypot(20, 20)
    for m in (inst.d, inst.e, inst.q):
        assert m.max() <= limit


def test_q_symmetric_zero_diagonal_and_metric():
    inst = generate_grid_instance(GridSpec(8, 3, 2, 2, 25, 3, seed=5))
    q = inst.q
    assert (q == q.T).all() and (np.diag(q) == 0).all()
    # triangle inequality over all triples
    assert (q[:, None, :] <= q[:, :, None] + q[None, :, :] + 1e-12).all()


def test_invalid_spec():
    with pytest.raises(ValidationError):
        GridSpec(20, 20, 5, 7, 3, 4)
    with pytest.raises(ValidationError):
        GridSpec(0, 20, 5, 7, 10, 4)
    with pytest.raises(ValidationError):
        GridSpec(20, 20, 0, 7, 10, 4)


def test_edwardsville_like_shape():
    inst = edwardsville_like_instance(seed=3)
    assert (inst.n_pois, inst.n_existing, inst.n_candidates, inst.cs_count) == (54, 2, 430, 4)
    tags = [s.tag for s in inst.candidates]
    assert (tags.count("parking"), tags.count("park"), tags.count("gas")) == (389, 30, 11)
    assert all(s.kind == SiteKind.POI for s in inst.pois)
    assert inst.provenance["backend"]["mode"] == "haversine"
    # a few km across town
    assert inst.q.max() < 15
