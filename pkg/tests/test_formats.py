import json

import numpy as np
import pytest

from conftest import make_toy
from evsiting import AnnealSchedule, GridSpec, SiteKind, ValidationError, default_weights, generate_grid_instance, solve
from evsiting.formats import read_instance, read_sites, read_solution, write_instance, write_solution


def test_instance_round_trip(tmp_path):
    inst = generate_grid_instance(GridSpec(20, 20, 3, 2, 9, 2, seed=4))
    write_instance(inst, tmp_path / "i.json")
    back = read_instance(tmp_path / "i.json")
    assert back.sites == inst.sites
    for m in ("d", "e", "q"):
        np.testing.assert_array_equal(getattr(back, m), getattr(inst, m))
    assert back.provenance == inst.provenance


def test_instance_without_existing(tmp_path):
    inst = generate_grid_instance(GridSpec(20, 20, 3, 0, 5, 2, seed=4))
    write_instance(inst, tmp_path / "i.json")
    assert read_instance(tmp_path / "i.json").e.shape == (0, 5)


def test_rejects_wrong_format_and_version(tmp_path):
    path = tmp_path / "i.json"
    path.write_text(json.dumps({"format": "something-else"}))
    with pytest.raises(ValidationError):
        read_instance(path)
    write_instance(make_toy(), path)
    doc = json.loads(path.read_text())
    doc["version"] = 99
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError, match="version"):
        read_instance(path)


def test_matrix_shape_checked(tmp_path):
    path = tmp_path / "i.json"
    write_instance(make_toy(), path)
    doc = json.loads(path.read_text())
    doc["matrices"]["d"] = [[1.0, 2.0, 3.0]]
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError) as exc:
        read_instance(path)
    assert exc.value.code == "dimension-mismatch"


def test_solution_file_is_deterministic(tmp_path):
    inst = generate_grid_instance(GridSpec(20, 20, 3, 2, 12, 3, seed=4))
    w = default_weights(12, inst)
    for name in ("a.json", "b.json"):
        write_solution(inst, solve(inst, w, "sa-swap", AnnealSchedule(reads=10, sweeps=20, seed=3)), tmp_path / name)
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    doc = read_solution(tmp_path / "a.json")
    assert sum(doc["x"]) == 3 and len(doc["selected"]) == 3 and "wall_time" not in json.dumps(doc)


def test_read_sites_csv(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("id,lat,lon,tag\nh1,38.81,-89.95,hotel\nr1,38.80,-89.96,\n")
    sites = read_sites(path, SiteKind.POI)
    assert [(s.id, s.point.lat, s.point.lon, s.tag) for s in sites] == [
        ("h1", 38.81, -89.95, "hotel"), ("r1", 38.80, -89.96, ""),
    ]


def test_read_sites_csv_missing_column(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("id,lat\nh1,38.81\n")
    with pytest.raises(ValidationError):
        read_sites(path, SiteKind.POI)
