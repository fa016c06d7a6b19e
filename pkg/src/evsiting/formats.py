"""Versioned JSON files for instances and solutions, and site readers.

Instance file (``"format": "evsiting-instance"``, ``"version": 1``)::

    {"format": ..., "version": 1, "cs_count": CS,
     "sites": {"pois": [SITE...], "existing": [...], "candidates": [...]},
     "matrices": {"units": "km", "d": [[...]], "e": [[...]], "q": [[...]]},
     "provenance": {"backend": ..., ...}}

where ``SITE`` is ``{"id", "lat", "lon", "tag"}``. Solution file
(``"format": "evsiting-solution"``) holds the solver name, seed, the 0/1
vector ``x``, the selected candidate ids, objective breakdown, energy,
feasibility and per-read energies. It carries no timings, so the same run
twice produces the same bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .model import GeoPoint, ProblemInstance, Site, SiteKind, ValidationError

INSTANCE_FORMAT = "evsiting-instance"
SOLUTION_FORMAT = "evsiting-solution"
FORMAT_VERSION = 1

_GROUPS = (("pois", SiteKind.POI), ("existing", SiteKind.EXISTING), ("candidates", SiteKind.CANDIDATE))


def _site_doc(s: Site) -> dict:
    return {"id": s.id, "lat": s.point.lat, "lon": s.point.lon, "tag": s.tag}


def instance_to_dict(inst: ProblemInstance) -> dict:
    return {
        "format": INSTANCE_FORMAT,
        "version": FORMAT_VERSION,
        "cs_count": inst.cs_count,
        "sites": {name: [_site_doc(s) for s in getattr(inst, name)] for name, _ in _GROUPS},
        "matrices": {
            "units": "km",
            "d": inst.d.tolist(),
            "e": inst.e.tolist(),
            "q": inst.q.tolist(),
        },
        "provenance": inst.provenance,
    }


def _check_header(doc, fmt, where):
    if not isinstance(doc, dict) or doc.get("format") != fmt:
        raise ValidationError("bad-format", f"{where}: not an {fmt} document")
    if doc.get("version") != FORMAT_VERSION:
        raise ValidationError("bad-format", f"{where}: unsupported version {doc.get('version')!r}")


def _matrix(rows, shape, name):
    arr = np.array(rows, dtype=np.float64)
    if arr.size == 0 and 0 in shape:
        return arr.reshape(shape)
    if arr.shape != shape:
        raise ValidationError("dimension-mismatch", f"{name} has shape {arr.shape}, expected {shape}")
    return arr


def instance_from_dict(doc: dict, where: str = "instance") -> ProblemInstance:
    _check_header(doc, INSTANCE_FORMAT, where)
    groups = {}
    for name, kind in _GROUPS:
        groups[name] = [
            Site(str(s["id"]), GeoPoint(float(s["lat"]), float(s["lon"])), kind, s.get("tag", ""))
            for s in doc["sites"].get(name, [])
        ]
    m = doc["matrices"]
    P, X, E = (len(groups[name]) for name, _ in _GROUPS)
    return ProblemInstance(
        cs_count=int(doc["cs_count"]),
        d=_matrix(m["d"], (P, E), "d"),
        e=_matrix(m["e"], (X, E), "e"),
        q=_matrix(m["q"], (E, E), "q"),
        provenance=doc.get("provenance", {}),
        **groups,
    )


def write_instance(inst: ProblemInstance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=1) + "\n")


def read_instance(path) -> ProblemInstance:
    return instance_from_dict(json.loads(Path(path).read_text()), str(path))


def solution_to_dict(inst: ProblemInstance, report) -> dict:
    return {
        "format": SOLUTION_FORMAT,
        "version": FORMAT_VERSION,
        "solver": report.solver_name,
        "seed": report.seed,
        "n_candidates": inst.n_candidates,
        "x": [int(v) for v in report.best],
        "selected": [inst.candidates[j].id for j in report.selected],
        "feasible": report.feasible,
        "energy": report.best_energy,
        "objective": report.best_objective._asdict(),
        "read_energies": [float(v) for v in report.read_energies],
    }


def write_solution(inst: ProblemInstance, report, path) -> None:
    Path(path).write_text(json.dumps(solution_to_dict(inst, report), indent=1) + "\n")


def read_solution(path) -> dict:
    doc = json.loads(Path(path).read_text())
    _check_header(doc, SOLUTION_FORMAT, str(path))
    return doc


def read_sites(path, kind: SiteKind) -> list[Site]:
    """Sites from a CSV (``id,lat,lon[,tag]``) or GeoJSON Point collection.

    For GeoJSON, features whose ``kind`` property names another kind are
    skipped, so a full export can be read back one group at a time.
    """
    path = Path(path)
    if path.suffix.lower() in (".geojson", ".json"):
        return sites_from_geojson(json.loads(path.read_text()), kind)
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    missing = {"id", "lat", "lon"} - set(rows[0] if rows else {"id", "lat", "lon"})
    if missing:
        raise ValidationError("bad-format", f"{path}: missing columns {sorted(missing)}")
    return [
        Site(r["id"], GeoPoint(float(r["lat"]), float(r["lon"])), kind, r.get("tag") or "")
        for r in rows
    ]


def sites_from_geojson(doc: dict, kind: SiteKind) -> list[Site]:
    out = []
    for i, feat in enumerate(doc.get("features", [])):
        geom = feat.get("geometry") or {}
        if geom.get("type") != "Point":
            raise ValidationError("bad-geojson", f"feature {i} is not a Point")
        props = feat.get("properties") or {}
        if props.get("kind", kind.value) != kind.value:
            continue
        lon, lat = geom["coordinates"][:2]
        out.append(Site(str(props.get("id", f"f{i}")), GeoPoint(float(lat), float(lon)), kind, props.get("tag", "")))
    return out
