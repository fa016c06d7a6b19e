"""Per-station metrics and GeoJSON output for a chosen placement."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import (
    Objective,
    ProblemInstance,
    ValidationError,
    Weights,
    as_assignment,
    objective_components,
)


@dataclass(frozen=True)
class StationMetrics:
    station_id: str
    index: int
    avg_poi_distance_km: float
    avg_existing_distance_km: float | None


@dataclass(frozen=True)
class SolutionSummary:
    stations: tuple[StationMetrics, ...]
    pairwise_avg_km: float
    objective: Objective | None = None
    solver: dict = field(default_factory=dict)

    @property
    def avg_poi_distance_km(self) -> float:
        return float(np.mean([s.avg_poi_distance_km for s in self.stations]))

    @property
    def avg_existing_distance_km(self) -> float | None:
        vals = [s.avg_existing_distance_km for s in self.stations]
        if vals[0] is None:
            return None
        return float(np.mean(vals))

    def to_dict(self) -> dict:
        doc = {
            "stations": [
                {
                    "station_id": s.station_id,
                    "index": s.index,
                    "avg_poi_distance_km": s.avg_poi_distance_km,
                    "avg_existing_distance_km": s.avg_existing_distance_km,
                }
                for s in self.stations
            ],
            "pairwise_avg_km": self.pairwise_avg_km,
            "aggregate": {
                "avg_poi_distance_km": self.avg_poi_distance_km,
                "avg_existing_distance_km": self.avg_existing_distance_km,
            },
        }
        if self.objective is not None:
            doc["objective"] = self.objective._asdict()
        if self.solver:
            doc["solver"] = dict(self.solver)
        return doc

    def format_table(self) -> str:
        """Plain-text table, distances in km to three decimals."""
        lines = [f"{'station':<16} {'avg POI km':>11} {'avg existing km':>16}"]
        for s in self.stations:
            ex = "-" if s.avg_existing_distance_km is None else f"{s.avg_existing_distance_km:.3f}"
            lines.append(f"{s.station_id:<16} {s.avg_poi_distance_km:>11.3f} {ex:>16}")
        lines.append(f"pairwise average among selected stations: {self.pairwise_avg_km:.3f} km")
        if self.objective is not None:
            z = self.objective
            lines.append(
                f"Z1={z.z1:.3f}  Z2={z.z2:.3f}  Z3={z.z3:.3f}  Z_total={z.total:.3f}"
            )
        return "\n".join(lines)


def station_metrics(
    inst: ProblemInstance, x, w: Weights | None = None, solver: dict | None = None
) -> SolutionSummary:
    """Rows are ordered by candidate index; the objective needs ``w``."""
    x = as_assignment(inst, x)
    sel = np.flatnonzero(x)
    if sel.size == 0:
        raise ValidationError("empty-selection", "no candidate is selected")
    poi_avg = inst.d[:, sel].mean(axis=0)
    ex_avg = inst.e[:, sel].mean(axis=0) if inst.n_existing else None
    rows = tuple(
        StationMetrics(
            station_id=inst.candidates[j].id,
            index=int(j),
            avg_poi_distance_km=float(poi_avg[k]),
            avg_existing_distance_km=None if ex_avg is None else float(ex_avg[k]),
        )
        for k, j in enumerate(sel)
    )
    if sel.size > 1:
        iu = np.triu_indices(sel.size, 1)
        pairwise = float(inst.q[np.ix_(sel, sel)][iu].mean())
    else:
        pairwise = 0.0
    objective = objective_components(inst, w, x) if w is not None else None
    return SolutionSummary(rows, pairwise, objective, dict(solver or {}))


def _feature(site, selected):
    return {
        "type": "Feature",
        "geometry": {"type": "Point", "coordinates": [site.point.lon, site.point.lat]},
        "properties": {
            "id": site.id,
            "kind": site.kind.value,
            "tag": site.tag,
            "selected": bool(selected),
        },
    }


def export_geojson(inst: ProblemInstance, x) -> dict:
    """RFC 7946 FeatureCollection: POIs, existing stations, then candidates."""
    x = as_assignment(inst, x)
    feats = [_feature(s, False) for s in inst.pois]
    feats += [_feature(s, False) for s in inst.existing]
    feats += [_feature(s, x[j]) for j, s in enumerate(inst.candidates)]
    return {"type": "FeatureCollection", "features": feats}

