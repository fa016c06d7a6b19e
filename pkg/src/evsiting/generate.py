"""Seeded synthetic instances.

:func:`generate_grid_instance` scatters sites on a planar rectangle with
Euclidean distances. :func:`edwardsville_like_instance` scatters sites with the
category counts of the Edwardsville, IL case inside the city's bounding box
and measures them with great-circle distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .distance import EARTH_RADIUS_KM, DistanceBackend, build_matrices
from .model import GeoPoint, ProblemInstance, Site, SiteKind, ValidationError, validate_instance

KM_PER_DEGREE = np.pi * EARTH_RADIUS_KM / 180.0

# (south, west, north, east)
EDWARDSVILLE_BBOX = (38.765, -90.020, 38.840, -89.915)

EDWARDSVILLE_COUNTS = {
    SiteKind.POI: {"hotel": 3, "restaurant": 41, "supermarket": 10},
    SiteKind.EXISTING: {"charging": 2},
    SiteKind.CANDIDATE: {"parking": 389, "park": 30, "gas": 11},
}


@dataclass(frozen=True)
class GridSpec:
    width_km: float = 20.0
    height_km: float = 20.0
    n_pois: int = 5
    n_existing: int = 7
    n_candidates: int = 148
    cs_count: int = 4
    seed: int = 0

    def __post_init__(self):
        if not (self.width_km > 0 and self.height_km > 0):
            raise ValidationError("bad-grid", "width_km and height_km must be > 0")
        if self.n_pois < 1 or self.n_existing < 0:
            raise ValidationError("bad-grid", "need n_pois >= 1 and n_existing >= 0")
        if not 1 <= self.cs_count <= self.n_candidates:
            raise ValidationError(
                "cs-exceeds-candidates",
                f"need 1 <= cs_count ({self.cs_count}) <= n_candidates ({self.n_candidates})",
            )


def _sites(xy, kind, prefix):
    # Planar km are stored as degrees from (0, 0) so exports land on a map;
    # the instance's distances stay Euclidean.
    return [
        Site(f"{prefix}{i}", GeoPoint(float(y / KM_PER_DEGREE), float(x / KM_PER_DEGREE)), kind)
        for i, (x, y) in enumerate(xy)
    ]


def generate_grid_instance(spec: GridSpec) -> ProblemInstance:
    """Place every site uniformly at random; distances are Euclidean km.

    Draw order is POIs, existing stations, candidates, so growing one group
    never moves the points of an earlier group for the same seed.
    """
    rng = np.random.default_rng(spec.seed)
    size = np.array([spec.width_km, spec.height_km])
    poi_xy = rng.uniform(0.0, 1.0, (spec.n_pois, 2)) * size
    ex_xy = rng.uniform(0.0, 1.0, (spec.n_existing, 2)) * size
    cand_xy = rng.uniform(0.0, 1.0, (spec.n_candidates, 2)) * size

    q = cdist(cand_xy, cand_xy)
    q = np.maximum(q, q.T)
    np.fill_diagonal(q, 0.0)
    inst = ProblemInstance(
        pois=_sites(poi_xy, SiteKind.POI, "p"),
        existing=_sites(ex_xy, SiteKind.EXISTING, "x"),
        candidates=_sites(cand_xy, SiteKind.CANDIDATE, "c"),
        cs_count=spec.cs_count,
        d=cdist(poi_xy, cand_xy),
        e=cdist(ex_xy, cand_xy) if spec.n_existing else np.zeros((0, spec.n_candidates)),
        q=q,
        provenance={"backend": "euclidean-plane", "grid": {
            "width_km": spec.width_km, "height_km": spec.height_km, "seed": spec.seed,
        }},
    )
    return validate_instance(inst)


def edwardsville_like_instance(
    seed: int = 0, cs_count: int = 4, backend: DistanceBackend | None = None, **osrm_kwargs
) -> ProblemInstance:
    """54 POIs, 2 existing stations and 430 candidates in the city's bbox.

    Site counts and tags follow the case-study table (hotels, restaurants,
    supermarkets; parking, parks, gas stations). Locations are uniform draws
    because the surveyed coordinates are not available.
    """
    rng = np.random.default_rng(seed)
    south, west, north, east = EDWARDSVILLE_BBOX
    groups = {}
    for kind, tags in EDWARDSVILLE_COUNTS.items():
        sites = []
        for tag, count in tags.items():
            lat = rng.uniform(south, north, count)
            lon = rng.uniform(west, east, count)
            sites += [
                Site(f"{tag}-{i}", GeoPoint(float(a), float(b)), kind, tag)
                for i, (a, b) in enumerate(zip(lat, lon))
            ]
        groups[kind] = sites
    backend = backend or DistanceBackend("haversine")
    mset = build_matrices(
        groups[SiteKind.POI], groups[SiteKind.EXISTING], groups[SiteKind.CANDIDATE], backend,
        **osrm_kwargs,
    )
    return validate_instance(ProblemInstance(
        groups[SiteKind.POI], groups[SiteKind.EXISTING], groups[SiteKind.CANDIDATE],
        cs_count, mset.d, mset.e, mset.q, provenance=mset.provenance,
    ))
