"""Distance matrices from coordinates: great-circle or OSRM table service.

All matrices are in kilometres. OSRM returns metres; the conversion happens
once, in :func:`osrm_table`.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import requests

from .model import GeoPoint, Site, ValidationError

logger = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0088
MAX_TABLE_CELLS = 10_000
CACHE_FORMAT = "evsiting-matrices"
CACHE_VERSION = 1


class DistanceError(RuntimeError):
    code = "distance-error"


class OsrmTransportError(DistanceError):
    code = "transport"


class OsrmStatusError(DistanceError):
    code = "http-status"


class OsrmResponseError(DistanceError):
    code = "missing-annotations"


class UnroutableError(DistanceError):
    code = "unroutable"

    def __init__(self, message, cell):
        super().__init__(message)
        self.cell = cell


@dataclass(frozen=True)
class DistanceBackend:
    mode: str = "haversine"
    endpoint: str = ""
    profile: str = "driving"

    def __post_init__(self):
        if self.mode not in ("haversine", "osrm"):
            raise ValidationError("bad-backend", f"unknown distance mode {self.mode!r}")
        if (self.mode == "osrm") != bool(self.endpoint):
            raise ValidationError("bad-backend", "an endpoint is required for, and only for, osrm")

    def describe(self) -> dict:
        if self.mode == "haversine":
            return {"mode": "haversine", "earth_radius_km": EARTH_RADIUS_KM}
        return {"mode": "osrm", "endpoint": self.endpoint.rstrip("/"), "profile": self.profile}


@dataclass(frozen=True, eq=False)
class DistanceMatrixSet:
    d: np.ndarray
    e: np.ndarray
    q: np.ndarray
    provenance: dict = field(default_factory=dict)


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    return float(haversine_matrix([a], [b])[0, 0])


def haversine_matrix(sources: Sequence[GeoPoint], destinations: Sequence[GeoPoint]) -> np.ndarray:
    lat1, lon1 = _radians(sources)
    lat2, lon2 = _radians(destinations)
    dlat = lat2[None, :] - lat1[:, None]
    dlon = lon2[None, :] - lon1[:, None]
    h = (
        np.sin(dlat / 2) ** 2
        + np.cos(lat1)[:, None] * np.cos(lat2)[None, :] * np.sin(dlon / 2) ** 2
    )
    return 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def _radians(points):
    arr = np.array([(p.lat, p.lon) for p in points], dtype=np.float64).reshape(-1, 2)
    rad = np.radians(arr)
    return rad[:, 0], rad[:, 1]


def table_url(points: Sequence[GeoPoint], n_sources: int, backend: DistanceBackend) -> str:
    """Table request URL where the first ``n_sources`` points are sources.

    OSRM wants ``lon,lat`` pairs.
    """
    coords = ";".join(f"{p.lon!r},{p.lat!r}" for p in points)
    src = ";".join(str(i) for i in range(n_sources))
    dst = ";".join(str(i) for i in range(n_sources, len(points)))
    return (
        f"{backend.endpoint.rstrip('/')}/table/v1/{backend.profile}/{coords}"
        f"?sources={src}&destinations={dst}&annotations=distance"
    )


def _chunks(n_src, n_dst, max_cells):
    dst_step = min(n_dst, max_cells)
    src_step = max(1, max_cells // dst_step)
    for i in range(0, n_src, src_step):
        for j in range(0, n_dst, dst_step):
            yield i, min(i + src_step, n_src), j, min(j + dst_step, n_dst)


def _fetch(session, url, timeout):
    try:
        resp = session.get(url, timeout=timeout)
    except requests.RequestException as exc:
        raise OsrmTransportError(f"request failed: {exc}") from exc
    if resp.status_code != 200:
        raise OsrmStatusError(f"HTTP {resp.status_code} from {url.split('?')[0][:120]}")
    try:
        body = resp.json()
    except ValueError as exc:
        raise OsrmResponseError(f"response is not JSON: {exc}") from exc
    if body.get("code", "Ok") != "Ok":
        raise OsrmStatusError(f"OSRM code {body.get('code')!r}: {body.get('message', '')}")
    return body


def osrm_table(
    sources: Sequence[GeoPoint],
    destinations: Sequence[GeoPoint],
    backend: DistanceBackend,
    *,
    session=None,
    max_cells: int = MAX_TABLE_CELLS,
    workers: int = 1,
    timeout: float = 30.0,
) -> np.ndarray:
    """Route distances in km, ``len(sources) x len(destinations)``.

    Requests are split so each asks for at most ``max_cells`` cells.
    ``session`` is anything with a ``requests``-style ``get``.
    """
    if backend.mode != "osrm":
        raise ValidationError("bad-backend", "osrm_table needs an osrm backend")
    if not sources or not destinations:
        raise ValidationError("empty-input", "sources and destinations must be non-empty")
    session = session or requests.Session()
    out = np.empty((len(sources), len(destinations)))
    blocks = list(_chunks(len(sources), len(destinations), max_cells))

    def run(block):
        i0, i1, j0, j1 = block
        url = table_url(list(sources[i0:i1]) + list(destinations[j0:j1]), i1 - i0, backend)
        body = _fetch(session, url, timeout)
        dist = body.get("distances")
        if dist is None:
            raise OsrmResponseError(
                f"response for sources {i0}..{i1 - 1} has no distance annotations"
            )
        if len(dist) != i1 - i0 or any(len(row) != j1 - j0 for row in dist):
            raise OsrmResponseError(f"distance block for sources {i0}..{i1 - 1} has wrong shape")
        for a, row in enumerate(dist):
            for b, v in enumerate(row):
                if v is None:
                    cell = (i0 + a, j0 + b)
                    raise UnroutableError(f"no route for source {cell[0]} -> destination {cell[1]}", cell)
        out[i0:i1, j0:j1] = np.asarray(dist, dtype=np.float64) / 1000.0

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for fut in [pool.submit(run, b) for b in blocks]:
                fut.result()
    else:
        for b in blocks:
            run(b)
    if (out < 0).any():
        raise OsrmResponseError("negative route distance in response")
    return out


def build_matrices(
    pois: Sequence[Site],
    existing: Sequence[Site],
    candidates: Sequence[Site],
    backend: DistanceBackend,
    **osrm_kwargs,
) -> DistanceMatrixSet:
    """Fill d (POI -> candidate), e (existing -> candidate) and q.

    ``q`` is made symmetric with ``max(q_ij, q_ji)`` and given a zero
    diagonal; d and e keep the directed distances.
    """
    if not candidates:
        raise ValidationError("empty-candidates", "at least one candidate is required")
    P, X = len(pois), len(existing)
    src = [s.point for s in (*pois, *existing, *candidates)]
    dst = [s.point for s in candidates]
    if backend.mode == "haversine":
        full = haversine_matrix(src, dst)
    else:
        full = osrm_table(src, dst, backend, **osrm_kwargs)
    d, e, q = full[:P], full[P:P + X], full[P + X:]
    q = np.maximum(q, q.T)
    np.fill_diagonal(q, 0.0)
    prov = {
        "backend": backend.describe(),
        "retrieved": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "units": "km",
    }
    return DistanceMatrixSet(d.copy(), e.copy(), q, prov)


def cache_key(pois, existing, candidates, backend: DistanceBackend) -> str:
    """Order-sensitive digest of coordinates and the backend descriptor."""
    payload = {
        "backend": backend.describe(),
        "sites": [
            [[s.point.lat, s.point.lon] for s in group] for group in (pois, existing, candidates)
        ],
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class MatrixCache:
    """One JSON file per key under ``directory``.

    File layout::

        {"format": "evsiting-matrices", "version": 1, "key": <sha256>,
         "provenance": {"backend": {...}, "retrieved": <iso time>, "units": "km"},
         "d": [[...]], "e": [[...]], "q": [[...]], "shape": [P, X, E]}

    Floats are written with full precision, so a load returns the exact
    stored values.
    """

    def __init__(self, directory):
        self.directory = Path(directory)

    def path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def store(self, key: str, mset: DistanceMatrixSet) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        doc = {
            "format": CACHE_FORMAT,
            "version": CACHE_VERSION,
            "key": key,
            "provenance": mset.provenance,
            "shape": [mset.d.shape[0], mset.e.shape[0], mset.q.shape[0]],
            "d": mset.d.tolist(),
            "e": mset.e.tolist(),
            "q": mset.q.tolist(),
        }
        path = self.path(key)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc))
        tmp.replace(path)
        return path

    def load(self, key: str, backend: DistanceBackend | None = None) -> DistanceMatrixSet | None:
        path = self.path(key)
        if not path.exists():
            return None
        doc = json.loads(path.read_text())
        if doc.get("format") != CACHE_FORMAT or doc.get("version") != CACHE_VERSION:
            logger.warning("ignoring cache file %s with unknown format", path)
            return None
        if doc.get("key") != key:
            logger.warning("ignoring cache file %s: key mismatch", path)
            return None
        if backend is not None and doc["provenance"].get("backend") != backend.describe():
            logger.warning("ignoring cache file %s: built with a different backend", path)
            return None
        P, X, E = doc["shape"]
        return DistanceMatrixSet(
            np.array(doc["d"], dtype=np.float64).reshape(P, E),
            np.array(doc["e"], dtype=np.float64).reshape(X, E),
            np.array(doc["q"], dtype=np.float64).reshape(E, E),
            doc["provenance"],
        )


def cached_build_matrices(pois, existing, candidates, backend, cache_dir, **osrm_kwargs):
    """:func:`build_matrices` behind a :class:`MatrixCache`.

    Returns ``(matrices, hit)``.
    """
    cache = MatrixCache(cache_dir)
    key = cache_key(pois, existing, candidates, backend)
    found = cache.load(key, backend)
    if found is not None:
        logger.info("distance cache hit: %s", cache.path(key))
        return found, True
    mset = build_matrices(pois, existing, candidates, backend, **osrm_kwargs)
    mset.provenance["key"] = key
    cache.store(key, mset)
    logger.info("distance cache miss: stored %s", cache.path(key))
    return mset, False
