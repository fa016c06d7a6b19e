"""A town-sized instance: 54 POIs, 2 existing chargers and 430 candidate
lots scattered over a small-city bounding box, great-circle distances.
Exhaustive search is out of reach (C(430, 4) is about 1.4e9), so the swap
annealer does the work.  Writes a GeoJSON file you can drop onto a map.

Run:  python3 demos/03_edwardsville_like.py [out.geojson]
"""

import json
import math
import sys

from evsiting import AnnealSchedule, default_weights, edwardsville_like_instance, export_geojson, solve_sa_swap, station_metrics

inst = edwardsville_like_instance(seed=0, cs_count=4)
w = default_weights(inst.n_candidates, inst)
print(f"P={inst.n_pois} X={inst.n_existing} E={inst.n_candidates}; C(E, 4) = {math.comb(inst.n_candidates, 4):,}")

r = solve_sa_swap(inst, w, AnnealSchedule(reads=1000, seed=0))
print(f"sa-swap: {r.wall_time:.1f}s, Z_total={r.best_objective.total:.3f}")
print(station_metrics(inst, r.best, w).format_table())

out = sys.argv[1] if len(sys.argv) > 1 else "edwardsville_like.geojson"
with open(out, "w") as fh:
    json.dump(export_geojson(inst, r.best), fh)
print(f"wrote {out}")
