"""Report serialization: census JSON, sweep CSV, oracle JSON.

Reports are plain data with a fixed schema and deterministic formatting
(sorted keys, shortest round-trip floats, no timestamps), so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import os
import tempfile

from .detect import Census, SweepResult
from .grid import GridSampling
from .oracle import OracleReport
from .surface import SurfaceCensus


def _vertex_entries(census_vertices, grid: GridSampling) -> list[list]:
    out = []
    for v in census_vertices:
        x, y = grid.vertex_coords(v)
        out.append([int(v[0]), int(v[1]), float(x), float(y), grid.value_at(v)])
    return out


def census_dict(census: Census, grid: GridSampling) -> dict:
    """Census as a JSON-ready dict: counts plus [i, j, x, y, value] rows."""
    return {
        "mode": census.mode,
        "n": census.n,
        "r": census.r,
        "S": census.S,
        "U": census.U,
        "N": census.N,
        "minima": _vertex_entries(census.minima, grid),
        "maxima": _vertex_entries(census.maxima, grid),
        "warnings": list(census.warnings),
    }


def surface_census_dict(sc: SurfaceCensus) -> dict:
    """Surface census dict: the census schema plus positions and mesh_stats.

    ``positions`` lists one [X, Y, Z] per equilibrium, minima first, in the
    same order as the minima and maxima arrays.
    """
    doc = census_dict(sc.census, sc.grid)
    doc["positions"] = [list(p) for p in sc.positions_minima + sc.positions_maxima]
    doc["mesh_stats"] = dict(sc.mesh_stats)
    return doc


def sweep_csv(result: SweepResult) -> str:
    """Sweep rows as CSV with header ``r,S,U``."""
    lines = ["r,S,U"] + [f"{r},{s},{u}" for r, s, u in result.rows]
    return "\n".join(lines) + "\n"


def sweep_dict(result: SweepResult) -> dict:
    return {
        "rows": [[r, s, u] for r, s, u in result.rows],
        "plateau": {
            "S": result.plateau.S,
            "U": result.plateau.U,
            "r_start": result.plateau.r_start,
            "r_end": result.plateau.r_end,
        },
    }


def oracle_dict(report: OracleReport) -> dict:
    return {
        "points": [
            {
                "x": p.x,
                "y": p.y,
                "kind": p.kind,
                "lambda1": p.eigens.lambda1,
                "lambda2": p.eigens.lambda2,
            }
            for p in report.points
        ],
        "s": report.s,
        "u": report.u,
        "saddles": report.saddles,
    }


def json_text(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
