"""Proximity indexes over homothets of a convex body in R^3 and the
implicit-graph algorithms built on them.

Structured results are plain dicts with the same fields as the JSON the
``hprox`` command-line tool writes.
"""

from __future__ import annotations

import json
from typing import Any

from . import _core
from ._core import Index, NoPath, Scene, SceneError, brute_intersections, generate, rsp, rsp_oracle

__all__ = [
    "Index",
    "NoPath",
    "Scene",
    "SceneError",
    "bfs",
    "brute_intersections",
    "cutting_report",
    "dfs",
    "dijkstra",
    "generate",
    "index_stats",
    "mst",
    "rsp",
    "rsp_oracle",
    "verify",
]


def bfs(scene: Scene, source: int, r0: float = 0.0, structure: str = "linear", seed: int = 1) -> dict[str, Any]:
    """BFS layers and parents of the proximity graph G_{r0}."""
    return json.loads(_core.bfs_json(scene, source, r0, structure, seed))


def dfs(scene: Scene, source: int, r0: float = 0.0, structure: str = "linear", seed: int = 1) -> dict[str, Any]:
    """DFS forest (discovery order and parents) of G_{r0}."""
    return json.loads(_core.dfs_json(scene, source, r0, structure, seed))


def mst(scene: Scene, r0: float, structure: str = "linear", seed: int = 1) -> dict[str, Any]:
    """Minimum spanning forest of G_{r0}."""
    return json.loads(_core.mst_json(scene, r0, structure, seed))


def dijkstra(scene: Scene, r0: float, source: int, structure: str = "linear", seed: int = 1) -> dict[str, Any]:
    """Shortest center-to-center distances over edges of length at most r0;
    unreachable members have distance None."""
    return json.loads(_core.dijkstra_json(scene, r0, source, structure, seed))


def index_stats(index: Index) -> dict[str, Any]:
    return json.loads(index.stats_json())


def cutting_report(scene: Scene, t: float = 8.0, seed: int = 1) -> dict[str, Any]:
    """Builds a shallow cutting and returns its measured contract figures."""
    return json.loads(_core.cutting_report_json(scene, t, seed))


def verify(scene: Scene, seed: int = 1, structure: str = "linear") -> list[dict[str, Any]]:
    """Runs every per-scene invariant check; each entry has an ``ok`` flag."""
    return json.loads(_core.verify_json(scene, seed, structure))
