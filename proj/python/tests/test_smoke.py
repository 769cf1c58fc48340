import json
import os
from pathlib import Path

import pytest

import hprox

GOLDEN = Path(os.environ.get("HPROX_GOLDEN_DIR", Path(__file__).resolve().parents[2] / "tests" / "golden"))


@pytest.fixture(scope="module")
def small_scene():
    return hprox.Scene.load(str(GOLDEN / "scene_small.json"))


def test_generate_is_deterministic():
    a = hprox.generate(200, seed=5, body="lp")
    b = hprox.generate(200, seed=5, body="lp")
    assert len(a) == 200
    assert a.to_json() == b.to_json()
    assert a.body == "lp"


def test_scene_round_trip(tmp_path, small_scene):
    path = tmp_path / "scene.json"
    small_scene.save(str(path))
    again = hprox.Scene.load(str(path))
    assert again.to_json() == small_scene.to_json()
    assert hprox.Scene.from_json(small_scene.to_json()).to_json() == small_scene.to_json()


def test_malformed_scene_raises():
    with pytest.raises(ValueError):
        hprox.Scene.from_json('{"body": {"type": "euclidean"}, "homothets": [{"c": [0, 0], "rho": 1}]}')


def test_distance_is_symmetric(small_scene):
    for i in range(len(small_scene)):
        for j in range(len(small_scene)):
            assert small_scene.distance(i, j) == small_scene.distance(j, i)


@pytest.mark.parametrize("structure", ["linear", "fast", "grouped", "oracle"])
def test_index_matches_brute_force(structure):
    scene = hprox.generate(300, seed=11, body="ellipsoid", size_law="uniform")
    index = hprox.Index(scene, structure=structure, seed=3)
    queries = [((x, 0.5 * x, 1.0), 0.3 * (x % 4)) for x in range(12)]
    for center, rho in queries:
        truth = hprox.brute_intersections(scene, center, rho)
        assert index.report(center, rho) == truth
        assert (index.detect(center, rho) is not None) == bool(truth)
    removed = list(range(0, 300, 3))
    for i in removed:
        index.remove(i)
    assert len(index) == 300 - len(removed)
    new_id = index.insert((0.0, 0.0, 0.0), 0.5)
    assert new_id == 300 and index.live(new_id)
    nid, dist = index.nearest((0.0, 0.0, 0.0), 0.0)
    assert nid == new_id and dist <= 0.0
    with pytest.raises(IndexError):
        index.remove(0)
    assert hprox.index_stats(index)["structure"] == structure


def test_graph_results_match_golden(small_scene):
    def golden(name):
        return json.loads((GOLDEN / name).read_text())

    assert hprox.bfs(small_scene, 0, r0=0.5) == golden("bfs_small.json")
    assert hprox.dfs(small_scene, 0, r0=0.5) == golden("dfs_small.json")
    assert hprox.mst(small_scene, 3.0) == golden("mst_small.json")
    assert hprox.dijkstra(small_scene, 6.0, 0) == golden("dijkstra_small.json")
    for structure in ("fast", "grouped", "oracle"):
        assert hprox.bfs(small_scene, 0, r0=0.5, structure=structure) == golden("bfs_small.json")


def test_rsp_agrees_with_scan():
    scene = hprox.generate(80, seed=2, body="euclidean", size_law="uniform", degree=3.0)
    for k in (1, 3, 8, 79):
        try:
            r_star, path = hprox.rsp(scene, 0, 7, k)
        except hprox.NoPath:
            assert hprox.rsp_oracle(scene, 0, 7, k) is None
            continue
        assert r_star == hprox.rsp_oracle(scene, 0, 7, k)
        assert path[0] == 0 and path[-1] == 7 and len(path) - 1 <= k


def test_cutting_report_and_verify():
    scene = hprox.generate(400, seed=4)
    report = hprox.cutting_report(scene, t=8.0, seed=4)
    assert report["n"] == 400 and report["flagged_leaves"] == 0
    assert report["max_conflict"] <= 8 * 400 / 8
    checks = hprox.verify(hprox.generate(60, seed=9, body="lp"), seed=9)
    assert checks and all(c["ok"] for c in checks), [c for c in checks if not c["ok"]]
