import math

import pytest

from pdstretch.delaunay import build
from pdstretch.paths import (DELAUNAY_STRETCH_BOUND, PathConstructionError, WalkResult, corridor_by_scan, ellipse_mask,
                             greedy_path, shortest_path, straight_walk, upper_path)
from pdstretch.sampling import Instance, Window, make_instance


def small_instance(points):
    """Instance over hand-placed points with s and t as vertices 0 and 1."""

    mesh = build(points)
    return Instance(mesh=mesh, s_id=0, t_id=1, intensity=1.0, k=float(points[1][0]), seed=0,
                    window=Window(-1, 3, -2, 2))


@pytest.fixture
def kite():
    # s, t, a above the line, b below; the Delaunay diagonal is (a, b)
    return small_instance([(0, 0), (2, 0), (1, 0.8), (1, -0.6)])


class TestStraightWalk:
    def test_kite(self, kite):
        walk = straight_walk(kite)
        assert len(walk.triangles) == 2
        assert walk.crossed == [(2, 3)]
        assert walk.crossed_edges == 1
        assert corridor_by_scan(kite) == sorted(walk.triangles)

    def test_direct_edge(self):
        inst = small_instance([(0, 0), (2, 0), (1, 1), (1, -5)])
        walk = straight_walk(inst)
        assert walk.triangles == []
        assert walk.crossed_edges == 0
        assert upper_path(inst, walk).vertices == [0, 1]
        assert greedy_path(inst, walk).vertices == [0, 1]
        assert shortest_path(inst).length == pytest.approx(2.0)

    def test_vertex_on_segment(self):
        inst = small_instance([(0, 0), (2, 0), (1, 0), (1, 1), (1, -1)])
        pytest.raises(PathConstructionError, straight_walk, inst)

    def test_random_instances(self):
        for seed in range(5):
            inst = make_instance(500, 2, seed=seed)
            walk = straight_walk(inst)
            assert walk.crossed_edges == len(walk.triangles) - 1
            assert corridor_by_scan(inst) == sorted(walk.triangles)
            for a, b in zip(walk.triangles, walk.triangles[1:]):
                assert len(set(inst.mesh.tri_list[a]) & set(inst.mesh.tri_list[b])) == 2


class TestPaths:
    def test_kite_paths(self, kite):
        up = upper_path(kite)
        assert up.vertices == [0, 2, 1]
        assert up.length == pytest.approx(2 * math.sqrt(1.64))
        assert up.size == 2

        gp = greedy_path(kite)
        assert gp.vertices == [0, 3, 1]
        assert gp.length == pytest.approx(2 * math.sqrt(1.36))

        sp = shortest_path(kite)
        assert sp.vertices == [0, 3, 1]
        assert sp.length == pytest.approx(gp.length)

    def test_reentrant_upper_path(self):
        # a and b above the line; the corridor passes below b between two triangles on the edge (a, b)
        inst = small_instance([(0, 0), (4, 0), (1, 1), (2, 0.3), (1.5, -0.5), (3.5, -0.5)])
        walk = WalkResult(triangles=[0, 1, 2, 3, 4], crossed=[(2, 4), (3, 4), (3, 5), (2, 5)], crossed_edges=4)
        up = upper_path(inst, walk)
        assert up.vertices == [0, 2, 3, 2, 1]
        assert sorted(tuple(sorted(e)) for e in up.edges) == [(0, 2), (1, 2), (2, 3), (2, 3)]
        assert up.size == 4
        assert up.length == pytest.approx(math.sqrt(2) + 2 * math.sqrt(1.49) + math.sqrt(10))

    def test_reentrant_upper_paths_on_random_instances(self):
        reentrant = 0
        for seed in range(100):
            inst = make_instance(2000, 1, seed=seed, engine="qhull")
            up = upper_path(inst)
            pts = inst.mesh.points[up.vertices]
            assert up.size == len(up.vertices) - 1
            assert up.length == pytest.approx(sum(math.dist(p, q) for p, q in zip(pts[:-1], pts[1:])))
            if len(set(up.vertices)) < len(up.vertices):
                reentrant += 1
        assert reentrant > 0

    def test_path_order(self):
        for seed in range(5):
            inst = make_instance(500, 2, seed=seed)
            walk = straight_walk(inst)
            up, gp, sp = upper_path(inst, walk), greedy_path(inst, walk), shortest_path(inst)
            assert inst.k <= sp.length <= DELAUNAY_STRETCH_BOUND * inst.k
            assert sp.length <= gp.length + 1e-12
            assert sp.length <= up.length + 1e-12
            for path in (up, gp, sp):
                assert path.vertices[0] == inst.s_id
                assert path.vertices[-1] == inst.t_id
                assert path.size == len(path.vertices) - 1

    def test_upper_path_stays_on_corridor(self):
        inst = make_instance(500, 2, seed=11)
        walk = straight_walk(inst)
        corridor = {v for t in walk.triangles for v in inst.mesh.tri_list[t]}
        assert set(upper_path(inst, walk).vertices) <= corridor
        assert set(greedy_path(inst, walk).vertices) <= corridor

    def test_pruning_keeps_shortest_path(self):
        for seed in range(5):
            inst = make_instance(500, 2, seed=seed)
            assert shortest_path(inst, prune=True).length == pytest.approx(shortest_path(inst).length, rel=1e-12)
            mask = ellipse_mask(inst)
            assert mask[inst.s_id] and mask[inst.t_id]
