import numpy as np
import pytest

from pdstretch.dataio import dump_off
from pdstretch.delaunay import (BOUNDARY, OUTSIDE, UnbuildableError, build, circumcenters, euler_triangle_count,
                                flip_edge, hilbert_keys, insertion_order, locate, morton_keys, triangle_contains,
                                verify_delaunay)


def triangle_set(mesh):
    return {tuple(sorted(t)) for t in mesh.triangles.tolist()}


def random_points(seed, count=64):
    rng = np.random.default_rng(seed)
    return rng.random((count, 2))


def check_adjacency(mesh):
    for t, (v, nb) in enumerate(zip(mesh.triangles.tolist(), mesh.neighbors.tolist())):
        for i in range(3):
            u = nb[i]
            if u == BOUNDARY:
                continue
            # the neighbor shares exactly the edge opposite vertex i
            shared = set(v) - {v[i]}
            assert shared <= set(mesh.triangles[u].tolist())
            assert t in mesh.neighbors[u].tolist()


class TestBuild:
    def test_square_with_inner_point(self):
        mesh = build([(0, 0), (1, 0), (0, 1), (0.9, 0.9)])
        assert mesh.n_triangles == 2
        edges = {tuple(e) for e in mesh.edges().tolist()}
        assert (0, 3) in edges
        assert (1, 2) not in edges
        assert verify_delaunay(mesh)

    def test_single_triangle(self):
        mesh = build([(0, 0), (1, 0), (0, 1)])
        assert mesh.n_triangles == 1
        assert mesh.neighbors.tolist() == [[BOUNDARY, BOUNDARY, BOUNDARY]]

    @pytest.mark.parametrize("points", [
        [(0, 0), (1, 1)],
        [(0, 0), (1, 1), (2, 2), (3, 3)],
        [(0, 0), (1, 0), (0, 1), (1, 0)],
        [(0, 0), (1, 0), (np.nan, 1)],
    ])
    def test_unbuildable(self, points):
        pytest.raises(UnbuildableError, build, points)

    def test_unknown_engine(self):
        pytest.raises(ValueError, build, random_points(0), engine="delaunator")

    def test_counterclockwise_and_adjacency(self):
        mesh = build(random_points(1))
        pts = mesh.points[mesh.triangles]
        cross = ((pts[:, 1, 0] - pts[:, 0, 0]) * (pts[:, 2, 1] - pts[:, 0, 1])
                 - (pts[:, 1, 1] - pts[:, 0, 1]) * (pts[:, 2, 0] - pts[:, 0, 0]))
        assert np.all(cross > 0)
        check_adjacency(mesh)

    def test_euler_count(self):
        for seed in range(10):
            mesh = build(random_points(seed))
            assert mesh.n_triangles == euler_triangle_count(mesh.n_vertices, len(mesh.hull_vertices()))

    def test_insertion_order_and_engine_invariance(self):
        points = random_points(7, 200)
        reference = triangle_set(build(points, order="given"))
        assert triangle_set(build(points, order="hilbert")) == reference
        assert triangle_set(build(points, order="morton")) == reference
        assert triangle_set(build(points, engine="qhull")) == reference

    def test_shuffled_input_gives_same_triangles(self):
        for seed in range(20):
            rng = np.random.default_rng(200 + seed)
            points = rng.random((int(rng.integers(4, 65)), 2))
            reference = triangle_set(build(points, order="given"))
            perm = rng.permutation(len(points))
            shuffled = build(points[perm], order="given")
            assert {tuple(sorted(perm[t].tolist())) for t in shuffled.triangles} == reference

    def test_qhull_adjacency(self):
        check_adjacency(build(random_points(2), engine="qhull"))

    def test_cocircular_ties_keep_existing_triangles(self):
        corners = [(0, 0), (1, 0), (1, 1), (0, 1)]
        mesh = build(corners, order="given")
        edges = {tuple(e) for e in mesh.edges().tolist()}
        assert (0, 2) in edges and (1, 3) not in edges

        rotated = build(corners[1:] + corners[:1], order="given")
        edges = {tuple(e) for e in rotated.edges().tolist()}
        # the first triangle is (1,0), (1,1), (0,1): its diagonal (1,0)-(0,1) stays
        assert (0, 2) in edges and (1, 3) not in edges
        assert verify_delaunay(mesh) and verify_delaunay(rotated)

    def test_random_sets_are_delaunay(self):
        for seed in range(50):
            rng = np.random.default_rng(seed)
            points = rng.random((int(rng.integers(3, 65)), 2))
            assert verify_delaunay(build(points))

    @pytest.mark.slow
    def test_many_random_sets_are_delaunay(self):
        for seed in range(500):
            rng = np.random.default_rng(1000 + seed)
            points = rng.random((int(rng.integers(3, 65)), 2))
            assert verify_delaunay(build(points))


class TestOrder:
    def test_unknown_order(self):
        pytest.raises(ValueError, insertion_order, random_points(0), order="peano")

    def test_given_order(self):
        assert insertion_order(random_points(0, 10), order="given").tolist() == list(range(10))

    def test_orders_are_permutations(self):
        points = random_points(3, 100)
        for order in ("hilbert", "morton"):
            assert sorted(insertion_order(points, order=order).tolist()) == list(range(100))

    def test_curve_keys_are_distinct_on_a_grid(self):
        xs, ys = np.meshgrid(np.arange(8.0), np.arange(8.0))
        grid = np.column_stack([xs.ravel(), ys.ravel()])
        assert len(set(hilbert_keys(grid).tolist())) == 64
        assert len(set(morton_keys(grid).tolist())) == 64


class TestLocate:
    def test_centroids(self):
        mesh = build(random_points(4))
        for t in range(mesh.n_triangles):
            centroid = mesh.points[mesh.triangles[t]].mean(axis=0)
            assert locate(mesh, centroid) == t
            assert triangle_contains(mesh, t, centroid)

    def test_outside(self):
        mesh = build(random_points(4))
        assert locate(mesh, (2.0, 2.0)) == OUTSIDE
        assert locate(mesh, (-1.0, 0.5)) == OUTSIDE

    def test_vertex_gets_lowest_incident_triangle(self):
        mesh = build(random_points(5))
        for v in range(mesh.n_vertices):
            assert locate(mesh, mesh.points[v]) == min(mesh.incident_triangles(v))

    def test_shared_edge_gets_lowest_triangle(self):
        mesh = build([(0, 0), (1, 0), (0, 1), (0.9, 0.9)])
        # midpoint of the diagonal from (0, 0) to (0.9, 0.9)
        assert locate(mesh, (0.45, 0.45)) == 0

    def test_matches_exhaustive_scan(self):
        for seed in range(10):
            mesh = build(random_points(300 + seed, 40))
            queries = np.random.default_rng(seed).uniform(-0.1, 1.1, (50, 2))
            for p in queries:
                containing = [t for t in range(mesh.n_triangles) if triangle_contains(mesh, t, p)]
                assert locate(mesh, p) == (min(containing) if containing else OUTSIDE)

    def test_hint_does_not_change_answer(self):
        mesh = build(random_points(6))
        p = (0.31, 0.62)
        expected = locate(mesh, p)
        for hint in range(mesh.n_triangles):
            assert locate(mesh, p, hint=hint) == expected


class TestMeshQueries:
    def test_incident_triangles_match_degree(self):
        mesh = build(random_points(8))
        hull = set(mesh.hull_vertices().tolist())
        for v in range(mesh.n_vertices):
            fan = mesh.incident_triangles(v)
            assert all(v in mesh.triangles[t].tolist() for t in fan)
            assert len(set(fan)) == len(fan)
            degree = len(mesh.neighbor_vertices(v))
            assert len(fan) == (degree - 1 if v in hull else degree)

    def test_circumcenters(self):
        mesh = build([(0, 0), (4, 0), (1, 3)])
        centers, radii = circumcenters(mesh)
        np.testing.assert_allclose(centers[0], [2.0, 1.0])
        np.testing.assert_allclose(radii[0], np.sqrt(5.0))

    def test_flipped_edge_is_not_delaunay(self):
        mesh = build(random_points(9))
        t, i = [(t, i) for t in range(mesh.n_triangles) for i in range(3) if mesh.neighbors[t, i] != BOUNDARY][0]
        assert verify_delaunay(mesh)
        assert not verify_delaunay(flip_edge(mesh, t, i))

    def test_flip_hull_edge(self):
        mesh = build([(0, 0), (1, 0), (0, 1)])
        pytest.raises(ValueError, flip_edge, mesh, 0, 0)


class TestDump:
    def test_off_file(self, tmp_path):
        mesh = build([(0, 0), (1, 0), (0, 1), (0.9, 0.9)])
        dump_off(mesh, str(tmp_path / "mesh.off"))
        lines = (tmp_path / "mesh.off").read_text().splitlines()
        assert lines[0] == "OFF"
        assert lines[1] == "4 2 0"
        assert lines[2] == "0.0 0.0 0.0"
        assert len(lines) == 2 + 4 + 2
        assert all(line.startswith("3 ") for line in lines[6:])
