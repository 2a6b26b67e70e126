#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Created on 18-10-2026
# @author: pdstretch developers

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import Delaunay as QhullDelaunay

from .geom import orient2d, _incircle_unchecked, incircle_array, orient2d_array

logger = logging.getLogger(__name__)

BOUNDARY = -1
OUTSIDE = -1
# ghost vertex used only while building
INFINITE_VERTEX = -1


class UnbuildableError(ValueError):
    """Raised when a point set cannot be triangulated (too few, repeated or collinear points)."""


class WalkError(RuntimeError):
    """Raised when a walk through the mesh fails to terminate."""


@dataclass
class Mesh:
    """Planar Delaunay triangulation stored triangle by triangle.

    :param points: vertex coordinates, shape (V, 2)
    :type points: ndarray
    :param triangles: vertex ids of each triangle in counterclockwise order, shape (T, 3)
    :type triangles: ndarray
    :param neighbors: neighbors[t, i] is the triangle opposite vertex triangles[t, i], or BOUNDARY
    :type neighbors: ndarray
    :param vertex_triangle: one triangle incident to each vertex
    :type vertex_triangle: ndarray
    """

    points: np.ndarray
    triangles: np.ndarray
    neighbors: np.ndarray
    vertex_triangle: np.ndarray

    @property
    def n_vertices(self):
        return self.points.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]

    @cached_property
    def coords(self):
        # plain float tuples are much faster than numpy scalars inside the scalar predicates
        return [tuple(p) for p in self.points.tolist()]

    @cached_property
    def tri_list(self):
        return self.triangles.tolist()

    @cached_property
    def nbr_list(self):
        return self.neighbors.tolist()

    @cached_property
    def tri_bounds(self):
        """Bounding box (xmin, xmax, ymin, ymax) of every triangle, shape (T, 4)."""

        corners = self.points[self.triangles]
        return np.column_stack([corners[:, :, 0].min(axis=1), corners[:, :, 0].max(axis=1),
                                corners[:, :, 1].min(axis=1), corners[:, :, 1].max(axis=1)])

    def edges(self):
        """Unique undirected edges as an (E, 2) array with the smaller id first."""

        pairs = np.concatenate([self.triangles[:, [0, 1]], self.triangles[:, [1, 2]], self.triangles[:, [2, 0]]])
        return np.unique(np.sort(pairs, axis=1), axis=0)

    def hull_vertices(self):
        rows, cols = np.nonzero(self.neighbors == BOUNDARY)
        ends = np.concatenate([self.triangles[rows, (cols + 1) % 3], self.triangles[rows, (cols + 2) % 3]])
        return np.unique(ends)

    def incident_triangles(self, v):
        """Triangles around vertex v in counterclockwise order.

        :param v: vertex id
        :type v: int

        :returns: triangle ids
        :rtype: list
        """

        tris, nbrs = self.tri_list, self.nbr_list
        start = int(self.vertex_triangle[v])
        fan = [start]
        t = start
        while True:
            i = tris[t].index(v)
            t = nbrs[t][(i + 1) % 3]
            if t == start:
                return fan
            if t == BOUNDARY:
                break
            fan.append(t)

        # hull vertex: complete the fan clockwise from the start
        t = start
        while True:
            i = tris[t].index(v)
            t = nbrs[t][(i + 2) % 3]
            if t == BOUNDARY:
                return fan
            fan.insert(0, t)

    def neighbor_vertices(self, v):
        return sorted({u for t in self.incident_triangles(v) for u in self.tri_list[t] if u != v})


#########################################
# Insertion order along space-filling curves
#########################################


def _grid_coordinates(points, bits):
    side = (1 << bits) - 1
    lo = points.min(axis=0)
    span = np.maximum(points.max(axis=0) - lo, np.finfo(float).tiny)
    cells = np.floor((points - lo) / span.max() * side).astype(np.int64)
    return cells[:, 0], cells[:, 1]


def hilbert_keys(points, bits=16):
    """Position of every point along a Hilbert curve over the bounding square.

    :param points: coordinates, shape (N, 2)
    :type points: ndarray
    :param bits: curve order
    :type bits: int

    :returns: keys
    :rtype: ndarray
    """

    x, y = _grid_coordinates(np.asarray(points, dtype=float), bits)
    side = np.int64(1 << bits)
    keys = np.zeros(x.shape, dtype=np.int64)
    s = side // 2
    while s > 0:
        rx = ((x & s) > 0).astype(np.int64)
        ry = ((y & s) > 0).astype(np.int64)
        keys += s * s * ((3 * rx) ^ ry)
        flip = (ry == 0) & (rx == 1)
        x = np.where(flip, side - 1 - x, x)
        y = np.where(flip, side - 1 - y, y)
        swap = ry == 0
        x, y = np.where(swap, y, x), np.where(swap, x, y)
        s //= 2

    return keys


def _spread_bits(n):
    n = (n ^ (n << 8)) & 0x00FF00FF
    n = (n ^ (n << 4)) & 0x0F0F0F0F
    n = (n ^ (n << 2)) & 0x33333333
    return (n ^ (n << 1)) & 0x55555555


def morton_keys(points, bits=16):
    x, y = _grid_coordinates(np.asarray(points, dtype=float), bits)
    return _spread_bits(x) | (_spread_bits(y) << 1)


def insertion_order(points, order="hilbert"):
    """Indices of the points in the order they are inserted.

    :param order: one of "hilbert", "morton" or "given"
    :type order: str

    :rtype: ndarray
    """

    if order == "given":
        return np.arange(len(points))
    if order == "hilbert":
        return np.argsort(hilbert_keys(points), kind="stable")
    if order == "morton":
        return np.argsort(morton_keys(points), kind="stable")

    raise ValueError("Unknown insertion order '" + str(order) + "', expected hilbert, morton or given")


#########################################
# Incremental Bowyer-Watson construction
#########################################


class _Triangulator:
    """Bowyer-Watson insertion over a triangulation closed by ghost triangles (x, y, INFINITE_VERTEX).

    A ghost (x, y, INFINITE_VERTEX) sits on hull edge y -> x, the outside being to the left of x -> y.
    A new point conflicts with a real triangle only when it is strictly inside the circumcircle, so co-circular
    ties keep the triangles that were there first and the result depends only on the insertion order.
    """

    def __init__(self, coords):
        self.coords = coords
        self.verts = []
        self.nbrs = []
        self.alive = []
        self.last = 0

    def _new_triangle(self, a, b, c):
        self.verts.append([a, b, c])
        self.nbrs.append([None, None, None])
        self.alive.append(True)
        return len(self.verts) - 1

    def _link(self, tids):
        edges = {}
        for t in tids:
            v = self.verts[t]
            for i in range(3):
                edges[(v[(i + 1) % 3], v[(i + 2) % 3])] = (t, i)
        for (a, b), (t, i) in edges.items():
            twin = edges.get((b, a))
            if twin is not None:
                self.nbrs[t][i] = twin[0]

    def start(self, a, b, c):
        if orient2d(self.coords[a], self.coords[b], self.coords[c]) < 0:
            b, c = c, b
        first = self._new_triangle(a, b, c)
        ghosts = [self._new_triangle(b, a, INFINITE_VERTEX),
                  self._new_triangle(c, b, INFINITE_VERTEX),
                  self._new_triangle(a, c, INFINITE_VERTEX)]
        self._link([first] + ghosts)
        self.last = first

    def _conflicts(self, t, p):
        a, b, c = self.verts[t]
        if c == INFINITE_VERTEX:
            pa, pb = self.coords[a], self.coords[b]
            side = orient2d(pa, pb, p)
            if side != 0:
                return side > 0
            # on the hull line: conflict only strictly between the edge ends
            return (p[0] - pa[0]) * (p[0] - pb[0]) + (p[1] - pa[1]) * (p[1] - pb[1]) < 0
        # strict: a point on the circumcircle is no conflict, so co-circular ties keep the existing triangles
        return _incircle_unchecked(self.coords[a], self.coords[b], self.coords[c], p) > 0

    def _walk(self, p):
        t = self.last
        previous = None
        for _ in range(len(self.verts) + 1):
            v = self.verts[t]
            if v[2] == INFINITE_VERTEX:
                return t
            for i in range(3):
                nb = self.nbrs[t][i]
                if nb == previous:
                    continue
                if orient2d(self.coords[v[(i + 1) % 3]], self.coords[v[(i + 2) % 3]], p) < 0:
                    previous, t = t, nb
                    break
            else:
                return t

        raise WalkError("Point location did not terminate for " + str(p))

    def insert(self, pid):
        p = self.coords[pid]
        seed = self._walk(p)

        cavity = {seed}
        stack = [seed]
        boundary = []
        while stack:
            t = stack.pop()
            v = self.verts[t]
            for i in range(3):
                nb = self.nbrs[t][i]
                if nb in cavity:
                    continue
                if self._conflicts(nb, p):
                    cavity.add(nb)
                    stack.append(nb)
                else:
                    boundary.append((v[(i + 1) % 3], v[(i + 2) % 3], nb))

        for t in cavity:
            self.alive[t] = False

        created = []
        for a, b, outside in boundary:
            if a == INFINITE_VERTEX:
                tri = (b, pid, INFINITE_VERTEX)
            elif b == INFINITE_VERTEX:
                tri = (pid, a, INFINITE_VERTEX)
            else:
                tri = (a, b, pid)
            t = self._new_triangle(*tri)
            created.append(t)
            # the edge of the new triangle that does not touch pid faces the outside triangle
            opposite = [j for j in range(3) if tri[j] not in (a, b)][0]
            self.nbrs[t][opposite] = outside
            ov = self.verts[outside]
            j = [m for m in range(3) if ov[m] not in (a, b)][0]
            self.nbrs[outside][j] = t

        edges = {}
        for t in created:
            v = self.verts[t]
            for i in range(3):
                if self.nbrs[t][i] is None:
                    edges[(v[(i + 1) % 3], v[(i + 2) % 3])] = (t, i)
        for (a, b), (t, i) in edges.items():
            self.nbrs[t][i] = edges[(b, a)][0]

        for t in created:
            if self.verts[t][2] != INFINITE_VERTEX:
                self.last = t
                break

    def to_mesh(self, points):
        real = [t for t, ok in enumerate(self.alive) if ok and self.verts[t][2] != INFINITE_VERTEX]
        index = {t: n for n, t in enumerate(real)}
        triangles = np.array([self.verts[t] for t in real], dtype=np.int64)
        neighbors = np.array([[index.get(nb, BOUNDARY) for nb in self.nbrs[t]] for t in real], dtype=np.int64)
        return _assemble(points, triangles, neighbors)


def _assemble(points, triangles, neighbors):
    vertex_triangle = np.full(points.shape[0], BOUNDARY, dtype=np.int64)
    vertex_triangle[triangles.ravel()] = np.repeat(np.arange(triangles.shape[0]), 3)
    return Mesh(points=points, triangles=triangles, neighbors=neighbors, vertex_triangle=vertex_triangle)


def _check_points(points):
    points = np.ascontiguousarray(points, dtype=float).reshape(-1, 2)
    if points.shape[0] < 3:
        raise UnbuildableError("At least 3 points are needed for a triangulation, got " + str(points.shape[0]))
    if not np.all(np.isfinite(points)):
        raise UnbuildableError("Point coordinates must be finite")
    if np.unique(points, axis=0).shape[0] != points.shape[0]:
        raise UnbuildableError("Point set contains repeated points")
    return points


def _build_incremental(points, order):
    coords = [tuple(p) for p in points.tolist()]
    sequence = [int(i) for i in insertion_order(points, order)]

    a, b = sequence[0], sequence[1]
    third = None
    for pos in range(2, len(sequence)):
        if orient2d(coords[a], coords[b], coords[sequence[pos]]) != 0:
            third = pos
            break
    if third is None:
        raise UnbuildableError("All points are collinear")

    triangulator = _Triangulator(coords)
    triangulator.start(a, b, sequence[third])
    for pid in sequence[2:third] + sequence[third + 1:]:
        triangulator.insert(pid)

    return triangulator.to_mesh(points)


def _build_qhull(points):
    qhull = QhullDelaunay(points)
    if len(qhull.coplanar):
        raise UnbuildableError("Qhull dropped " + str(len(qhull.coplanar)) + " points as coplanar")

    triangles = qhull.simplices.astype(np.int64)
    neighbors = qhull.neighbors.astype(np.int64)
    clockwise = orient2d_array(points[triangles[:, 0]], points[triangles[:, 1]], points[triangles[:, 2]]) < 0
    triangles[clockwise] = triangles[clockwise][:, [0, 2, 1]]
    neighbors[clockwise] = neighbors[clockwise][:, [0, 2, 1]]

    return _assemble(points, triangles, neighbors)


def build(points, order="hilbert", engine="incremental"):
    """Delaunay triangulation of a planar point set.

    The incremental engine inserts the points one at a time along a space-filling curve, locating each new point
    by walking from the previous insertion and re-triangulating its conflict cavity. The qhull engine hands the
    same job to scipy and normalises the result to the same storage conventions.

    :param points: coordinates, shape (N, 2)
    :type points: ndarray or list
    :param order: insertion order for the incremental engine ("hilbert", "morton" or "given")
    :type order: str
    :param engine: "incremental" or "qhull"
    :type engine: str

    :returns: mesh, with vertex ids equal to the row indices of points
    :rtype: Mesh
    """

    points = _check_points(points)

    if engine == "incremental":
        mesh = _build_incremental(points, order)
    elif engine == "qhull":
        mesh = _build_qhull(points)
    else:
        raise ValueError("Unknown Delaunay engine '" + str(engine) + "', expected incremental or qhull")

    logger.debug("Built mesh with %d vertices and %d triangles (%s)", mesh.n_vertices, mesh.n_triangles, engine)

    return mesh


#########################################
# Queries
#########################################


def _jump(mesh, p):
    # nearest of a strided sample of vertices
    stride = max(1, int(round(mesh.n_vertices ** (2.0 / 3.0))))
    sample = mesh.points[::stride]
    nearest = int(np.argmin(np.sum((sample - np.asarray(p, dtype=float)) ** 2, axis=1))) * stride
    return int(mesh.vertex_triangle[nearest])


def locate(mesh, p, hint=None):
    """Triangle whose closed region contains p, found by a visibility walk.

    :param mesh: the triangulation
    :type mesh: Mesh
    :param p: query point
    :type p: Point or tuple
    :param hint: triangle to start from; by default the walk starts near the closest of a sample of vertices
    :type hint: int

    :returns: triangle id, or OUTSIDE if p is outside the convex hull. When p lies on an edge or a vertex the
        lowest id among the triangles containing it is returned
    :rtype: int
    """

    p = (float(p[0]), float(p[1]))
    coords, tris, nbrs = mesh.coords, mesh.tri_list, mesh.nbr_list
    t = _jump(mesh, p) if hint is None else int(hint)
    previous = None

    for _ in range(mesh.n_triangles + 1):
        v = tris[t]
        for i in range(3):
            nb = nbrs[t][i]
            if nb == previous and nb != BOUNDARY:
                continue
            side = orient2d(coords[v[(i + 1) % 3]], coords[v[(i + 2) % 3]], p)
            if side < 0:
                if nb == BOUNDARY:
                    return OUTSIDE
                previous, t = t, nb
                break
        else:
            break
    else:
        raise WalkError("Point location did not terminate for " + str(p))

    # the edge we came through was skipped above; recheck it for the tie-break
    signs = [orient2d(coords[v[(i + 1) % 3]], coords[v[(i + 2) % 3]], p) for i in range(3)]
    zeros = [i for i in range(3) if signs[i] == 0]
    if not zeros:
        return t
    if len(zeros) >= 2:
        vertex = v[3 - zeros[0] - zeros[1]]
        return min(mesh.incident_triangles(vertex))
    nb = nbrs[t][zeros[0]]
    return t if nb == BOUNDARY else min(t, nb)


def triangle_contains(mesh, t, p):
    """Closed containment test of p in triangle t."""

    a, b, c = (mesh.coords[i] for i in mesh.tri_list[t])
    return orient2d(a, b, p) >= 0 and orient2d(b, c, p) >= 0 and orient2d(c, a, p) >= 0


def verify_delaunay(mesh, chunk_size=2000000):
    """Brute-force check that no vertex lies strictly inside any triangle's circumcircle.

    Cost is proportional to triangles times vertices; meant for meshes up to about 10^4 vertices.

    :param mesh: the triangulation to check
    :type mesh: Mesh

    :returns: True if the mesh is Delaunay
    :rtype: bool
    """

    pts = mesh.points
    a, b, c = pts[mesh.triangles[:, 0]], pts[mesh.triangles[:, 1]], pts[mesh.triangles[:, 2]]
    if np.any(orient2d_array(a, b, c) <= 0):
        return False

    rows = max(1, chunk_size // max(1, mesh.n_vertices))
    for lo in range(0, mesh.n_triangles, rows):
        hi = lo + rows
        inside = incircle_array(a[lo:hi, None, :], b[lo:hi, None, :], c[lo:hi, None, :], pts[None, :, :])
        if np.any(inside > 0):
            return False

    return True


def neighbors_from_triangles(triangles):
    """Adjacency table of a counterclockwise triangle list."""

    triangles = np.asarray(triangles, dtype=np.int64)
    edges = {}
    for t, v in enumerate(triangles.tolist()):
        for i in range(3):
            edges[(v[(i + 1) % 3], v[(i + 2) % 3])] = (t, i)
    neighbors = np.full(triangles.shape, BOUNDARY, dtype=np.int64)
    for (a, b), (t, i) in edges.items():
        twin = edges.get((b, a))
        if twin is not None:
            neighbors[t, i] = twin[0]
    return neighbors


def flip_edge(mesh, t, i):
    """Mesh with the edge opposite vertex i of triangle t flipped. Used to build non-Delaunay meshes for tests.

    :returns: a new mesh
    :rtype: Mesh
    """

    u = int(mesh.neighbors[t, i])
    if u == BOUNDARY:
        raise ValueError("Cannot flip a hull edge")

    a, b, c = (int(x) for x in mesh.triangles[t][[i, (i + 1) % 3, (i + 2) % 3]])
    d = [int(x) for x in mesh.triangles[u] if x not in (b, c)][0]
    triangles = mesh.triangles.copy()
    triangles[t] = (a, b, d)
    triangles[u] = (a, d, c)

    return _assemble(mesh.points, triangles, neighbors_from_triangles(triangles))


def euler_triangle_count(n_vertices, n_hull):
    """Number of triangles of any triangulation with the given vertex and hull-vertex counts."""

    return 2 * n_vertices - 2 - n_hull


def circumcenters(mesh, tids=None):
    """Circumcenters and circumradii of the given triangles (all by default), vectorised.

    :returns: centers of shape (T, 2), radii of shape (T,)
    :rtype: ndarray, ndarray
    """

    triangles = mesh.triangles if tids is None else mesh.triangles[np.asarray(tids, dtype=np.int64)]
    pts = mesh.points
    a = pts[triangles[:, 0]]
    b = pts[triangles[:, 1]] - a
    c = pts[triangles[:, 2]] - a
    d = 2.0 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    b_norm = np.sum(b ** 2, axis=1)
    c_norm = np.sum(c ** 2, axis=1)
    ux = (c[:, 1] * b_norm - b[:, 1] * c_norm) / d
    uy = (b[:, 0] * c_norm - c[:, 0] * b_norm) / d

    return a + np.column_stack([ux, uy]), np.hypot(ux, uy)
