#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Created on 18-10-2026
# @author: pdstretch developers

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .delaunay import BOUNDARY
from .geom import edge_angle_and_hproj, orient2d

logger = logging.getLogger(__name__)

DELAUNAY_STRETCH_BOUND = 1.998


class PathConstructionError(RuntimeError):
    """Raised when a path construction cannot proceed (walk leaving the hull, vertex on the line (s,t), no progress)."""


@dataclass
class PathResult:
    """An s-t path through mesh vertices.

    :param vertices: vertex ids from s to t
    :param edges: consecutive vertex pairs; an edge may appear more than once
    :param length: Euclidean length, counting repeated edges every time
    :param size: number of edges, counting repeated edges every time
    """

    vertices: list
    edges: list
    length: float
    size: int

    @classmethod
    def from_vertices(cls, mesh, vertices):
        vertices = [int(v) for v in vertices]
        pts = mesh.points[vertices]
        length = float(np.sum(np.hypot(*np.diff(pts, axis=0).T)))
        edges = list(zip(vertices[:-1], vertices[1:]))
        return cls(vertices=vertices, edges=edges, length=length, size=len(edges))

    def polyline(self, mesh):
        return mesh.points[self.vertices]


@dataclass
class WalkResult:
    """Triangles whose interior meets the segment [s,t], from s to t.

    :param triangles: corridor triangle ids, consecutive ones sharing an edge
    :param crossed: the shared edges as (vertex above the line, vertex below the line)
    :param crossed_edges: number of shared edges, one less than the number of triangles
    """

    triangles: list
    crossed: list = field(default_factory=list)
    crossed_edges: int = 0


def _side(inst, v):
    return orient2d(inst.s, inst.t, inst.mesh.coords[v])


def _first_triangle(inst):
    mesh = inst.mesh
    s_id, t_id = inst.s_id, inst.t_id
    for tri in mesh.incident_triangles(s_id):
        v = mesh.tri_list[tri]
        i = v.index(s_id)
        p, q = v[(i + 1) % 3], v[(i + 2) % 3]
        if t_id in (p, q):
            return None, None, None
        if _side(inst, p) < 0 and _side(inst, q) > 0:
            return tri, q, p

    raise PathConstructionError("No triangle at s contains the direction towards t; is a vertex on the segment?")


def straight_walk(inst):
    """Straight walk from s to t: the triangles whose interior meets [s,t], in order.

    Each step leaves the current triangle through the edge whose endpoints lie on opposite sides of the line (s,t),
    deciding sides with exact orientation tests.

    :param inst: the instance
    :type inst: Instance

    :returns: the corridor; empty when [s,t] is itself a Delaunay edge
    :rtype: WalkResult
    """

    mesh = inst.mesh
    tris, nbrs = mesh.tri_list, mesh.nbr_list
    current, above, below = _first_triangle(inst)
    if current is None:
        return WalkResult(triangles=[], crossed=[], crossed_edges=0)

    triangles = [current]
    crossed = [(above, below)]
    for _ in range(mesh.n_triangles):
        v = tris[current]
        j = [m for m in range(3) if v[m] not in (above, below)][0]
        following = nbrs[current][j]
        if following == BOUNDARY:
            raise PathConstructionError("Straight walk left the convex hull after " + str(len(triangles)) + " triangles")

        w = [u for u in tris[following] if u not in (above, below)][0]
        triangles.append(following)
        if w == inst.t_id:
            return WalkResult(triangles=triangles, crossed=crossed, crossed_edges=len(crossed))

        side = _side(inst, w)
        if side > 0:
            above = w
        elif side < 0:
            below = w
        else:
            raise PathConstructionError("Vertex " + str(w) + " lies on the line through s and t")
        crossed.append((above, below))
        current = following

    raise PathConstructionError("Straight walk did not reach t")


def upper_path(inst, walk=None):
    """Path along the upper boundary of the straight-walk corridor.

    The upper endpoints of the crossed edges, in walk order and with consecutive repeats merged, give the path.
    A vertex that is left and later re-entered is visited twice; an excursion a, b, a traverses the edge (a, b) both
    ways, and length and size count it twice.

    :param inst: the instance
    :type inst: Instance
    :param walk: precomputed straight walk
    :type walk: WalkResult

    :rtype: PathResult
    """

    if walk is None:
        walk = straight_walk(inst)

    sequence = [inst.s_id] + [above for above, _ in walk.crossed] + [inst.t_id]
    vertices = [sequence[0]]
    for v in sequence[1:]:
        if v != vertices[-1]:
            vertices.append(v)

    return PathResult.from_vertices(inst.mesh, vertices)


def greedy_path(inst, walk=None):
    """Greedy path through the corridor.

    From the current vertex w, take the last corridor triangle containing w and follow its edge at w making the
    smallest angle with the x-axis (smaller endpoint id on ties). Going straight back to the previous vertex is
    not allowed; this can only happen in the triangle containing t.

    :param inst: the instance
    :type inst: Instance
    :param walk: precomputed straight walk
    :type walk: WalkResult

    :rtype: PathResult
    """

    if walk is None:
        walk = straight_walk(inst)
    if not walk.triangles:
        return PathResult.from_vertices(inst.mesh, [inst.s_id, inst.t_id])

    mesh = inst.mesh
    last_index = {}
    for i, tri in enumerate(walk.triangles):
        for v in mesh.tri_list[tri]:
            last_index[v] = i

    w, previous = inst.s_id, None
    vertices = [w]
    visited = set()
    while w != inst.t_id:
        i = last_index[w]
        if (w, i) in visited:
            raise PathConstructionError("Greedy path revisits vertex " + str(w) + " in corridor triangle " + str(i))
        visited.add((w, i))

        candidates = [u for u in mesh.tri_list[walk.triangles[i]] if u != w and u != previous]
        following = min(candidates, key=lambda u: (edge_angle_and_hproj((mesh.coords[w], mesh.coords[u]))[0], u))
        previous, w = w, following
        vertices.append(w)

    return PathResult.from_vertices(mesh, vertices)


def ellipse_mask(inst, stretch=DELAUNAY_STRETCH_BOUND):
    """Vertices p with |p-s| + |p-t| <= stretch * k; every vertex of a path shorter than stretch * k is inside."""

    pts = inst.mesh.points
    reach = np.hypot(*(pts - pts[inst.s_id]).T) + np.hypot(*(pts - pts[inst.t_id]).T)
    return reach <= stretch * inst.k * (1.0 + 1e-12)


def shortest_path(inst, prune=False):
    """Euclidean shortest s-t path in the Delaunay graph, by Dijkstra over the whole mesh.

    :param inst: the instance
    :type inst: Instance
    :param prune: restrict the graph to the ellipse of :py:func:`ellipse_mask`, which cannot change the result
    :type prune: bool

    :rtype: PathResult
    """

    mesh = inst.mesh
    edges = mesh.edges()
    if prune:
        keep = ellipse_mask(inst)
        edges = edges[keep[edges[:, 0]] & keep[edges[:, 1]]]

    weights = np.hypot(*(mesh.points[edges[:, 0]] - mesh.points[edges[:, 1]]).T)
    graph = coo_matrix((weights, (edges[:, 0], edges[:, 1])), shape=(mesh.n_vertices, mesh.n_vertices)).tocsr()
    distances, predecessors = dijkstra(graph, directed=False, indices=inst.s_id, return_predecessors=True)

    if not np.isfinite(distances[inst.t_id]):
        raise PathConstructionError("t is not reachable from s")

    vertices = [inst.t_id]
    while vertices[-1] != inst.s_id:
        vertices.append(int(predecessors[vertices[-1]]))
    vertices.reverse()

    return PathResult.from_vertices(mesh, vertices)


def corridor_by_scan(inst):
    """Triangles whose interior meets the open segment (s,t), found by testing every triangle."""

    mesh = inst.mesh
    s, t = inst.s, inst.t
    hits = []
    for tri, v in enumerate(mesh.tri_list):
        a, b, c = (mesh.coords[u] for u in v)
        sides = [orient2d(s, t, p) for p in (a, b, c)]
        if not (max(sides) > 0 and min(sides) < 0):
            continue
        # the line crosses the interior; check the crossing overlaps (s,t)
        xs = []
        for p, q in ((a, b), (b, c), (c, a)):
            sp, sq = orient2d(s, t, p), orient2d(s, t, q)
            if sp * sq < 0:
                xs.append(p[0] + (q[0] - p[0]) * (s[1] - p[1]) / (q[1] - p[1]))
            elif sp == 0:
                xs.append(p[0])
        if min(xs) < t[0] and max(xs) > s[0]:
            hits.append(tri)

    return sorted(hits)


PATH_BUILDERS = {
    "UP": upper_path,
    "GP": greedy_path,
    "SP": shortest_path,
}
