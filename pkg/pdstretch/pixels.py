#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Created on 18-10-2026
# @author: pdstretch developers

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .delaunay import circumcenters, locate, OUTSIDE
from .geom import edge_angle_and_hproj, point_in_box, segment_meets_box
from .sampling import Window, derive_seed, make_field

logger = logging.getLogger(__name__)

COLORS = {"green": (0, 0), "pink": (1, 0), "blue": (0, 1), "yellow": (1, 1)}
ANIMAL_FACTOR = 3.0 * math.sqrt(2.0) / 2.0


class WindowTooSmallError(ValueError):
    """Raised when a pixel neighbourhood C_2(v) is not inside the sampling window."""


#########################################
# In this section we define grids, colors and the squares attached to a pixel
#########################################


@dataclass(frozen=True)
class GridSpec:
    """Lattice scale * Z^2 + offset of a color, each vertex v owning the closed square C_scale(v).

    :param scale: lattice spacing, a positive integer
    :type scale: int
    :param color: one of green, pink, blue, yellow
    :type color: str
    """

    scale: int = 1
    color: str = "green"

    def __post_init__(self):
        if int(self.scale) != self.scale or self.scale < 1:
            raise ValueError("Grid scale must be a positive integer, got " + str(self.scale))
        if self.color not in COLORS:
            raise ValueError("Unknown color '" + str(self.color) + "', expected one of " + ", ".join(COLORS))

    @property
    def offset(self):
        return COLORS[self.color]

    @property
    def percolation_ready(self):
        return self.scale % 4 == 2

    def square(self, v):
        return scaled_square(v, self.scale)


@dataclass(frozen=True)
class PixelParams:
    """Parameters rho and kappa of the pixel events, with the derived epsilon and alpha.

    .. math::

        \\varepsilon_\\rho = \\sqrt{\\rho}\\sqrt{2+\\rho}, \\quad
        \\alpha_{\\rho,\\kappa} = \\sqrt{2\\frac{\\kappa}{\\kappa-1}\\rho}
    """

    rho: float
    kappa: float = 1.5

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive, got " + str(self.rho))
        if not self.kappa > 1:
            raise ValueError("kappa must be greater than 1, got " + str(self.kappa))
        if not self.kappa / (self.kappa - 1.0) * self.rho < math.pi ** 2 / 8.0:
            raise ValueError("kappa / (kappa - 1) * rho must stay below pi^2 / 8")

    @property
    def epsilon(self):
        return math.sqrt(self.rho) * math.sqrt(2.0 + self.rho)

    @property
    def alpha(self):
        return math.sqrt(2.0 * self.kappa / (self.kappa - 1.0) * self.rho)


def unit_square(v):
    return (v[0] - 0.5, v[0] + 0.5, v[1] - 0.5, v[1] + 0.5)


def eps_square(v, eps):
    return (v[0] - 0.5 - eps, v[0] + 0.5 + eps, v[1] - 0.5 - eps, v[1] + 0.5 + eps)


def scaled_square(v, scale):
    half = scale / 2.0
    return (v[0] - half, v[0] + half, v[1] - half, v[1] + half)


def interiors_overlap(box1, box2):
    return box1[0] < box2[1] and box2[0] < box1[1] and box1[2] < box2[3] and box2[2] < box1[3]


def box_inside(inner, outer):
    return outer[0] <= inner[0] and inner[1] <= outer[1] and outer[2] <= inner[2] and inner[3] <= outer[3]


def same_color_pixels(color, xrange, yrange):
    """Pixels of one color, i.e. 2Z^2 + offset, inside the given integer ranges."""

    ox, oy = COLORS[color]
    return [(x, y) for x in xrange for y in yrange if (x - ox) % 2 == 0 and (y - oy) % 2 == 0]


def scale_nesting_holds(v, w, scale):
    """For v and w of the same color and scale in 4Z+2: if C_2(v) and C_scale(w) overlap, C_2(v) is inside C_scale(w)."""

    small, big = scaled_square(v, 2), scaled_square(w, scale)
    return (not interiors_overlap(small, big)) or box_inside(small, big)


#########################################
# Lattice animals
#########################################


def _as_polyline(path, mesh=None):
    if hasattr(path, "vertices"):
        if mesh is None:
            raise ValueError("A mesh is needed to turn a vertex path into a polyline")
        return [tuple(p) for p in path.polyline(mesh).tolist()]
    polyline = [tuple(map(float, p)) for p in np.asarray(path, dtype=float).reshape(-1, 2).tolist()]
    if not polyline:
        raise ValueError("Polyline must contain at least one point")
    return polyline


def extract_animal(path, grid=GridSpec(), mesh=None):
    """Lattice vertices v of the grid whose closed square C_scale(v) meets the polyline.

    :param path: the polyline, either points of shape (m, 2) or a PathResult together with its mesh
    :type path: ndarray or PathResult
    :param grid: lattice scale and color
    :type grid: GridSpec

    :returns: the animal as a set of lattice coordinates
    :rtype: set
    """

    polyline = _as_polyline(path, mesh)
    scale = grid.scale
    ox, oy = grid.offset
    half = scale / 2.0
    segments = list(zip(polyline[:-1], polyline[1:])) or [(polyline[0], polyline[0])]

    animal = set()
    for a, b in segments:
        ilo = math.ceil((min(a[0], b[0]) - ox - half) / scale)
        ihi = math.floor((max(a[0], b[0]) - ox + half) / scale)
        jlo = math.ceil((min(a[1], b[1]) - oy - half) / scale)
        jhi = math.floor((max(a[1], b[1]) - oy + half) / scale)
        for i in range(ilo, ihi + 1):
            for j in range(jlo, jhi + 1):
                v = (scale * i + ox, scale * j + oy)
                if v not in animal and segment_meets_box(a, b, scaled_square(v, scale)):
                    animal.add(v)

    return animal


def polyline_length(polyline):
    pts = np.asarray(polyline, dtype=float).reshape(-1, 2)
    return float(np.sum(np.hypot(*np.diff(pts, axis=0).T)))


def check_animal_bound(path, mesh=None):
    """Compare the number of unit pixels met by a polyline with 3 sqrt(2) / 2 times its length plus one.

    :returns: size, bound, ok
    :rtype: int, float, bool
    """

    polyline = _as_polyline(path, mesh)
    size = len(extract_animal(polyline))
    bound = ANIMAL_FACTOR * polyline_length(polyline) + 1.0

    return size, bound, size <= bound + 1e-9


def is_four_connected(animal, step=None):
    """True iff the animal is connected through horizontal and vertical steps of its own lattice.

    :param animal: lattice vertices
    :type animal: set
    :param step: lattice spacing; inferred from the smallest coordinate gap when not given
    :type step: int
    """

    animal = set(animal)
    if not animal:
        return True
    if step is None:
        xs = sorted({v[0] for v in animal})
        ys = sorted({v[1] for v in animal})
        steps = [b - a for a, b in zip(xs, xs[1:])] + [b - a for a, b in zip(ys, ys[1:])]
        step = min(steps) if steps else 1

    start = next(iter(animal))
    seen = {start}
    stack = [start]
    while stack:
        x, y = stack.pop()
        for nb in ((x + step, y), (x - step, y), (x, y + step), (x, y - step)):
            if nb in animal and nb not in seen:
                seen.add(nb)
                stack.append(nb)

    return len(seen) == len(animal)


#########################################
# Pixel events on a triangulated instance
#########################################


def _require_window(inst, box):
    if not inst.window.contains_box(box):
        raise WindowTooSmallError("Square " + str(box) + " is not inside the sampling window " + str(inst.window))


def triangles_meeting_box(mesh, box):
    """Ids of the triangles whose closed region meets the closed box."""

    xmin, xmax, ymin, ymax = box
    bounds = mesh.tri_bounds
    candidates = np.nonzero((bounds[:, 0] <= xmax) & (bounds[:, 1] >= xmin)
                            & (bounds[:, 2] <= ymax) & (bounds[:, 3] >= ymin))[0]
    corners = mesh.points[mesh.triangles[candidates]]
    vertex_inside = np.any((corners[:, :, 0] >= xmin) & (corners[:, :, 0] <= xmax)
                           & (corners[:, :, 1] >= ymin) & (corners[:, :, 1] <= ymax), axis=1)

    hits = candidates[vertex_inside].tolist()
    centre = (0.5 * (xmin + xmax), 0.5 * (ymin + ymax))
    centre_tri = locate(mesh, centre)
    for t in candidates[~vertex_inside].tolist():
        a, b, c = (mesh.coords[u] for u in mesh.tri_list[t])
        if (t == centre_tri or segment_meets_box(a, b, box) or segment_meets_box(b, c, box)
                or segment_meets_box(c, a, box)):
            hits.append(t)

    # a box inside a single triangle: locate returns only one of the containing triangles on ties
    if centre_tri != OUTSIDE and centre_tri not in hits:
        hits.append(centre_tri)

    return sorted(hits)


def _edges_of(mesh, tids):
    edges = set()
    for t in tids:
        a, b, c = mesh.tri_list[t]
        edges.update({(min(a, b), max(a, b)), (min(b, c), max(b, c)), (min(c, a), max(c, a))})
    return sorted(edges)


def _far_from_marked(inst, v):
    for marked in (inst.s_id, inst.t_id):
        if marked is not None and math.dist(v, inst.mesh.coords[marked]) < 2.0:
            return False
    return True


def independence_event(inst, v, eps):
    """I_eps(v): every triangle meeting C^eps(v) has its circumdisk inside C_2(v), and v is at distance at
    least 2 from s and t.

    :param inst: the instance
    :type inst: Instance
    :param v: pixel
    :type v: tuple
    :param eps: enlargement of the unit square
    :type eps: float

    :rtype: bool
    """

    if not _far_from_marked(inst, v):
        return False

    outer = scaled_square(v, 2)
    _require_window(inst, outer)

    tids = triangles_meeting_box(inst.mesh, eps_square(v, eps))
    centers, radii = circumcenters(inst.mesh, tids)
    inside = ((np.abs(centers[:, 0] - v[0]) + radii <= 1.0) & (np.abs(centers[:, 1] - v[1]) + radii <= 1.0))

    return bool(np.all(inside))


class HorizontalWitness(NamedTuple):
    length: float
    points: list


def _clip_point(a, b, x):
    if a[0] == x:
        return a
    if b[0] == x:
        return b
    return (x, a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0]))


def find_horizontal_witness(inst, v, rho):
    """Shortest clipped Delaunay path crossing the column of v and touching C(v), if it is no longer than 1 + rho.

    Nodes are the mesh vertices strictly inside the column plus one entry (exit) node per edge crossing its left
    (right) line, placed at the crossing point. Each node is doubled by a flag telling whether the path met C(v).

    :param inst: the instance
    :type inst: Instance
    :param v: pixel
    :type v: tuple
    :param rho: allowed excess length
    :type rho: float

    :returns: the witness, or None when no such path exists
    :rtype: HorizontalWitness
    """

    if rho < 0:
        raise ValueError("rho must be non-negative, got " + str(rho))
    _require_window(inst, scaled_square(v, 2))

    mesh = inst.mesh
    left, right = v[0] - 0.5, v[0] + 0.5
    cell = unit_square(v)
    limit = 1.0 + rho
    column = (left, right, v[1] - 1.0, v[1] + 1.0)

    position = {}
    arcs = []

    def add_arc(u, w, p, q, both_ways):
        touches = segment_meets_box(p, q, cell)
        weight = math.dist(p, q)
        arcs.append((u, w, weight, touches))
        if both_ways:
            arcs.append((w, u, weight, touches))

    starts = []
    for a, b in _edges_of(mesh, triangles_meeting_box(mesh, column)):
        pa, pb = mesh.coords[a], mesh.coords[b]
        if pa[0] > pb[0]:
            a, b, pa, pb = b, a, pb, pa
        if pb[0] <= left or pa[0] >= right:
            continue
        enters, exits = pa[0] <= left, pb[0] >= right
        head = ("in", a, b) if enters else a
        tail = ("out", a, b) if exits else b
        p = _clip_point(pa, pb, left) if enters else pa
        q = _clip_point(pa, pb, right) if exits else pb
        position[head], position[tail] = p, q
        if enters:
            starts.append(head)
        add_arc(head, tail, p, q, both_ways=not (enters or exits))

    if not starts:
        return None

    # state 2 * i + flag: node i, flag set once the path has met C(v)
    nodes = list(position)
    index = {node: i for i, node in enumerate(nodes)}
    inside = np.array([point_in_box(position[node], cell) for node in nodes])
    rows, cols, weights = [], [], []
    for u, w, weight, touches in arcs:
        i, j = index[u], index[w]
        rows += [2 * i, 2 * i + 1]
        cols += [2 * j + int(touches or inside[j]), 2 * j + 1]
        weights += [weight, weight]

    size = 2 * len(nodes)
    graph = coo_matrix((weights, (rows, cols)), shape=(size, size)).tocsr()
    sources = [2 * index[node] + int(inside[index[node]]) for node in starts]
    distances, predecessors, _ = dijkstra(graph, directed=True, indices=sources, return_predecessors=True,
                                          limit=limit, min_only=True)

    exits = [2 * index[node] + 1 for node in nodes if isinstance(node, tuple) and node[0] == "out"]
    if not exits:
        return None
    best = min(exits, key=lambda state: distances[state])
    if not distances[best] <= limit:
        return None

    points = [position[nodes[best // 2]]]
    state = best
    while predecessors[state] >= 0:
        state = predecessors[state]
        points.append(position[nodes[state // 2]])

    return HorizontalWitness(length=float(distances[best]), points=points[::-1])


def strong_horizontality(inst, v, rho):
    """H_rho(v): some Delaunay path crossing the column of v and meeting C(v) has clipped length at most 1 + rho.

    :rtype: bool
    """

    return find_horizontal_witness(inst, v, rho) is not None


def weak_horizontality_length(inst, v, eps, alpha):
    """Sum of the horizontal projections of the Delaunay edges meeting C^eps(v) whose angle with the x-axis is at
    most alpha.

    :rtype: float
    """

    _require_window(inst, scaled_square(v, 2))
    mesh = inst.mesh
    box = eps_square(v, eps)

    total = 0.0
    for a, b in _edges_of(mesh, triangles_meeting_box(mesh, box)):
        pa, pb = mesh.coords[a], mesh.coords[b]
        if not segment_meets_box(pa, pb, box):
            continue
        angle, hproj = edge_angle_and_hproj((pa, pb))
        if angle <= alpha:
            total += hproj

    return total


def weak_horizontality(inst, v, params):
    return weak_horizontality_length(inst, v, params.epsilon, params.alpha) >= 1.0 / params.kappa


def strong_implies_weak_check(inst, v, params):
    """Check on a pixel with H_rho(v) that the witness stays in C^eps_rho(v) and that H'(v) holds.

    :param params: rho and kappa
    :type params: PixelParams

    :rtype: bool
    """

    witness = find_horizontal_witness(inst, v, params.rho)
    if witness is None:
        raise ValueError("Pixel " + str(v) + " has no horizontal witness at rho=" + str(params.rho))

    xmin, xmax, ymin, ymax = eps_square(v, params.epsilon)
    tol = 1e-12
    contained = all(xmin - tol <= p[0] <= xmax + tol and ymin - tol <= p[1] <= ymax + tol for p in witness.points)

    return contained and weak_horizontality(inst, v, params)


class PixelClass(NamedTuple):
    independent: bool
    horizontal: bool

    @property
    def event(self):
        return self.horizontal or not self.independent


def classify_pixel(inst, v, params):
    """Evaluate I_eps_rho(v) and, only when it holds, H_rho(v)."""

    independent = independence_event(inst, v, params.epsilon)
    horizontal = independent and strong_horizontality(inst, v, params.rho)
    return PixelClass(independent=independent, horizontal=horizontal)


class LengthCheck(NamedTuple):
    lhs: float
    rhs: float
    ok: bool
    counts: dict
    horizontal: tuple = ()


def length_animal_check(inst, rho, path, kappa=1.5):
    """Check l(P) >= k + rho (k - 4 max_c #H(A_(c)(P))) where #H counts the pixels of the color animal at scale 2
    on which H_rho(v) holds or I_eps_rho(v) fails.

    :param inst: the instance, with integer k
    :type inst: Instance
    :param rho: rho >= 0
    :type rho: float
    :param path: an s-t path
    :type path: PathResult

    :rtype: LengthCheck
    """

    lhs = path.length
    k = inst.k
    if rho == 0:
        return LengthCheck(lhs=lhs, rhs=k, ok=lhs >= k, counts={})

    params = PixelParams(rho, kappa)
    polyline = _as_polyline(path, inst.mesh)
    counts = {}
    horizontal = []
    for color in COLORS:
        animal = extract_animal(polyline, GridSpec(2, color))
        counts[color] = 0
        for v in sorted(animal):
            result = classify_pixel(inst, v, params)
            counts[color] += result.event
            if result.horizontal:
                horizontal.append(v)

    rhs = k + rho * (k - 4 * max(counts.values()))

    return LengthCheck(lhs=lhs, rhs=rhs, ok=lhs >= rhs, counts=counts, horizontal=tuple(horizontal))


def estimate_pixel_events(intensity, params, trials, seed, block=5):
    """Monte Carlo frequencies of the pixel events on local samples.

    Each trial triangulates a Poisson sample on a block x block array of green pixels at distance 2 from each
    other (their C_2 squares tile the window) and classifies every pixel.

    :param intensity: intensity n
    :type intensity: float
    :param params: rho and kappa
    :type params: PixelParams
    :param trials: number of samples
    :type trials: int
    :param seed: master seed
    :type seed: int

    :returns: pixel count and the fractions of pixels with not I, with H or not I, and with H'
    :rtype: dict
    """

    side = 2.0 * block
    window = Window(-1.0, side - 1.0, -1.0, side - 1.0)
    pixels = same_color_pixels("green", range(0, 2 * block, 2), range(0, 2 * block, 2))

    not_independent = events = weak = 0
    for trial in range(trials):
        inst = make_field(intensity, window, derive_seed(seed, trial))
        for v in pixels:
            result = classify_pixel(inst, v, params)
            not_independent += not result.independent
            events += result.event
            if result.independent:
                weak += weak_horizontality(inst, v, params)

    count = trials * len(pixels)
    p_event = events / count
    logger.info("Classified %d pixels at n=%s, rho=%s", count, intensity, params.rho)

    return {"pixels": count,
            "p_not_independent": not_independent / count,
            "p_event": p_event,
            "se_event": math.sqrt(p_event * (1.0 - p_event) / count),
            "p_weak": weak / count}
