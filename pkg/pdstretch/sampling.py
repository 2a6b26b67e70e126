#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Created on 18-10-2026
# @author: pdstretch developers

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .delaunay import Mesh, UnbuildableError, build

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 8
# path vertices must stay this fraction of the margin away from the window edge
CLEARANCE_FRACTION = 0.5
# half-height of the window relative to k; contains the ellipse |p-s| + |p-t| <= 1.998 k
HEIGHT_FACTOR = 0.87


class SamplingError(ValueError):
    """Raised when no usable sample could be drawn."""


class TruncationError(SamplingError):
    """Raised when a path vertex comes too close to the edge of the sampling window."""


@dataclass(frozen=True)
class Window:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError("Window needs xmax > xmin and ymax > ymin, got " + str(self))

    @property
    def area(self):
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)

    def contains_box(self, box):
        xmin, xmax, ymin, ymax = box
        return self.xmin <= xmin and xmax <= self.xmax and self.ymin <= ymin and ymax <= self.ymax

    def distance_to_boundary(self, points):
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        return np.minimum.reduce([points[:, 0] - self.xmin, self.xmax - points[:, 0],
                                  points[:, 1] - self.ymin, self.ymax - points[:, 1]])


@dataclass
class Instance:
    """A Delaunay triangulation of a Poisson sample, with the two marked vertices s=(0,0) and t=(k,0).

    Samples that are not tied to a pair s, t (local samples for pixel events or for the typical cell at the origin)
    leave s_id and t_id unset.
    """

    mesh: Mesh
    s_id: Optional[int]
    t_id: Optional[int]
    intensity: float
    k: float
    seed: int
    window: Window

    @property
    def s(self):
        return self.mesh.coords[self.s_id]

    @property
    def t(self):
        return self.mesh.coords[self.t_id]


def default_margin(intensity):
    """Margin delta with exp(-n pi delta^2) = 10^-12.

    .. math:: \\delta = \\sqrt{12 \\ln 10 / (\\pi n)}

    :param intensity: intensity n of the point process
    :type intensity: float

    :rtype: float
    """

    return math.sqrt(12.0 * math.log(10.0) / (math.pi * intensity))


def derive_seed(master_seed, index):
    """Sub-seed of stream `index` under `master_seed`, mixed by numpy's SeedSequence hash.

    :rtype: int
    """

    return int(np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1, dtype=np.uint64)[0])


def sample_ppp(intensity, window, seed):
    """Homogeneous Poisson point process restricted to a window.

    :param intensity: expected number of points per unit area
    :type intensity: float
    :param window: sampling window
    :type window: Window
    :param seed: seed of the generator
    :type seed: int

    :returns: points, shape (N, 2) with N Poisson distributed of mean intensity * area
    :rtype: ndarray
    """

    if not intensity > 0:
        raise ValueError("Intensity must be positive, got " + str(intensity))

    rng = np.random.default_rng(seed)
    count = rng.poisson(intensity * window.area)
    xs = rng.uniform(window.xmin, window.xmax, count)
    ys = rng.uniform(window.ymin, window.ymax, count)

    return np.column_stack([xs, ys])


def instance_window(k, margin):
    half_height = HEIGHT_FACTOR * k + margin
    return Window(-margin, k + margin, -half_height, half_height)


def _draw(intensity, window, seed, marked, engine, order):
    """Sample, append the marked points and triangulate, resampling degenerate draws."""

    for attempt in range(MAX_ATTEMPTS):
        sub_seed = seed if attempt == 0 else derive_seed(seed, attempt)
        points = sample_ppp(intensity, window, sub_seed)
        if len(marked):
            points = np.vstack([points, np.asarray(marked, dtype=float)])
        try:
            mesh = build(points, order=order, engine=engine)
        except UnbuildableError as err:
            logger.warning("Degenerate sample for seed %d (%s), resampling", sub_seed, err)
            continue
        first_marked = points.shape[0] - len(marked)
        hull = set(mesh.hull_vertices().tolist())
        if any(first_marked + j in hull for j in range(len(marked))):
            logger.warning("Marked point on the hull for seed %d, resampling", sub_seed)
            continue
        return mesh, first_marked, sub_seed

    raise SamplingError("No usable sample after " + str(MAX_ATTEMPTS) + " attempts for seed " + str(seed))


def make_instance(intensity, k, seed, margin=None, engine="incremental", order="hilbert"):
    """The experiment instance: a Poisson sample of intensity n in [-d, k+d] x [-(0.87k+d), 0.87k+d] together with
    s=(0,0) and t=(k,0), triangulated.

    :param intensity: intensity n
    :type intensity: float
    :param k: distance between s and t
    :type k: float
    :param seed: seed for the sample
    :type seed: int
    :param margin: window margin d; defaults to :py:func:`default_margin`
    :type margin: float
    :param engine: Delaunay engine passed to :py:func:`delaunay.build`
    :type engine: str

    :rtype: Instance
    """

    if not k > 0:
        raise ValueError("Distance k must be positive, got " + str(k))
    if margin is None:
        margin = default_margin(intensity)

    window = instance_window(k, margin)
    mesh, first_marked, sub_seed = _draw(intensity, window, seed, [(0.0, 0.0), (float(k), 0.0)], engine, order)

    return Instance(mesh=mesh, s_id=first_marked, t_id=first_marked + 1, intensity=intensity, k=float(k),
                    seed=sub_seed, window=window)


def require_clearance(inst, vertex_ids, fraction=CLEARANCE_FRACTION):
    """Distance from the given vertices to the window edge, checked against a fraction of the margin.

    The margin is the gap between s and the left edge of the window.

    :param inst: the instance
    :type inst: Instance
    :param vertex_ids: mesh vertex ids, e.g. the vertices of the constructed paths
    :type vertex_ids: list
    :param fraction: required clearance as a fraction of the margin
    :type fraction: float

    :returns: the smallest distance to the window edge
    :rtype: float

    :raises TruncationError: when a vertex is closer than fraction * margin
    """

    margin = inst.s[0] - inst.window.xmin
    ids = np.unique(np.asarray(vertex_ids, dtype=int))
    clearance = float(np.min(inst.window.distance_to_boundary(inst.mesh.points[ids])))
    if clearance < fraction * margin:
        raise TruncationError("Path vertex within " + format(clearance, ".4g") + " of the window edge (margin "
                              + format(margin, ".4g") + ") for seed " + str(inst.seed))
    return clearance


def make_origin_instance(intensity, seed, insert_origin=False, margin=None, engine="qhull"):
    """Local sample in the square of half-width 2d around the origin, optionally with the origin as a vertex
    (its id is then stored in s_id).

    :rtype: Instance
    """

    if margin is None:
        margin = default_margin(intensity)
    window = Window(-2.0 * margin, 2.0 * margin, -2.0 * margin, 2.0 * margin)
    marked = [(0.0, 0.0)] if insert_origin else []
    mesh, first_marked, sub_seed = _draw(intensity, window, seed, marked, engine, "hilbert")

    return Instance(mesh=mesh, s_id=first_marked if insert_origin else None, t_id=None, intensity=intensity,
                    k=0.0, seed=sub_seed, window=window)


def make_field(intensity, window, seed, engine="qhull"):
    """Plain triangulated Poisson sample without marked points.

    :rtype: Instance
    """

    mesh, _, sub_seed = _draw(intensity, window, seed, [], engine, "hilbert")
    return Instance(mesh=mesh, s_id=None, t_id=None, intensity=intensity, k=0.0, seed=sub_seed, window=window)
