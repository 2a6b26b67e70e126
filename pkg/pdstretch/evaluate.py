#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Created on 18-10-2026
# @author: pdstretch developers

import logging
import math

import numpy as np

from .bounds import animal_size_bound, animal_tail_threshold
from .delaunay import UnbuildableError
from .geom import incircle_array
from .paths import DELAUNAY_STRETCH_BOUND, PathConstructionError, greedy_path, shortest_path, straight_walk, upper_path
from .pixels import (COLORS, GridSpec, PixelParams, WindowTooSmallError, check_animal_bound, extract_animal,
                     is_four_connected, length_animal_check, strong_implies_weak_check)
from .sampling import (MAX_ATTEMPTS, SamplingError, TruncationError, derive_seed, make_instance, make_origin_instance,
                       require_clearance)

logger = logging.getLogger(__name__)

PATH_NAMES = ("SW", "UP", "GP", "SP")
CHECK_NAMES = ("animal_bound_SP", "animal_bound_UP", "animal_bound_GP", "animal_size_SP", "length_animal_SP",
               "animal_connected_SP", "strong_implies_weak", "path_order", "delaunay_stretch_bound", "sp_at_least_k")
# scales and colors on which the shortest-path animal size is checked
ANIMAL_SCALES = ((1, ("green",)), (2, tuple(COLORS)), (6, tuple(COLORS)))
RELATIVE_SLACK = 1e-12

_INSTANCE_ERRORS = (SamplingError, UnbuildableError, PathConstructionError, WindowTooSmallError)


class TrialError(RuntimeError):
    """A trial that could not be completed; carries the trial index and its sub-seed."""

    def __init__(self, index, seed, reason):
        super().__init__(index, seed, reason)
        self.index = index
        self.seed = seed
        self.reason = reason

    def __str__(self):
        return "Trial " + str(self.index) + " failed with sub-seed " + str(self.seed) + ": " + str(self.reason)


def _fail(index, seed, err):
    logger.error("Trial %d failed with sub-seed %d: %s", index, seed, err)
    raise TrialError(index, seed, str(err)) from err


def evaluate_instance(inst, paths=PATH_NAMES, prune=False):
    """Length and size of the requested paths on one instance.

    The straight walk has no length; its size is the number of Delaunay edges it crosses. The size of the other
    paths is their number of edges, repeated edges included.

    :param inst: the instance
    :type inst: Instance
    :param paths: subset of SW, UP, GP, SP
    :type paths: tuple
    :param prune: restrict the shortest path search to the ellipse |p-s| + |p-t| <= 1.998 k
    :type prune: bool

    :returns: one dict per path with keys path, length, size
    :rtype: list
    """

    walk = straight_walk(inst) if set(paths) & {"SW", "UP", "GP"} else None
    rows = []
    visited = [inst.s_id, inst.t_id]
    for name in paths:
        if name == "SW":
            rows.append({"path": "SW", "length": math.nan, "size": walk.crossed_edges})
            continue
        if name == "UP":
            result = upper_path(inst, walk)
        elif name == "GP":
            result = greedy_path(inst, walk)
        elif name == "SP":
            result = shortest_path(inst, prune=prune)
        else:
            raise ValueError("Unknown path '" + str(name) + "', expected one of " + ", ".join(PATH_NAMES))
        visited += result.vertices
        rows.append({"path": name, "length": result.length, "size": result.size})

    require_clearance(inst, visited)
    return rows


#########################################
# Trial workers; module level so that a process pool can pickle them
#########################################


def _clear_instance(intensity, k, seed, margin, engine, evaluate):
    """Draw instances until the paths built by `evaluate` stay clear of the window edge."""

    for attempt in range(MAX_ATTEMPTS):
        inst = make_instance(intensity, k, seed if attempt == 0 else derive_seed(seed, MAX_ATTEMPTS + attempt),
                             margin=margin, engine=engine)
        try:
            return inst, evaluate(inst)
        except TruncationError as err:
            logger.warning("%s, resampling", err)

    raise SamplingError("No instance clear of the window edge after " + str(MAX_ATTEMPTS) + " attempts for seed "
                        + str(seed))


def path_trial(index, intensity, k, master_seed, paths=PATH_NAMES, margin=None, engine="qhull", prune=False):
    seed = derive_seed(master_seed, index)
    try:
        inst, rows = _clear_instance(intensity, k, seed, margin, engine,
                                     lambda candidate: evaluate_instance(candidate, paths, prune))
    except _INSTANCE_ERRORS as err:
        _fail(index, seed, err)

    return [dict(trial=index, seed=inst.seed, **row) for row in rows]


def origin_conflicts(inst):
    """Number of triangles whose open circumdisk contains the origin."""

    mesh = inst.mesh
    pts = mesh.points
    tri = mesh.triangles
    signs = incircle_array(pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]], np.zeros(2))
    return int(np.count_nonzero(signs > 0))


def origin_edge_length(inst):
    """Sum of the lengths of the Delaunay edges at the inserted origin."""

    mesh = inst.mesh
    neighbors = mesh.neighbor_vertices(inst.s_id)
    return float(np.sum(np.hypot(*(mesh.points[neighbors] - mesh.points[inst.s_id]).T)))


def n0_trial(index, intensity, master_seed, margin=None):
    seed = derive_seed(master_seed, index)
    try:
        inst = make_origin_instance(intensity, seed, insert_origin=False, margin=margin)
    except _INSTANCE_ERRORS as err:
        _fail(index, seed, err)
    return origin_conflicts(inst)


def l0_trial(index, intensity, master_seed, margin=None):
    seed = derive_seed(master_seed, index)
    try:
        inst = make_origin_instance(intensity, seed, insert_origin=True, margin=margin)
    except _INSTANCE_ERRORS as err:
        _fail(index, seed, err)
    return origin_edge_length(inst)


#########################################
# Per-instance theorem checks
#########################################


def animal_size_holds(polyline, k):
    """Color animals of the polyline at every checked scale stay below 4.24 k / scale + 1."""

    for scale, colors in ANIMAL_SCALES:
        bound = animal_size_bound(k, scale)
        for color in colors:
            if len(extract_animal(polyline, GridSpec(scale, color))) > bound:
                return False
    return True


def animals_connected(polyline):
    """Every color animal of the polyline at every checked scale is 4-connected on its own lattice."""

    return all(is_four_connected(extract_animal(polyline, GridSpec(scale, color)), scale)
               for scale, colors in ANIMAL_SCALES for color in colors)


def instance_checks(inst, rho, kappa=1.5):
    """Run every deterministic property on one instance.

    :param inst: the instance, with integer k and a window reaching at least 2 beyond s and t
    :type inst: Instance
    :param rho: rho of the pixel events; 0 reduces the length check to l(SP) >= k
    :type rho: float

    :returns: check name to bool, and the color animal sizes of the shortest path at scale 2
    :rtype: dict, dict
    """

    k = inst.k
    walk = straight_walk(inst)
    built = {"SP": shortest_path(inst), "UP": upper_path(inst, walk), "GP": greedy_path(inst, walk)}
    require_clearance(inst, [v for path in built.values() for v in path.vertices])
    sp = built["SP"]
    polyline = sp.polyline(inst.mesh)

    checks = {}
    for name, path in built.items():
        checks["animal_bound_" + name] = check_animal_bound(path, inst.mesh)[2]
    checks["animal_size_SP"] = animal_size_holds(polyline, k)
    checks["animal_connected_SP"] = animals_connected(polyline)

    length = length_animal_check(inst, rho, sp, kappa)
    checks["length_animal_SP"] = bool(length.ok)
    if length.horizontal:
        params = PixelParams(rho, kappa)
        checks["strong_implies_weak"] = all(strong_implies_weak_check(inst, v, params) for v in length.horizontal)
    else:
        checks["strong_implies_weak"] = True

    slack = 1.0 + RELATIVE_SLACK
    checks["path_order"] = sp.length <= built["GP"].length * slack and sp.length <= built["UP"].length * slack
    checks["delaunay_stretch_bound"] = sp.length < DELAUNAY_STRETCH_BOUND * k
    checks["sp_at_least_k"] = sp.length * slack >= k

    sizes = {color: len(extract_animal(polyline, GridSpec(2, color))) for color in COLORS}
    return checks, sizes


def theorem_trial(index, intensity, k, master_seed, rho, kappa=1.5, margin=None, engine="qhull"):
    seed = derive_seed(master_seed, index)
    try:
        inst, (checks, sizes) = _clear_instance(intensity, k, seed, margin, engine,
                                                lambda candidate: instance_checks(candidate, rho, kappa))
    except _INSTANCE_ERRORS as err:
        _fail(index, seed, err)

    tail = max(sizes.values()) >= animal_tail_threshold(k, 2)
    return dict(trial=index, seed=inst.seed, animal_tail=tail, **checks)


def _clear_shortest_path(inst):
    sp = shortest_path(inst)
    require_clearance(inst, sp.vertices)
    return sp


def animal_tail_trial(index, intensity, k, master_seed, margin=None, engine="qhull"):
    """Whether the largest color animal of SP at scale 2 reaches 2.55 k / 2 + 1 on one instance."""

    seed = derive_seed(master_seed, index)
    try:
        inst, sp = _clear_instance(intensity, k, seed, margin, engine, _clear_shortest_path)
    except _INSTANCE_ERRORS as err:
        _fail(index, seed, err)

    polyline = sp.polyline(inst.mesh)
    largest = max(len(extract_animal(polyline, GridSpec(2, color))) for color in COLORS)
    return bool(largest >= animal_tail_threshold(k, 2))
