#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Created on 18-10-2026
# @author: pdstretch developers

import logging
import math
import os
from dataclasses import dataclass, fields
from functools import partial
from multiprocessing import Pool

import numpy as np
import pandas as pd

from .bounds import animal_tail_threshold, eval_P, walk_count_target
from .dataio import write_band_plot, write_data
from .evaluate import CHECK_NAMES, PATH_NAMES, animal_tail_trial, l0_trial, n0_trial, path_trial, theorem_trial
from .metrics import summarize, summarize_paths
from .pixels import PixelParams, check_animal_bound, estimate_pixel_events
from .sampling import default_margin, derive_seed

logger = logging.getLogger(__name__)

THREADS_VARIABLE = "PDS_STRETCH_THREADS"
ENGINES = ("qhull", "incremental")
UP_TAIL_STRETCH = 1.2
REPORT_COLUMNS = ["check", "instances", "passes", "failures", "first_failing_seed"]


@dataclass
class ExperimentConfig:
    """Settings shared by every experiment.

    :param intensity: intensity n of the Poisson process
    :param k: distance between s and t
    :param trials: number of independent instances
    :param master_seed: seed every trial seed is derived from
    :param paths: paths to run, a subset of SW, UP, GP, SP
    :param engine: Delaunay builder, qhull or incremental
    :param margin: window margin around [s,t]; None for the default
    :param workers: worker processes; None for every available core
    """

    intensity: float = 1e5
    k: float = 1.0
    trials: int = 100
    master_seed: int = 42
    paths: tuple = PATH_NAMES
    engine: str = "qhull"
    margin: float = None
    prune: bool = False
    workers: int = None
    results_dir: str = "results/"
    plot: bool = False
    rho: float = 1e-4
    kappa: float = 1.5
    pixel_trials: int = 200
    polylines: int = 10000
    variance_intensities: tuple = (1e4, 1e5, 1e6)
    integral_samples: int = 10 ** 7

    def __post_init__(self):
        for name in ("trials", "master_seed", "pixel_trials", "polylines", "integral_samples"):
            setattr(self, name, _as_int(name, getattr(self, name)))
        if self.workers is not None:
            self.workers = _as_int("workers", self.workers)
        self.intensity = float(self.intensity)
        self.k = float(self.k)
        self.paths = tuple(str(p).upper() for p in self.paths)
        self.variance_intensities = tuple(float(n) for n in self.variance_intensities)

        if not self.trials >= 1:
            raise ValueError("trials must be at least 1, got " + str(self.trials))
        if not self.intensity > 0:
            raise ValueError("intensity must be positive, got " + str(self.intensity))
        if not self.k > 0:
            raise ValueError("k must be positive, got " + str(self.k))
        if not self.paths or any(p not in PATH_NAMES for p in self.paths):
            raise ValueError("paths must be a non-empty subset of " + ", ".join(PATH_NAMES) + ", got "
                             + ", ".join(self.paths))
        if self.engine not in ENGINES:
            raise ValueError("engine must be one of " + ", ".join(ENGINES) + ", got " + str(self.engine))
        if self.margin is not None and not self.margin > 0:
            raise ValueError("margin must be positive, got " + str(self.margin))
        if self.workers is not None and self.workers < 1:
            raise ValueError("workers must be at least 1, got " + str(self.workers))
        if not self.rho >= 0:
            raise ValueError("rho must be non-negative, got " + str(self.rho))
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative, got " + str(self.master_seed))

    @classmethod
    def from_dict(cls, config):
        """Build a config from a dictionary, rejecting keys that are not settings."""

        names = {f.name for f in fields(cls)}
        unknown = sorted(set(config) - names)
        if unknown:
            raise ValueError("Unknown config keys: " + ", ".join(unknown))
        return cls(**{key: value for key, value in config.items() if value is not None or key in ("margin", "workers")})


def _as_int(name, value):
    number = float(value)
    if not number.is_integer():
        raise ValueError(name + " must be an integer, got " + str(value))
    return int(number)


#########################################
# In this section we run trials in parallel; results come back ordered by trial index
#########################################


def resolve_workers(requested=None):
    """Worker count: the request, or every core, capped by the PDS_STRETCH_THREADS environment variable.

    :rtype: int
    """

    workers = requested or os.cpu_count() or 1
    limit = os.environ.get(THREADS_VARIABLE)
    if limit:
        try:
            limit = int(limit)
        except ValueError:
            raise ValueError(THREADS_VARIABLE + " must be a positive integer, got " + repr(limit))
        if limit < 1:
            raise ValueError(THREADS_VARIABLE + " must be a positive integer, got " + str(limit))
        workers = min(workers, limit)

    return max(1, int(workers))


def run_trials(worker, trials, workers=None, **kwargs):
    """Call worker(index, **kwargs) for every trial index, in a process pool when more than one worker is available.

    :param worker: module level function of the trial index
    :type worker: callable
    :param trials: number of trials
    :type trials: int

    :returns: the worker results in trial order
    :rtype: list
    """

    task = partial(worker, **kwargs)
    workers = min(resolve_workers(workers), trials)
    if workers <= 1:
        return [task(index) for index in range(trials)]

    with Pool(workers) as pool:
        results = pool.map(task, range(trials))

    return results


#########################################
# Path experiment
#########################################


def run_path_trials(cfg):
    """Length and size of every requested path on every trial.

    :param cfg: experiment settings
    :type cfg: ExperimentConfig

    :returns: one row per trial and path with columns trial, seed, path, length, size
    :rtype: DataFrame
    """

    results = run_trials(path_trial, cfg.trials, cfg.workers, intensity=cfg.intensity, k=cfg.k,
                         master_seed=cfg.master_seed, paths=cfg.paths, margin=cfg.margin, engine=cfg.engine,
                         prune=cfg.prune)

    return pd.DataFrame([row for rows in results for row in rows], columns=["trial", "seed", "path", "length", "size"])


def run_path_experiment(cfg, trials=None):
    """Summary of the path experiment, one row per path in the results schema.

    :param cfg: experiment settings
    :type cfg: ExperimentConfig
    :param trials: output of :py:func:`run_path_trials`, computed when not given
    :type trials: DataFrame

    :rtype: DataFrame
    """

    if trials is None:
        trials = run_path_trials(cfg)
    return summarize_paths(trials, cfg.intensity, cfg.k, cfg.master_seed)


#########################################
# Typical cell at the origin
#########################################


def estimate_N0(n, trials, seed, workers=None, margin=None):
    """Mean number of Delaunay triangles whose open circumdisk contains the origin.

    :rtype: StatSummary
    """

    counts = run_trials(n0_trial, int(trials), workers, intensity=n, master_seed=seed, margin=margin)
    return summarize(counts)


def estimate_L0(n, trials, seed, workers=None, margin=None):
    """Mean total length of the Delaunay edges at the origin, once the origin is inserted.

    :returns: summary of the length and summary of the length times sqrt(n)
    :rtype: StatSummary, StatSummary
    """

    lengths = np.asarray(run_trials(l0_trial, int(trials), workers, intensity=n, master_seed=seed, margin=margin))
    return summarize(lengths), summarize(lengths * math.sqrt(n))


#########################################
# Studies over several intensities
#########################################


def variance_scaling_study(intensities, trials, seed, k=1.0, workers=None, engine="qhull",
                           tail_stretch=UP_TAIL_STRETCH):
    """Variance of the upper path length per intensity, with Var * sqrt(n) and the fraction of trials with
    l(UP) > tail_stretch * k.

    :param intensities: at least two intensities
    :type intensities: list

    :rtype: DataFrame
    """

    if len(intensities) < 2:
        raise ValueError("The variance study needs at least two intensities")

    rows = []
    for index, n in enumerate(sorted(intensities)):
        print("Running upper path trials at n=" + format(n, "g"))
        cfg = ExperimentConfig(intensity=n, k=k, trials=trials, master_seed=derive_seed(seed, index), paths=("UP",),
                               engine=engine, workers=workers)
        lengths = run_path_trials(cfg)["length"].to_numpy(dtype=float)
        summary = summarize(lengths)
        variance = summary.std ** 2
        rows.append((n, len(lengths), summary.mean, summary.std, variance, variance * math.sqrt(n),
                     float(np.mean(lengths > tail_stretch * k))))

    return pd.DataFrame(rows, columns=["intensity", "trials", "mean_length", "std_length", "var_length",
                                       "var_times_sqrt_n", "tail_fraction"])


def variance_scaling_checks(table, factor=3.0):
    """Variance strictly decreasing in n, and Var * sqrt(n) within the given factor between successive rows.

    :rtype: dict
    """

    variance = table["var_length"].to_numpy(dtype=float)
    scaled = table["var_times_sqrt_n"].to_numpy(dtype=float)
    ratios = np.maximum(scaled[1:], scaled[:-1]) / np.minimum(scaled[1:], scaled[:-1])

    return {"variance_decreasing": bool(np.all(np.diff(variance) < 0)),
            "scaled_variance_stable": bool(np.all(ratios <= factor))}


def walk_count_study(intensities, trials, seed, k=1.0, workers=None, engine="qhull"):
    """Crossed edges of the straight walk over sqrt(n) k per intensity, next to 64 / (3 pi^2).

    :rtype: DataFrame
    """

    rows = []
    for index, n in enumerate(sorted(intensities)):
        print("Running straight walk trials at n=" + format(n, "g"))
        cfg = ExperimentConfig(intensity=n, k=k, trials=trials, master_seed=derive_seed(seed, index), paths=("SW",),
                               engine=engine, workers=workers)
        sizes = run_path_trials(cfg)["size"].to_numpy(dtype=float) / (math.sqrt(n) * k)
        summary = summarize(sizes)
        rows.append((n, summary.count, summary.mean, summary.std, summary.se, walk_count_target()))

    return pd.DataFrame(rows, columns=["intensity", "trials", "mean_edges_over_sqrt_n", "std_edges_over_sqrt_n",
                                       "se_edges_over_sqrt_n", "target"])


#########################################
# Theorem checks
#########################################


def random_polylines(count, seed, max_vertices=8, spread=3.0, reach=5):
    """Random polylines from (0,0) to a random lattice point through up to max_vertices random vertices."""

    rng = np.random.default_rng(seed)
    for _ in range(int(count)):
        inner = rng.normal(0.0, spread, size=(int(rng.integers(0, max_vertices + 1)), 2))
        end = rng.integers(-reach, reach + 1, size=2).astype(float)
        yield np.vstack([np.zeros((1, 2)), inner, end[None, :]])


def random_polyline_check(count, seed):
    """Pixel count bound on random polylines with lattice end points.

    :returns: number of polylines, number of failures, index of the first failure (None if all pass)
    :rtype: int, int, int
    """

    failures, first = 0, None
    for index, polyline in enumerate(random_polylines(count, seed)):
        if not check_animal_bound(polyline)[2]:
            failures += 1
            if first is None:
                first = index
                logger.error("Random polyline %d breaks the pixel count bound: %s", index, polyline.tolist())

    return int(count), failures, first


def theorem_checks(cfg):
    """Deterministic properties on every instance: pixel count bounds of SP, UP and GP, animal sizes of SP, the
    length inequality at rho, the witness checks on every horizontal pixel, the order of the path lengths and the
    bounds k <= l(SP) < 1.998 k. The instances use a margin of 2 + default margin so that pixel neighbourhoods fit.

    :param cfg: experiment settings, with integer k
    :type cfg: ExperimentConfig

    :returns: report with columns check, instances, passes, failures, first_failing_seed; and the per-instance table
    :rtype: DataFrame, DataFrame
    """

    if not float(cfg.k).is_integer():
        raise ValueError("Theorem checks need an integer k, got " + str(cfg.k))

    margin = cfg.margin if cfg.margin is not None else 2.0 + default_margin(cfg.intensity)
    rows = run_trials(theorem_trial, cfg.trials, cfg.workers, intensity=cfg.intensity, k=cfg.k,
                      master_seed=cfg.master_seed, rho=cfg.rho, kappa=cfg.kappa, margin=margin, engine=cfg.engine)
    instances = pd.DataFrame(rows)

    report = []
    for check in CHECK_NAMES:
        passed = instances[check].astype(bool)
        failing = instances.loc[~passed, "seed"]
        report.append((check, len(instances), int(passed.sum()), int((~passed).sum()),
                       int(failing.iloc[0]) if len(failing) else None))

    if cfg.polylines:
        count, failures, first = random_polyline_check(cfg.polylines, derive_seed(cfg.master_seed, cfg.trials))
        report.append(("animal_bound_random_polylines", count, count - failures, failures, first))

    report = pd.DataFrame(report, columns=REPORT_COLUMNS)

    return report, instances


def animal_tail_fraction(instances):
    """Fraction of instances whose largest color animal of SP at scale 2 reaches 2.55 k / 2 + 1."""

    return float(instances["animal_tail"].mean())


def animal_tail_study(ks, intensity, trials, seed, workers=None, engine="qhull"):
    """Fraction of instances whose largest color animal of SP at scale 2 reaches 2.55 k / 2 + 1, for several k.

    :param ks: at least two distances k
    :type ks: list
    :param intensity: intensity n
    :type intensity: float
    :param trials: instances per k
    :type trials: int
    :param seed: master seed; each k gets its own derived stream
    :type seed: int

    :returns: one row per k, sorted by k
    :rtype: DataFrame
    """

    ks = sorted(float(k) for k in ks)
    if len(ks) < 2:
        raise ValueError("The animal tail study needs at least two values of k")

    rows = []
    for position, k in enumerate(ks):
        tails = run_trials(animal_tail_trial, trials, workers, intensity=intensity, k=k,
                           master_seed=derive_seed(seed, position), engine=engine)
        fraction = float(np.mean(tails))
        rows.append((k, intensity, trials, animal_tail_threshold(k, 2), fraction,
                     math.sqrt(fraction * (1.0 - fraction) / trials)))

    return pd.DataFrame(rows, columns=["k", "intensity", "trials", "threshold", "tail_fraction", "se"])


def animal_tail_checks(table, sigmas=3.0):
    """The tail fraction must not grow with k beyond the combined noise of the smallest and largest k.

    :rtype: dict
    """

    table = table.sort_values("k")
    first, last = table.iloc[0], table.iloc[-1]
    noise = sigmas * math.hypot(first["se"], last["se"])
    return {"tail_fraction_not_increasing": bool(last["tail_fraction"] <= first["tail_fraction"] + noise)}


#########################################
# Pixel events
#########################################


def pixel_event_study(intensity, rho, trials, seed, kappa=1.5):
    """Monte Carlo frequency of H_rho or not I next to the bound P(rho, n).

    :rtype: DataFrame
    """

    params = PixelParams(rho, kappa)
    estimate = estimate_pixel_events(intensity, params, trials, seed)
    bound = eval_P(rho, intensity, strict=False)
    within = estimate["p_event"] <= bound + 3.0 * estimate["se_event"]

    return pd.DataFrame([(intensity, rho, estimate["pixels"], estimate["p_not_independent"], estimate["p_event"],
                          estimate["se_event"], estimate["p_weak"], bound, within)],
                        columns=["intensity", "rho", "pixels", "p_not_independent", "p_event", "se_event", "p_weak",
                                 "bound", "within_bound"])


#########################################
# Output
#########################################


def emit(results, file_name, x="intensity", mean=None, std=None, reference=None):
    """Write a results table as CSV, or as an SVG band plot of mean +/- std against x when file_name ends in .svg.

    :param results: results table
    :type results: DataFrame
    :param file_name: output path; its directory must exist
    :type file_name: str

    """

    directory = os.path.dirname(os.path.expanduser(file_name))
    if directory and not os.path.isdir(directory):
        raise OSError("Output directory " + directory + " does not exist")

    if file_name.lower().endswith(".svg"):
        if mean is None or std is None:
            raise ValueError("An SVG plot needs the mean and std columns")
        write_band_plot(results, x, mean, std, os.path.expanduser(file_name), reference=reference)
    else:
        write_data(results, os.path.expanduser(file_name))

    return
