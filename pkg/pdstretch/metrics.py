#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Created on 18-10-2026
# @author: pdstretch developers

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

RESULTS_COLUMNS = ["path", "intensity", "k", "trials", "master_seed", "mean_length", "std_length",
                   "mean_size_over_sqrt_n", "std_size_over_sqrt_n"]


@dataclass(frozen=True)
class StatSummary:
    """Mean, sample standard deviation and standard error of a sample.

    With a single value the standard deviation and the standard error are NaN.
    """

    count: int
    mean: float
    std: float
    se: float

    def within(self, target, tol=0.0):
        """True iff the mean lies within max(tol, 3 se) of target."""

        return abs(self.mean - target) <= band_width(self, tol)


def summarize(values):
    """Reduce a sample to a :py:class:`StatSummary`.

    :param values: sample values
    :type values: array_like

    :rtype: StatSummary
    """

    values = np.asarray(values, dtype=float).ravel()
    count = values.size
    if count == 0:
        raise ValueError("Cannot summarize an empty sample")

    mean = float(np.mean(values))
    if count == 1:
        return StatSummary(count=1, mean=mean, std=math.nan, se=math.nan)

    std = float(np.std(values, ddof=1))
    return StatSummary(count=count, mean=mean, std=std, se=std / math.sqrt(count))


def band_width(summary, tol=0.0):
    if math.isnan(summary.se):
        return tol
    return max(tol, 3.0 * summary.se)


def gate(summary, target, tol):
    """Statistical gate |mean - target| <= band with band = max(tol, 3 se).

    :param summary: the estimate
    :type summary: StatSummary
    :param target: value the mean should reach
    :type target: float
    :param tol: requested tolerance
    :type tol: float

    :returns: passed, band, widened (the requested tolerance was tighter than 3 se)
    :rtype: bool, float, bool
    """

    band = band_width(summary, tol)
    return abs(summary.mean - target) <= band, band, band > tol


def joint_agreement(first, second, sigmas=3.0):
    """True iff two estimates agree within `sigmas` joint standard errors."""

    joint = math.sqrt(first.se ** 2 + second.se ** 2)
    return abs(first.mean - second.mean) <= sigmas * joint


def summarize_paths(trials, intensity, k, master_seed):
    """Per-path summary table in the results CSV schema.

    :param trials: one row per trial and path with columns trial, path, length, size
    :type trials: DataFrame

    :returns: one row per path, in the order the paths first appear
    :rtype: DataFrame
    """

    rows = []
    root_n = math.sqrt(intensity)
    for path in pd.unique(trials["path"]):
        part = trials[trials["path"] == path]
        length = summarize(part["length"]) if part["length"].notna().any() else None
        size = summarize(part["size"].to_numpy(dtype=float) / root_n)
        rows.append((path, intensity, k, len(part), master_seed,
                     length.mean if length else math.nan, length.std if length else math.nan,
                     size.mean, size.std))

    return pd.DataFrame(rows, columns=RESULTS_COLUMNS)
