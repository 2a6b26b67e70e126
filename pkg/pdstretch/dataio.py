#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Created on 18-10-2026
# @author: pdstretch developers

import os
import shutil

import importlib_resources
import matplotlib
import numpy as np
import pandas as pd
import yaml

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "pdstretch"
import matplotlib.pyplot as plt  # noqa: E402

# keys whose values are numbers; YAML reads 1e5 (without a dot) as a string
NUMERIC_KEYS = ("intensity", "k", "trials", "master_seed", "margin", "workers", "rho", "kappa", "pixel_trials",
                "integral_samples", "polylines")
LIST_KEYS = ("paths", "variance_intensities")


def _to_number(key, value):
    if value is None or isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return value
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ValueError("Config value of '" + key + "' must be a number, got " + repr(value))
    return number


def default_config():
    """The packaged default configuration.

    :rtype: dict
    """

    ref = importlib_resources.files("pdstretch.data") / "config.yaml"
    with ref.open("r") as file:
        return _normalize(yaml.safe_load(file), "config.yaml")


def _normalize(config, file_name):
    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise ValueError("Config file " + str(file_name) + " must contain a mapping of keys to values")

    config = dict(config)
    for key in NUMERIC_KEYS:
        if key in config:
            config[key] = _to_number(key, config[key])
    for key in LIST_KEYS:
        if key in config and config[key] is not None:
            if isinstance(config[key], str):
                config[key] = [v.strip() for v in config[key].split(",") if v.strip()]
            if not isinstance(config[key], list):
                raise ValueError("Config value of '" + key + "' must be a list")
    if "variance_intensities" in config and config["variance_intensities"] is not None:
        config["variance_intensities"] = [_to_number("variance_intensities", v) for v in config["variance_intensities"]]

    return config


def load_config(file_name):
    """Read a yaml config file into a dictionary. Keys that the packaged default config does not know are rejected.

    :param file_name: path to the yaml config file
    :type file_name: str

    :returns: config
    :rtype: dict

    """
    if not file_name.lower().endswith((".yaml", ".yml")):
        raise ValueError("Config File has to be a YAML file with .yaml extension")

    with open(os.path.expanduser(file_name), 'r') as file:
        config = _normalize(yaml.safe_load(file), file_name)

    unknown = sorted(set(config) - set(default_config()))
    if unknown:
        raise ValueError("Unknown keys in config file " + file_name + ": " + ", ".join(unknown))

    return config


def write_data(data, file_name):

    data.to_csv(file_name, index=False, na_rep="NaN")

    return


def write_band_plot(table, x, mean, std, file_name, ylabel=None, reference=None):
    """Line plot of mean against x with a band of one standard deviation, saved as SVG.

    :param table: data with the columns named by x, mean and std
    :type table: DataFrame
    :param reference: value drawn as a dashed horizontal line
    :type reference: float

    """

    table = table.sort_values(x)
    xs = table[x].to_numpy(dtype=float)
    ms = table[mean].to_numpy(dtype=float)
    ss = np.nan_to_num(table[std].to_numpy(dtype=float))

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ms, "o-", lw=1.5, label=mean)
    ax.fill_between(xs, ms - ss, ms + ss, alpha=0.3, label="mean +/- std")
    if reference is not None:
        ax.axhline(reference, color="k", ls="--", lw=1, label="reference " + format(reference, ".4f"))
    ax.set_xscale("log")
    ax.set_xlabel(x)
    ax.set_ylabel(ylabel or mean)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    # fixed metadata keeps identical inputs byte-identical
    fig.savefig(file_name, format="svg", metadata={"Date": None})
    plt.close(fig)

    return


def read_polyline(file_name):
    """Read polyline vertices, one x,y pair per line separated by whitespace or a comma. Lines starting with # are
    skipped.

    :rtype: ndarray
    """

    data = pd.read_csv(os.path.expanduser(file_name), sep=r"[,\s]+", engine="python", header=None, comment="#")
    if data.shape[1] != 2:
        raise ValueError("Polyline file " + file_name + " must have two columns, found " + str(data.shape[1]))

    return data.to_numpy(dtype=float)


def dump_off(mesh, file_name):
    """Write a mesh in OFF format with z = 0."""

    with open(os.path.expanduser(file_name), "w") as file:
        file.write("OFF\n")
        file.write(str(mesh.n_vertices) + " " + str(mesh.n_triangles) + " 0\n")
        for x, y in mesh.points.tolist():
            file.write(repr(x) + " " + repr(y) + " 0.0\n")
        for a, b, c in mesh.triangles.tolist():
            file.write("3 " + str(a) + " " + str(b) + " " + str(c) + "\n")

    return


def copy_example(dest_path):
    """ Copy the default config to a specified directory

    :param dest_path: Path to the directory where you'd like to copy the example files to
    :type dest_path: str

    """

    ref = importlib_resources.files("pdstretch.data")
    with importlib_resources.as_file(ref) as path:
        shutil.copytree(path, os.path.expanduser(dest_path), ignore=shutil.ignore_patterns("__init__.py", "__pycache__"))
        print("Example files copied to " + os.path.expanduser(dest_path))
