#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Created on 18-10-2026
# @author: pdstretch developers

import os
import sys
from pathlib import Path

import pandas as pd

from .bounds import walk_count_target
from .dataio import default_config, load_config
from .harness import (ExperimentConfig, animal_tail_checks, animal_tail_fraction, animal_tail_study, emit,
                      run_path_experiment, run_path_trials, theorem_checks, variance_scaling_checks,
                      variance_scaling_study, walk_count_study)


class SimulationTest:

    """ Elementary Class for implementing simulation experiments.
    """

    def run_tests(self):

        """
        Runs the experiment. This is an empty method that needs to be implemented by subclasses
        """

        return

    def plot(self):

        """
        This is an empty method that can be implemented by subclasses.
        """

        return


class StretchTest(SimulationTest):
    """ The primary purpose of the StretchTest class is the implementation of the run_tests() method, which measures
    the length and size of the straight walk, upper, greedy and shortest paths on Delaunay triangulations of Poisson
    point processes.

        :param config: path to yaml config file, or a dictionary of settings; missing settings take the packaged
        defaults
        :type config: str or dict
        :param results_file: name of the results CSV inside results_dir; derived from the config file name by default
        :type results_file: str

    """

    def __init__(self, config, results_file=None):
        """Constructor method
        """

        self.config = default_config()
        if isinstance(config, str):
            self.config.update(load_config(config))
            config_name = Path(config).stem
        elif isinstance(config, dict):
            self.config.update(config)
            config_name = "config"
        else:
            print("Error: config must be a path to a yaml file or a dictionary")
            sys.exit(2)

        self._check_config()

        self.trials = pd.DataFrame()
        self.results = pd.DataFrame()
        self.variance = pd.DataFrame()
        self.walk_counts = pd.DataFrame()
        self.report = pd.DataFrame()
        self.instances = pd.DataFrame()
        self.animal_tails = pd.DataFrame()

        # check if results directory exists
        results_dir = os.path.expanduser(self.settings.results_dir)
        if not os.path.isdir(results_dir):
            os.makedirs(results_dir)
        self.results_dir = results_dir

        self._results_file = results_file or "stretch_results_" + config_name + ".csv"

    def _check_config(self):
        """ Check that the settings are complete and valid; exit with an error message otherwise.
        """

        for key in ("intensity", "k", "trials", "master_seed", "paths", "results_dir"):
            if self.config.get(key) is None:
                print("Error: " + key + " not specified in config file")
                sys.exit(2)

        try:
            self.settings = ExperimentConfig.from_dict(self.config)
        except (TypeError, ValueError) as err:
            print("Error: " + str(err))
            sys.exit(2)

        return

    def _path(self, file_name):
        return os.path.join(self.results_dir, file_name)

    def run_tests(self):
        """ Main method of the StretchTest class, which runs the path experiment.
        This function calls :py:func:`harness.run_path_trials` and summarizes the trials with
        :py:func:`harness.run_path_experiment`.

        :returns: results file in the results directory, one row per path with the mean and standard deviation of the
        length and of the size over sqrt(n)
        :rtype: csv_file

        """

        print("Running path experiment at n=" + format(self.settings.intensity, "g") + ", k="
              + format(self.settings.k, "g") + " on " + str(self.settings.trials) + " trials")

        self.trials = run_path_trials(self.settings)
        self.results = run_path_experiment(self.settings, self.trials)
        emit(self.results, self._path(self._results_file))

        print("Path experiment finished. Results saved to " + self._path(self._results_file))

        return self.results

    def run_variance_study(self):
        """ Variance of the upper path length across the configured intensities.

        :returns: the study table and its checks
        :rtype: DataFrame, dict
        """

        self.variance = variance_scaling_study(self.settings.variance_intensities, self.settings.trials,
                                               self.settings.master_seed, k=self.settings.k,
                                               workers=self.settings.workers, engine=self.settings.engine)
        emit(self.variance, self._path("variance_" + self._results_file))
        print("Variance study finished. Results saved to " + self._path("variance_" + self._results_file))
        if self.settings.plot:
            self.plot()

        return self.variance, variance_scaling_checks(self.variance)

    def run_walk_count_study(self, intensities=None):

        self.walk_counts = walk_count_study(intensities or self.settings.variance_intensities, self.settings.trials,
                                            self.settings.master_seed, k=self.settings.k,
                                            workers=self.settings.workers, engine=self.settings.engine)
        emit(self.walk_counts, self._path("walk_count_" + self._results_file))
        print("Walk count study finished. Results saved to " + self._path("walk_count_" + self._results_file))
        if self.settings.plot:
            self.plot()

        return self.walk_counts

    def run_theorem_checks(self):
        """ Deterministic property checks, see :py:func:`harness.theorem_checks`.

        :returns: the report; every row must have zero failures
        :rtype: DataFrame
        """

        print("Running theorem checks on " + str(self.settings.trials) + " instances")
        self.report, self.instances = theorem_checks(self.settings)
        emit(self.report, self._path("theorems_" + self._results_file))
        print("Fraction of instances with a large color animal: " + format(animal_tail_fraction(self.instances), ".4f"))
        self.animal_tails = animal_tail_study((self.settings.k, 2 * self.settings.k), self.settings.intensity,
                                              self.settings.trials, self.settings.master_seed,
                                              workers=self.settings.workers, engine=self.settings.engine)
        emit(self.animal_tails, self._path("animal_tail_" + self._results_file))
        print("Tail fraction not increasing with k: "
              + str(animal_tail_checks(self.animal_tails)["tail_fraction_not_increasing"]))
        print("Theorem checks finished. Results saved to " + self._path("theorems_" + self._results_file))

        return self.report

    def plot(self):
        """ SVG band plots (mean +/- std against n) of the studies that have been run.

        :returns: paths of the written plots
        :rtype: list
        """

        written = []
        if not self.variance.empty:
            file_name = self._path("variance_" + Path(self._results_file).stem + ".svg")
            emit(self.variance, file_name, mean="mean_length", std="std_length")
            written.append(file_name)
        if not self.walk_counts.empty:
            file_name = self._path("walk_count_" + Path(self._results_file).stem + ".svg")
            emit(self.walk_counts, file_name, mean="mean_edges_over_sqrt_n", std="std_edges_over_sqrt_n",
                 reference=walk_count_target())
            written.append(file_name)

        if not written:
            print("Nothing to plot: run a variance or walk count study first")
        for file_name in written:
            print("Plot saved to " + file_name)

        return written
