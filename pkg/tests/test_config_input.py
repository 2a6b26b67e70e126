import pdstretch
import filecmp
import pytest


class TestConfigInput:
    def test_worker_count_does_not_change_results(self):
        # Test Case 1: the same experiment on one and on two worker processes
        config_1a = "./tests/configfile_tests/config_1a.yaml"
        config_1b = "./tests/configfile_tests/config_1b.yaml"

        test_1a = pdstretch.core.StretchTest(config_1a)
        test_1a.run_tests()
        test_1b = pdstretch.core.StretchTest(config_1b)
        test_1b.run_tests()

        assert filecmp.cmp("./tests/configfile_tests/results/stretch_results_config_1a.csv",
                           "./tests/configfile_tests/results/stretch_results_config_1b.csv",
                           shallow=False) == True

    def test_no_trials(self):
        # Test Case 2: invalid settings exit with an error message
        config_2a = "./tests/configfile_tests/config_2a.yaml"

        pytest.raises(SystemExit, pdstretch.core.StretchTest, config_2a)

    def test_unknown_path(self):
        config_2b = "./tests/configfile_tests/config_2b.yaml"

        pytest.raises(SystemExit, pdstretch.core.StretchTest, config_2b)

    def test_unknown_engine(self):
        config_2c = "./tests/configfile_tests/config_2c.yaml"

        pytest.raises(SystemExit, pdstretch.core.StretchTest, config_2c)

    def test_unknown_key(self):
        # Test Case 3: keys the default config does not know
        config_3 = "./tests/configfile_tests/config_3.yaml"

        pytest.raises(ValueError, pdstretch.core.StretchTest, config_3)

    def test_string_formats(self):
        # Test Case 4: intensity without a dot and paths as a string
        config_4 = "./tests/configfile_tests/config_4.yaml"

        test_4 = pdstretch.core.StretchTest(config_4)
        results = test_4.run_tests()

        assert test_4.settings.intensity == 1000.0
        assert results["path"].tolist() == ["SP", "UP"]
        assert (results["k"] == 2.0).all()

    def test_format_intensity(self):
        # Test Case 5a: intensity that is not a number
        config_5a = "./tests/configfile_tests/config_5a.yaml"

        pytest.raises(ValueError, pdstretch.core.StretchTest, config_5a)

    def test_format_paths(self):
        # Test Case 5b: paths neither a list nor a string
        config_5b = "./tests/configfile_tests/config_5b.yaml"

        pytest.raises(ValueError, pdstretch.core.StretchTest, config_5b)

    def test_format_mapping(self):
        # Test Case 5c: a list instead of a mapping of keys to values
        config_5c = "./tests/configfile_tests/config_5c.yaml"

        pytest.raises(ValueError, pdstretch.core.StretchTest, config_5c)

    def test_not_yaml(self):
        pytest.raises(ValueError, pdstretch.core.StretchTest, "./tests/configfile_tests/config_6.json")

    def test_dictionary_config(self, tmp_path):
        test = pdstretch.core.StretchTest({"intensity": 300, "trials": 3, "workers": 1,
                                           "variance_intensities": [200, 400], "results_dir": str(tmp_path)})
        walk_counts = test.run_walk_count_study()
        assert walk_counts["intensity"].tolist() == [200, 400]
        assert (tmp_path / "walk_count_stretch_results_config.csv").exists()

        written = test.plot()
        assert written == [str(tmp_path / "walk_count_stretch_results_config.svg")]

    def test_copy_example(self, tmp_path):
        pdstretch.dataio.copy_example(str(tmp_path / "example"))

        assert (tmp_path / "example" / "config.yaml").exists()
        assert not (tmp_path / "example" / "__init__.py").exists()
        assert pdstretch.dataio.load_config(str(tmp_path / "example" / "config.yaml")) == \
            pdstretch.dataio.default_config()
