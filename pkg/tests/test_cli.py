import pandas as pd
import pytest

from pdstretch.cli import build_parser, main, resolve_config
from pdstretch.metrics import RESULTS_COLUMNS


@pytest.fixture
def zigzag_file(tmp_path):
    file_name = tmp_path / "zigzag.txt"
    file_name.write_text("# x y\n0 0\n0.5 0.5\n1.5,-0.5\n2.5 0.5\n3.5 -0.5\n4 0\n")
    return str(file_name)


class TestResolveConfig:
    def test_precedence(self, tmp_path):
        config = tmp_path / "config.yaml"
        config.write_text("trials: 3\nintensity: 2000\n")
        parser = build_parser()

        assert resolve_config(parser.parse_args(["simulate"])).trials == 100
        assert resolve_config(parser.parse_args(["simulate", "--config", str(config)])).trials == 3
        cfg = resolve_config(parser.parse_args(["simulate", "--config", str(config), "--trials", "5"]))
        assert cfg.trials == 5
        assert cfg.intensity == 2000.0

    def test_subcommand_defaults(self, tmp_path):
        parser = build_parser()
        cfg = resolve_config(parser.parse_args(["theorems"]))
        assert (cfg.intensity, cfg.k) == (153.0, 5.0)
        config = tmp_path / "config.yaml"
        config.write_text("intensity: 200\n")
        assert resolve_config(parser.parse_args(["theorems", "--config", str(config)])).intensity == 200.0

    def test_flags(self):
        cfg = resolve_config(build_parser().parse_args(["simulate", "--n", "1e4", "--paths", "sp,up", "--seed", "1e3"]))
        assert cfg.intensity == 1e4
        assert cfg.paths == ("SP", "UP")
        assert cfg.master_seed == 1000


class TestMain:
    def test_simulate(self, tmp_path, capsys):
        out = tmp_path / "results.csv"
        code = main(["simulate", "--n", "300", "--k", "1", "--trials", "2", "--seed", "42", "--workers", "1",
                     "--paths", "sw,up,gp,sp", "--out", str(out)])
        assert code == 0
        table = pd.read_csv(out)
        assert list(table.columns) == RESULTS_COLUMNS
        assert table["path"].tolist() == ["SW", "UP", "GP", "SP"]
        assert "Results saved to" in capsys.readouterr().out

    def test_bound(self, capsys):
        assert main(["bound", "--rho", "1.25e-10", "--intensity", "153"]) == 0
        out = capsys.readouterr().out
        assert "P(rho, n) = 0.00251" in out
        assert "lambda witness = 34" in out

    def test_bound_search(self, capsys):
        assert main(["bound", "--rho", "1.25e-10", "--n", "153", "--search"]) == 0
        out = capsys.readouterr().out
        assert "best rho = " in out
        assert "reference rho = 1.25e-10, n = 153" in out

    def test_bound_outside_range(self, capsys):
        assert main(["bound", "--rho", "1e-4", "--n", "153"]) == 0
        assert "objective undefined" in capsys.readouterr().out

    def test_animal(self, zigzag_file, capsys):
        assert main(["animal", zigzag_file]) == 0
        out = capsys.readouterr().out
        assert "pixels = 13" in out
        assert "pass" in out

    def test_animal_other_scale(self, zigzag_file, capsys):
        assert main(["animal", zigzag_file, "--scale", "2", "--color", "pink"]) == 0
        assert "bound" not in capsys.readouterr().out

    def test_n0(self, tmp_path):
        out = tmp_path / "n0.csv"
        assert main(["n0", "--n", "100", "--trials", "50", "--workers", "1", "--out", str(out)]) == 0
        assert list(pd.read_csv(out).columns) == ["count", "mean", "std", "se"]

    def test_theorems(self, tmp_path):
        out = tmp_path / "theorems.csv"
        assert main(["theorems", "--n", "153", "--k", "2", "--trials", "2", "--polylines", "20", "--workers", "1",
                     "--out", str(out)]) == 0
        assert (pd.read_csv(out)["failures"] == 0).all()

    @pytest.mark.parametrize("argv", [
        ["simulate", "--trials", "0"],
        ["simulate", "--trials", "2.5"],
        ["simulate", "--paths", "sp,xp"],
        ["bound", "--rho", "-1", "--n", "153"],
        ["bound", "--rho", "1e-10"],
        ["animal", "missing_polyline.txt"],
        ["nonsense"],
        [],
    ])
    def test_usage_errors(self, argv):
        assert main(argv) == 2

    def test_help(self):
        assert main(["simulate", "--help"]) == 0

    @pytest.mark.slow
    def test_integrals(self):
        assert main(["integrals", "--samples", "1e7"]) == 0
