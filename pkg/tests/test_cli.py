"""Tests for the command line front end and its file formats."""

import csv
import io

import numpy as np
import pytest

import cartsel.cli as cli
from cartsel.errors import ConfigError, ParseError
from cartsel.oracle import brute_multi


def run_cli(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseKSpec:
    def test_comma_list(self):
        assert cli.parse_k_spec("4,8,16") == [4, 8, 16]

    def test_power_token(self):
        assert cli.parse_k_spec("2^5") == [32]

    def test_power_range(self):
        assert cli.parse_k_spec("2^10..2^12") == [1024, 2048, 4096]

    def test_sorted_and_deduped(self):
        assert cli.parse_k_spec("16,2^2,4,16") == [4, 16]

    @pytest.mark.parametrize("spec", ("0", "-3", "a", "2^12..2^10", "", "4,,8"))
    def test_bad_specs_rejected(self, spec):
        with pytest.raises(ConfigError):
            cli.parse_k_spec(spec)


class TestInstanceFiles:
    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "inst.txt"
        path.write_text("# header\n1 2 3\n\n  # note\n4 5\n")
        arrays = cli.read_instance(path)
        assert len(arrays) == 2
        np.testing.assert_array_equal(arrays[0], [1, 2, 3])
        np.testing.assert_array_equal(arrays[1], [4, 5])
        assert arrays[0].dtype == np.int64

    def test_any_float_token_promotes_the_file(self, tmp_path):
        path = tmp_path / "inst.txt"
        path.write_text("1 2\n0.5 3\n")
        arrays = cli.read_instance(path)
        assert all(a.dtype == np.float64 for a in arrays)

    def test_bad_token_reports_line(self, tmp_path):
        path = tmp_path / "inst.txt"
        path.write_text("1 2\nx 3\n")
        with pytest.raises(ParseError) as err:
            cli.read_instance(path)
        assert err.value.line_no == 2

    @pytest.mark.parametrize("token", ("nan", "inf", "-inf"))
    def test_non_finite_rejected(self, tmp_path, token):
        path = tmp_path / "inst.txt"
        path.write_text(f"1 {token}\n")
        with pytest.raises(ParseError):
            cli.read_instance(path)

    def test_no_rows_rejected(self, tmp_path):
        path = tmp_path / "inst.txt"
        path.write_text("# only comments\n\n")
        with pytest.raises(ParseError):
            cli.read_instance(path)

    def test_round_trip(self, tmp_path):
        arrays = [
            np.array([3, 1, 2], dtype=np.int64),
            np.array([9], dtype=np.int64),
        ]
        buf = io.StringIO()
        cli.write_instance(arrays, buf)
        path = tmp_path / "inst.txt"
        path.write_text(buf.getvalue())
        back = cli.read_instance(path)
        for a, b in zip(arrays, back):
            np.testing.assert_array_equal(a, b)

    def test_float_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        arrays = [rng.random(5), rng.random(3)]
        buf = io.StringIO()
        cli.write_instance(arrays, buf)
        path = tmp_path / "inst.txt"
        path.write_text(buf.getvalue())
        back = cli.read_instance(path)
        for a, b in zip(arrays, back):
            np.testing.assert_array_equal(a, b)


class TestGen:
    def test_deterministic_for_seed(self, tmp_path, capsys):
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        for p in (p1, p2):
            code, _, _ = run_cli(
                ["gen", "--n", "5", "--m", "3", "--seed", "7", "--out", str(p)], capsys
            )
            assert code == 0
        assert p1.read_text() == p2.read_text()
        arrays = cli.read_instance(p1)
        assert len(arrays) == 3 and all(a.size == 5 for a in arrays)

    def test_reals_distribution(self, tmp_path, capsys):
        path = tmp_path / "r.txt"
        code, _, _ = run_cli(
            ["gen", "--n", "4", "--m", "2", "--dist", "reals", "--out", str(path)],
            capsys,
        )
        assert code == 0
        arrays = cli.read_instance(path)
        assert all(a.dtype == np.float64 for a in arrays)

    def test_writes_to_stdout_by_default(self, capsys):
        code, out, _ = run_cli(["gen", "--n", "3", "--m", "2"], capsys)
        assert code == 0
        assert len([l for l in out.splitlines() if l and not l.startswith("#")]) == 2

    def test_zero_n_rejected(self, capsys):
        code, _, err = run_cli(["gen", "--n", "0", "--m", "2"], capsys)
        assert code == 2
        assert "error" in err


class TestSelect:
    def make_instance(self, tmp_path, capsys, n=6, m=3, seed=1):
        path = tmp_path / "inst.txt"
        code, _, _ = run_cli(
            ["gen", "--n", str(n), "--m", str(m), "--seed", str(seed), "--out", str(path)],
            capsys,
        )
        assert code == 0
        return path

    def test_matches_enumeration(self, tmp_path, capsys):
        path = self.make_instance(tmp_path, capsys)
        code, out, err = run_cli(
            ["select", "--input", str(path), "--k", "30", "--sorted"], capsys
        )
        assert code == 0
        got = np.array([int(line) for line in out.split()], dtype=np.int64)
        np.testing.assert_array_equal(got, brute_multi(cli.read_instance(path), 30))
        stats = dict(line.split("=", 1) for line in err.strip().splitlines())
        assert float(stats["runtime_seconds"]) >= float(
            stats["runtime_excl_load_seconds"]
        )
        assert int(stats["values_generated"]) >= 30
        assert int(stats["root_pool_size"]) >= 30

    def test_wobbly_mode_flag(self, tmp_path, capsys):
        path = self.make_instance(tmp_path, capsys)
        code, out, _ = run_cli(
            ["select", "--input", str(path), "--k", "10", "--mode", "wobbly", "--sorted"],
            capsys,
        )
        assert code == 0
        got = np.array([int(line) for line in out.split()], dtype=np.int64)
        np.testing.assert_array_equal(got, brute_multi(cli.read_instance(path), 10))

    def test_out_file(self, tmp_path, capsys):
        path = self.make_instance(tmp_path, capsys)
        dest = tmp_path / "vals.txt"
        code, out, _ = run_cli(
            ["select", "--input", str(path), "--k", "5", "--out", str(dest)], capsys
        )
        assert code == 0 and out == ""
        assert len(dest.read_text().split()) == 5

    def test_k_too_large_is_range_error(self, tmp_path, capsys):
        path = self.make_instance(tmp_path, capsys, n=2, m=2)
        code, _, err = run_cli(["select", "--input", str(path), "--k", "5"], capsys)
        assert code == 3
        assert "error" in err

    def test_missing_file_is_parse_error(self, capsys):
        code, _, err = run_cli(
            ["select", "--input", "/no/such/file", "--k", "1"], capsys
        )
        assert code == 2
        assert "error" in err

    def test_malformed_file_is_parse_error(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("1 oops\n")
        code, _, err = run_cli(["select", "--input", str(path), "--k", "1"], capsys)
        assert code == 2
        assert "line 1" in err


class TestVerify:
    def test_clean_sweep_passes(self, capsys):
        code, out, _ = run_cli(
            ["verify", "--n-max", "4", "--m-max", "3", "--trials", "2"], capsys
        )
        assert code == 0
        assert "cases=" in out and "oracle_failures=0" in out

    def test_no_cases_warns(self, capsys):
        code, out, err = run_cli(["verify", "--trials", "0"], capsys)
        assert code == 0
        assert "cases=0" in out
        assert "warning" in err

    def test_detects_a_wrong_implementation(self, capsys, monkeypatch):
        """A corrupted selection must be caught and reported with its replay key."""
        real_build = cli.build_tree

        class Corrupted:
            def __init__(self, tree):
                self._tree = tree

            def select_k(self, k):
                out = self._tree.select_k(k).copy()
                out[-1] += 1
                return out

        monkeypatch.setattr(
            cli, "build_tree", lambda arrays, cfg: Corrupted(real_build(arrays, cfg))
        )
        code, out, _ = run_cli(
            ["verify", "--n-max", "2", "--m-max", "2", "--trials", "1"], capsys
        )
        assert code == 1
        assert "MISMATCH" in out
        line = next(l for l in out.splitlines() if l.startswith("MISMATCH"))
        assert "m=" in line and "n=" in line and "k=" in line and "mode=" in line


class TestBench:
    def read_csv(self, path):
        with open(path, newline="") as fh:
            return list(csv.reader(fh))

    def test_csv_shape_and_content(self, tmp_path, capsys):
        path = tmp_path / "bench.csv"
        code, _, _ = run_cli(
            [
                "bench", "--n", "8", "--m", "3", "--k", "4,8",
                "--trials", "2", "--csv", str(path),
            ],
            capsys,
        )
        assert code == 0
        rows = self.read_csv(path)
        assert tuple(rows[0]) == cli.CSV_COLUMNS
        body = rows[1:]
        assert len(body) == 2 * 2 * 3  # modes x ks x (trials + mean)
        cols = {name: i for i, name in enumerate(rows[0])}
        assert {r[cols["mode"]] for r in body} == {"standard", "wobbly"}
        assert {r[cols["k"]] for r in body} == {"4", "8"}
        means = [r for r in body if r[cols["trial"]] == "mean"]
        assert len(means) == 4
        for r in body:
            assert float(r[cols["runtime_seconds"]]) >= 0.0
            assert float(r[cols["values_generated"]]) >= 4

    def test_naive_mode_counts_every_sum(self, tmp_path, capsys):
        path = tmp_path / "bench.csv"
        code, _, _ = run_cli(
            [
                "bench", "--n", "4", "--m", "3", "--k", "2",
                "--modes", "naive", "--trials", "1", "--csv", str(path),
            ],
            capsys,
        )
        assert code == 0
        rows = self.read_csv(path)
        cols = {name: i for i, name in enumerate(rows[0])}
        assert all(r[cols["values_generated"]] == "64" for r in rows[1:])

    def test_stdout_when_no_csv_path(self, capsys):
        code, out, _ = run_cli(
            ["bench", "--n", "4", "--m", "2", "--k", "2", "--trials", "1"], capsys
        )
        assert code == 0
        assert out.splitlines()[0] == ",".join(cli.CSV_COLUMNS)

    def test_cap_refusal_for_naive(self, capsys):
        code, _, err = run_cli(
            [
                "bench", "--n", "64", "--m", "5", "--k", "2", "--modes", "naive",
                "--trials", "1", "--cap", "1048576",
            ],
            capsys,
        )
        assert code == 1
        assert "error" in err

    def test_unknown_mode_rejected(self, capsys):
        code, _, _ = run_cli(
            ["bench", "--n", "4", "--m", "2", "--k", "2", "--modes", "quick"], capsys
        )
        assert code == 2

    def test_k_beyond_total_is_range_error(self, capsys):
        code, _, _ = run_cli(
            ["bench", "--n", "2", "--m", "2", "--k", "8", "--trials", "1"], capsys
        )
        assert code == 3


class TestMainEntry:
    def test_no_arguments_is_usage_error(self, capsys):
        assert cli.main([]) == 2

    def test_unknown_command_is_usage_error(self, capsys):
        assert cli.main(["frobnicate"]) == 2
