"""CLI adapter: resolution order, deterministic files, exit statuses.

The library modules never import the CLI; this is the only test file that
does, which keeps the adapter thin by construction.
"""

import json
import math
import os

import pytest

from mgapprox import InvariantViolation, dyadic_midpoint_report, hannan_sum
from mgapprox.cli import OUT_DIR_ENV, UsageError, emit_table, main


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(OUT_DIR_ENV, raising=False)
    return tmp_path


def run(*argv):
    return main(list(argv))


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestEmitTable:
    def test_csv_rendering(self, tmp_path):
        rows = [[1, 0.5, None, True, "x"], [2, -1.0, 3.0, False, "y"]]
        paths = emit_table(
            rows, ["n", "a", "b", "ok", "tag"], "csv", "t.csv", {"config": {}}
        )
        assert paths == ["t.csv", "t.csv.meta.json"]
        text = read("t.csv").decode()
        assert text == "n,a,b,ok,tag\n1,0.5,,true,x\n2,-1,3,false,y\n"

    def test_csv_seventeen_digit_floats(self):
        emit_table([[math.pi]], ["v"], "csv", "pi.csv", {})
        assert read("pi.csv").decode() == "v\n3.1415926535897931\n"

    def test_empty_rows_header_only(self):
        emit_table([], ["a", "b"], "csv", "e.csv", {})
        assert read("e.csv").decode() == "a,b\n"

    def test_single_row_two_lines(self):
        emit_table([[1, 2]], ["a", "b"], "csv", "s.csv", {})
        assert len(read("s.csv").decode().splitlines()) == 2

    def test_json_structure(self):
        emit_table([[1, None, True]], ["n", "x", "ok"], "json", "t.json", {"k": 1})
        payload = json.loads(read("t.json"))
        assert set(payload) == {"metadata", "schema", "rows"}
        assert payload["schema"] == ["n", "x", "ok"]
        assert payload["rows"] == [[1, None, True]]
        assert payload["metadata"] == {"k": 1}

    def test_schema_width_enforced(self):
        with pytest.raises(ValueError):
            emit_table([[1, 2]], ["a"], "csv", "w.csv", {})

    def test_unknown_format_rejected(self):
        with pytest.raises(UsageError):
            emit_table([], ["a"], "xml", "t.xml", {})


class TestRunsAndValues:
    def test_inner_values_match_library(self, capsys):
        assert run("inner", "--trunc", "5") == 0
        out = capsys.readouterr().out.splitlines()
        assert out == ["inner_series.csv", "inner_series.csv.meta.json"]
        lines = read("inner_series.csv").decode().splitlines()
        assert lines[0] == "n,a_n,A_n,M_n,main_term"
        first = lines[1].split(",")
        assert first[0] == "0"
        assert first[1] == format(math.exp(-1.0), ".17g")
        assert first[3] == "" and first[4] == ""  # no mean or asymptotic at n=0
        second = lines[2].split(",")
        assert second[1] == format(-2.0 * math.exp(-1.0), ".17g")
        assert second[3] == format(math.exp(-1.0), ".17g")

    def test_gap_uses_certified_window_norm(self):
        assert run("gap", "--trunc", "50", "--horizons", "5", "--c", "0") == 0
        row = read("gap_gap.csv").decode().splitlines()[1].split(",")
        assert row[2] == "5"  # sum_norm_sq == n for a certified inner series
        assert row[4] == "1"  # gap at c=0

    def test_cesaro_zero_order_header_only(self):
        assert run("cesaro", "--trunc", "0") == 0
        assert read("cesaro_cesaro.csv").decode() == "n,partial_sum,cesaro_mean\n"

    def test_prop6_row_matches_report(self):
        assert run("prop6", "--n-range", "2..4", "--k-max", "12") == 0
        lines = read("prop6_bounds.csv").decode().splitlines()
        rep = dyadic_midpoint_report(2, 12)
        row = lines[1].split(",")
        assert row[0] == "2"
        assert row[1] == format(rep.r, ".17g")
        assert row[6] == format(rep.product, ".17g")
        assert row[9:15] == ["true"] * 6

    def test_prop2_summary_matches_library(self):
        from mgapprox import ExactModel

        assert run("prop2", "--depth", "2", "--out", "json") == 0
        payload = json.loads(read("prop2_summary.json"))
        row = payload["rows"][0]
        assert row[0] == 2
        assert row[1] == hannan_sum(ExactModel.build(2))
        assert row[5] is False and row[6] is True  # remote past is 2 e_0
        assert row[7] == 16 and row[8] is True

    def test_prop3_tables(self, capsys):
        assert run("prop3", "--K", "2", "--samples", "50") == 0
        paths = capsys.readouterr().out.splitlines()
        assert paths == [
            "prop3_params.csv", "prop3_params.csv.meta.json",
            "prop3_norms.csv", "prop3_norms.csv.meta.json",
            "prop3_decode.csv", "prop3_decode.csv.meta.json",
        ]
        decode = read("prop3_decode.csv").decode().splitlines()[1].split(",")
        assert decode[0] == "50" and decode[1] == "50" and decode[2] == "0"
        norms = read("prop3_norms.csv").decode().splitlines()
        # horizons default: decades merged with the synthesized phi values
        meta = json.loads(read("prop3_norms.csv.meta.json"))
        assert meta["config"]["horizons"] == sorted(
            set(10**j for j in range(7)) | {13, 14}
        )
        assert len(norms) == 1 + len(meta["config"]["horizons"])

    def test_prop3_power_rule(self):
        assert run("prop3", "--K", "2", "--samples", "20", "--b-rule", "power:0.25") == 0
        meta = json.loads(read("prop3_params.csv.meta.json"))
        assert meta["config"]["b_rule"] == "power:0.25"


class TestDeterminism:
    def test_csv_reruns_byte_identical(self):
        assert run("inner", "--trunc", "40", "--out-path", "one") == 0
        first = (read("one_series.csv"), read("one_series.csv.meta.json"))
        assert run("inner", "--trunc", "40", "--out-path", "one") == 0
        assert (read("one_series.csv"), read("one_series.csv.meta.json")) == first

    def test_json_reruns_byte_identical(self):
        args = ("prop3", "--K", "2", "--samples", "30", "--seed", "9",
                "--out", "json")
        assert run(*args) == 0
        first = read("prop3_decode.json")
        assert run(*args) == 0
        assert read("prop3_decode.json") == first

    def test_metadata_carries_no_timing(self):
        assert run("inner", "--trunc", "3") == 0
        meta = json.loads(read("inner_series.csv.meta.json"))
        assert set(meta) == {"config", "versions"}
        text = json.dumps(meta)
        assert "time" not in text and "wall" not in text


class TestConfigResolution:
    def test_file_supplies_defaults(self, tmp_path):
        (tmp_path / "run.cfg").write_text("trunc = 7\n# comment\nout = csv\n")
        assert run("inner", "--config", "run.cfg") == 0
        meta = json.loads(read("inner_series.csv.meta.json"))
        assert meta["config"]["trunc"] == 7

    def test_flags_beat_file(self, tmp_path):
        (tmp_path / "run.cfg").write_text("trunc=7\n")
        assert run("inner", "--config", "run.cfg", "--trunc", "3") == 0
        meta = json.loads(read("inner_series.csv.meta.json"))
        assert meta["config"]["trunc"] == 3

    def test_dashed_keys_accepted(self, tmp_path):
        (tmp_path / "run.cfg").write_text("out-path=alt\ntrunc=2\n")
        assert run("inner", "--config", "run.cfg") == 0
        assert os.path.exists("alt_series.csv")

    def test_unknown_key_rejected(self, tmp_path, capsys):
        (tmp_path / "run.cfg").write_text("bogus=1\n")
        assert run("inner", "--config", "run.cfg") == 2
        assert "bogus" in capsys.readouterr().err

    def test_config_cannot_nest(self, tmp_path):
        (tmp_path / "run.cfg").write_text("config=other.cfg\n")
        assert run("inner", "--config", "run.cfg") == 2

    def test_missing_file_reported(self):
        assert run("inner", "--config", "absent.cfg") == 2

    def test_malformed_line_reported(self, tmp_path):
        (tmp_path / "run.cfg").write_text("just a line\n")
        assert run("inner", "--config", "run.cfg") == 2

    def test_out_dir_env_prefixes_relative_stems(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "routed"))
        assert run("inner", "--trunc", "2") == 0
        assert os.path.exists(tmp_path / "routed" / "inner_series.csv")

    def test_absolute_stem_ignores_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "routed"))
        stem = str(tmp_path / "direct")
        assert run("inner", "--trunc", "2", "--out-path", stem) == 0
        assert os.path.exists(str(tmp_path / "direct_series.csv"))


class TestExitStatus:
    def test_unknown_flag(self, capsys):
        assert run("inner", "--badflag", "1") == 2
        capsys.readouterr()

    def test_unknown_command(self, capsys):
        assert run("nonsense") == 2
        capsys.readouterr()

    def test_bad_value(self, capsys):
        assert run("prop2", "--depth", "99") == 2
        assert "depth" in capsys.readouterr().err

    def test_bad_span(self, capsys):
        assert run("prop6", "--n-range", "9..3") == 2
        capsys.readouterr()

    def test_bad_list_entry(self, capsys):
        assert run("gap", "--horizons", "0") == 2
        capsys.readouterr()

    def test_bad_format(self, capsys):
        assert run("inner", "--out", "xml") == 2
        capsys.readouterr()

    def test_invariant_violation_status(self, monkeypatch, capsys):
        def boom(level, k_max):
            raise InvariantViolation("forced for the status check")

        monkeypatch.setattr("mgapprox.cli.dyadic_midpoint_report", boom)
        assert run("prop6") == 3
        assert "invariant violation" in capsys.readouterr().err

    def test_unexpected_error_status(self, monkeypatch, capsys):
        def boom(level, k_max):
            raise RuntimeError("forced for the status check")

        monkeypatch.setattr("mgapprox.cli.dyadic_midpoint_report", boom)
        assert run("prop6") == 1
        assert "RuntimeError" in capsys.readouterr().err

    def test_wall_time_on_stderr_only(self, capsys):
        assert run("inner", "--trunc", "2") == 0
        captured = capsys.readouterr()
        assert "# wall_time_s=" in captured.err
        assert "wall_time" not in captured.out
