"""Command-line contract tests: config schema, exit codes, file formats."""

import io
import json
from pathlib import Path

import pytest
import yaml

from creditscreen.cli import (
    EXIT_NON_SEPARATING,
    EXIT_OK,
    EXIT_VALIDATION,
    cmd_reversal,
    main,
    parse_config,
    ConfigError,
)


def _write_config(tmp_path, name="config.yaml", **overrides):
    doc = {
        "model": {
            "T": 3,
            "deltas": [0.5, 1.0],
            "p": [0.5, 0.5],
            "q": [0.5, 0.5],
            "R": 1.5,
            "income": {"kind": "total_npv", "value": 3.0},
            "utility": {"kind": "sqrt_power", "param": 0.5},
        },
        "run": {"section": 4, "delta1Index": 2},
    }
    for key, value in overrides.items():
        parts = key.split(".")
        node = doc
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return path


def _section3_config(tmp_path, **overrides):
    base = {
        "model.T": 4,
        "model.deltas": [0.4, 0.9],
        "model.p": [1.0, 0.0],
        "model.q": [0.75, 0.25],
        "model.R": 1.0,
        "run.section": 3,
    }
    base.update(overrides)
    base.pop("run.delta1Index", None)
    path = _write_config(tmp_path, **base)
    doc = yaml.safe_load(path.read_text())
    doc["run"].pop("delta1Index", None)
    path.write_text(yaml.safe_dump(doc))
    return path


class TestConfigParsing:
    def test_valid_document(self, tmp_path):
        run = parse_config(_write_config(tmp_path))
        assert run.section == 4
        assert run.delta1_index == 2
        assert run.model.T == 3
        assert run.formats == ["csv", "json"]

    def test_unknown_key_rejected_with_path(self, tmp_path):
        path = _write_config(tmp_path, **{"model.extra": 1})
        with pytest.raises(ConfigError) as e:
            parse_config(path)
        assert "model" in str(e.value) and "extra" in str(e.value)

    def test_missing_key_reported(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text(yaml.safe_dump({"model": {"T": 3}, "run": {"section": 3}}))
        with pytest.raises(ConfigError) as e:
            parse_config(path)
        assert "missing keys" in str(e.value)

    def test_wrong_type_reported_with_path(self, tmp_path):
        path = _write_config(tmp_path, **{"model.R": "high"})
        with pytest.raises(ConfigError) as e:
            parse_config(path)
        assert "model.R" in str(e.value)

    def test_bad_section(self, tmp_path):
        path = _write_config(tmp_path, **{"run.section": 5})
        with pytest.raises(ConfigError) as e:
            parse_config(path)
        assert "run.section" in str(e.value)

    def test_sweep_forms(self, tmp_path):
        path = _write_config(tmp_path, **{"run.sweep": {"tMin": 3, "tMax": 6}})
        assert parse_config(path).sweep_t == [3, 4, 5, 6]
        path = _write_config(tmp_path, **{"run.sweep": {"nList": [5, 10]}})
        assert parse_config(path).sweep_n == [5, 10]
        path = _write_config(tmp_path, **{"run.sweep": {"tMin": 3}})
        with pytest.raises(ConfigError):
            parse_config(path)

    def test_bad_formats(self, tmp_path):
        path = _write_config(tmp_path, **{"output.formats": ["xml"]})
        with pytest.raises(ConfigError):
            parse_config(path)


class TestSolveSection3:
    def test_outputs_and_schema(self, tmp_path):
        cfg = _section3_config(tmp_path)
        out = tmp_path / "out"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        path_csv = (out / "path.csv").read_text().splitlines()
        assert path_csv[0] == "t,v_eq,c_eq,v_eff,c_eff,corner_eq,corner_eff"
        assert len(path_csv) == 1 + 4
        welfare = json.loads((out / "welfare.json").read_text())
        assert set(welfare) >= {"W_A", "W_E", "V_B", "V_E", "tStar",
                                "gapSeries"}
        assert welfare["W_A"] >= welfare["W_E"]
        mech = json.loads((out / "mechanism.json").read_text())
        assert mech["rootIndex"] == 1
        assert len(mech["onPath"]) == 4
        assert {o["t"] for o in mech["offPath"]} == {2, 3}

    def test_deterministic_output(self, tmp_path):
        cfg = _section3_config(tmp_path)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["solve", "--config", str(cfg), "--out", str(out1)])
        main(["solve", "--config", str(cfg), "--out", str(out2)])
        for name in ("path.csv", "welfare.json", "mechanism.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_twelve_significant_digits(self, tmp_path):
        cfg = _section3_config(tmp_path)
        out = tmp_path / "out"
        main(["solve", "--config", str(cfg), "--out", str(out)])
        row = (out / "path.csv").read_text().splitlines()[1].split(",")
        mantissa = row[1].replace(".", "").replace("-", "").lstrip("0")
        assert len(mantissa) >= 11

    def test_wrong_beliefs_exit_2(self, tmp_path, capsys):
        cfg = _section3_config(tmp_path, **{"model.p": [0.5, 0.5],
                                            "model.q": [0.5, 0.5]})
        assert main(["solve", "--config", str(cfg), "--out",
                     str(tmp_path / "o")]) == EXIT_VALIDATION
        assert "p1=1 required" in capsys.readouterr().err

    def test_fully_naive_boundary_accepted_with_note(self, tmp_path, capsys):
        cfg = _section3_config(tmp_path, **{"model.q": [0.0, 1.0]})
        out = tmp_path / "out"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) \
            == EXIT_OK
        assert "naive" in capsys.readouterr().err
        welfare = json.loads((out / "welfare.json").read_text())
        assert any("naive" in n for n in welfare["notes"])

    def test_sweep_gap_series(self, tmp_path):
        cfg = _section3_config(
            tmp_path,
            **{"model.income": {"kind": "per_period", "value": 1.0},
               "model.R": 1.1,
               "run.sweep": {"tMin": 3, "tMax": 6}})
        out = tmp_path / "out"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) \
            == EXIT_OK
        welfare = json.loads((out / "welfare.json").read_text())
        assert [e["T"] for e in welfare["gapSeries"]] == [3, 4, 5, 6]
        gaps = [e["benchmarkGap"] for e in welfare["gapSeries"]]
        assert gaps == sorted(gaps, reverse=True)


class TestSolveSection4:
    def test_outputs(self, tmp_path):
        cfg = _write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) \
            == EXIT_OK
        rows = (out / "screening_delta1_2.csv").read_text().splitlines()
        assert rows[0] == ("n,delta2,v1,w_n,z_n,c2,c3,contCostEq,"
                           "contCostEff,gap_g_n")
        assert len(rows) == 3
        euler = json.loads((out / "euler.json").read_text())
        entry = euler["entries"][0]
        assert entry["equilibriumEuler"]["maxAbsResidual"] <= 1e-8
        cc = entry["continuationCost"]
        assert cc["max"] == pytest.approx(3.57, abs=0.01)
        assert cc["min"] == pytest.approx(3.10, abs=0.01)
        assert cc["percentFall"] == pytest.approx(13.0, abs=1.0)
        gaps = (out / "backloading_gaps.csv").read_text().splitlines()
        assert gaps[0] == "delta1Index,n,delta2,gap_g_n"

    def test_cont_cost_column_monotone(self, tmp_path):
        cfg = _write_config(tmp_path)
        out = tmp_path / "out"
        main(["solve", "--config", str(cfg), "--out", str(out)])
        rows = (out / "screening_delta1_2.csv").read_text().splitlines()[1:]
        cc = [float(r.split(",")[7]) for r in rows]
        assert cc == sorted(cc)

    def test_all_initial_types_when_unspecified(self, tmp_path):
        cfg = _write_config(tmp_path)
        doc = yaml.safe_load(cfg.read_text())
        doc["run"].pop("delta1Index")
        cfg.write_text(yaml.safe_dump(doc))
        out = tmp_path / "out"
        main(["solve", "--config", str(cfg), "--out", str(out)])
        assert (out / "screening_delta1_1.csv").exists()
        assert (out / "screening_delta1_2.csv").exists()

    def test_log_config_includes_growth_table(self, tmp_path):
        cfg = _write_config(
            tmp_path,
            **{"model.utility": {"kind": "log"},
               "model.deltas": [0.5, 0.75, 1.0],
               "model.p": [1 / 3, 1 / 3, 1 / 3],
               "model.q": [1 / 3, 1 / 3, 1 / 3],
               "run.delta1Index": 3})
        out = tmp_path / "out"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) \
            == EXIT_OK
        euler = json.loads((out / "euler.json").read_text())
        assert "growthRatios" in euler["entries"][0]

    def test_non_separating_exit_4(self, tmp_path, capsys):
        cfg = _write_config(tmp_path, **{"model.p": [0.9, 0.1],
                                         "model.q": [0.1, 0.9],
                                         "run.delta1Index": 1})
        assert main(["solve", "--config", str(cfg), "--out",
                     str(tmp_path / "o")]) == EXIT_NON_SEPARATING
        err = capsys.readouterr().err
        assert "candidate" in err

    def test_format_flag_restricts_outputs(self, tmp_path):
        cfg = _write_config(tmp_path)
        out = tmp_path / "out"
        main(["solve", "--config", str(cfg), "--out", str(out),
              "--format", "csv"])
        assert (out / "screening_delta1_2.csv").exists()
        assert not (out / "euler.json").exists()


class TestVerify:
    def test_section4_passes(self, tmp_path, capsys):
        cfg = _write_config(tmp_path)
        assert main(["verify", "--config", str(cfg)]) == EXIT_OK
        out = capsys.readouterr().out
        payload = json.loads(out)
        assert payload["allPassed"]
        assert len(payload["checks"]) >= 8

    def test_section3_passes(self, tmp_path, capsys):
        cfg = _section3_config(tmp_path)
        assert main(["verify", "--config", str(cfg)]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["allPassed"]

    def test_desk_scale_guard(self, tmp_path):
        cfg = _write_config(tmp_path, **{"model.T": 6})
        assert main(["verify", "--config", str(cfg)]) == EXIT_VALIDATION


class TestFigures:
    def test_bundle(self, tmp_path):
        out = tmp_path / "figs"
        assert main(["figures", "--out", str(out)]) == EXIT_OK
        for name in ("figure1.csv", "figure2.csv", "figure3.csv"):
            text = (out / name).read_text().splitlines()
            series = [l for l in text if l.startswith("# series:")]
            header = next(l for l in text if not l.startswith("#"))
            assert len(series) == len(header.split(",")) - 1
        fig2 = (out / "figure2.csv").read_text().splitlines()
        data = [l.split(",") for l in fig2 if not l.startswith("#")][1:]
        c2_eq = [float(r[1]) for r in data]
        assert c2_eq == sorted(c2_eq, reverse=True)

    def test_annotated_monotonicity_matches_data(self, tmp_path):
        out = tmp_path / "figs"
        main(["figures", "--out", str(out)])
        for name in ("figure1.csv", "figure2.csv", "figure3.csv"):
            lines = (out / name).read_text().splitlines()
            series = {}
            for line in lines:
                if line.startswith("# series:"):
                    fields = line.split()
                    column = fields[2]
                    mono = [f for f in fields if f.startswith("monotone=")][0]
                    series[column] = mono.split("=")[1]
            header = next(l for l in lines if not l.startswith("#")).split(",")
            data = [l.split(",") for l in lines if not l.startswith("#")][1:]
            for col, mono in series.items():
                values = [float(r[header.index(col)]) for r in data]
                diffs = [b - a for a, b in zip(values, values[1:])]
                if mono == "increasing":
                    assert all(d > 0 for d in diffs), (name, col)
                elif mono == "decreasing":
                    assert all(d < 0 for d in diffs), (name, col)
                else:
                    assert all(abs(d) < 1e-9 for d in diffs), (name, col)


class TestReversal:
    def test_text_table(self):
        buf = io.StringIO()
        cmd_reversal(buf)
        text = buf.getvalue()
        assert "probability 0.75" in text
        assert "delayed always" in text
        assert "probability 1" in text
        assert "beta above one: yes" in text

    def test_cli_entry(self, capsys):
        assert main(["reversal"]) == EXIT_OK
        assert "probability 0.75" in capsys.readouterr().out


def test_missing_config_file_exit_2(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "nope.yaml"),
                 "--out", str(tmp_path)]) == EXIT_VALIDATION
