"""Report documents and the command-line front end."""

import json
import subprocess
import sys

import pytest

from minimal2 import cli, report
from minimal2.report import Report, RunConfig, census_csv


class TestRunConfig:
    def test_defaults_roundtrip(self):
        cfg = RunConfig(command="census")
        back = RunConfig.from_dict(cfg.to_json_dict())
        assert back == cfg

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError):
            RunConfig.from_dict({"command": "census", "bogus": 1})

    def test_unknown_command_rejected(self):
        with pytest.raises(ValueError):
            RunConfig(command="frobnicate")

    def test_bounds_validated(self):
        with pytest.raises(ValueError):
            RunConfig(command="census", level_bound=12)
        with pytest.raises(ValueError):
            RunConfig(command="census", index_bound=0)
        with pytest.raises(ValueError):
            RunConfig(command="falsify", prime=7)
        with pytest.raises(ValueError):
            RunConfig(command="verify-all", profile="exhaustive")
        with pytest.raises(ValueError):
            RunConfig(command="quadfamily", n_max=0)


class TestReportDocument:
    def test_json_is_stable_and_sorted(self):
        rep = Report(command="quadfamily",
                     config=RunConfig(command="quadfamily").to_json_dict(),
                     results={"b": 1, "a": 2}, passed=True)
        text = rep.to_json()
        assert text == rep.to_json()
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")
        parsed = json.loads(text)
        assert parsed["schema_version"] == report.SCHEMA_VERSION
        assert parsed["passed"] is True

    def test_no_timing_fields(self, census8):
        cfg = RunConfig(command="census", level_bound=8)
        results, passed, _ = report._run_census(cfg, None)
        text = Report(command="census", config=cfg.to_json_dict(),
                      results=results, passed=passed).to_json()
        for word in ("time", "elapsed", "seconds", "duration"):
            assert word not in text

    def test_identical_runs_are_byte_identical(self, tmp_path):
        cfg = RunConfig(command="quadfamily", n_max=8,
                        out_path=str(tmp_path / "a.json"))
        report.run(cfg)
        first = (tmp_path / "a.json").read_bytes()
        report.run(cfg)
        assert (tmp_path / "a.json").read_bytes() == first

    def test_census_csv_shape(self, census8):
        text = census_csv(census8)
        lines = text.strip().split("\n")
        assert lines[0] == ("level,index,genus,contains_minus_I,modulus,"
                            "generators,canonical_key")
        assert len(lines) == 1 + len(census8)
        first = lines[1].split(",")
        assert first[0] == "8" and first[1] == "24" and first[2] == "0"
        gens = first[5].split(";")
        assert all(len(g.split(":")) == 4 for g in gens)

    def test_csv_only_for_census(self, tmp_path):
        cfg = RunConfig(command="quadfamily", csv_path=str(tmp_path / "x.csv"))
        with pytest.raises(ValueError):
            report.run(cfg)


class TestVerifyAllDriver:
    def test_criterion_failure_is_reported_not_raised(self, monkeypatch):
        # negative control: corrupt the labeler and the criterion must fail
        monkeypatch.setattr(report.modcurve, "label", lambda G: (0, 0, 0))
        cfg = RunConfig(command="verify-all")
        detail, ok = report._criterion_genus_oracle(cfg, None, [])
        assert ok is False
        assert detail["classical"]["X(1)"] == [0, 0, 0]

    def test_classical_groups_are_the_expected_curves(self):
        got = {name: report.modcurve.label(G)
               for name, G in report._classical_groups().items()}
        assert got == {"X(1)": (1, 1, 0), "X0(2)": (2, 3, 0),
                       "X(2)": (2, 6, 0)}

    def test_driver_records_criterion_exceptions(self, monkeypatch):
        # stub out every criterion; one of them blows up, and the driver
        # must record the failure and keep going
        monkeypatch.setattr(report.minimality, "census",
                            lambda *a, **k: [])
        good = lambda *a, **k: ({}, True)

        def boom(*a, **k):
            raise RuntimeError("criterion exploded")

        for name in ("_criterion_unit_square_lemma",
                     "_criterion_det_full_maximal", "_criterion_genus0_census",
                     "_criterion_frattini_rank", "_criterion_genus_oracle",
                     "_criterion_lie_check", "_criterion_round_trip",
                     "_criterion_falsify", "_criterion_nilpotent",
                     "_criterion_quadfamily"):
            monkeypatch.setattr(report, name, good)
        monkeypatch.setattr(report, "_criterion_families", boom)
        results, passed, criteria = report._run_verify_all(
            RunConfig(command="verify-all"), None)
        assert passed is False
        bad = [c for c in criteria if not c["pass"]]
        assert len(bad) == 1
        assert bad[0]["name"] == "family-identities"
        assert "criterion exploded" in bad[0]["detail"]["error"]
        assert sum(c["pass"] for c in criteria) == len(criteria) - 1


class TestCli:
    def test_quadfamily_end_to_end(self, tmp_path, capsys):
        out = tmp_path / "qf.json"
        rc = cli.main(["quadfamily", "--n-max", "12", "--out", str(out),
                       "--quiet"])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["command"] == "quadfamily"
        assert doc["passed"] is True
        assert len(doc["results"]["reports"]) == 12
        text = capsys.readouterr().out
        assert "pinned" in text or "label" in text

    def test_check_and_genus_on_saved_group(self, tmp_path, capsys, census8):
        gpath = tmp_path / "g.json"
        gpath.write_text(json.dumps(census8[0].subgroup().to_json_dict()))
        rc = cli.main(["check", "--group", str(gpath), "--quiet"])
        assert rc == 0
        assert "minimal: True" in capsys.readouterr().out
        rc = cli.main(["genus", "--group", str(gpath), "--quiet"])
        assert rc == 0
        assert "8.24.0" in capsys.readouterr().out

    def test_family_check_label(self, capsys):
        rc = cli.main(["family-check", "--label", "16.48.0.25", "--trials",
                       "4", "--primes", "3", "--quiet"])
        assert rc == 0
        assert "ok" in capsys.readouterr().out

    def test_unknown_family_label_fails_cleanly(self, capsys):
        rc = cli.main(["family-check", "--label", "1.1.1.1", "--quiet"])
        assert rc == 1
        assert "error" in capsys.readouterr().err.lower()

    def test_bad_arguments_exit_2(self):
        assert cli.main(["census", "--level-bound", "12"]) == 2
        assert cli.main(["falsify", "--prime", "7"]) == 2

    def test_csv_flag_only_on_census(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            cli.main(["quadfamily", "--quiet",
                      "--csv", str(tmp_path / "no.csv")])
        assert exc.value.code == 2

    def test_subprocess_invocation(self, tmp_path):
        out = tmp_path / "fam.json"
        proc = subprocess.run(
            [sys.executable, "-m", "minimal2.cli", "family-check",
             "--label", "8.24.0.44", "--trials", "3", "--primes", "2",
             "--out", str(out)],
            capture_output=True, text=True, timeout=300)
        assert proc.returncode == 0, proc.stderr
        doc = json.loads(out.read_text())
        assert doc["passed"] is True
        assert doc["results"]["families"]["8.24.0.44"]["pass"] is True
