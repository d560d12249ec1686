import json
import subprocess
import sys

import pytest

from jsreach.classifier import ClassificationReport, Verdict
from jsreach.cli import exit_code, main

from conftest import CLIENTS, write_tree


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def client(tmp_path):
    def make(name):
        return write_tree(tmp_path / name, CLIENTS[name])
    return make


class TestAnalyze:
    def test_clean_project(self, client, advisory_file, capsys):
        code, out, _ = run(["analyze", "--project", client("clean"), "--advisories", advisory_file,
                            "--format", "json"], capsys)
        assert code == 0
        [r] = json.loads(out)
        assert r["verdict"] == "Clean" and r["advisory"] == "A1" and r["version_affected"] is True

    def test_reached_project(self, client, advisory_file, capsys):
        code, out, _ = run(["analyze", "--project", client("reached"), "--advisories", advisory_file], capsys)
        assert code == 2
        assert "verdict: Reached" in out
        assert "  index.js:2:28  _.merge" in out
        assert "  lib/util.js:2:23  merge" in out

    def test_all_no_data(self, client, advisory_file, capsys):
        code, out, _ = run(["analyze", "--project", client("nodata"), "--advisories", advisory_file,
                            "--format", "json"], capsys)
        assert code == 3
        assert {r["verdict"] for r in json.loads(out)} == {"NoData"}

    def test_unrelated_project_has_no_reports(self, tmp_path, advisory_file, capsys):
        root = write_tree(tmp_path / "p", {"package.json": {"dependencies": {"express": "4.0.0"}}})
        code, out, _ = run(["analyze", "--project", root, "--advisories", advisory_file, "--format", "json"], capsys)
        assert (code, out) == (0, "[]\n")

    def test_missing_advisory_file(self, client, tmp_path, capsys):
        code, _, err = run(["analyze", "--project", client("clean"), "--advisories", tmp_path / "nope.json"], capsys)
        assert code == 1 and "error" in err

    def test_missing_project(self, tmp_path, advisory_file, capsys):
        code, _, err = run(["analyze", "--project", tmp_path / "nope", "--advisories", advisory_file], capsys)
        assert code == 1 and err

    def test_usage_error_exits_one(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["analyze"])
        assert info.value.code == 1

    @pytest.mark.parametrize("jobs", ["0", "x"])
    def test_bad_jobs(self, client, advisory_file, jobs, capsys):
        with pytest.raises(SystemExit) as info:
            main(["analyze", "--project", str(client("clean")), "--advisories", str(advisory_file), "--jobs", jobs])
        assert info.value.code == 1

    def test_lenient_advisories(self, client, tmp_path, capsys):
        adv = tmp_path / "adv.json"
        adv.write_text(json.dumps({"id": "A1", "package": "lodash", "affected": "<4.17.5",
                                   "symbols": ["merge"], "severity": "high"}), encoding="utf-8")
        argv = ["analyze", "--project", client("clean"), "--advisories", adv]
        assert run(argv, capsys)[0] == 1
        assert run(argv + ["--lenient-advisories"], capsys)[0] == 0

    def test_output_file(self, client, advisory_file, tmp_path, capsys):
        out_file = tmp_path / "r.json"
        code, out, _ = run(["analyze", "--project", client("reached"), "--advisories", advisory_file,
                            "--format", "json", "--output", out_file], capsys)
        assert code == 2 and out == ""
        assert json.loads(out_file.read_text())[0]["verdict"] == "Reached"

    def test_no_timing_zeroes_elapsed(self, client, advisory_file, capsys):
        _, out, _ = run(["analyze", "--project", client("reached"), "--advisories", advisory_file,
                         "--format", "json", "--no-timing"], capsys)
        assert all(r["elapsed_seconds"] == 0 for r in json.loads(out))


class TestCorpusCommands:
    def test_batch_json(self, corpus, capsys):
        manifest, adv = corpus
        code, out, _ = run(["batch", "--manifest", manifest, "--advisories", adv, "--format", "json"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["totals"] == {"Reached": 2, "Clean": 1, "ListedOnly": 2, "NoData": 1, "NotListed": 0}
        assert doc["confusion"] == {"n": 5, "tp": 2, "fp": 0, "tn": 3, "fn": 0}

    def test_batch_reports_and_figures(self, corpus, tmp_path, capsys):
        manifest, adv = corpus
        reports, figs = tmp_path / "reports.json", tmp_path / "figs"
        code, out, _ = run(["batch", "--manifest", manifest, "--advisories", adv,
                            "--reports", reports, "--figures", figs], capsys)
        assert code == 0 and "clients: 6" in out
        assert len(json.loads(reports.read_text())) == 6
        assert {p.name for p in figs.iterdir()} >= {"verdicts.png", "per_advisory.csv", "reports.csv"}

    def test_metrics_text(self, corpus, capsys):
        manifest, adv = corpus
        code, out, _ = run(["metrics", "--manifest", manifest, "--advisories", adv], capsys)
        assert code == 0
        assert "Accuracy                  1.000" in out

    def test_metrics_without_labels(self, corpus, tmp_path, capsys):
        _, adv = corpus
        unlabeled = tmp_path / "m.csv"
        unlabeled.write_text("client_path,advisory_id,label\nx,A1,\n", encoding="utf-8")
        assert run(["metrics", "--manifest", unlabeled, "--advisories", adv], capsys)[0] == 1

    def test_unknown_advisory_in_manifest(self, corpus, tmp_path, capsys):
        _, adv = corpus
        bad = tmp_path / "m.csv"
        bad.write_text("client_path,advisory_id,label\nx,ZZZ,\n", encoding="utf-8")
        code, _, err = run(["batch", "--manifest", bad, "--advisories", adv], capsys)
        assert code == 1 and "ZZZ" in err


def _report(verdict):
    return ClassificationReport("c", "A", verdict)


@pytest.mark.parametrize("verdicts, code", [
    ([], 0),
    ([Verdict.CLEAN, Verdict.LISTED_ONLY], 0),
    ([Verdict.CLEAN, Verdict.REACHED, Verdict.NO_DATA], 2),
    ([Verdict.NO_DATA, Verdict.NO_DATA], 3),
    ([Verdict.NO_DATA, Verdict.CLEAN], 0),
])
def test_exit_code_is_a_function_of_verdicts(verdicts, code):
    assert exit_code([_report(v) for v in verdicts]) == code
    assert exit_code([_report(v) for v in reversed(verdicts)]) == code


def test_module_entry_point(client, advisory_file):
    proc = subprocess.run([sys.executable, "-m", "jsreach", "analyze", "--project", str(client("reached")),
                           "--advisories", str(advisory_file)], capture_output=True, text=True)
    assert proc.returncode == 2 and "Reached" in proc.stdout
