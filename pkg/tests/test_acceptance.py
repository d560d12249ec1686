"""One test group per acceptance criterion; the terminal summary prints PASS/FAIL per group."""

import itertools
import json
import time

import nodesemver
import pytest

from jsreach.advisories import load_advisories
from jsreach.classifier import ClassificationReport, Verdict, decide
from jsreach.cli import main
from jsreach.corpus import ConfusionMatrix, metrics, summarize
from jsreach.extractor import scan_file, scan_project
from jsreach.pipeline import analyze_pair
from jsreach.project import discover_sources
from jsreach.semver import compare, parse_range, ranges_intersect, satisfies

import synthetic
from conftest import write_tree
from test_classifier import COMBINATIONS, oracle
from test_semver import RANGE_FIXTURES, UNIVERSE
from test_syntax_matrix import NEGATIVE, POSITIVE, matches, read_fixture

C1 = "1 metrics reproduction"
C2 = "2 aggregation reproduction"
C3 = "3 syntax-matrix recall/precision"
C4 = "4 classifier truth table"
C5 = "5 semver oracle equivalence"
C6 = "6 extraction speed"
C7 = "7 determinism"
C8 = "8 exposure logic"


# -- 1 ------------------------------------------------------------------------

@pytest.mark.acceptance(C1)
def test_metrics_reproduction():
    shown = metrics(ConfusionMatrix(n=60, tp=11, fp=0, tn=39, fn=10)).rounded(3)
    expected = {"accuracy": 0.833, "miss_rate": 0.167, "tpr": 0.524, "fpr": 0.0, "tnr": 1.0, "fnr": 0.476}
    for key, value in expected.items():
        print(f"  {key:<10} {shown[key]!s:>6} (want {value})")
    assert shown == expected


# -- 2 ------------------------------------------------------------------------

@pytest.mark.acceptance(C2)
def test_aggregation_reproduction():
    counts = {Verdict.CLEAN: 249, Verdict.REACHED: 33, Verdict.LISTED_ONLY: 445, Verdict.NO_DATA: 53}
    reports = [
        ClassificationReport(f"client{i}", f"ADV{i % 78:02d}", v)
        for i, v in enumerate(v for v, n in counts.items() for _ in range(n))
    ]
    start = time.perf_counter()
    s = summarize(reports)
    assert time.perf_counter() - start < 1.0
    assert s.total == 780
    assert {Verdict(k): n for k, n in s.totals.items() if n} == counts


# -- 3 ------------------------------------------------------------------------

@pytest.mark.acceptance(C3)
def test_syntax_matrix_corpus_size():
    assert len(POSITIVE) >= 20 and len(NEGATIVE) >= 15


@pytest.mark.acceptance(C3)
def test_syntax_matrix_recall_and_precision():
    annotated = found = unannotated = 0
    misses = []
    for path in POSITIVE + NEGATIVE:
        advisory, expected, _ = read_fixture(path)
        scan = scan_file(path.parent, path.name, advisory)
        assert scan.error is None, (path.name, scan.error)
        annotated += sum(expected.values())
        if matches(expected, scan.calls):
            found += sum(expected.values())
        else:
            misses.append(path.name)
            unannotated += max(0, len(scan.calls) - sum(expected.values()))
        if path in NEGATIVE:
            unannotated += len(scan.calls)
    print(f"  annotated={annotated} recalled={found} unannotated={unannotated}")
    assert misses == [] and found == annotated and unannotated == 0


# -- 4 ------------------------------------------------------------------------

@pytest.mark.acceptance(C4)
def test_classifier_truth_table():
    assert len(COMBINATIONS) == 32
    for manifest, declared, imports, calls, failed in COMBINATIONS:
        got = decide(manifest, declared, int(imports), int(calls), failed)
        assert got is oracle(manifest, declared, imports, calls, failed)


# -- 5 ------------------------------------------------------------------------

@pytest.mark.acceptance(C5)
def test_semver_fixture_count():
    assert len(RANGE_FIXTURES) >= 30


@pytest.mark.acceptance(C5)
def test_satisfies_matches_enumeration():
    for text in RANGE_FIXTURES:
        r = parse_range(text)
        for v in UNIVERSE:
            assert satisfies(v, r) == nodesemver.satisfies(str(v), text, loose=False), (text, str(v))


@pytest.mark.acceptance(C5)
def test_intersection_matches_enumeration():
    members = {t: {v for v in UNIVERSE if nodesemver.satisfies(str(v), t, loose=False)} for t in RANGE_FIXTURES}
    for a, b in itertools.product(RANGE_FIXTURES, repeat=2):
        assert ranges_intersect(parse_range(a), parse_range(b)) == bool(members[a] & members[b]), (a, b)


@pytest.mark.acceptance(C5)
def test_compare_total_order_all_pairs():
    sign = {}
    for a, b in itertools.product(UNIVERSE, repeat=2):
        c = compare(a, b)
        assert c == -compare(b, a)
        sign[a, b] = c
    # transitivity over all triples follows from agreement with a linear index
    for (i, a), (j, b) in itertools.product(enumerate(UNIVERSE), repeat=2):
        assert sign[a, b] == (i > j) - (i < j)


# -- 6 ------------------------------------------------------------------------

ADV = {"id": "A1", "package": "lodash", "affected": "<4.17.5", "symbols": ["merge"], "fixed": "4.17.5"}


def best_of(runs, fn):
    times = []
    for _ in range(runs):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


@pytest.mark.acceptance(C6)
@pytest.mark.parametrize("files, size, limit", [(50, 100_000, 0.73), (500, 1_000_000, 2.0)])
def test_extraction_speed(tmp_path, files, size, limit):
    root = synthetic.make_project(tmp_path / "p", files, size)
    sources = discover_sources(root)
    total = sum((root / f).stat().st_size for f in sources.files)
    advisory = load_advisories(json.dumps(ADV))[0]
    result = scan_project(sources, advisory)
    assert len(sources.files) == files and result.parse_failures == () and result.calls
    elapsed = best_of(3, lambda: scan_project(sources, advisory))
    print(f"  {files} files, {total} bytes: {elapsed:.3f}s (limit {limit}s)")
    assert elapsed < limit


# -- 7 ------------------------------------------------------------------------

def _cli_bytes(argv, tmp_path, name):
    out = tmp_path / name
    code = main([str(a) for a in argv] + ["--output", str(out), "--no-timing"])
    assert code in (0, 2, 3)
    return out.read_bytes()


@pytest.mark.acceptance(C7)
@pytest.mark.parametrize("fmt", ["json", "text"])
def test_analyze_is_byte_identical(tmp_path, fmt):
    root = synthetic.make_project(tmp_path / "p", 40, 80_000, seed=7)
    write_tree(root, {"broken.js": "let = ;", "node_modules/lodash/package.json": {"version": "4.10.0"}})
    adv = tmp_path / "adv.json"
    adv.write_text(json.dumps([ADV]), encoding="utf-8")
    base = ["analyze", "--project", root, "--advisories", adv, "--format", fmt]
    outputs = [_cli_bytes(base + ["--jobs", j], tmp_path, f"o{i}") for i, j in enumerate(["1", "1", "8", "8"])]
    assert len(set(outputs)) == 1 and outputs[0]


@pytest.mark.acceptance(C7)
@pytest.mark.parametrize("fmt", ["json", "text"])
def test_batch_is_byte_identical(corpus, tmp_path, fmt):
    manifest, adv = corpus
    outputs = []
    for i, jobs in enumerate(["1", "1", "8", "8"]):
        reports = tmp_path / f"r{i}.json"
        argv = ["batch", "--manifest", manifest, "--advisories", adv, "--format", fmt,
                "--jobs", jobs, "--reports", reports]
        outputs.append(_cli_bytes(argv, tmp_path, f"b{i}") + reports.read_bytes())
    assert len(set(outputs)) == 1


# -- 8 ------------------------------------------------------------------------

EXPOSURE_CASES = [
    # affected, fixed, installed, declared, position
    ("<4.17.5", "4.17.5", "4.10.0", "^4.0.0", "inside"),
    ("<4.17.5", "4.17.5", "4.17.5", "^4.0.0", "at-fix"),
    ("<4.17.5", "4.17.5", "4.17.21", "^4.0.0", "outside"),
    (">=1.0.0 <1.10.0", "1.10.0", "1.9.9", "^1.0.0", "inside"),
    (">=1.0.0 <1.10.0", "1.10.0", "1.10.0", "^1.0.0", "at-fix"),
    (">=1.0.0 <1.10.0", "1.10.0", "0.9.0", "^0.9.0", "outside"),
    ("<2.1.0 || >=3.0.0 <3.0.2", "3.0.2", "3.0.1", "^3.0.0", "inside"),
    ("<2.1.0 || >=3.0.0 <3.0.2", "3.0.2", "3.0.2", "^3.0.0", "at-fix"),
    ("<2.1.0 || >=3.0.0 <3.0.2", "3.0.2", "2.5.0", "^2.0.0", "outside"),
    ("<1.2.3-beta.2", "1.2.3-beta.2", "1.2.3-beta.1", "1.2.3-beta.1", "inside"),
    ("<1.2.3-beta.2", "1.2.3-beta.2", "1.2.3-beta.2", "1.2.3-beta.2", "at-fix"),
    (">=1.2.0 <1.2.3", "1.2.3", "1.2.3-alpha", "1.2.3-alpha", "outside"),
]


def _exposure_project(tmp_path, i, declared, installed):
    files = {
        "package.json": {"dependencies": {"pkg": declared}},
        "index.js": "const p = require('pkg');\np.run();\n",
    }
    if installed is not None:
        files["node_modules/pkg/package.json"] = {"version": installed}
    return write_tree(tmp_path / f"c{i}", files)


def _advisory(affected, fixed):
    doc = {"id": "E1", "package": "pkg", "affected": affected, "symbols": ["run"], "fixed": fixed}
    return load_advisories(json.dumps(doc))[0]


@pytest.mark.acceptance(C8)
@pytest.mark.parametrize("case", EXPOSURE_CASES, ids=lambda c: f"{c[4]}-{c[2]}")
def test_exposure_from_installed_copy(tmp_path, case):
    affected, fixed, installed, declared, position = case
    report = analyze_pair(_exposure_project(tmp_path, 0, declared, installed), _advisory(affected, fixed))
    oracle_value = nodesemver.satisfies(installed, affected, loose=False)
    assert report.version_affected is oracle_value
    assert report.verdict is Verdict.REACHED
    if position == "inside":
        assert report.version_affected is True
    elif position == "at-fix":
        assert report.version_affected is False


@pytest.mark.acceptance(C8)
@pytest.mark.parametrize("declared, expected", [
    ("^3.1.0", False), ("~3.0.0", True), ("^2.0.0", True), ("3.0.2", False), ("1.x", True),
])
def test_exposure_from_declared_range(tmp_path, declared, expected):
    affected = "<2.1.0 || >=3.0.0 <3.0.2"
    report = analyze_pair(_exposure_project(tmp_path, 1, declared, None), _advisory(affected, "3.0.2"))
    # brute force over a grid that contains every boundary used above
    grid = [f"{a}.{b}.{c}" for a in range(5) for b in range(4) for c in range(4)]
    oracle_value = any(nodesemver.satisfies(v, declared) and nodesemver.satisfies(v, affected) for v in grid)
    assert report.version_affected is oracle_value is expected


@pytest.mark.acceptance(C8)
def test_unresolvable_declaration_has_no_exposure(tmp_path):
    report = analyze_pair(_exposure_project(tmp_path, 2, "github:o/pkg", None), _advisory("<1.0.0", "1.0.0"))
    assert report.version_affected is None
