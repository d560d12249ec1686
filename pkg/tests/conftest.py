import json
from pathlib import Path

import pytest

from jsreach.advisories import load_advisories

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    criterion = _ACCEPTANCE_IDS.get(report.nodeid)
    if criterion is None:
        return
    ok = report.passed
    prev = _ACCEPTANCE.get(criterion, True)
    _ACCEPTANCE[criterion] = prev and ok


_ACCEPTANCE_IDS = {}


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is not None:
            _ACCEPTANCE_IDS[item.nodeid] = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_ACCEPTANCE, key=lambda c: (int(c.split()[0]), c)):
        status = "PASS" if _ACCEPTANCE[criterion] else "FAIL"
        terminalreporter.write_line(f"[{status}] {criterion}")


def write_tree(root: Path, files: dict) -> Path:
    """Create ``files`` (relative path -> str | bytes | dict-as-JSON) under ``root``."""
    root.mkdir(parents=True, exist_ok=True)
    for rel, content in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, dict):
            path.write_text(json.dumps(content), encoding="utf-8")
        elif isinstance(content, bytes):
            path.write_bytes(content)
        else:
            path.write_text(content, encoding="utf-8")
    return root


@pytest.fixture
def make_project(tmp_path):
    counter = iter(range(10_000))

    def make(files: dict, name: str = None) -> Path:
        return write_tree(tmp_path / (name or f"proj{next(counter)}"), files)

    return make


LODASH = {"id": "A1", "package": "lodash", "affected": "<4.17.5", "symbols": ["merge"], "fixed": "4.17.5"}
GROWL = {"id": "G1", "package": "growl", "affected": "<1.10.0", "symbols": ["."], "fixed": "1.10.0"}


@pytest.fixture
def lodash_advisory():
    return load_advisories(json.dumps(LODASH))[0]


@pytest.fixture
def growl_advisory():
    return load_advisories(json.dumps(GROWL))[0]


@pytest.fixture
def advisory_file(tmp_path):
    path = tmp_path / "advisories.json"
    path.write_text(json.dumps([LODASH, GROWL]), encoding="utf-8")
    return path


CLIENTS = {
    "reached": {
        "package.json": {"name": "reached", "dependencies": {"lodash": "^4.0.0"}},
        "node_modules/lodash/package.json": {"version": "4.10.0"},
        "index.js": "const _ = require('lodash');\nmodule.exports = (a, b) => _.merge(a, b);\n",
        "lib/util.js": "import { merge } from 'lodash';\nexport const m = x => merge({}, x);\n",
    },
    "clean": {
        "package.json": {"name": "clean", "dependencies": {"lodash": "~4.17.0"}},
        "index.js": "const _ = require('lodash');\n_.map([1], String);\n",
    },
    "listed": {
        "package.json": {"name": "listed", "devDependencies": {"lodash": "4.17.21", "growl": "^1.9.0"}},
        "index.js": "console.log('hi');\n",
    },
    "nodata": {"index.js": "require('lodash').merge({}, {});\n"},
    "notifier": {
        "package.json": {"name": "notifier", "dependencies": {"growl": "1.9.2"}},
        "src/main.mjs": "import growl from 'growl';\ngrowl('done');\n",
    },
}

MANIFEST = """client_path,advisory_id,label
reached,A1,reached
clean,A1,not-reached
listed,A1,not-reached
nodata,A1,
notifier,G1,reached
listed,G1,not-reached
"""


@pytest.fixture
def corpus(tmp_path):
    """A small on-disk corpus: (manifest path, advisory file path)."""
    base = tmp_path / "corpus"
    for name, files in CLIENTS.items():
        write_tree(base / name, files)
    manifest = base / "manifest.csv"
    manifest.write_text(MANIFEST, encoding="utf-8")
    adv = base / "advisories.json"
    adv.write_text(json.dumps([LODASH, GROWL]), encoding="utf-8")
    return manifest, adv
