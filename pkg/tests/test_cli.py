import json
import subprocess
import sys

import pytest

from chromatic_agreement import __version__, canonical
from chromatic_agreement import complex as cx
from chromatic_agreement.cli import build_parser, main, parse_inputs
from chromatic_agreement.complex import Vertex, build_complex


@pytest.fixture
def d2(tmp_path):
    path = tmp_path / "d2.json"
    canonical.write(path, cx.to_json(cx.simplex_complex(2)))
    return path


def read(path):
    return json.loads(path.read_text())


def test_subdivide_ch(d2, tmp_path, capsys):
    out = tmp_path / "ch.json"
    assert main(["subdivide", "--complex", str(d2), "--kind", "ch", "--iterations", "1", "--out", str(out)]) == 0
    assert len(read(out)["facets"]) == 13
    assert (tmp_path / "ch.carriers.json").exists()
    assert json.loads(capsys.readouterr().out)["chromatic_subdivision"] is True


def test_subdivide_bary(d2, tmp_path):
    out = tmp_path / "b.json"
    assert main(["subdivide", "--complex", str(d2), "--kind", "bary", "--out", str(out)]) == 0
    data = read(out)
    assert (len(data["vertices"]), len(data["facets"])) == (7, 6)
    assert main(["subdivide", "--complex", str(d2), "--kind", "bary", "--iterations", "2", "--out", str(out)]) == 2


def test_homology(d2, tmp_path, capsys):
    out = tmp_path / "ch.json"
    main(["subdivide", "--complex", str(d2), "--out", str(out)])
    capsys.readouterr()
    assert main(["homology", "--complex", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["betti"] == [0, 0, 0]
    report = tmp_path / "h.json"
    assert main(["homology", "--complex", str(out), "--links", "--out", str(report)]) == 0
    assert read(report)["link_connected"] is True


def test_homology_of_disconnected_complex_fails_links(tmp_path):
    path = tmp_path / "two.json"
    canonical.write(path, cx.to_json(build_complex([Vertex(i, i % 2) for i in range(4)], [[0, 1], [2, 3]])))
    assert main(["homology", "--complex", str(path), "--links"]) == 1


def test_converge_then_verify(d2, tmp_path):
    runs = tmp_path / "runs"
    assert main(["converge", "--complex", str(d2), "--schedule", "exhaustive", "--max-runs", "40",
                 "--trace-out", str(runs)]) == 0
    assert len(list(runs.glob("run-*.json"))) == 40
    assert read(runs / "summary.json")["statuses"] == {"complete": 40}
    report = tmp_path / "report.json"
    assert main(["verify", "--trace-dir", str(runs), "--report", str(report)]) == 0
    body = read(report)
    assert body["all_pass"] and body["build"] == __version__ and len(body["decision_map"]) == 40


def test_canonical_converge_is_reproducible(d2, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["converge", "--complex", str(d2), "--schedule", "canonical", "--trace-out", str(out)]) == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    assert all((a / f).read_bytes() == (b / f).read_bytes() for f in files)


def test_random_converge_records_seeds(d2, tmp_path):
    out = tmp_path / "r"
    assert main(["converge", "--complex", str(d2), "--schedule", "random", "--seed", "11", "--max-runs", "5",
                 "--crash-probability", "0.3", "--inputs", "0:0,1:1,2:2", "--trace-out", str(out)]) == 0
    seeds = [read(f)["schedule"]["seed"] for f in sorted(out.glob("run-*.json"))]
    assert seeds == [11, 12, 13, 14, 15]


def test_verify_flags_a_corrupted_trace(d2, tmp_path):
    out = tmp_path / "c"
    main(["converge", "--complex", str(d2), "--schedule", "sequential", "--trace-out", str(out)])
    run = out / "run-000000.json"
    data = read(run)
    data["decisions"]["0"]["vertex"] = data["decisions"]["1"]["vertex"]
    run.write_text(json.dumps(data))
    report = tmp_path / "rep.json"
    assert main(["verify", "--trace-dir", str(out), "--report", str(report)]) == 1
    assert read(report)["failures"][0]["run"] == "run-000000.json"


def test_custom_div(d2, tmp_path):
    ch = tmp_path / "ch.json"
    main(["subdivide", "--complex", str(d2), "--out", str(ch)])
    out = tmp_path / "custom"
    assert main(["converge", "--complex", str(d2), "--div", str(ch), "--schedule", "random", "--max-runs", "10",
                 "--trace-out", str(out)]) == 0
    assert main(["verify", "--trace-dir", str(out)]) == 0


def test_exit_codes(d2, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["homology", "--complex", str(bad)]) == 3
    assert main(["homology", "--complex", str(tmp_path / "missing.json")]) == 3
    mono = tmp_path / "mono.json"
    canonical.write(mono, cx.to_json(build_complex([Vertex(0, 0), Vertex(1, 0)], [[0, 1]])))
    assert main(["subdivide", "--complex", str(mono), "--out", str(tmp_path / "x.json")]) == 4
    bary = tmp_path / "bary.json"
    main(["subdivide", "--complex", str(d2), "--kind", "bary", "--out", str(bary)])
    assert main(["converge", "--complex", str(d2), "--div", str(bary), "--trace-out", str(tmp_path / "o")]) == 4
    assert main(["converge", "--complex", str(d2), "--inputs", "0:2", "--trace-out", str(tmp_path / "o")]) == 5
    assert main(["converge", "--complex", str(d2), "--inputs", "zero", "--trace-out", str(tmp_path / "o")]) == 5
    with pytest.raises(SystemExit) as info:
        main(["converge", "--frobnicate"])
    assert info.value.code == 2


def test_parse_inputs():
    assert parse_inputs("0:3, 1:5") == {0: 3, 1: 5}


def test_help_documents_every_flag():
    parser = build_parser()
    for action in parser._subparsers._group_actions[0].choices.values():
        for a in action._actions:
            if a.option_strings and a.dest != "help":
                assert a.help, a.option_strings


def test_version_and_entry_point():
    out = subprocess.run([sys.executable, "-m", "chromatic_agreement.cli", "--version"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == f"csa {__version__}"
