import math
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from cechapprox.cli import main
from cechapprox.geometry import read_cloud
from cechapprox.persistence import PersistenceDiagram
from cechapprox.trace import Trace

FIXTURES = Path(__file__).parent / "fixtures"
SVG = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, dict(line.split("=", 1) for line in out.splitlines() if "=" in line)


@pytest.fixture
def wedge(tmp_path, capsys):
    path = tmp_path / "wedge.csv"
    code, _ = run(capsys, "generate", "circle-wedge", "--counts", "20,20", "--radii", "1,2",
                  "--noise", "0.02", "--seed", 7, "--out", path)
    assert code == 0
    return path


def test_generate_default_wedge(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code, kv = run(capsys, "generate", "circle-wedge", "--seed", 1, "--out", a)
    assert code == 0 and kv["points"] == "2100"
    run(capsys, "generate", "circle-wedge", "--seed", 1, "--out", b)
    assert a.read_bytes() == b.read_bytes()
    assert read_cloud(a).shape == (2100, 2)


def test_generate_validation(tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert run(capsys, "generate", "rp2", "--n", 0, "--seed", 1, "--out", out)[0] == 1
    assert run(capsys, "generate", "rp2", "--n", 10, "--out", out)[0] == 1
    assert run(capsys, "generate", "circle-wedge", "--counts", "1,2", "--radii", "1", "--seed", 0,
               "--out", out)[0] == 1
    with pytest.raises(SystemExit) as info:
        main(["generate", "torus", "--out", str(out)])
    assert info.value.code == 1
    assert not out.exists()


def test_generate_rp2_and_lorenz(tmp_path, capsys):
    code, kv = run(capsys, "generate", "rp2", "--n", 50, "--seed", 3, "--out", tmp_path / "r.csv")
    assert code == 0 and kv["ambient_dim"] == "4"
    code, kv = run(capsys, "generate", "lorenz-embed", "--out", tmp_path / "l.csv")
    assert code == 0
    delay = int(kv["delay"])
    assert abs(delay - 15) <= 2 and int(kv["points"]) == 15000 - 2 * delay


def test_oracle_run_matches_fixture(tmp_path, capsys):
    out = tmp_path / "o.txt"
    code, kv = run(capsys, "run", "oracle", FIXTURES / "five_points.csv", "--alpha-max", 2, "--out", out)
    assert code == 0 and kv["status"] == "ok"
    expected = PersistenceDiagram.read(FIXTURES / "five_points_oracle.txt")
    assert PersistenceDiagram.read(out).almost_equal(expected, 1e-12)


def test_cech_engine_equals_zero_epsilon_collapse(tmp_path, capsys, wedge):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run(capsys, "run", "cech", wedge, "--alpha-max", 1, "--out", a)[0] == 0
    assert run(capsys, "run", "collapse", wedge, "--epsilon", 0, "--alpha-max", 1, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_nettree_cap_abort_writes_partial_trace(tmp_path, capsys):
    cloud, tr = tmp_path / "rp2.csv", tmp_path / "n.tr"
    run(capsys, "generate", "rp2", "--n", 300, "--seed", 0, "--out", cloud)
    code, kv = run(capsys, "run", "nettree", cloud, "--alpha0", "1e-3", "--epsilon", 0.7,
                   "--alpha-max", 0.6, "--max-dim", 3, "--max-simplices", 5000,
                   "--out", tmp_path / "n.txt", "--trace", tr)
    assert code == 2 and kv["status"] == "cap"
    assert Trace.read(tr).final_count() == 5001
    assert not (tmp_path / "n.txt").exists()


def test_oracle_size_guard_exit_code(tmp_path, capsys, wedge):
    code, kv = run(capsys, "run", "oracle", wedge, "--alpha-max", 4, "--max-dim", 3,
                   "--oracle-limit", 100, "--out", tmp_path / "o.txt")
    assert code == 2 and kv["status"] == "too-large"


def test_compare_collapse_against_oracle_within_bound(tmp_path, capsys, wedge):
    c, o = tmp_path / "c.txt", tmp_path / "o.txt"
    assert run(capsys, "run", "collapse", wedge, "--epsilon", 0.5, "--alpha-max", 2, "--out", c)[0] == 0
    assert run(capsys, "run", "oracle", wedge, "--alpha-max", 2, "--out", o)[0] == 0
    bound = math.sqrt(1 + 0.125) / 0.5
    code, kv = run(capsys, "compare", c, o, "--dim", 1, "--log", "--cloud", wedge,
                   "--alpha-max", 2, "--bound", bound)
    assert code == 0 and kv["within_bound"] == "true"
    assert float(kv["log_bottleneck"]) <= math.log(bound)


def test_compare_exit_codes(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    PersistenceDiagram([(1, 0.0, 1.0)]).write(a)
    PersistenceDiagram([(1, 5.0, 9.0)]).write(b)
    code, kv = run(capsys, "compare", a, a)
    assert code == 0 and float(kv["bottleneck"]) == 0
    code, kv = run(capsys, "compare", a, b, "--bound", 0)
    assert code == 3 and kv["within_bound"] == "false"
    code, kv = run(capsys, "compare", a, b, "--log", "--floor", "0.01", "--bound", 1)
    assert code == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("1,2\n")
    assert run(capsys, "compare", a, bad)[0] == 2


def test_plot_outputs(tmp_path, capsys, wedge):
    empty = tmp_path / "empty.txt"
    PersistenceDiagram().write(empty)
    assert run(capsys, "plot", "--diagram", empty, "--out", tmp_path / "e.svg")[0] == 0
    ET.parse(tmp_path / "e.svg")

    dg, tr = tmp_path / "c.txt", tmp_path / "c.tr"
    run(capsys, "run", "collapse", wedge, "--epsilon", 0.5, "--alpha-max", 2, "--out", dg, "--trace", tr)
    code, kv = run(capsys, "plot", "--diagram", dg, "--alpha-max", 2, "--out", tmp_path / "d.svg")
    assert code == 0
    root = ET.parse(tmp_path / "d.svg").getroot()
    groups = {g.get("id"): g for g in root.iter(f"{SVG}g") if g.get("id")}
    diagram = PersistenceDiagram.read(dg)
    finite1 = sum(1 for d, b, x in diagram if d == 1 and math.isfinite(x))
    assert len(list(groups["dim1-finite"].iter(f"{SVG}use"))) == finite1
    assert len(list(groups["dim0-infinite"].iter(f"{SVG}use"))) == 1

    code, kv = run(capsys, "plot", "--trace", tr, "--out", tmp_path / "t.svg")
    assert code == 0 and int(kv["collapses"]) > 0
    root = ET.parse(tmp_path / "t.svg").getroot()
    marks = next(g for g in root.iter(f"{SVG}g") if g.get("id") == "collapses")
    assert len(list(marks.iter(f"{SVG}use"))) == int(kv["collapses"])


def test_sandwich_lines(capsys, wedge):
    code = main(["sandwich", str(wedge), "--alphas", "0,0.1,0.3"])
    out = capsys.readouterr().out.splitlines()
    assert code == 0
    assert out == ["alpha=0.0 sandwich=pass", "alpha=0.1 sandwich=pass", "alpha=0.3 sandwich=pass"]


def test_usage_errors(tmp_path, wedge):
    for argv in (
        [],
        ["run", "collapse", str(wedge), "--out", "x"],
        ["run", "collapse", str(wedge), "--alpha-max", "1", "--epsilon", "-1", "--out", "x"],
        ["run", "collapse", str(wedge), "--alpha-max", "1", "--batch", "0", "--out", "x"],
        ["compare", "a"],
    ):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 1


def test_pipeline_is_reproducible(tmp_path):
    def pipeline(d):
        d.mkdir()
        cmds = [
            ["generate", "circle-wedge", "--counts", "15,15", "--radii", "1,2", "--seed", "4", "--out", "w.csv"],
            ["run", "collapse", "w.csv", "--epsilon", "0.5", "--alpha-max", "2", "--out", "c.txt", "--trace", "c.tr"],
            ["run", "oracle", "w.csv", "--alpha-max", "2", "--out", "o.txt"],
            ["compare", "c.txt", "o.txt", "--log", "--cloud", "w.csv"],
        ]
        outs = []
        for c in cmds:
            res = subprocess.run([sys.executable, "-m", "cechapprox.cli", *c], cwd=d,
                                 capture_output=True, text=True, check=True)
            outs.append(res.stdout)
        return outs, [(d / f).read_bytes() for f in ("w.csv", "c.txt", "c.tr", "o.txt")]

    assert pipeline(tmp_path / "one") == pipeline(tmp_path / "two")
