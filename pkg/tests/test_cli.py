import csv
import io
import math

import numpy as np
import pytest

from hyperballs.balls import collinear_runs
from hyperballs.cli import main
from hyperballs.figures import FIGURE_SETS, read_polylines
from hyperballs.geometry import HalfSpace, UnitBall
from hyperballs.metrics import metric_eval


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dist_example(capsys):
    code, out, _ = run(capsys, "dist", "--domain", "unit-ball", "--metric", "j", "--x", "0,0", "--y", "0.5,0")
    assert code == 0
    head, value = out.strip().splitlines()
    assert head.startswith("# hyperballs dist") and "metric=j" in head
    assert float(value) == pytest.approx(math.log(2), abs=1e-12)


def test_dist_k(capsys):
    code, out, _ = run(capsys, "dist", "--metric", "k", "--x", "0,0", "--y", "0.5,0")
    assert code == 0
    assert float(out.splitlines()[-1]) == pytest.approx(math.log(2), abs=1e-6)


def test_radii_example(capsys):
    code, out, _ = run(capsys, "radii", "--claim", "jrhoj", "--absx", "0", "--r", "1")
    assert code == 0
    kv = dict(line.split("=", 1) for line in out.splitlines() if not line.startswith("#"))
    assert float(kv["m"]) == pytest.approx(math.log((math.e + 1) / 2), abs=1e-14)
    assert float(kv["M"]) == pytest.approx(math.log((math.e + 1) / 2), abs=1e-14)
    assert kv["sharp"] == "true"


def test_radii_validity_fields(capsys):
    code, out, _ = run(capsys, "radii", "--claim", "jqj", "--absx", "0.2", "--r", "0.3")
    assert code == 0
    assert "interval=I2" in out and "r0=" in out and "I3=" in out


def _read_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# hyperballs ball")
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    return np.array([[float(r["angle"]), float(r["x"]), float(r["y"])] for r in rows])


@pytest.mark.parametrize(
    "domain,G,metric,x,r",
    [
        ("unit-ball", UnitBall(2), "rho", (0.3, 0.2), 0.8),
        ("unit-ball", UnitBall(2), "q", (0.4, 0.0), 0.2),
        ("unit-ball", UnitBall(2), "j", (0.5, 0.0), 1.0),
        ("half-plane", HalfSpace(2), "j", (0.0, 1.0), 0.7),
    ],
)
def test_ball_csv_round_trip(capsys, domain, G, metric, x, r):
    code, out, _ = run(capsys, "ball", "--domain", domain, "--metric", metric, "--x", f"{x[0]},{x[1]}", "--r", str(r), "--N", "90")
    assert code == 0
    A = _read_csv(out)
    assert len(A) == 90
    for _, a, b in A:
        assert metric_eval(metric, G, np.array(x), np.array([a, b])) == pytest.approx(r, abs=1e-9)


def test_ball_svg_to_file(tmp_path, capsys):
    path = tmp_path / "b.svg"
    code, _, _ = run(capsys, "ball", "--metric", "rho", "--x", "0.3,0", "--r", "1", "--format", "svg", "--out", str(path))
    assert code == 0
    text = path.read_text()
    assert text.startswith("<svg") and 'data-label="exact"' in text and "<desc>hyperballs ball" in text


def test_outdir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HYPERBALLS_OUTDIR", str(tmp_path))
    code, _, _ = run(capsys, "ball", "--metric", "j", "--x", "0.3,0", "--r", "1", "--out", "b.csv")
    assert code == 0
    assert (tmp_path / "b.csv").read_text().startswith("# hyperballs ball")
    code, out, _ = run(capsys, "figures", "--set", "jrho")
    assert code == 0 and (tmp_path / "jrho.svg").exists()


def test_figures_all_nonempty(tmp_path, capsys):
    code, out, _ = run(capsys, "figures", "--outdir", str(tmp_path), "--N", "180")
    assert code == 0
    files = sorted(tmp_path.glob("*.svg"))
    assert len(files) == len(out.split())
    for f in files:
        text = f.read_text()
        assert text.startswith("<svg") and ("<polyline" in text or "<circle" in text)
    assert {"jcircles_punctured.svg", "two_puncture.svg", "jrho.svg", "inscribed.svg"} <= {f.name for f in files}


def test_every_figure_set_has_output():
    for name, fn in FIGURE_SETS.items():
        out = fn(N=90)
        assert out and all(len(t) > 200 for t in out.values()), name


def test_two_puncture_segments(tmp_path, capsys):
    code, _, _ = run(capsys, "figures", "--set", "two-puncture", "--outdir", str(tmp_path))
    assert code == 0
    P = read_polylines((tmp_path / "two_puncture.svg").read_text())[0][:-1]
    runs = collinear_runs(P, closed=True)
    assert len(runs) == 2
    a = (1 + math.sqrt(3)) / 2
    far = []
    for i, j in runs:
        idx = np.arange(i, j if j > i else j + len(P)) % len(P)
        seg = P[idx]
        # each run lies on a line through the origin
        u = seg[-1] - seg[0]
        assert abs(u[0] * seg[0][1] - u[1] * seg[0][0]) / np.linalg.norm(u) < 1e-8
        far.append(np.linalg.norm(seg, axis=1).max())
    assert far == pytest.approx([a * math.sqrt(2)] * 2, abs=1e-6)


def test_verify_single_claim(tmp_path, capsys):
    path = tmp_path / "r.txt"
    code, out, _ = run(capsys, "verify", "--claim", "rhoqrho", "--absx", "0.2", "--N", "400", "--out", str(path))
    assert code == 0
    text = path.read_text()
    assert text.startswith("# hyperballs verify")
    assert sum(line.startswith("claim=rhoqrho ") for line in text.splitlines()) == 16
    assert "# assert_failures=0" in text


def test_verify_exit_codes(capsys):
    code, *_ = run(capsys, "verify", "--claim", "jkj", "--absx", "0.4", "--r", "1", "--N-k", "9")
    assert code == 1
    args = ["verify", "--claim", "thm-m1", "--absx", "0", "--r", "1", "--N", "64"]
    code, *_ = run(capsys, *args)
    assert code == 0
    code, *_ = run(capsys, *args, "--strict")
    assert code == 4


def test_usage_and_validity_exit_codes(capsys):
    assert run(capsys, "radii", "--claim", "nope", "--absx", "0", "--r", "1")[0] == 2
    assert run(capsys, "verify")[0] == 2
    assert run(capsys, "dist", "--metric", "j", "--x", "a,b", "--y", "0,0")[0] == 2
    assert run(capsys, "dist", "--domain", "torus", "--metric", "j", "--x", "0,0", "--y", "0,0")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "radii", "--claim", "jqj", "--absx", "0.5", "--r", "0.9")[0] == 3
    assert run(capsys, "dist", "--metric", "rho", "--x", "2,0", "--y", "0,0")[0] == 3
    code, _, err = run(capsys, "ball", "--metric", "j", "--x", "0,0", "--r", "-1")
    assert code == 3 and err
