"""Acceptance criteria 1-9 at their pinned tolerances, one pass/fail line each."""

import csv
import io
import math
import time

import numpy as np
import pytest

from hyperballs.balls import (
    collinear_runs,
    j_ball_bounds,
    j_ball_inscribed,
    q_ball_euclidean,
    q_ball_inside_unit_ball,
    rho_ball_euclidean,
    sample_metric_sphere_2d,
)
from hyperballs.cli import main
from hyperballs.figures import FIGURE_SETS, two_puncture_data
from hyperballs.geometry import UnitBall
from hyperballs.metrics import j_metric, metric_eval, rho_unit_ball
from hyperballs.quasihyperbolic import qh_distance
from hyperballs.radii import (
    CLAIMS,
    K_CLAIMS,
    SHARP_CLAIMS,
    q_threshold,
    technical_1,
    technical_2,
    technical_3,
    technical_threshold,
    uniform_m1,
    uniform_m3,
)
from hyperballs.verify import (
    INCLUSION_TOL,
    QH_INCLUSION_TOL,
    SHARPNESS_TOL,
    curvature_cases,
    parse_report,
    uniform_m1_threshold,
    verify_inclusion,
)

RESULTS = []
DISK = UnitBall(2)
QH_TOL = 1e-6
VERIFY_ALL_BUDGET = 300.0


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def verify_all(tmp_path_factory):
    path = tmp_path_factory.mktemp("verify") / "report.txt"
    t0 = time.perf_counter()
    code = main(["verify", "--all", "--out", str(path)])
    elapsed = time.perf_counter() - t0
    return code, elapsed, parse_report(path.read_text())


def _margin(rec):
    return float(rec["margin"])


def test_criterion_1_sharp_inclusions(verify_all):
    _, _, recs = verify_all
    recs = [r for r in recs if r["claim"] in SHARP_CLAIMS]
    inc = [r for r in recs if r["check"].startswith("inclusion")]
    sharp = [r for r in recs if r["check"].startswith("sharp")]
    bad_inc = [r for r in inc if r["status"] != "holds" or _margin(r) < -INCLUSION_TOL]
    bad_sharp = [r for r in sharp if r["status"] != "sharp" or _margin(r) > SHARPNESS_TOL]
    worst = min(_margin(r) for r in inc)
    gap = max(_margin(r) for r in sharp)
    ok = len(inc) == len(sharp) == 6 * 5 * 4 * 2 and not bad_inc and not bad_sharp
    detail = (
        f"six sharp claims, {len(inc)} inclusion records, worst margin {worst:.3g}, "
        f"largest gap {gap:.3g}, {len(bad_inc)} violations, {len(bad_sharp)} not sharp"
    )
    assert report(1, ok, detail), [(r["claim"], r["check"], r["absx"], r["r"], r["margin"]) for r in bad_inc + bad_sharp][:10]


def test_criterion_2_band_radii(verify_all):
    _, _, recs = verify_all
    inc = [r for r in recs if r["claim"] in K_CLAIMS and r["check"].startswith("inclusion")]
    bad = [r for r in inc if _margin(r) < -QH_INCLUSION_TOL]
    rng = np.random.default_rng(2024)
    band_worst = math.inf
    for _ in range(1000):
        x, y = rng.normal(size=(2, 2))
        x *= rng.uniform(0, 0.95) / np.linalg.norm(x)
        y *= rng.uniform(0, 0.95) / np.linalg.norm(y)
        k = qh_distance(x, y, QH_TOL)[0]
        rho = rho_unit_ball(x, y)
        band_worst = min(band_worst, k - rho / 2, rho - k)
    band_ok = band_worst >= -2 * QH_TOL
    per_claim = {c: sum(r["claim"] == c for r in bad) for c in K_CLAIMS}
    worst = min(_margin(r) for r in inc)
    ok = not bad and band_ok and len(inc) == 4 * 5 * 4 * 2
    detail = (
        f"{len(bad)}/{len(inc)} band-radii inclusions beyond 1e-5 {per_claim}, worst margin {worst:.3g}; "
        f"band over 1000 pairs worst {band_worst:.2g} ({'ok' if band_ok else 'violated'})"
    )
    assert report(2, ok, detail), [(r["claim"], r["check"], r["absx"], r["r"], r["margin"]) for r in bad][:10]


def test_criterion_3_uniform_radii_probe(verify_all):
    _, _, recs = verify_all
    holds = {r: verify_inclusion(DISK, ("j", uniform_m1(r)), ("rho", r), [0.0, 0.0], 720) for r in (1.5, 2.0, 3.0)}
    fails = {r: verify_inclusion(DISK, ("j", uniform_m1(r)), ("rho", r), [0.0, 0.0], 720) for r in (0.5, 1.0)}
    ok_hold = all(rec.status == "holds" for rec in holds.values())
    ok_fail = True
    for r, rec in fails.items():
        ay = float(np.linalg.norm(rec.witness)) if rec.witness else math.nan
        # closed form at x = 0: B_rho(0, r) has Euclidean radius tanh(r/2), B_j(0, m) has 1 - e^{-m}
        ok_fail &= rec.status == "violated" and math.tanh(r / 2) < ay <= 1 - math.exp(-uniform_m1(r)) + 1e-12
    lo, hi = uniform_m1_threshold(tol=1e-4)
    ok_thr = hi - lo <= 1e-3 and lo - 1e-6 <= 2 * math.log(2) <= hi + 1e-6
    m3 = [r for r in recs if r["claim"] == "thm-m3" and r["check"] == "inclusion-m"]
    ok_m3 = len(m3) == 20 and all(r["status"] == "holds" for r in m3)
    ok = ok_hold and ok_fail and ok_thr and ok_m3
    detail = (
        f"m1 holds at r=1.5,2,3: {ok_hold}; violated with witness at r=0.5,1: {ok_fail}; "
        f"threshold in [{lo:.5f}, {hi:.5f}] vs 2 log 2 = {2 * math.log(2):.5f}; m3 holds on {len(m3)} grid points: {ok_m3}"
    )
    assert report(3, ok, detail)


def test_criterion_4_curvature():
    cases = curvature_cases(50)
    worst = {c: max(p.rel_error for p in pts) for c, pts in cases.items()}
    ok = all(len(p) == 50 for p in cases.values()) and max(worst.values()) < 1e-3
    detail = "50 probes per case, worst relative error " + ", ".join(f"{c} {w:.2g}" for c, w in worst.items())
    assert report(4, ok, detail)


def test_criterion_5_exact_representations():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(20):
        x = rng.normal(size=2)
        x *= rng.uniform(0, 0.9) / np.linalg.norm(x)
        ax = float(np.linalg.norm(x))
        for kind, r, ball in (
            ("rho", rng.uniform(0.05, 3.0), rho_ball_euclidean),
            ("q", rng.uniform(0.05, 0.95) * q_threshold(ax), q_ball_euclidean),
        ):
            b = ball(x, r)
            P = sample_metric_sphere_2d(DISK, kind, x, r, 360).points
            worst = max(worst, float(np.max(np.abs(np.linalg.norm(P - b.center, axis=1) - b.radius))))
    flips = 0
    for ax in (0.0, 0.2, 0.5, 0.8, 0.95):
        x = np.array([ax, 0.0])
        r0 = q_threshold(ax)
        flips += q_ball_inside_unit_ball(x, r0 - 1e-6) and not q_ball_inside_unit_ball(x, r0 + 1e-6)
    ok = worst <= 1e-9 and flips == 5
    assert report(5, ok, f"40 sampled spheres off their Euclidean circles by at most {worst:.2g}; q threshold flips at {flips}/5 |x|")


def _circle(b, n=720):
    t = 2 * np.pi * np.arange(n) / n
    return b.center + b.radius * np.stack([np.cos(t), np.sin(t)], axis=1)


def _j_max(G, x, P):
    return max(j_metric(G, x, p) for p in P)


def test_criterion_6_bounding_and_inscribed_balls():
    bounds_ok, contained, maximal, failures = True, 0, 0, []
    grid = [(ax, r) for ax in (0.2, 0.5, 0.8) for r in (0.1, 0.5, 1.0, 2.0, 3.0)]
    for ax, r in grid:
        x = np.array([ax, 0.0])
        inner, outer = j_ball_bounds(x, r)
        d = np.linalg.norm(sample_metric_sphere_2d(DISK, "j", x, r, 720).points - x, axis=1)
        bounds_ok &= d.min() >= inner.radius - 1e-9 and d.max() <= outer.radius + 1e-9
        b = j_ball_inscribed(x, r)
        inside = _j_max(DISK, x, _circle(b)) <= r + 1e-9
        big = type(b)(b.center, b.radius * 1.001)
        escapes = _j_max(DISK, x, _circle(big)) > r
        contained += inside
        maximal += escapes
        if not inside:
            failures.append((ax, r))
    G, x, r, boundary, naive, best = two_puncture_data()
    naive_out = _j_max(G, x, _circle(naive)) > r + 1e-9
    runs = collinear_runs(boundary, closed=True)
    a = (1 + math.sqrt(3)) / 2
    ends = [float(np.linalg.norm(boundary[np.arange(i, j if j > i else j + len(boundary)) % len(boundary)], axis=1).max()) for i, j in runs]
    seg_ok = len(ends) == 2 and all(abs(e - a * math.sqrt(2)) <= 1e-6 for e in ends)
    # the chord-diameter ball pokes out and the true inscribed ball is smaller
    puncture_ok = naive_out and best.radius < naive.radius and seg_ok
    ok = bounds_ok and contained == len(grid) and maximal == len(grid) and puncture_ok
    detail = (
        f"bounding balls {'ok' if bounds_ok else 'violated'}; inscribed ball contained at {contained}/{len(grid)} "
        f"(fails at {failures}), 0.1% inflation escapes at {maximal}/{len(grid)}; "
        f"two-puncture line-construction ball escapes: {naive_out} (radius {naive.radius:.4f} vs inscribed {best.radius:.4f}); segment ends {[round(e, 9) for e in ends]} vs a*sqrt2 = {a * math.sqrt(2):.9f}"
    )
    assert report(6, ok, detail)


def test_criterion_7_uniform_bounds_and_technical_predicates():
    r = np.arange(1e-3, 1.0, 1e-3)
    R = np.arange(1.0, 10.0 + 1e-9, 1e-3)
    ok = True
    for s in (r, R):
        m1 = np.log1p(2 * np.sinh(s / 2))
        m2 = np.log1p(2 * np.sinh(s / 4))
        ok &= bool(np.all((s / 2 < m1) & (m1 < s)) and np.all((s / 4 < m2) & (m2 < s / 2)))
    ok &= bool(np.all(4 * r / 5 < np.array([uniform_m3(v) for v in r])))
    grid = np.linspace(0, 1, 101)
    t1 = all(technical_1(a, b).holds for a in grid for b in grid)
    rng = np.random.default_rng(7)
    t23 = True
    for _ in range(1000):
        ax = rng.uniform(0, 0.99)
        rr = technical_threshold(ax) + rng.exponential(2.0)
        t23 &= technical_2(ax, rng.uniform(0, 0.999), rr).holds and technical_3(ax, rr).holds
    ok = ok and t1 and t23
    assert report(7, ok, f"uniform radius bounds on 10^4-point grids: {ok}; first predicate on 101x101: {t1}; second and third on 1000 samples: {t23}")


def test_criterion_8_ratio_limits():
    ratios = {(n, ax): CLAIMS[n].radii(ax, 1e-4).ratio for n in SHARP_CLAIMS for ax in (0.0, 0.4, 0.8)}
    worst = max(ratios.values())
    ok = worst <= 1.001
    assert report(8, ok, f"M/m at r = 1e-4 over 18 (claim, |x|) pairs, worst {worst:.6f} at {max(ratios, key=ratios.get)}")


def test_criterion_9_cli_round_trip_and_figures(verify_all, tmp_path, capsys):
    code_all, elapsed, _ = verify_all
    worst = 0.0
    for metric, x, r in (("rho", (0.3, 0.2), 0.8), ("q", (0.4, 0.0), 0.2), ("j", (0.5, 0.1), 1.0)):
        main(["ball", "--metric", metric, "--x", f"{x[0]},{x[1]}", "--r", str(r), "--N", "180"])
        text = capsys.readouterr().out
        rows = list(csv.DictReader(io.StringIO(text.split("\n", 1)[1])))
        for row in rows:
            v = metric_eval(metric, DISK, np.array(x), np.array([float(row["x"]), float(row["y"])]))
            worst = max(worst, abs(v - r))
    main(["figures", "--outdir", str(tmp_path)])
    capsys.readouterr()
    files = list(tmp_path.glob("*.svg"))
    figs_ok = len(files) >= len(FIGURE_SETS) and all(f.stat().st_size > 200 for f in files)
    ok = worst <= 1e-9 and figs_ok and elapsed < VERIFY_ALL_BUDGET
    detail = (
        f"CSV round trip worst {worst:.2g}; {len(files)} figures written; "
        f"verify --all took {elapsed:.0f}s (exit {code_all}, budget {VERIFY_ALL_BUDGET:.0f}s)"
    )
    assert report(9, ok, detail)
