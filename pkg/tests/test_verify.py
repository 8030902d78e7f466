import math

import numpy as np
import pytest

from hyperballs.balls import j_sphere_curvature
from hyperballs.geometry import HalfSpace, UnitBall
from hyperballs.metrics import j_metric, rho_unit_ball
from hyperballs.radii import CLAIMS, uniform_m1
from hyperballs.verify import (
    ASSERT,
    REPORT,
    ClaimSpec,
    check_inclusion,
    curvature_cases,
    curvature_fd,
    curvature_probe,
    default_mode,
    parse_report,
    polar_radius,
    ratio_limit_probe,
    run_claims,
    uniform_m1_threshold,
    verify_claim_at,
    verify_inclusion,
    verify_sharpness,
)

DISK = UnitBall(2)


def rel(a, b):
    return abs(a - b) / abs(b)


def test_jrhoj_holds_and_is_sharp():
    recs = verify_claim_at(ClaimSpec("jrhoj", N=10_000), 0.5, 1.0)
    by = {r.check: r for r in recs}
    assert by["inclusion-m"].status == "holds" and by["inclusion-M"].status == "holds"
    assert by["sharp-m"].status == "sharp" and by["sharp-M"].status == "sharp"
    assert by["sharp-M"].margin >= -1e-9 and by["sharp-M"].margin < 1e-9
    # the outer touching point lies on the ray {s x : s > |x|}
    w = np.array(by["sharp-M"].witness)
    assert w[0] > 0.5 and abs(w[1]) < 1e-4


def test_origin_sharpness_gap_is_zero():
    for name in ("jrhoj", "rhojrho", "qrhoq"):
        r = 0.3 if CLAIMS[name].needs_r0 else 1.0
        for rec in verify_claim_at(ClaimSpec(name, N=720), 0.0, r):
            assert rec.status in ("holds", "sharp")
            assert abs(rec.margin) < 1e-9


def test_uniform_m1_violated_at_origin():
    r = 1.0
    m1 = uniform_m1(r)
    rec = verify_inclusion(DISK, ("j", m1), ("rho", r), [0.0, 0.0], 360, claim="thm-m1")
    assert rec.status == "violated"
    ay = float(np.linalg.norm(rec.witness))
    assert math.tanh(r / 2) < ay <= 1 - math.exp(-m1) + 1e-12
    assert rec.witness_values[0] == pytest.approx(m1)
    assert rec.witness_values[1] > r


def test_self_inclusion_margin_zero():
    for kind in ("j", "rho", "q"):
        rec = verify_inclusion(DISK, (kind, 0.2), (kind, 0.2), [0.3, 0.1], 256)
        assert rec.status == "holds"
        assert abs(rec.margin) < 1e-12


def test_k_as_inner_metric_uses_sphere_of_outer():
    # rho/2 <= k <= rho: B_k(x, r) sits inside B_rho(x, 2r) and contains B_rho(x, r)
    x = [0.4, 0.0]
    m, *_ = check_inclusion(DISK, ("k", 0.5), ("rho", 1.0), x, 13)
    assert m >= -1e-5
    m, *_ = check_inclusion(DISK, ("rho", 0.5), ("k", 0.5), x, 13)
    assert m >= -1e-5


def test_band_radii_reported_not_sharp():
    recs = verify_claim_at(ClaimSpec("jkj", N_k=9), 0.4, 0.5)
    by = {r.check: r for r in recs}
    assert by["sharp-m"].status == "gap"
    assert by["sharp-m"].mode == REPORT


def test_default_modes():
    assert default_mode("jrhoj", "inclusion-m") == ASSERT
    assert default_mode("jrhoj", "sharp-M") == ASSERT
    assert default_mode("qjq", "sharp-M") == REPORT
    assert default_mode("qjq", "inclusion-M") == ASSERT
    assert default_mode("thm-m1", "inclusion-m") == REPORT


def test_report_is_deterministic():
    specs = [ClaimSpec("jqj", absx=(0.0, 0.4), N=500, seed=3), ClaimSpec("rhoqrho", absx=(0.2,), N=500, seed=3)]
    a, b = run_claims(specs), run_claims(specs)
    assert a.to_text() == b.to_text()
    c = run_claims(specs, workers=2)
    assert c.to_text() == a.to_text()


def test_random_directions_are_seeded():
    from hyperballs.geometry import UnitBall as B

    G = B(3)
    a = verify_inclusion(G, ("j", 0.4), ("rho", 1.0), [0.3, 0, 0], 300, seed=5)
    b = verify_inclusion(G, ("j", 0.4), ("rho", 1.0), [0.3, 0, 0], 300, seed=5)
    c = verify_inclusion(G, ("j", 0.4), ("rho", 1.0), [0.3, 0, 0], 300, seed=6)
    assert a == b
    assert a.witness != c.witness


def test_violated_witness_reproduces():
    rec = verify_inclusion(DISK, ("j", 0.5), ("rho", 0.5), [0.3, 0.0], 720)
    assert rec.status == "violated"
    x, y = np.array([0.3, 0.0]), np.array(rec.witness)
    assert j_metric(DISK, x, y) == pytest.approx(0.5, abs=1e-9)
    assert rho_unit_ball(x, y) > 0.5
    assert rho_unit_ball(x, y) == pytest.approx(rec.witness_values[1], abs=1e-12)


def test_out_of_validity_records():
    recs = verify_claim_at(ClaimSpec("jqj"), 0.5, 0.9)
    assert {r.status for r in recs} == {"out-of-validity"}
    assert not any(r.failed for r in recs)


def test_sharpness_refinement_finds_gap_below_sampling():
    # with few rays the raw gap is large; refinement brings it near zero
    rec = verify_sharpness(DISK, ("rho", 1.0), ("j", CLAIMS["jrhoj"].radii(0.6, 1.0).M), [0.6, 0.0], 16)
    assert rec.status == "sharp" and rec.margin < 1e-8


def test_ratio_probe():
    p = ratio_limit_probe("jrhoj", 0.5)
    assert p.ok and p.ratios[-1] <= 1.001
    p = ratio_limit_probe("qrhoq", 0.0, (0.3, 0.2, 0.1))
    assert all(v == pytest.approx(1.0, abs=1e-12) for v in p.ratios)
    p = ratio_limit_probe("jqj", 0.2)
    assert p.ok
    with pytest.raises(ValueError):
        ratio_limit_probe("jrhoj", 0.5, (1e-3, 1e-2))


def test_uniform_m1_threshold_brackets_two_log_two():
    lo, hi = uniform_m1_threshold(tol=1e-4)
    assert lo <= 2 * math.log(2) <= hi + 1e-6
    assert hi - lo <= 1e-3


# ---------------------------------------------------------------------------
# curvature


def test_curvature_fd_circle_and_line():
    th = np.linspace(0.0, 1.0, 11)
    assert curvature_fd(th, np.full(11, 2.5), 5) == pytest.approx(0.4, abs=1e-6)
    # the line x = 1 in polar form about the origin
    assert curvature_fd(th, 1 / np.cos(th), 5) == pytest.approx(0.0, abs=1e-4)


def test_curvature_fd_rejects_bad_steps():
    th = np.array([0.0, 0.1, 0.2, 0.35, 0.4])
    with pytest.raises(ValueError):
        curvature_fd(th, np.ones(5), 2)
    with pytest.raises(ValueError):
        curvature_fd(np.linspace(0, 1, 5), np.ones(5), 1)


def test_curvature_outer_profile_example():
    x, r, a = [0.5, 0.0], 0.3, 0.1
    k = curvature_probe(DISK, "j", x, r, a, (0.5 + 1e-12, 1 - 1e-12), center=[0.0, 0.0], h=2e-3)
    assert rel(k, j_sphere_curvature(DISK, x, r, "outer", a)) < 1e-3


CURVATURE = {}


@pytest.mark.parametrize("case", ["punctured", "half-plane", "disk", "far"])
def test_curvature_matches_finite_differences(case):
    if not CURVATURE:
        CURVATURE.update(curvature_cases(50))
    pts = CURVATURE[case]
    assert len(pts) == 50
    assert max(p.rel_error for p in pts) < 1e-3


def test_half_plane_lower_exponent_one_is_off():
    H, x, r, th = HalfSpace(2), np.array([0.0, 1.0]), 0.6, 2 * math.pi - 0.5
    t = polar_radius(H, "j", x, r, th, (1e-9, 1 - 1e-9)) * math.cos(th)
    k = curvature_probe(H, "j", x, r, th, (1e-9, 1 - 1e-9))
    E = math.expm1(r)
    assert rel(k, 1.0 / (E * (1.0 + t * t))) > 1e-1
    assert rel(k, 1.0 / (E * (1.0 + t * t) ** 1.5)) < 1e-6


def test_parse_report_round_trip():
    rep = run_claims([ClaimSpec("jrhoj", absx=(0.4,), r=(0.5,), N=200)])
    recs = parse_report(rep.to_text())
    assert len(recs) == len(rep.records)
    assert recs[0]["claim"] == "jrhoj" and float(recs[0]["margin"]) == pytest.approx(rep.records[0].margin, rel=1e-14, abs=1e-300)
