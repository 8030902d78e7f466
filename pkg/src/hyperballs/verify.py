"""Sampling oracles for inclusion, sharpness, limit and curvature claims.

An inclusion ``B_A(x, a) < B_B(x, b)`` is checked by sampling the sphere
``S_A(x, a)`` on rays from ``x`` and evaluating ``B`` there; the worst
margin is ``b - max B``.  When ``A`` is the quasihyperbolic metric, which
has no sphere sampler, the equivalent test samples ``S_B(x, b)`` and uses
``min k - a`` (a k-ball is joined to ``x`` by geodesics, so it leaves
``B_B(x, b)`` only through ``S_B(x, b)``).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .balls import j_sphere_curvature, j_sphere_profile, polar_curvature
from .errors import ConfigurationError, ValidityError
from .geometry import (
    RAY_TOL,
    Domain,
    HalfSpace,
    PuncturedSpace,
    UnitBall,
    as_vector,
    basis_vector,
    random_directions,
    rectangle,
    solve_radii_along_rays,
)
from .metrics import MetricKind, metric_function
from .radii import CLAIMS, K_CLAIMS, SHARP_CLAIMS, UNIFORM_CLAIMS, claim

INCLUSION_TOL = 1e-9
SHARPNESS_TOL = 1e-3
QH_TOL = 1e-6
QH_INCLUSION_TOL = 1e-5
STANDARD_ABSX = (0.0, 0.2, 0.4, 0.6, 0.8)
STANDARD_N = 10_000
STANDARD_N_K = 13

ASSERT, REPORT = "assert", "report"


@dataclass(frozen=True)
class ClaimSpec:
    claim: str
    absx: tuple = STANDARD_ABSX
    r: tuple | None = None
    N: int = STANDARD_N
    N_k: int = STANDARD_N_K
    seed: int = 0
    mode: str | None = None
    qh_tol: float = QH_TOL

    def r_values(self, absx: float) -> list[float]:
        return list(self.r) if self.r is not None else claim(self.claim).r_grid(absx)

    def check_mode(self, check: str) -> str:
        if self.mode is not None:
            return self.mode
        return default_mode(self.claim, check)


def default_mode(name: str, check: str) -> str:
    c = claim(name)
    if name in UNIFORM_CLAIMS:
        return REPORT
    if check.startswith("sharp"):
        return ASSERT if c.sharp and c.proved else REPORT
    return ASSERT


@dataclass(frozen=True)
class Record:
    """One check at one ``(|x|, r)``.

    ``check`` is ``inclusion-m``/``inclusion-M``/``sharp-m``/``sharp-M``.
    ``inner``/``outer`` describe the tested inclusion as ``(metric, radius)``.
    ``witness`` is the worst sample point and ``witness_values`` its two
    metric values ``(inner metric, outer metric)`` from ``x``.

    Statuses: ``holds``/``violated`` for inclusions; ``sharp``/``not-sharp``
    for sharpness of claims that assert it, ``gap`` for those that do not,
    and ``inclusion-violated`` when there is nothing to be sharp about.
    ``out-of-validity`` and ``skipped-rays`` mark records without samples.
    """

    claim: str
    check: str
    absx: float
    r: float
    inner: tuple
    outer: tuple
    status: str
    margin: float
    witness: tuple
    witness_values: tuple
    samples: int
    skipped: int
    seed: int
    mode: str
    wall_time: float = field(default=0.0, compare=False)

    @property
    def failed(self) -> bool:
        return self.status in ("violated", "not-sharp")

    def to_text(self, timing: bool = False) -> str:
        parts = [
            f"claim={self.claim}",
            f"check={self.check}",
            f"absx={_fmt(self.absx)}",
            f"r={_fmt(self.r)}",
            f"inner={self.inner[0]}:{_fmt(self.inner[1])}",
            f"outer={self.outer[0]}:{_fmt(self.outer[1])}",
            f"status={self.status}",
            f"margin={_fmt(self.margin)}",
            "witness=" + ",".join(_fmt(v) for v in self.witness),
            "values=" + ",".join(_fmt(v) for v in self.witness_values),
            f"samples={self.samples}",
            f"skipped={self.skipped}",
            f"seed={self.seed}",
            f"mode={self.mode}",
        ]
        if timing:
            parts.append(f"wall_time={self.wall_time:.3f}")
        return " ".join(parts)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return "none"
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return f"{v:.15g}"


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)
    strict: bool = False

    def assert_failures(self) -> list:
        return [r for r in self.records if r.failed and r.mode == ASSERT]

    def report_failures(self) -> list:
        return [r for r in self.records if r.failed and r.mode == REPORT]

    @property
    def exit_code(self) -> int:
        if self.assert_failures():
            return 1
        if self.strict and self.report_failures():
            return 4
        return 0

    def summary(self) -> dict:
        out = {}
        for r in self.records:
            key = (r.claim, r.check)
            d = out.setdefault(key, {"total": 0, "failed": 0, "worst": math.inf, "mode": r.mode})
            d["total"] += 1
            d["failed"] += int(r.failed)
            if r.status not in ("out-of-validity", "skipped-rays"):
                d["worst"] = min(d["worst"], r.margin)
        return out

    def to_text(self, timing: bool = False) -> str:
        lines = [r.to_text(timing) for r in self.records]
        lines.append("# summary")
        for (name, check), d in self.summary().items():
            lines.append(
                f"# claim={name} check={check} mode={d['mode']} total={d['total']} "
                f"failed={d['failed']} worst_margin={_fmt(d['worst'])}"
            )
        lines.append(
            f"# assert_failures={len(self.assert_failures())} "
            f"report_failures={len(self.report_failures())} exit={self.exit_code}"
        )
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# sampling


def _directions(x: np.ndarray, N: int, seed: int, half: bool):
    """Angles (2-D only, else ``None``) and unit directions for ``N`` rays."""
    n = len(x)
    if n == 2:
        if half:
            angles = np.linspace(0.0, np.pi, N)
        else:
            angles = 2.0 * np.pi * np.arange(N) / N
        return angles, np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return None, random_directions(N, n, seed)


def _on_axis(x: np.ndarray) -> bool:
    return len(x) == 2 and x[1] == 0.0


class _Check:
    """Margin of ``B_A(x, a) < B_B(x, b)`` as a function of the ray direction."""

    def __init__(self, G: Domain, inner, outer, x, qh_tol: float):
        self.G = G
        self.x = x
        self.A, self.a = MetricKind.parse(inner[0]), float(inner[1])
        self.B, self.b = MetricKind.parse(outer[0]), float(outer[1])
        self.complement = self.A is MetricKind.QUASIHYPERBOLIC
        if self.complement and self.B is MetricKind.QUASIHYPERBOLIC:
            raise ConfigurationError("at least one metric must have a sphere sampler")
        if self.complement:
            self.sphere_kind, self.sphere_r, self.other = self.B, self.b, self.A
        else:
            self.sphere_kind, self.sphere_r, self.other = self.A, self.a, self.B
        self.f_sphere = metric_function(self.sphere_kind, G, x)
        self.f_other = metric_function(self.other, G, x, qh_tol)
        self.uses_k = MetricKind.QUASIHYPERBOLIC in (self.A, self.B)

    def points(self, dirs):
        if math.isinf(self.sphere_r):
            return np.full(dirs.shape, np.nan), np.zeros(len(dirs), dtype=bool)
        sol = solve_radii_along_rays(self.G, self.f_sphere, self.x, dirs, self.sphere_r, RAY_TOL)
        return sol.points, sol.reachable

    def margins(self, P):
        v = self.f_other(P)
        return v - self.a if self.complement else self.b - v

    def values(self, p):
        """``(A(x, p), B(x, p))``."""
        v = float(self.f_other(p[None, :])[0])
        return (v, self.sphere_r) if self.complement else (self.sphere_r, v)

    def margin_at_angle(self, theta):
        d = np.array([[math.cos(theta), math.sin(theta)]])
        P, ok = self.points(d)
        return float(self.margins(P)[0]) if ok[0] else math.inf


def check_inclusion(
    G: Domain, inner, outer, x, N: int, seed: int = 0, refine: bool = True, qh_tol: float = QH_TOL, half=None
):
    """Worst margin of ``B_inner < B_outer`` over sampled rays.

    Returns ``(margin, witness, values, samples, skipped)``; the margin is
    ``+inf`` when the sampled sphere is empty (all rays skipped).
    """
    x = as_vector(x)
    G.check(x)
    chk = _Check(G, inner, outer, x, qh_tol)
    if half is None:
        half = chk.uses_k and _on_axis(x)
    angles, dirs = _directions(x, N, seed, half)
    if math.isinf(chk.sphere_r) and not chk.complement:
        # an infinite inner ball is never inside a finite one
        return (-math.inf if math.isfinite(chk.b) else math.inf), None, (math.inf, math.inf), 0, N
    P, ok = chk.points(dirs)
    if not ok.any():
        return math.inf, None, (math.nan, math.nan), 0, N
    idx = np.flatnonzero(ok)
    marg = chk.margins(P[idx])
    k = int(np.argmin(marg))
    best, witness = float(marg[k]), P[idx[k]]
    if refine and angles is not None and not chk.uses_k and len(x) == 2:
        step = angles[1] - angles[0]
        th = angles[idx[k]]
        res = minimize_scalar(
            chk.margin_at_angle, bounds=(th - step, th + step), method="bounded", options={"xatol": 1e-12}
        )
        if res.fun < best:
            best = float(res.fun)
            witness = x + _ray_point(chk, res.x)
    return best, witness, chk.values(witness), int(ok.sum()), int((~ok).sum())


def _ray_point(chk, theta):
    d = np.array([[math.cos(theta), math.sin(theta)]])
    P, _ = chk.points(d)
    return P[0] - chk.x


def _tol(inner, outer) -> float:
    kinds = (MetricKind.parse(inner[0]), MetricKind.parse(outer[0]))
    return QH_INCLUSION_TOL if MetricKind.QUASIHYPERBOLIC in kinds else INCLUSION_TOL


def _status(kind: str, margin: float, samples: int, tol: float, claims_sharp: bool = True) -> str:
    if samples == 0:
        return "skipped-rays"
    if kind == "inclusion":
        return "holds" if margin >= -tol else "violated"
    if margin < -tol:
        return "inclusion-violated"
    if margin <= SHARPNESS_TOL:
        return "sharp"
    return "not-sharp" if claims_sharp else "gap"


def verify_inclusion(G: Domain, inner, outer, x, N: int, seed: int = 0, qh_tol: float = QH_TOL, **meta) -> Record:
    """Record for ``B_inner(x, .) < B_outer(x, .)``; ``inner``/``outer`` are ``(metric, radius)``."""
    t0 = time.perf_counter()
    margin, w, vals, n, skipped = check_inclusion(G, inner, outer, x, N, seed, qh_tol=qh_tol)
    status = _status("inclusion", margin, n, _tol(inner, outer))
    return _record(meta, "inclusion", inner, outer, status, margin, w, vals, n, skipped, seed, t0)


def verify_sharpness(G: Domain, inner, outer, x, N: int, seed: int = 0, qh_tol: float = QH_TOL, **meta) -> Record:
    """``sharp`` iff the inclusion holds and its gap is at most :data:`SHARPNESS_TOL`."""
    t0 = time.perf_counter()
    margin, w, vals, n, skipped = check_inclusion(G, inner, outer, x, N, seed, qh_tol=qh_tol)
    status = _status("sharp", margin, n, _tol(inner, outer))
    return _record(meta, "sharp", inner, outer, status, margin, w, vals, n, skipped, seed, t0)


def _record(meta, kind, inner, outer, status, margin, w, vals, n, skipped, seed, t0):
    inner = (MetricKind.parse(inner[0]).symbol, float(inner[1]))
    outer = (MetricKind.parse(outer[0]).symbol, float(outer[1]))
    witness = tuple(float(v) for v in w) if w is not None else ()
    return Record(
        claim=meta.get("claim", "custom"),
        check=f"{kind}{meta.get('side', '')}",
        absx=float(meta.get("absx", math.nan)),
        r=float(meta.get("r", math.nan)),
        inner=inner,
        outer=outer,
        status=status,
        margin=float(margin),
        witness=witness,
        witness_values=tuple(float(v) for v in vals),
        samples=n,
        skipped=skipped,
        seed=seed,
        mode=meta.get("mode", ASSERT),
        wall_time=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# claims


def _out_of_validity(spec, check, absx, r):
    return Record(
        spec.claim, check, absx, r, ("", math.nan), ("", math.nan), "out-of-validity", math.nan, (), (),
        0, 0, spec.seed, spec.check_mode(check),
    )


def verify_claim_at(spec: ClaimSpec, absx: float, r: float, G: Domain | None = None) -> list[Record]:
    """Inclusion and sharpness records for one claim at one ``(|x|, r)``."""
    c = claim(spec.claim)
    G = G or UnitBall(2)
    x = absx * basis_vector(G.n, 0)
    checks = ["inclusion-m", "sharp-m"] + (["inclusion-M", "sharp-M"] if c.has_M else [])
    try:
        bound = c.radii(absx, r)
    except ValidityError:
        return [_out_of_validity(spec, ch, absx, r) for ch in checks]
    uses_k = MetricKind.QUASIHYPERBOLIC in (c.ball, c.radius)
    N = spec.N_k if uses_k else spec.N
    sides = {"-m": ((c.ball, bound.m), (c.radius, r))}
    if c.has_M:
        sides["-M"] = ((c.radius, r), (c.ball, bound.M))
    out = []
    for side, (inner, outer) in sides.items():
        t0 = time.perf_counter()
        margin, w, vals, n, skipped = check_inclusion(G, inner, outer, x, N, spec.seed, qh_tol=spec.qh_tol)
        for kind in ("inclusion", "sharp"):
            check = kind + side
            meta = {"claim": spec.claim, "side": side, "absx": absx, "r": r, "mode": spec.check_mode(check)}
            status = _status(kind, margin, n, _tol(inner, outer), c.sharp)
            out.append(_record(meta, kind, inner, outer, status, margin, w, vals, n, skipped, spec.seed, t0))
    return out


def _run_item(item):
    spec, absx, r = item
    return verify_claim_at(spec, absx, r)


def run_claims(specs, workers: int = 1, strict: bool = False) -> VerificationReport:
    """Run every ``(claim, |x|, r)`` item; records come out in canonical order."""
    items = [(s, a, r) for s in specs for a in s.absx for r in s.r_values(a)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            chunks = list(ex.map(_run_item, items))
    else:
        chunks = [_run_item(it) for it in items]
    return VerificationReport([rec for ch in chunks for rec in ch], strict)


def standard_specs(names=None, N: int = STANDARD_N, N_k: int = STANDARD_N_K, seed: int = 0, strict: bool = False):
    names = list(CLAIMS) if names is None else names
    specs = []
    for n in names:
        mode = ASSERT if strict else None
        specs.append(ClaimSpec(n, N=N, N_k=N_k, seed=seed, mode=mode))
    return specs


# ---------------------------------------------------------------------------
# limits


@dataclass(frozen=True)
class RatioRecord:
    claim: str
    absx: float
    r: tuple
    ratios: tuple
    decreasing: bool
    bound_ok: bool

    @property
    def ok(self) -> bool:
        return self.decreasing and self.bound_ok


def ratio_limit_probe(name: str, absx: float, rs=(1e-2, 1e-3, 1e-4)) -> RatioRecord:
    """``M/m`` along a decreasing sequence of radii."""
    rs = tuple(float(r) for r in rs)
    if any(b >= a for a, b in zip(rs, rs[1:])):
        raise ValueError("radii must be strictly decreasing")
    c = claim(name)
    ratios = tuple(c.radii(absx, r).ratio for r in rs)
    dec = all(b <= a * (1.0 + 1e-11) for a, b in zip(ratios, ratios[1:]))
    return RatioRecord(name, absx, rs, ratios, dec, ratios[-1] <= 1.0 + 10.0 * rs[-1])


# ---------------------------------------------------------------------------
# uniform radius probe at the origin


def uniform_m1_margin(r: float, N: int = 64) -> float:
    """Sampled margin of ``B_j(0, m1(r)) < B_rho(0, r)``."""
    bound = CLAIMS["thm-m1"].radii(0.0, r)
    margin, *_ = check_inclusion(UnitBall(2), ("j", bound.m), ("rho", r), [0.0, 0.0], N, refine=False)
    return margin


def uniform_m1_threshold(lo: float = 0.5, hi: float = 3.0, tol: float = 1e-4, N: int = 64) -> tuple[float, float]:
    """Bracket the radius where the sampled ``m1`` inclusion starts to hold at ``x = 0``."""
    ok = lambda r: uniform_m1_margin(r, N) >= -INCLUSION_TOL
    if ok(lo) or not ok(hi):
        raise ValueError("bracket must start violated and end holding")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


# ---------------------------------------------------------------------------
# curvature


def curvature_fd(angles, radii, index: int, rtol: float = 1e-9) -> float:
    """Polar curvature at ``index`` from five-point central differences."""
    th = np.asarray(angles, dtype=float)
    rr = np.asarray(radii, dtype=float)
    if index < 2 or index + 2 >= len(th):
        raise ValueError("need two samples on each side")
    w = th[index - 2 : index + 3]
    h = np.diff(w)
    if not np.allclose(h, h[0], rtol=rtol, atol=0.0) or h[0] <= 0:
        raise ValueError("angle step must be uniform and increasing")
    h = h[0]
    f = rr[index - 2 : index + 3]
    d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    return float(polar_curvature(f[2], d1, d2))


def polar_radius(G: Domain, kind, x, r: float, theta: float, bracket, center=None) -> float:
    """Distance from ``center`` (default ``x``) to ``S_m(x, r)`` along the ray at ``theta``.

    ``bracket = (t_lo, t_hi)`` must enclose exactly one crossing.
    """
    x = as_vector(x, 2)
    c = x if center is None else as_vector(center, 2)
    d = np.array([math.cos(theta), math.sin(theta)])
    f = metric_function(kind, G, x)
    g = lambda t: float(f((c + t * d)[None, :])[0]) - r
    return brentq(g, bracket[0], bracket[1], xtol=1e-15, rtol=1e-15, maxiter=500)


def polar_samples(G: Domain, kind, x, r: float, theta: float, h: float, bracket, center=None):
    """Five polar radii of ``S_m(x, r)`` around ``theta`` with angle step ``h``."""
    th = theta + h * np.arange(-2, 3)
    return th, np.array([polar_radius(G, kind, x, r, t, bracket, center) for t in th])


def curvature_probe(G: Domain, kind, x, r: float, theta: float, bracket, center=None, h: float = 1e-2) -> float:
    """Finite-difference curvature of ``S_m(x, r)`` at polar angle ``theta`` about ``center``."""
    th, rr = polar_samples(G, kind, x, r, theta, h, bracket, center)
    return curvature_fd(th, rr, 2)


@dataclass(frozen=True)
class CurvaturePoint:
    """Analytic and finite-difference curvature at one probe point of a j-circle."""

    case: str
    region: str
    r: float
    theta: float
    analytic: float
    fd: float

    @property
    def rel_error(self) -> float:
        return abs(self.fd - self.analytic) / abs(self.analytic)


def _spread(lo, hi, n):
    return np.linspace(lo, hi, n)


def curvature_cases(n: int = 50) -> dict[str, list[CurvaturePoint]]:
    """``n`` probe points for each of the four planar j-circle cases, away from junctions.

    Probes run in polar form about ``x``, except the outer part in the unit
    disk which is taken about the origin. The punctured-plane inner arc is
    concave once ``e^r > 2``, so its probes compare ``|kappa|``.
    """
    a, b = n // 4, n // 4
    rest = n - 2 * a
    c, d = rest // 2, rest - rest // 2
    out = {"punctured": [], "half-plane": [], "disk": [], "far": []}

    P, x = PuncturedSpace(((0.0, 0.0),)), np.array([1.0, 0.0])
    for r, m_out, m_in in ((0.3, a, c), (1.0, b, d)):
        k = j_sphere_curvature(P, x, r, "outer")
        for th in _spread(-1.0, 1.0, m_out):
            out["punctured"].append(CurvaturePoint("punctured", "outer", r, th, k, curvature_probe(P, "j", x, r, th, (1e-9, 50.0))))
        k = j_sphere_curvature(P, x, r, "inner")
        for th in _spread(math.pi - 0.3, math.pi + 0.3, m_in):
            fd = abs(curvature_probe(P, "j", x, r, th, (1e-9, 1 - 1e-9)))
            out["punctured"].append(CurvaturePoint("punctured", "inner", r, th, k, fd))

    H, x = HalfSpace(2), np.array([0.0, 1.0])
    for r, m_up, m_low in ((0.3, a, c), (0.6, b, d)):
        k = j_sphere_curvature(H, x, r, "upper")
        for th in _spread(0.4, math.pi - 0.4, m_up):
            out["half-plane"].append(CurvaturePoint("half-plane", "upper", r, th, k, curvature_probe(H, "j", x, r, th, (1e-9, 20.0))))
        for th in _spread(math.pi + 0.4, 2 * math.pi - 0.4, m_low):
            t = polar_radius(H, "j", x, r, th, (1e-9, 1 - 1e-9)) * math.cos(th)
            fd = curvature_probe(H, "j", x, r, th, (1e-9, 1 - 1e-9))
            out["half-plane"].append(CurvaturePoint("half-plane", "lower", r, th, j_sphere_curvature(H, x, r, "lower", t), fd))

    D, x = UnitBall(2), np.array([0.5, 0.0])
    for r, m_in, m_out in ((0.3, a, c), (0.8, b, d)):
        k = j_sphere_curvature(D, x, r, "inner")
        for th in _spread(math.pi - 0.5, math.pi + 0.5, m_in):
            out["disk"].append(CurvaturePoint("disk", "inner", r, th, k, curvature_probe(D, "j", x, r, th, (1e-9, 1.5 - 1e-9))))
        g = j_sphere_profile(x, r).gamma
        for al in _spread(0.05 * g, 0.95 * g, m_out):
            fd = curvature_probe(D, "j", x, r, al, (0.5 + 1e-12, 1 - 1e-12), center=[0.0, 0.0], h=min(1e-2, 0.02 * g))
            out["disk"].append(CurvaturePoint("disk", "outer", r, al, j_sphere_curvature(D, x, r, "outer", al), fd))

    R, x = rectangle(2.0, 1.0), np.array([0.6, 0.4])
    for r, m in ((0.2, n // 2), (0.3, n - n // 2)):
        k = j_sphere_curvature(R, x, r, "far")
        for th in _spread(0.3, math.pi - 0.3, m):
            out["far"].append(CurvaturePoint("far", "far", r, th, k, curvature_probe(R, "j", x, r, th, (1e-9, 0.39))))
    return out


# ---------------------------------------------------------------------------
# report text


def parse_report(text: str) -> list[dict]:
    """Records of a text report as ``key -> str`` dicts (comment lines skipped)."""
    out = []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        out.append(dict(item.split("=", 1) for item in line.split()))
    return out


__all__ = [
    "ASSERT",
    "REPORT",
    "ClaimSpec",
    "CurvaturePoint",
    "Record",
    "RatioRecord",
    "VerificationReport",
    "check_inclusion",
    "curvature_cases",
    "curvature_fd",
    "default_mode",
    "curvature_probe",
    "parse_report",
    "polar_radius",
    "polar_samples",
    "ratio_limit_probe",
    "run_claims",
    "standard_specs",
    "uniform_m1_margin",
    "uniform_m1_threshold",
    "verify_claim_at",
    "verify_inclusion",
    "verify_sharpness",
    "K_CLAIMS",
    "SHARP_CLAIMS",
]
