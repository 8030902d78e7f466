"""Euclidean descriptions of metric balls and spheres.

rho- and q-balls in the unit ball are Euclidean balls with shifted centers.
j-balls are not, but along the line through 0 and x they are bracketed by
explicit points, and in the plane their boundary is a union of circular arcs
and one explicit profile curve whose curvature is known in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize

from .errors import ConfigurationError, DomainError, EmptyBoundaryError, ValidityError
from .geometry import (
    RAY_TOL,
    Domain,
    EuclideanBall,
    HalfSpace,
    PuncturedSpace,
    UnitBall,
    as_vector,
    basis_vector,
    directions_2d,
    solve_radii_along_rays,
)
from .metrics import MetricKind, j_metric, metric_function


def _direction(x: np.ndarray) -> np.ndarray:
    """``x/|x|``, with ``e1`` standing in at the origin."""
    nx = np.linalg.norm(x)
    return x / nx if nx > 0 else basis_vector(x.size)


def _in_unit_ball(x) -> np.ndarray:
    x = as_vector(x)
    if x @ x >= 1.0:
        raise DomainError("center must lie in the unit ball")
    return x


# ---------------------------------------------------------------------------
# rho- and q-balls


@dataclass(frozen=True)
class BallConversion:
    """A metric ball together with its Euclidean representation.

    ``aux`` is ``t = tanh(r/2)`` for the hyperbolic metric and
    ``a = 1 - r^2 (1 + |x|^2)`` for the chordal metric.
    """

    kind: MetricKind
    center: np.ndarray
    radius: float
    ball: EuclideanBall
    aux: float


def q_ball_threshold(absx: float) -> float:
    """Largest chordal radius whose ball around a point of norm ``absx`` stays in the unit ball."""
    return (1.0 - absx) / math.sqrt(2.0 * (1.0 + absx * absx))


def rho_ball_conversion(x, r: float) -> BallConversion:
    x = _in_unit_ball(x)
    if not r > 0:
        raise ValueError("radius must be positive")
    t = math.tanh(r / 2)
    s = x @ x
    den = 1.0 - s * t * t
    ball = EuclideanBall(x * (1.0 - t * t) / den, (1.0 - s) * t / den)
    return BallConversion(MetricKind.HYPERBOLIC, x, r, ball, t)


def rho_ball_euclidean(x, r: float) -> EuclideanBall:
    """The hyperbolic ball ``B_rho(x, r)`` as a Euclidean ball."""
    return rho_ball_conversion(x, r).ball


def q_ball_conversion(x, r: float) -> BallConversion:
    x = as_vector(x)
    s = x @ x
    if not 0 < r < 1.0 / math.sqrt(1.0 + s):
        raise ValidityError(f"chordal radius {r} outside (0, 1/sqrt(1+|x|^2)) = (0, {1 / math.sqrt(1 + s)})")
    a = 1.0 - r * r * (1.0 + s)
    ball = EuclideanBall(x / a, r * (1.0 + s) * math.sqrt(1.0 - r * r) / a)
    return BallConversion(MetricKind.CHORDAL, x, r, ball, a)


def q_ball_euclidean(x, r: float) -> EuclideanBall:
    """The chordal ball ``B_q(x, r)`` as a Euclidean ball (requires ``r < 1/sqrt(1+|x|^2)``)."""
    return q_ball_conversion(x, r).ball


def q_ball_inside_unit_ball(x, r: float) -> bool:
    return r < q_ball_threshold(float(np.linalg.norm(as_vector(x))))


# ---------------------------------------------------------------------------
# j-balls in the unit ball: radial points, bounding and inscribed balls


@dataclass(frozen=True)
class RadialPair:
    """The two points where the j-sphere meets the line through 0 and x, ``|y2| <= |y1|``."""

    y1: np.ndarray
    y2: np.ndarray


def j_sphere_radial_pair(x, r: float, check: bool = True) -> RadialPair:
    x = _in_unit_ball(x)
    if not r > 0:
        raise ValueError("radius must be positive")
    ax = float(np.linalg.norm(x))
    u = _direction(x)
    y1 = u * (1.0 - math.exp(-r) * (1.0 - ax))
    if r <= math.log(1.0 / (1.0 - ax)):
        s = 1.0 - math.exp(r) * (1.0 - ax)
    elif r <= math.log((1.0 + ax) / (1.0 - ax)):
        s = -(math.exp(r) * (1.0 - ax) - 1.0)
    else:
        s = -(1.0 - math.exp(-r) * (1.0 + ax))
    pair = RadialPair(y1, u * s)
    if check:
        G = UnitBall(x.size)
        for y in (pair.y1, pair.y2):
            v = j_metric(G, x, y)
            if abs(v - r) > 1e-12 * max(1.0, r):
                raise AssertionError(f"radial point has j = {v}, expected {r}")
    return pair


def j_ball_bounds(x, r: float) -> tuple[EuclideanBall, EuclideanBall]:
    """Euclidean balls around ``x`` inside and containing ``B_j(x, r)`` in the unit ball."""
    x = _in_unit_ball(x)
    pair = j_sphere_radial_pair(x, r)
    return (
        EuclideanBall(x, float(np.linalg.norm(x - pair.y1))),
        EuclideanBall(x, float(np.linalg.norm(x - pair.y2))),
    )


def j_ball_inscribed(x, r: float) -> EuclideanBall:
    """The ball with diameter ``[y1, y2]``, the chord of ``B_j(x, r)`` through 0 and ``x``.

    Beyond ``r = log((1+|x|)/(1-|x|))`` its center is ``x e^{-r}``. It is the
    largest ball inside ``B_j(x, r)`` only while ``r <= log(1/(1-|x|))``;
    for larger ``r`` it pokes out of the j-ball sideways.
    """
    x = _in_unit_ball(x)
    ax = float(np.linalg.norm(x))
    u = _direction(x)
    if r <= math.log((1.0 + ax) / (1.0 - ax)):
        return EuclideanBall(u * (1.0 - (1.0 - ax) * math.cosh(r)), (1.0 - ax) * math.sinh(r))
    return EuclideanBall(x * math.exp(-r), 1.0 - math.exp(-r))


# ---------------------------------------------------------------------------
# the j-sphere in the unit disk, polar profile about the origin


@dataclass(frozen=True)
class JSphereProfile:
    """Outer part of the j-circle ``S_j(x, r)`` in the unit disk, in polar form about 0.

    ``f(alpha)`` is ``|y|`` for the boundary point ``y`` with ``angle(x, 0, y) = alpha``,
    valid on ``[0, gamma]``. With ``E = e^r - 1`` and ``beta = |x| cos(alpha)``,
    ``|y|`` is the smaller root of ``(E^2-1) s^2 + 2(beta - E^2) s + E^2 - |x|^2 = 0``.
    """

    x: np.ndarray
    r: float
    gamma: float = field(init=False)

    def __post_init__(self):
        x = as_vector(self.x, 2)
        ax = float(np.linalg.norm(x))
        if not 0 < ax < 1:
            raise ValueError("profile needs 0 < |x| < 1")
        if not self.r > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "x", x)
        if self.r >= math.log((1 + ax) / (1 - ax)):
            gamma = math.pi
        else:
            gamma = 2 * math.asin(min(1.0, (math.exp(self.r) - 1) * (1 - ax) / (2 * ax)))
        object.__setattr__(self, "gamma", gamma)

    @property
    def absx(self) -> float:
        return float(np.linalg.norm(self.x))

    def _alpha(self, alpha):
        a = np.asarray(alpha, dtype=float)
        if np.any(a < -1e-15) or np.any(a > self.gamma + 1e-15):
            raise ValidityError(f"angle outside [0, gamma] = [0, {self.gamma}]")
        return np.clip(a, 0.0, self.gamma)

    def _parts(self, alpha):
        ax = self.absx
        E2 = math.expm1(self.r) ** 2
        beta = ax * np.cos(alpha)
        b = E2 - beta
        disc = np.maximum(E2 * (1 + ax * ax) - ax * ax - 2 * E2 * beta + beta * beta, 0.0)
        return ax, E2, beta, b, np.sqrt(disc)

    def f(self, alpha):
        alpha = self._alpha(alpha)
        ax, E2, beta, b, sq = self._parts(alpha)
        with np.errstate(divide="ignore", invalid="ignore"):
            # rationalized smaller root; stays finite at E^2 = 1 where the
            # quadratic degenerates to a linear equation
            stable = (E2 - ax * ax) / (b + sq)
            direct = (b - sq) / (E2 - 1.0)
        out = np.where(b > 0, stable, direct)
        return float(out) if np.ndim(out) == 0 else out

    def derivatives(self, alpha):
        """``f, f', f''`` by implicit differentiation of the quadratic."""
        alpha = self._alpha(alpha)
        rho = np.asarray(self.f(alpha))
        ax = self.absx
        E2 = math.expm1(self.r) ** 2
        beta = ax * np.cos(alpha)
        db = -ax * np.sin(alpha)
        d2b = -beta
        D = (E2 - 1.0) * rho + beta - E2
        d1 = -db * rho / D
        dD = (E2 - 1.0) * d1 + db
        d2 = (-d2b * rho - db * d1 - dD * d1) / D
        return rho, d1, d2

    def point(self, alpha):
        """Boundary point(s) at angle ``alpha``, rotated into the frame of ``x`` (upper side)."""
        rho = np.asarray(self.f(alpha))
        u = self.x / self.absx
        w = np.array([-u[1], u[0]])
        a = np.asarray(alpha, dtype=float)
        return rho[..., None] * (np.cos(a)[..., None] * u + np.sin(a)[..., None] * w)

    def curvature(self, alpha):
        rho, d1, d2 = self.derivatives(alpha)
        return polar_curvature(rho, d1, d2)

    def check(self, alpha, tol: float = 1e-9) -> float:
        """Compare ``f(alpha)`` with a bracketed root of ``j(x, .) = r`` on the ray at ``alpha``."""
        alpha = float(self._alpha(alpha))
        ax = self.absx
        u = self.x / ax
        w = np.array([-u[1], u[0]])
        d = math.cos(alpha) * u + math.sin(alpha) * w
        G = UnitBall(2)
        g = lambda s: j_metric(G, self.x, s * d) - self.r  # noqa: E731
        lo, hi = ax * (1 - 1e-15), 1.0 - 1e-15
        # at alpha = gamma the root is the bracket end |x| itself
        root = ax if g(lo) >= 0 else brentq(g, lo, hi, xtol=1e-15, rtol=1e-15)
        err = abs(root - self.f(alpha))
        if err > tol:
            raise AssertionError(f"profile value off by {err} at alpha={alpha}")
        return err


def j_sphere_profile(x, r: float) -> JSphereProfile:
    return JSphereProfile(as_vector(x, 2), float(r))


def polar_curvature(rho, d1, d2):
    """Curvature of a curve given in polar form by ``rho``, ``rho'``, ``rho''``."""
    return (rho * rho + 2 * d1 * d1 - rho * d2) / (rho * rho + d1 * d1) ** 1.5


# ---------------------------------------------------------------------------
# curvature of j-circles


_REGIONS = {
    "punctured": ("outer", "inner"),
    "half-plane": ("upper", "lower"),
    "disk": ("inner", "outer"),
    "any": ("far",),
}


def curvature_case(G: Domain) -> str:
    if isinstance(G, PuncturedSpace) and G.n == 2 and len(G.punctures) == 1 and np.allclose(G.points[0], 0):
        return "punctured"
    if isinstance(G, HalfSpace) and G.n == 2:
        return "half-plane"
    if isinstance(G, UnitBall) and G.n == 2:
        return "disk"
    return "any"


def j_sphere_curvature(G: Domain, x, r: float, region: str, param: float | None = None) -> float:
    """Curvature of ``S_j(x, r)`` in the plane, piece by piece.

    Regions: punctured plane ``outer``/``inner`` (outside/inside ``B(0, |x|)``);
    half-plane ``upper``/``lower`` (``param`` = abscissa ``t`` with ``|t| < |x| E``);
    unit disk ``inner``/``outer`` (``param`` = angle ``alpha``); any domain
    ``far`` (the part where ``d(y) >= d(x)``).
    """
    x = as_vector(x, 2)
    G.check(x)
    E = math.expm1(r)
    if region == "far":
        return 1.0 / (E * G.distance(x))
    case = curvature_case(G)
    if region not in _REGIONS[case]:
        raise ConfigurationError(f"region {region!r} does not apply to {G.name}")
    ax = float(np.linalg.norm(x))
    if case == "punctured":
        if region == "outer":
            return 1.0 / (ax * E)
        return math.exp(r) * abs(2.0 - math.exp(r)) / (ax * E)
    if case == "half-plane":
        if x[0] != 0.0:
            raise ConfigurationError("half-plane case needs x on the vertical axis")
        if region == "upper":
            return 1.0 / (E * x[1])
        if param is None or not abs(param) < ax * E:
            raise ValidityError("lower part needs |t| < |x| (e^r - 1)")
        return ax * ax / (E * (ax * ax + param * param) ** 1.5)
    if region == "inner":
        return 1.0 / (E * (1.0 - ax))
    if param is None:
        raise ValidityError("outer part needs the angle alpha")
    return float(j_sphere_profile(x, r).curvature(param))


# ---------------------------------------------------------------------------
# generic sphere sampling


@dataclass(frozen=True)
class SphereSample:
    """Boundary points of a metric circle on equally spaced rays from its center."""

    angles: np.ndarray
    points: np.ndarray
    skipped: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.points)


def sample_metric_sphere_2d(
    G: Domain, kind, x, r: float, N: int, offset: float = 0.0, tol: float = RAY_TOL
) -> SphereSample:
    """Sample ``S_m(x, r)`` on ``N`` rays from ``x`` at equally spaced angles.

    Rays on which the target is not attained inside ``G`` are skipped and
    reported in ``skipped`` (angles).
    """
    kind = MetricKind.parse(kind)
    if kind is MetricKind.QUASIHYPERBOLIC:
        raise ConfigurationError("no sphere sampler for the quasihyperbolic metric")
    if N < 8:
        raise ValueError("need at least 8 rays")
    x = as_vector(x, 2)
    G.check(x)
    f = metric_function(kind, G, x)
    angles, dirs = directions_2d(N, offset)
    sol = solve_radii_along_rays(G, f, x, dirs, r, tol)
    if not sol.reachable.any():
        raise EmptyBoundaryError(f"no ray from {x} reaches {kind.symbol} = {r} inside {G.name}")
    keep = sol.reachable
    return SphereSample(angles[keep], sol.points[keep], angles[~keep], sol.values[keep])


def polar_radii(G: Domain, kind, x, r: float, angles) -> np.ndarray:
    """Distances from ``x`` to ``S_m(x, r)`` along rays at the given angles (``nan`` if unreachable)."""
    x = as_vector(x, 2)
    angles = np.asarray(angles, dtype=float)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=-1).reshape(-1, 2)
    sol = solve_radii_along_rays(G, metric_function(kind, G, x), x, dirs, r)
    return sol.t.reshape(angles.shape)


# ---------------------------------------------------------------------------
# the line construction for inscribed balls in other domains


def line_construction_ball(G: Domain, x, r: float) -> EuclideanBall:
    """Ball on the chord of ``B_j(x, r)`` along the line through ``x`` and a nearest boundary point.

    In the unit ball this is :func:`j_ball_inscribed`; elsewhere it need not
    even lie inside the j-ball.
    """
    x = as_vector(x, 2)
    G.check(x)
    if isinstance(G, PuncturedSpace):
        q = G.points[np.argmin(np.linalg.norm(G.points - x, axis=1))]
        d = (q - x) / np.linalg.norm(q - x)
    elif isinstance(G, UnitBall):
        d = _direction(x)
    elif isinstance(G, HalfSpace):
        d = -basis_vector(2, 1)
    else:
        raise ConfigurationError(f"no nearest-point rule for {G.name}")
    f = metric_function(MetricKind.DISTANCE_RATIO, G, x)
    sol = solve_radii_along_rays(G, f, x, np.stack([d, -d]), r)
    if not sol.reachable.all():
        raise EmptyBoundaryError("j-sphere not reached along the line")
    y, z = sol.points
    return EuclideanBall(0.5 * (y + z), 0.5 * float(np.linalg.norm(y - z)))


def largest_inscribed_ball(boundary: np.ndarray, inside, centers: np.ndarray, polish: bool = True) -> EuclideanBall:
    """Best ball over candidate ``centers``: radius = distance to the sampled ``boundary``.

    ``inside`` is a predicate on points; centers outside the region are ignored.
    With ``polish`` the best grid center is improved by Nelder-Mead.
    """
    centers = np.atleast_2d(centers)
    ok = np.asarray(inside(centers), dtype=bool)
    if not ok.any():
        raise EmptyBoundaryError("no candidate center lies inside the region")
    c = centers[ok]

    def clearance(C):
        return np.min(np.linalg.norm(C[:, None, :] - boundary[None, :, :], axis=-1), axis=1)

    dist = clearance(c)
    k = int(np.argmax(dist))
    best_c, best_r = c[k], float(dist[k])
    if polish:
        def neg(p):
            p = np.asarray(p)[None, :]
            return -float(clearance(p)[0]) if np.asarray(inside(p), dtype=bool)[0] else 0.0

        res = minimize(neg, best_c, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12})
        if -res.fun > best_r:
            best_c, best_r = np.asarray(res.x), float(-res.fun)
    return EuclideanBall(best_c, best_r)


def collinear_runs(points: np.ndarray, tol: float = 1e-8, min_run: int = 10, closed: bool = False):
    """Maximal index ranges ``[i, j)`` of consecutive points lying on one line within ``tol``.

    With ``closed`` the polyline is cyclic: scanning starts at its sharpest
    corner and the returned ranges index into the original array modulo its length.
    """
    P = np.asarray(points, dtype=float)
    n = len(P)
    shift = 0
    if closed and n >= 3:
        prev, nxt = np.roll(P, 1, axis=0), np.roll(P, -1, axis=0)
        u, v = P - prev, nxt - P
        turn = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]) / (
            np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1) + 1e-300
        )
        shift = int(np.argmax(turn))
        P = np.roll(P, -shift, axis=0)
    runs = []
    i = 0
    while i < n - 1:
        j = i + 2
        while j <= n:
            a, b = P[i], P[j - 1]
            ab = b - a
            L = np.linalg.norm(ab)
            if L == 0:
                break
            seg = P[i:j] - a
            dev = np.abs(seg[:, 0] * ab[1] - seg[:, 1] * ab[0]) / L
            if dev.max() > tol:
                break
            j += 1
        j -= 1
        if j - i >= min_run:
            runs.append(((i + shift) % n, (j + shift - 1) % n + 1))
            i = j
        else:
            i += 1
    return runs
