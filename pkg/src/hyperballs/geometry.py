"""Euclidean primitives, domains with boundary distance, and the ray root-finder.

Points are plain numpy arrays. Functions that take points accept either a
single point of shape ``(n,)`` or a batch of shape ``(N, n)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, MonotonicityWarning, UnreachableOnRay

#: default tolerance on the metric value for ray bisection
RAY_TOL = 1e-12
#: number of uniform samples used to bracket the first crossing on bounded rays
_SCAN_UNIFORM = 64
#: geometric samples approaching the exit point (t_exit * (1 - 2**-k))
_SCAN_TAIL = np.arange(7, 53)
#: geometric samples on unbounded rays (t = 2**k)
_SCAN_UNBOUNDED = np.arange(-30, 61)


def as_vector(p, n=None) -> np.ndarray:
    """Return ``p`` as a finite float vector of length >= 2."""
    v = np.asarray(p, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError(f"expected a vector with at least 2 coordinates, got shape {v.shape}")
    if n is not None and v.size != n:
        raise ValueError(f"expected {n} coordinates, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector coordinates must be finite")
    return v


def unit_vector(d) -> np.ndarray:
    d = as_vector(d)
    nd = np.linalg.norm(d)
    if nd == 0.0:
        raise ValueError("direction must be a nonzero vector")
    return d / nd


def basis_vector(n: int, i: int = 0) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def norm(p) -> np.ndarray | float:
    return np.linalg.norm(np.asarray(p, dtype=float), axis=-1)


# ---------------------------------------------------------------------------
# domains


class Domain:
    """Base class for the proper subdomains ``G`` of R^n used here.

    Subclasses implement ``_contains``, ``_distance`` (vectorized, unchecked)
    and ``ray_exit``.
    """

    n: int
    name = "domain"

    def contains(self, p) -> np.ndarray | bool:
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != self.n:
            raise DomainError(f"{self.name} lives in R^{self.n}, got points of dimension {p.shape[-1]}")
        out = self._contains(np.atleast_2d(p))
        return bool(out[0]) if p.ndim == 1 else out

    def distance(self, p):
        """Distance to the boundary without a membership check."""
        p = np.asarray(p, dtype=float)
        out = self._distance(np.atleast_2d(p))
        return float(out[0]) if p.ndim == 1 else out

    def check(self, p) -> None:
        ok = self.contains(p)
        if not np.all(ok):
            raise DomainError(f"point(s) outside {self.name}: {np.asarray(p)[..., :]!r}"[:200])

    def ray_exit(self, x: np.ndarray, d: np.ndarray) -> np.ndarray:
        """Ray parameters where ``x + t d`` first leaves the domain (``inf`` if never)."""
        raise NotImplementedError

    def _contains(self, p):
        raise NotImplementedError

    def _distance(self, p):
        raise NotImplementedError


@dataclass(frozen=True)
class UnitBall(Domain):
    n: int = 2
    name = "unit ball"

    def _contains(self, p):
        return np.einsum("ij,ij->i", p, p) < 1.0

    def _distance(self, p):
        return 1.0 - np.linalg.norm(p, axis=-1)

    def ray_exit(self, x, d):
        d = np.atleast_2d(d)
        xd = d @ x
        return -xd + np.sqrt(xd * xd + 1.0 - x @ x)


@dataclass(frozen=True)
class HalfSpace(Domain):
    """``{x : x_n > 0}``; the last coordinate is the height above the boundary."""

    n: int = 2
    name = "half-space"

    def _contains(self, p):
        return p[:, -1] > 0.0

    def _distance(self, p):
        return p[:, -1].copy()

    def ray_exit(self, x, d):
        d = np.atleast_2d(d)
        dn = d[:, -1]
        with np.errstate(divide="ignore"):
            return np.where(dn < 0.0, -x[-1] / np.where(dn < 0, dn, -1.0), np.inf)


@dataclass(frozen=True)
class PuncturedSpace(Domain):
    """R^n with finitely many points removed."""

    punctures: tuple = ((0.0, 0.0),)
    n: int = field(init=False)
    name = "punctured space"

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.punctures, dtype=float))
        if pts.shape[0] == 0:
            raise ValueError("need at least one puncture")
        object.__setattr__(self, "punctures", tuple(map(tuple, pts)))
        object.__setattr__(self, "n", pts.shape[1])

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.punctures)

    def _distance(self, p):
        diff = p[:, None, :] - self.points[None, :, :]
        return np.min(np.linalg.norm(diff, axis=-1), axis=1)

    def _contains(self, p):
        return self._distance(p) > 0.0

    def ray_exit(self, x, d):
        d = np.atleast_2d(d)
        out = np.full(d.shape[0], np.inf)
        for q in self.points:
            w = q - x
            t = d @ w
            miss = np.linalg.norm(w[None, :] - t[:, None] * d, axis=-1)
            hit = (t > 0) & (miss <= 1e-14 * max(1.0, np.linalg.norm(w)))
            out = np.where(hit, np.minimum(out, t), out)
        return out


@dataclass(frozen=True)
class ConvexPolygon2D(Domain):
    """Strictly convex polygon with counterclockwise vertices."""

    vertices: tuple = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))
    n: int = field(init=False, default=2)
    name = "convex polygon"

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError("polygon needs at least three 2-D vertices")
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if not np.all(cross > 0):
            raise ValueError("vertices must be strictly convex and counterclockwise")
        object.__setattr__(self, "vertices", tuple(map(tuple, v)))

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.vertices)

    def _edges(self):
        a = self.points
        return a, np.roll(a, -1, axis=0)

    def _contains(self, p):
        a, b = self._edges()
        e = b - a
        rel = p[:, None, :] - a[None, :, :]
        cross = e[None, :, 0] * rel[:, :, 1] - e[None, :, 1] * rel[:, :, 0]
        return np.all(cross > 0, axis=1)

    def _distance(self, p):
        a, b = self._edges()
        e = b - a
        rel = p[:, None, :] - a[None, :, :]
        s = np.clip(np.einsum("nkj,kj->nk", rel, e) / np.einsum("kj,kj->k", e, e), 0.0, 1.0)
        nearest = a[None] + s[..., None] * e[None]
        return np.min(np.linalg.norm(p[:, None, :] - nearest, axis=-1), axis=1)

    def ray_exit(self, x, d):
        d = np.atleast_2d(d)
        a, b = self._edges()
        e = b - a
        normal = np.stack([e[:, 1], -e[:, 0]], axis=1)  # outward for CCW
        num = np.einsum("kj,kj->k", a - x[None, :], normal)  # >= 0 inside
        den = d @ normal.T
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            t = np.where(den > 0, num[None, :] / den, np.inf)
        return np.min(t, axis=1)


def rectangle(width: float, height: float, corner=(0.0, 0.0)) -> ConvexPolygon2D:
    x0, y0 = corner
    return ConvexPolygon2D(((x0, y0), (x0 + width, y0), (x0 + width, y0 + height), (x0, y0 + height)))


def boundary_distance(G: Domain, x) -> float | np.ndarray:
    """Euclidean distance from ``x`` to the boundary of ``G``.

    Raises :class:`DomainError` if ``x`` is not in ``G``.
    """
    G.check(x)
    return G.distance(x)


# ---------------------------------------------------------------------------
# Euclidean balls


@dataclass(frozen=True)
class EuclideanBall:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    def contains(self, y):
        return np.linalg.norm(np.asarray(y, dtype=float) - self.center, axis=-1) < self.radius

    def boundary_points_2d(self, count: int) -> np.ndarray:
        th = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return self.center[None, :2] + self.radius * np.stack([np.cos(th), np.sin(th)], axis=1)


def ball_contains_ball(outer: EuclideanBall, inner: EuclideanBall) -> bool:
    return float(np.linalg.norm(outer.center - inner.center)) + inner.radius <= outer.radius


# ---------------------------------------------------------------------------
# ray root-finding


@dataclass
class RaySolution:
    """Result of solving ``f(x + t d) = target`` on a batch of rays.

    Entries for unreachable rays are ``nan`` and flagged in ``reachable``.
    ``t_lo``/``t_hi`` is the final bisection bracket, with ``f_lo <= target <= f_hi``.
    """

    points: np.ndarray
    t: np.ndarray
    t_lo: np.ndarray
    t_hi: np.ndarray
    f_lo: np.ndarray
    f_hi: np.ndarray
    values: np.ndarray
    reachable: np.ndarray
    monotone: np.ndarray


def _scan_parameters(t_exit: np.ndarray, density: int = 1) -> np.ndarray:
    """Scan grid per ray, shape (N, K); strictly increasing, excludes 0 and t_exit."""
    finite = np.isfinite(t_exit)
    u = np.arange(1, density * _SCAN_UNIFORM) / (density * _SCAN_UNIFORM)
    tail = 1.0 - np.exp2(-_SCAN_TAIL.astype(float))
    frac = np.unique(np.concatenate([u, tail]))
    unb = np.exp2(_SCAN_UNBOUNDED.astype(float))
    if density > 1:
        unb = np.exp2(np.linspace(_SCAN_UNBOUNDED[0], _SCAN_UNBOUNDED[-1], density * len(_SCAN_UNBOUNDED)))
    K = max(len(frac), len(unb))
    grid = np.empty((t_exit.size, K))
    fpad = np.concatenate([frac, np.full(K - len(frac), frac[-1])])
    upad = np.concatenate([unb, np.full(K - len(unb), unb[-1])])
    te = np.where(finite, t_exit, 1.0)
    grid[:] = np.where(finite[:, None], te[:, None] * fpad[None, :], upad[None, :])
    return grid


def _first_crossing(vals: np.ndarray, target: float):
    hit = vals >= target
    reachable = hit.any(axis=1)
    k = np.argmax(hit, axis=1)
    return k, reachable


def solve_radii_along_rays(
    G: Domain,
    f: Callable[[np.ndarray], np.ndarray],
    x,
    dirs,
    target: float,
    tol: float = RAY_TOL,
    max_iter: int = 200,
) -> RaySolution:
    """Vectorized version of :func:`solve_radius_along_ray` over many directions.

    ``f`` maps an ``(N, n)`` array of points to ``(N,)`` values and must
    vanish at ``x``. Each ray is scanned on a coarse grid to bracket the
    first crossing of ``target``; non-monotone scans trigger a
    :class:`MonotonicityWarning` and a denser rescan of those rays.
    """
    x = as_vector(x)
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    N = dirs.shape[0]
    rows = np.arange(N)
    t_exit = G.ray_exit(x, dirs)

    def evaluate(sub_dirs, tt):
        pts = x[None, None, :] + tt[..., None] * sub_dirs[:, None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            v = f(pts.reshape(-1, x.size)).reshape(tt.shape)
        return np.where(np.isnan(v), np.inf, v)

    grid = _scan_parameters(t_exit)
    vals = evaluate(dirs, grid)
    k, reachable = _first_crossing(vals, target)
    prefix = np.arange(vals.shape[1])[None, :] <= k[:, None]
    prev = np.concatenate([np.zeros((N, 1)), vals[:, :-1]], axis=1)
    slack = 1e-12 * np.maximum(1.0, np.abs(vals))
    with np.errstate(invalid="ignore"):
        monotone = ~np.any(prefix & (vals < prev - slack), axis=1)
    lo = np.where(k > 0, grid[rows, np.maximum(k - 1, 0)], 0.0)
    hi = grid[rows, k]

    if not monotone.all():
        warnings.warn(
            f"{int((~monotone).sum())} ray(s) non-monotone before the first crossing; rescanning on a finer grid",
            MonotonicityWarning,
            stacklevel=2,
        )
        bad = np.flatnonzero(~monotone)
        fine = _scan_parameters(t_exit[bad], density=16)
        fk, freach = _first_crossing(evaluate(dirs[bad], fine), target)
        sub = np.arange(bad.size)
        lo[bad] = np.where(fk > 0, fine[sub, np.maximum(fk - 1, 0)], 0.0)
        hi[bad] = fine[sub, fk]
        reachable[bad] = freach

    def at(tt):
        return evaluate(dirs, tt[:, None])[:, 0]

    f_lo = np.where(lo > 0, at(lo), 0.0)
    f_hi = at(hi)
    t = 0.5 * (lo + hi)
    val = at(t)
    active = reachable.copy()
    for _ in range(max_iter):
        done = (np.abs(val - target) <= tol) | (hi - lo <= 4 * np.finfo(float).eps * np.maximum(hi, 1e-300))
        active &= ~done
        if not active.any():
            break
        up = active & (val < target)
        down = active & (val >= target)
        lo = np.where(up, t, lo)
        f_lo = np.where(up, val, f_lo)
        hi = np.where(down, t, hi)
        f_hi = np.where(down, val, f_hi)
        t = np.where(active, 0.5 * (lo + hi), t)
        val = np.where(active, at(t), val)

    nan = np.full(N, np.nan)
    t = np.where(reachable, t, nan)
    points = x[None, :] + t[:, None] * dirs
    return RaySolution(
        points=points,
        t=t,
        t_lo=np.where(reachable, lo, nan),
        t_hi=np.where(reachable, hi, nan),
        f_lo=np.where(reachable, f_lo, nan),
        f_hi=np.where(reachable, f_hi, nan),
        values=np.where(reachable, val, nan),
        reachable=reachable,
        monotone=monotone,
    )


def solve_radius_along_ray(G: Domain, f, x, direction, target: float, tol: float = RAY_TOL) -> np.ndarray:
    """Point ``y = x + t* d`` with ``f(y) = target`` on the ray from ``x``.

    Raises :class:`UnreachableOnRay` if the ray exits ``G`` first.
    """
    d = unit_vector(direction)
    sol = solve_radii_along_rays(G, f, x, d[None, :], target, tol)
    if not sol.reachable[0]:
        raise UnreachableOnRay(f"target {target} not attained before the ray leaves {G.name}")
    return sol.points[0]


def directions_2d(count: int, offset: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Equally spaced angles and the matching unit vectors in the plane."""
    th = offset + 2 * math.pi * np.arange(count) / count
    return th, np.stack([np.cos(th), np.sin(th)], axis=1)


def random_directions(count: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
