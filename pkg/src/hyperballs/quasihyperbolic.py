"""Numerical quasihyperbolic distance in the unit ball.

The distance is the infimum of ``∫ |dz| / d(z)`` over curves joining two
points. In the unit ball ``d(z) = 1 - |z|`` and the problem is rotationally
symmetric, so every geodesic lies in the 2-plane through 0, x and y. We
minimize the length of a polyline in that plane, doubling the vertex count
until the improvement drops below ``tol / 2``. The starting polyline follows
the hyperbolic geodesic, which is within a factor 2 of optimal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from .errors import DomainError, InternalConsistencyError, NoConvergence
from .geometry import Domain, UnitBall
from .metrics import rho_unit_ball

MAX_LEVELS = 10
MAX_STEPS = 500
INITIAL_SEGMENTS = 8

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL_T = 0.5 * (_GL_NODES + 1.0)
_GL_W = 0.5 * _GL_WEIGHTS


@dataclass(frozen=True)
class GeodesicPath:
    points: np.ndarray
    length: float

    def __len__(self):
        return len(self.points)


def qh_length(G: Domain, path, rtol: float = 1e-10) -> float:
    """Quasihyperbolic length of a polyline, integrated segment by segment.

    Each segment is integrated adaptively (Gauss-Kronrod) with the point of
    the segment closest to the origin as a break point, since the unit-ball
    density has a kink there.
    """
    pts = np.atleast_2d(np.asarray(path, dtype=float))
    if len(pts) == 0:
        raise ValueError("empty path")
    if not np.all(G.contains(pts)):
        raise DomainError("path leaves the domain")
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        v = b - a
        L = float(np.linalg.norm(v))
        if L == 0.0:
            continue

        def integrand(t, a=a, v=v):
            return 1.0 / G.distance(a + t * v)

        tstar = -float(a @ v) / (L * L)
        points = [tstar] if 0.0 < tstar < 1.0 else None
        val, _ = integrate.quad(integrand, 0.0, 1.0, points=points, epsabs=0.0, epsrel=rtol, limit=200)
        total += L * val
    return total


def chord_length(a, b) -> np.ndarray:
    """Exact quasihyperbolic length of straight segments ``[a, b]`` in the unit ball.

    Vectorized over leading dimensions. Writing ``s`` for arc length along the
    line measured from its foot point at distance ``h`` from 0, the density is
    ``(1 + w) / (A² - s²)`` with ``w = sqrt(s² + h²)``, ``A² = 1 - h²``,
    which integrates in elementary functions.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    v = b - a
    L = np.linalg.norm(v, axis=-1)
    safe = np.where(L > 0, L, 1.0)
    u = v / safe[..., None]
    sa = np.einsum("...j,...j->...", a, u)
    foot = a - sa[..., None] * u
    h2 = np.einsum("...j,...j->...", foot, foot)
    sb = sa + L
    out = _antiderivative(sb, h2) - _antiderivative(sa, h2)
    return np.where(L > 0, out, 0.0)


def _antiderivative(s, h2):
    sgn = np.sign(s)
    s = np.abs(s)
    h = np.sqrt(h2)
    A2 = 1.0 - h2
    A = np.sqrt(A2)
    w = np.sqrt(s * s + h2)
    one_m_w2 = (1.0 - w) * (1.0 + w)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = 0.5 * np.log((A + s) ** 2 / one_m_w2) / A
        t2 = np.log((A * w + s) / ((s + w) * np.sqrt(one_m_w2)))
        t3 = h2 / (A * (1.0 + A)) * (np.log(A * w + s) - np.log(h) - 0.5 * np.log(one_m_w2))
    t2 = np.where(s == 0, 0.0, t2)
    t3 = np.where((h2 == 0) | (s == 0), 0.0, t3)
    return sgn * (t1 + t2 + t3)


def polyline_length(points) -> float:
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return 0.0
    return float(np.sum(chord_length(pts[:-1], pts[1:])))


# ---------------------------------------------------------------------------
# discrete problem in the plane of 0, x, y
#
# Within one refinement level each interior vertex moves only along the normal
# of the polyline it started from. Tangential motion merely reparametrizes the
# curve; left free, it produces flat directions in which vertices collapse
# onto each other and the optimizer stalls.


def _functional_points(P):
    """Gauss-Legendre length of the polyline ``P`` and its gradient at interior vertices."""
    v = P[1:] - P[:-1]
    L = np.linalg.norm(v, axis=1)
    u = v / np.where(L > 0, L, 1.0)[:, None]
    # split each segment at its point closest to 0, where the density has a kink
    tstar = -np.einsum("ij,ij->i", P[:-1], v) / np.where(L > 0, L * L, 1.0)
    tstar = np.clip(tstar, 0.0, 1.0)[:, None]
    T = np.hstack([tstar * _GL_T, tstar + (1.0 - tstar) * _GL_T])
    W = np.hstack([tstar * _GL_W, (1.0 - tstar) * _GL_W])
    Z = P[:-1, None, :] + T[..., None] * v[:, None, :]
    r = np.linalg.norm(Z, axis=2)
    phi = 1.0 / (1.0 - r)
    grad_phi = Z * (phi * phi / np.where(r > 0, r, 1.0))[..., None]
    mean_phi = np.sum(phi * W, axis=1)
    value = float(np.sum(L * mean_phi))

    tang = mean_phi[:, None] * u
    g_end = tang + L[:, None] * np.einsum("sk,skj->sj", W * T, grad_phi)
    g_start = -tang + L[:, None] * np.einsum("sk,skj->sj", W * (1.0 - T), grad_phi)
    return value, g_end[:-1] + g_start[1:]


def _normals(P):
    t = P[2:] - P[:-2]
    t /= np.linalg.norm(t, axis=1)[:, None]
    return np.stack([-t[:, 1], t[:, 0]], axis=1)


def _functional(s, base, normals, a2, b2):
    inner = base + s[:, None] * normals
    if np.any(np.einsum("ij,ij->i", inner, inner) >= 1.0):
        return np.inf, np.zeros_like(s)
    value, gz = _functional_points(np.vstack([a2, inner, b2]))
    return value, np.einsum("ij,ij->i", gz, normals)


def _hyperbolic_geodesic_2d(a: complex, b: complex, segments: int) -> np.ndarray:
    """Points on the Poincaré geodesic from ``a`` to ``b``, equally spaced in hyperbolic length."""
    w = (b - a) / (1 - np.conj(a) * b)
    s = np.linspace(0.0, 1.0, segments + 1)
    rad = abs(w)
    ws = np.tanh(s * np.arctanh(rad)) * (w / rad if rad > 0 else 0)
    z = (ws + a) / (1 + np.conj(a) * ws)
    z[0], z[-1] = a, b
    return np.stack([z.real, z.imag], axis=1)


def _refine(points: np.ndarray) -> np.ndarray:
    """Double the vertex count.

    New vertices come from 4-point interpolation along the polyline, unless
    plain midpoints (which keep the length unchanged) give a shorter path.
    """
    ext = np.vstack([2 * points[0] - points[1], points, 2 * points[-1] - points[-2]])
    mid = (-ext[:-3] + 9 * ext[1:-2] + 9 * ext[2:-1] - ext[3:]) / 16
    chord = 0.5 * (points[:-1] + points[1:])
    outside = np.einsum("ij,ij->i", mid, mid) >= 1.0 - 1e-9
    mid[outside] = chord[outside]
    out = np.empty((2 * len(points) - 1, points.shape[1]))
    out[0::2] = points
    out[1::2] = mid
    if polyline_length(out) <= polyline_length(points):
        return out
    out[1::2] = chord
    return out


def _banded_hessian(grad, s, eps):
    """Tridiagonal Hessian from central differences of the gradient.

    The functional is a sum of terms coupling neighbouring vertices only, so
    perturbing every third variable at once recovers all three diagonals.
    """
    n = len(s)
    ab = np.zeros((2, n))  # upper form for solveh_banded: ab[0,1:] super, ab[1] diag
    for color in range(3):
        idx = np.arange(color, n, 3)
        e = np.zeros(n)
        e[idx] = eps[idx]
        col = (grad(s + e) - grad(s - e)) / 2.0
        ab[1, idx] = col[idx] / eps[idx]
        up = idx[idx > 0]
        ab[0, up] = col[up - 1] / eps[up]
    return ab


def _descend(pts, a2, b2, max_steps, tol):
    """Newton iteration on the normal offsets of the interior vertices."""
    base, normals = pts[1:-1], _normals(pts)
    h = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    phi = 1.0 / (1.0 - np.linalg.norm(base, axis=1))
    stiffness = phi * (1.0 / h[:-1] + 1.0 / h[1:])
    eps = 1e-6 / np.sqrt(stiffness)

    def fun(s):
        return _functional(s, base, normals, a2, b2)

    def grad(s):
        return fun(s)[1]

    s = np.zeros(len(base))
    value, g = fun(s)
    for _ in range(max_steps):
        ab = _banded_hessian(grad, s, eps)
        try:
            step = -linalg.solveh_banded(ab, g)
        except linalg.LinAlgError:
            step = -g / stiffness
        predicted = -0.5 * float(g @ step)
        if predicted < tol * 1e-4:
            break
        alpha = 1.0
        while alpha > 1e-8:
            trial_value, trial_g = fun(s + alpha * step)
            if trial_value < value:
                break
            alpha *= 0.5
        else:
            break
        s, value, g = s + alpha * step, trial_value, trial_g
    return np.vstack([a2, base + s[:, None] * normals, b2])


def _optimize_2d(a2, b2, tol, max_levels=MAX_LEVELS, max_steps=MAX_STEPS):
    pts = _hyperbolic_geodesic_2d(complex(*a2), complex(*b2), INITIAL_SEGMENTS)
    history = []
    prev = None
    for level in range(max_levels):
        if level > 0:
            pts = _refine(pts)
        value = polyline_length(pts)
        cand = _descend(pts, a2, b2, max_steps, tol)
        cand_value = polyline_length(cand)
        if cand_value <= value:
            pts, value = cand, cand_value
        history.append(value)
        if prev is not None and prev - value < tol / 2:
            return pts, value, history
        prev = value
    raise NoConvergence(
        f"quasihyperbolic distance did not converge in {max_levels} refinement levels",
        best=history[-1],
        gap=history[-2] - history[-1] if len(history) > 1 else None,
    )


TINY = 1e-150


def _plane_basis(x, y):
    # subnormal |x| cannot be normalized; such x is treated as the origin
    nx = np.linalg.norm(x)
    e1 = x / nx if nx > TINY else y / np.linalg.norm(y)
    perp = y - (y @ e1) * e1
    return e1, perp


def qh_distance(x, y, tol: float = 1e-6, return_history: bool = False):
    """Quasihyperbolic distance between ``x`` and ``y`` in the unit ball.

    Returns ``(value, GeodesicPath)``; with ``return_history`` also the list
    of per-level values. Raises :class:`InternalConsistencyError` if the
    value leaves the band ``rho/2 <= k <= rho`` by more than ``tol``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if x @ x >= 1.0 or y @ y >= 1.0:
        raise DomainError("quasihyperbolic distance needs points strictly inside the unit ball")
    history = []
    if np.array_equal(x, y):
        result = (0.0, GeodesicPath(x[None, :].copy(), 0.0))
        return (*result, history) if return_history else result

    e1, perp = _plane_basis(x, y)
    npx, ny = np.linalg.norm(perp), np.linalg.norm(y)
    if npx <= 1e-14 * max(ny, 1e-300) or np.linalg.norm(x) <= TINY:
        # x, y and 0 are collinear: the radial path is the geodesic
        ax, ay = np.linalg.norm(x), ny
        if x @ y >= 0:
            value = abs(np.log((1.0 - ax) / (1.0 - ay)))
            pts = np.vstack([x, y])
        else:
            value = -np.log(1.0 - ax) - np.log(1.0 - ay)
            pts = np.vstack([x, np.zeros_like(x), y])
        result = (float(value), GeodesicPath(pts, float(value)))
        return (*result, [float(value)]) if return_history else result

    e2 = perp / npx
    a2 = np.array([x @ e1, x @ e2])
    b2 = np.array([y @ e1, y @ e2])
    pts2, value, history = _optimize_2d(a2, b2, tol)
    pts = pts2[:, :1] * e1[None, :] + pts2[:, 1:] * e2[None, :]
    pts[0], pts[-1] = x, y

    rho = float(rho_unit_ball(x, y))
    if not (rho / 2 - tol <= value <= rho + tol):
        raise InternalConsistencyError(
            f"quasihyperbolic value {value} outside the band [{rho / 2}, {rho}]"
        )
    result = (value, GeodesicPath(pts, value))
    return (*result, history) if return_history else result


def qh_length_unit_ball(path) -> float:
    """Adaptive quasihyperbolic length of a path in the unit ball of matching dimension."""
    pts = np.atleast_2d(np.asarray(path, dtype=float))
    return qh_length(UnitBall(pts.shape[1]), pts)
