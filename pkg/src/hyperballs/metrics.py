"""Closed-form hyperbolic-type metrics: j, the unit-ball hyperbolic metric, chordal.

All functions broadcast over a batch of second arguments of shape ``(N, n)``.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import ConfigurationError, DomainError
from .geometry import Domain, UnitBall


class MetricKind(Enum):
    HYPERBOLIC = "rho"
    QUASIHYPERBOLIC = "k"
    DISTANCE_RATIO = "j"
    CHORDAL = "q"

    @classmethod
    def parse(cls, name) -> "MetricKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        for kind, aliases in _ALIASES.items():
            if key in aliases:
                return kind
        raise ConfigurationError(f"unknown metric {name!r}")

    @property
    def symbol(self) -> str:
        return self.value


_ALIASES = {
    MetricKind.HYPERBOLIC: {"rho", "hyperbolic", "h"},
    MetricKind.QUASIHYPERBOLIC: {"k", "quasihyperbolic", "qh"},
    MetricKind.DISTANCE_RATIO: {"j", "distance-ratio", "distance_ratio"},
    MetricKind.CHORDAL: {"q", "chordal"},
}


class _Infinity:
    """The point at infinity of the compactified space (chordal metric only)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


def _batch(y):
    y = np.asarray(y, dtype=float)
    return y, y.ndim == 1


def _finish(v, single):
    return float(v[0]) if single else v


def j_values(dx, dy, dist):
    """Distance-ratio metric from precomputed boundary distances and |x - y|."""
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.log1p(dist / np.minimum(dx, dy))
    return np.where(dist == 0.0, 0.0, v)


def j_metric(G: Domain, x, y):
    """``log(1 + |x - y| / min(d(x), d(y)))`` in the domain ``G``."""
    x = np.asarray(x, dtype=float)
    y, single = _batch(y)
    G.check(x)
    G.check(y)
    Y = np.atleast_2d(y)
    dist = np.linalg.norm(Y - x, axis=-1)
    return _finish(j_values(G.distance(x), G._distance(Y), dist), single)


def rho_values(x, Y):
    """Unchecked hyperbolic distance in the unit ball, ``x`` fixed, ``Y`` batched."""
    nx = x @ x
    ny = np.einsum("ij,ij->i", Y, Y)
    dist = np.linalg.norm(Y - x, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = 2.0 * np.arcsinh(dist / np.sqrt((1.0 - nx) * (1.0 - ny)))
    return np.where(ny >= 1.0, np.inf, v)


def rho_unit_ball(x, y):
    """Hyperbolic (Poincaré) distance in the unit ball."""
    x = np.asarray(x, dtype=float)
    y, single = _batch(y)
    if x @ x >= 1.0 or np.any(np.einsum("...j,...j->...", y, y) >= 1.0):
        raise DomainError("hyperbolic metric needs points strictly inside the unit ball")
    return _finish(rho_values(x, np.atleast_2d(y)), single)


def chordal_values(x, Y):
    dist = np.linalg.norm(Y - x, axis=-1)
    return dist / (np.sqrt(1.0 + x @ x) * np.sqrt(1.0 + np.einsum("ij,ij->i", Y, Y)))


def chordal(x, y):
    """Chordal distance on the compactified space; either argument may be :data:`INFINITY`."""
    if x is INFINITY and y is INFINITY:
        return 0.0
    if x is INFINITY:
        x, y = y, x
    x = np.asarray(x, dtype=float)
    if y is INFINITY:
        return 1.0 / np.sqrt(1.0 + x @ x)
    y, single = _batch(y)
    return _finish(chordal_values(x, np.atleast_2d(y)), single)


def _require_unit_ball(kind, G):
    if not isinstance(G, UnitBall):
        raise ConfigurationError(f"the {kind.name.lower()} metric is only implemented in the unit ball")


def metric_function(kind, G: Domain, x, qh_tol: float = 1e-6):
    """Return ``f(Y)`` evaluating the metric from the fixed point ``x`` on a batch ``Y``.

    The returned callable is unchecked: points outside ``G`` yield ``inf``
    for j and rho (used by the ray solver near the boundary).
    """
    kind = MetricKind.parse(kind)
    x = np.asarray(x, dtype=float)
    if kind is MetricKind.DISTANCE_RATIO:
        dx = G.distance(x)

        def f(Y):
            dy = G._distance(Y)
            v = j_values(dx, dy, np.linalg.norm(Y - x, axis=-1))
            return np.where(dy > 0, v, np.inf)

        return f
    if kind is MetricKind.HYPERBOLIC:
        _require_unit_ball(kind, G)
        return lambda Y: rho_values(x, Y)
    if kind is MetricKind.CHORDAL:
        return lambda Y: chordal_values(x, Y)
    _require_unit_ball(kind, G)
    from .quasihyperbolic import qh_distance

    def f(Y):
        return np.array([qh_distance(x, y, qh_tol)[0] for y in np.atleast_2d(Y)])

    return f


def metric_eval(kind, G: Domain, x, y, qh_tol: float = 1e-6):
    """Evaluate the selected metric between ``x`` and ``y`` (or a batch ``y``)."""
    kind = MetricKind.parse(kind)
    if kind is MetricKind.DISTANCE_RATIO:
        return j_metric(G, x, y)
    if kind is MetricKind.CHORDAL:
        return chordal(x, y)
    _require_unit_ball(kind, G)
    if kind is MetricKind.HYPERBOLIC:
        return rho_unit_ball(x, y)
    G.check(x)
    G.check(y)
    from .quasihyperbolic import qh_distance

    y, single = _batch(y)
    vals = np.array([qh_distance(x, yy, qh_tol)[0] for yy in np.atleast_2d(y)])
    return _finish(vals, single)
