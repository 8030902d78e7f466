"""Closed-form inclusion radii between balls of j, rho, k and q in the unit ball.

Every ``radii_*`` function takes ``(absx, r)`` and returns an
:class:`InclusionBound` for ``B_A(x, m) < B_B(x, r) < B_A(x, M)``; the pair
of metrics ``(A, B)`` is recorded in :data:`CLAIMS`.  ``math.inf`` is a
legal radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .errors import ValidityError
from .metrics import MetricKind

INF = math.inf
SQRT2_MINUS_1 = math.sqrt(2.0) - 1.0
TWO_MINUS_SQRT3 = 2.0 - math.sqrt(3.0)


@dataclass(frozen=True)
class Validity:
    """Thresholds and intervals restricting ``r`` for a given ``|x|``."""

    r0: float | None = None
    r1: float | None = None
    r2: float | None = None
    intervals: dict = field(default_factory=dict)
    interval: str | None = None
    in_range: bool = True
    note: str = ""


@dataclass(frozen=True)
class InclusionBound:
    claim: str
    absx: float
    r: float
    m: float
    M: float
    sharp: bool
    validity: Validity = field(default_factory=Validity)
    components: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        return self.M / self.m


def _check(absx: float, r: float):
    if not 0.0 <= absx < 1.0:
        raise ValidityError(f"|x| must lie in [0, 1), got {absx}")
    if not r > 0.0:
        raise ValidityError(f"r must be positive, got {r}")


def q_threshold(absx: float) -> float:
    """``r0``: the chordal ball ``B_q(x, r)`` lies in the unit ball iff ``r < r0``."""
    return (1.0 - absx) / math.sqrt(2.0 * (1.0 + absx * absx))


def _require_q_ball(absx: float, r: float) -> float:
    r0 = q_threshold(absx)
    if r >= r0:
        raise ValidityError(f"r = {r} must be below r0 = {r0} for |x| = {absx}")
    return r0


# ---------------------------------------------------------------------------
# j and rho


def _m_j_rho(absx, r):
    m1 = math.log1p((1.0 + absx) * math.sinh(r / 2.0))
    m2 = math.log1p((1.0 - absx) * math.expm1(r) / 2.0)
    return m1, m2


def _M_j_rho(absx, r):
    return math.log1p((1.0 + absx) * math.expm1(r) / 2.0)


def radii_j_in_rho(absx: float, r: float) -> InclusionBound:
    """``B_j(x, m) < B_rho(x, r) < B_j(x, M)``."""
    _check(absx, r)
    m1, m2 = _m_j_rho(absx, r)
    return InclusionBound("jrhoj", absx, r, max(m1, m2), _M_j_rho(absx, r), True, components={"m1": m1, "m2": m2})


def _m_rho_j(absx, r):
    return math.log1p(2.0 * math.expm1(r) / (1.0 + absx))


def _M_rho_j(absx, r):
    a = 2.0 * math.asinh(math.expm1(r) / (1.0 + absx))
    b = math.log((2.0 * math.exp(r) - 1.0 - absx) / (1.0 - absx))
    return a, b


def radii_rho_in_j(absx: float, r: float) -> InclusionBound:
    """``B_rho(x, m) < B_j(x, r) < B_rho(x, M)``."""
    _check(absx, r)
    a, b = _M_rho_j(absx, r)
    return InclusionBound("rhojrho", absx, r, _m_rho_j(absx, r), min(a, b), True, components={"M1": a, "M2": b})


# ---------------------------------------------------------------------------
# j and k, obtained from the j/rho radii through rho/2 <= k <= rho


def radii_j_in_k(absx: float, r: float) -> InclusionBound:
    """``B_j(x, m) < B_k(x, r) < B_j(x, M)``."""
    _check(absx, r)
    m1, m2 = _m_j_rho(absx, r / 2.0)
    return InclusionBound("jkj", absx, r, max(m1, m2), _M_j_rho(absx, r), False, components={"m1": m1, "m2": m2})


def radii_k_in_j(absx: float, r: float) -> InclusionBound:
    """``B_k(x, m) < B_j(x, r) < B_k(x, M)``."""
    _check(absx, r)
    a, b = _M_rho_j(absx, r)
    return InclusionBound(
        "kjk", absx, r, _m_rho_j(absx, r), min(2.0 * a, 2.0 * b), False, components={"M1": 2.0 * a, "M2": 2.0 * b}
    )


# ---------------------------------------------------------------------------
# j and q


def jq_validity(absx: float, r: float) -> Validity:
    r0 = q_threshold(absx)
    r1 = absx / math.sqrt(1.0 + absx * absx)
    r2 = 2.0 * absx / (1.0 + absx * absx)
    intervals = {"I1": (0.0, min(r0, r1))}
    if absx < SQRT2_MINUS_1:
        intervals["I2"] = (min(r0, r1), min(r0, r2))
    if absx < TWO_MINUS_SQRT3:
        intervals["I3"] = (r2, r0)
    name = next((k for k, (lo, hi) in intervals.items() if lo <= r < hi), None)
    return Validity(r0, r1, r2, intervals, name, 0.0 < r < r0)


def radii_j_q(absx: float, r: float) -> InclusionBound:
    """``B_j(x, m) < B_q(x, r) < B_j(x, M)`` for ``r < r0``."""
    _check(absx, r)
    _require_q_ball(absx, r)
    v = jq_validity(absx, r)
    s = 1.0 + absx * absx
    a = 1.0 - r * r * s
    w = math.sqrt(1.0 - r * r)
    M = math.log((1.0 - absx) * a / (1.0 - absx - r * s * (r + w)))
    m1 = m2 = INF
    if v.interval in ("I1", "I2"):
        m1 = math.log1p(r * s * (w - r * absx) / ((1.0 - absx) * a))
    elif v.interval == "I3":
        m2 = math.log((1.0 + absx) * a / (1.0 + absx - r * (r + w) * s))
    return InclusionBound("jqj", absx, r, min(m1, m2), M, True, v, {"m1": m1, "m2": m2})


def qjq_branch_threshold(absx: float) -> float:
    return math.log((1.0 + absx) / (1.0 - absx))


def qjq_M_stays_inside(absx: float, r: float) -> bool:
    """Whether ``B_q(x, M)`` of :func:`radii_q_in_j` lies in the unit ball."""
    return r <= math.log(2.0 * (1.0 + absx) / (1.0 + 2.0 * absx - absx * absx))


def qjq_M_one_minus(absx: float, r: float) -> float:
    """Outer radius with ``1 - |x|`` in the far branch; too small, kept for comparison."""
    return _qjq_M(absx, r, 1.0 - absx)


def _qjq_M(absx, r, far):
    s = math.sqrt(1.0 + absx * absx)
    E = math.exp(r)
    if r <= qjq_branch_threshold(absx):
        return (E - 1.0) * (1.0 - absx) / (s * math.sqrt(1.0 + (E * (1.0 - absx) - 1.0) ** 2))
    return (E - 1.0) * (1.0 + absx) / (E * s * math.sqrt(1.0 + (far / E - 1.0) ** 2))


def radii_q_in_j(absx: float, r: float) -> InclusionBound:
    """``B_q(x, m) < B_j(x, r) < B_q(x, M)``.

    The far branch of ``M`` is ``q(x, y)`` at the antipodal point
    ``y = -x/|x| (1 - e^-r (1 + |x|))`` of the j-sphere.
    """
    _check(absx, r)
    s = math.sqrt(1.0 + absx * absx)
    e = math.exp(-r)
    m = -math.expm1(-r) * (1.0 - absx) / (s * math.sqrt(1.0 + (e * (1.0 - absx) - 1.0) ** 2))
    M = _qjq_M(absx, r, 1.0 + absx)
    inside = qjq_M_stays_inside(absx, r)
    note = "" if inside else "B_q(x, M) leaves the unit ball"
    v = Validity(r0=q_threshold(absx), in_range=True, note=note)
    branch = 1 if r <= qjq_branch_threshold(absx) else 2
    return InclusionBound("qjq", absx, r, m, M, True, v, {"branch": branch, "M_inside": inside})


# ---------------------------------------------------------------------------
# rho, k and q


def _rho_q_arg(absx, r, sign_num, sign_den):
    s = 1.0 + absx * absx
    a = 1.0 - r * r * s
    w = math.sqrt(1.0 - r * r)
    num = r * (w + sign_num * r * absx) * s
    den = math.sqrt(1.0 - absx * absx) * a * math.sqrt(1.0 - ((absx + sign_den * r * w * s) / a) ** 2)
    return num / den


def radii_rho_q(absx: float, r: float) -> InclusionBound:
    """``B_rho(x, m) < B_q(x, r) < B_rho(x, M)`` for ``r < r0``."""
    _check(absx, r)
    r0 = _require_q_ball(absx, r)
    m = 2.0 * math.asinh(_rho_q_arg(absx, r, -1.0, -1.0))
    M = 2.0 * math.asinh(_rho_q_arg(absx, r, 1.0, 1.0))
    return InclusionBound("rhoqrho", absx, r, m, M, True, Validity(r0=r0))


def radii_k_q(absx: float, r: float) -> InclusionBound:
    """``B_k(x, m) < B_q(x, r) < B_k(x, M)`` for ``r < r0`` (band-derived)."""
    _check(absx, r)
    r0 = _require_q_ball(absx, r)
    m = 2.0 * math.asinh(_rho_q_arg(absx, r, -1.0, -1.0))
    M = 4.0 * math.asinh(_rho_q_arg(absx, r, 1.0, -1.0))
    return InclusionBound("kqk", absx, r, m, M, False, Validity(r0=r0))


def _q_rho(absx, r, sign):
    s = 1.0 + absx * absx
    den = math.sqrt(s) * math.sqrt(s * math.cosh(r) + sign * 2.0 * absx * math.sinh(r))
    return (1.0 - absx * absx) * math.sinh(r / 2.0) / den


def radii_q_in_rho(absx: float, r: float) -> InclusionBound:
    """``B_q(x, m) < B_rho(x, r) < B_q(x, M)``."""
    _check(absx, r)
    return InclusionBound("qrhoq", absx, r, _q_rho(absx, r, 1.0), _q_rho(absx, r, -1.0), True)


def radii_q_in_k(absx: float, r: float) -> InclusionBound:
    """``B_q(x, m) < B_k(x, r) < B_q(x, M)`` (band-derived)."""
    _check(absx, r)
    return InclusionBound("qkq", absx, r, _q_rho(absx, r / 2.0, 1.0), _q_rho(absx, r, -1.0), False)


# ---------------------------------------------------------------------------
# uniform radii


class UniformRadii(NamedTuple):
    m1: float
    m2: float
    m3: float


def uniform_m1(r: float) -> float:
    return math.log1p(2.0 * math.sinh(r / 2.0))


def uniform_m2(r: float) -> float:
    return math.log1p(2.0 * math.sinh(r / 4.0))


def uniform_m3(r: float) -> float:
    if not 0.0 < r < 1.0:
        raise ValidityError(f"m3 needs 0 < r < 1, got {r}")
    return math.log1p(r / math.sqrt(1.0 - r * r))


def uniform_radii(r: float) -> UniformRadii:
    if not r > 0.0:
        raise ValidityError(f"r must be positive, got {r}")
    return UniformRadii(uniform_m1(r), uniform_m2(r), uniform_m3(r))


M3_SLOPE_ARGMIN = math.sqrt((5.0 - math.sqrt(17.0)) / 3.0) / 2.0


def uniform_m1_threshold_at_origin() -> float:
    """Smallest ``r`` with ``B_j(0, m1(r)) < B_rho(0, r)``; found by hand as ``2 log 2``."""
    return 2.0 * math.log(2.0)


def _uniform(name, metric_r, fn, needs_r0=False):
    def radii(absx: float, r: float) -> InclusionBound:
        _check(absx, r)
        v = Validity()
        if needs_r0:
            v = Validity(r0=_require_q_ball(absx, r))
        return InclusionBound(name, absx, r, fn(r), INF, False, v)

    radii.__doc__ = f"Uniform inner radius: ``B_j(x, m) < B_{metric_r}(x, r)``."
    return radii


radii_uniform_m1 = _uniform("thm-m1", "rho", uniform_m1)
radii_uniform_m2 = _uniform("thm-m2", "k", uniform_m2)
radii_uniform_m3 = _uniform("thm-m3", "q", uniform_m3, needs_r0=True)


# ---------------------------------------------------------------------------
# technical inequalities


class Margin(NamedTuple):
    holds: bool
    lhs: float
    rhs: float
    margin: float


def _margin(lhs, rhs, tol=0.0):
    return Margin(lhs <= rhs + tol, lhs, rhs, rhs - lhs)


def technical_threshold(absx: float) -> float:
    return math.asinh(2.0 * absx / (1.0 - absx * absx))


def technical_1(a: float, b: float) -> Margin:
    """``min(1-a, 1-b)(1 + max(a, b)) <= sqrt(1-a^2) sqrt(1-b^2)`` on ``[0, 1]^2``."""
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise ValidityError("a and b must lie in [0, 1]")
    lhs = min(1.0 - a, 1.0 - b) * (1.0 + max(a, b))
    rhs = math.sqrt((1.0 - a) * (1.0 + a)) * math.sqrt((1.0 - b) * (1.0 + b))
    return _margin(lhs, rhs, 1e-15)


def _technical_pre(absx, r):
    if not 0.0 <= absx < 1.0:
        raise ValidityError(f"|x| must lie in [0, 1), got {absx}")
    if r < technical_threshold(absx):
        raise ValidityError(f"r = {r} is below arcsinh(2|x|/(1-|x|^2)) = {technical_threshold(absx)}")


def technical_2(absx: float, absy: float, r: float) -> Margin:
    """``min(d(x), d(y))(1 + |x|) <= sqrt(1-|x|^2) sqrt(1-|y|^2)``."""
    _technical_pre(absx, r)
    if not 0.0 <= absy < 1.0:
        raise ValidityError(f"|y| must lie in [0, 1), got {absy}")
    lhs = min(1.0 - absx, 1.0 - absy) * (1.0 + absx)
    rhs = math.sqrt(1.0 - absx * absx) * math.sqrt(1.0 - absy * absy)
    return _margin(lhs, rhs, 1e-15)


def technical_3(absx: float, r: float) -> Margin:
    """``2|x|/(1-|x|) - (1+|x|)/(coth(r/2) - |x|) <= (1+|x|)(e^r - 1)/2``."""
    _technical_pre(absx, r)
    lhs = 2.0 * absx / (1.0 - absx) - (1.0 + absx) / (1.0 / math.tanh(r / 2.0) - absx)
    rhs = (1.0 + absx) * math.expm1(r) / 2.0
    return _margin(lhs, rhs)


def technical_inequalities(a: float, b: float, absx: float, r: float) -> tuple[Margin, Margin, Margin]:
    """The three predicates; the second one takes ``|y| = b``."""
    return technical_1(a, b), technical_2(absx, b, r), technical_3(absx, r)


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Claim:
    """``B_ball(x, m) < B_radius(x, r) < B_ball(x, M)`` with ``radii`` giving ``(m, M)``."""

    name: str
    ball: MetricKind
    radius: MetricKind
    radii: Callable[[float, float], InclusionBound]
    sharp: bool
    needs_r0: bool
    proved: bool = True

    @property
    def has_M(self) -> bool:
        return not self.name.startswith("thm-")

    def r_grid(self, absx: float) -> list[float]:
        """Four radii inside the validity range."""
        if self.needs_r0 or self.name == "thm-m3":
            r0 = q_threshold(absx)
            return [r0 * f for f in (0.1, 0.35, 0.65, 0.9)]
        return [0.1, 0.5, 1.0, 2.0]


J, RHO, K, Q = MetricKind.DISTANCE_RATIO, MetricKind.HYPERBOLIC, MetricKind.QUASIHYPERBOLIC, MetricKind.CHORDAL

CLAIMS: dict[str, Claim] = {
    c.name: c
    for c in [
        Claim("jrhoj", J, RHO, radii_j_in_rho, True, False),
        Claim("rhojrho", RHO, J, radii_rho_in_j, True, False),
        Claim("jqj", J, Q, radii_j_q, True, True),
        Claim("qjq", Q, J, radii_q_in_j, True, False, proved=False),
        Claim("rhoqrho", RHO, Q, radii_rho_q, True, True),
        Claim("qrhoq", Q, RHO, radii_q_in_rho, True, False),
        Claim("jkj", J, K, radii_j_in_k, False, False),
        Claim("kjk", K, J, radii_k_in_j, False, False),
        Claim("kqk", K, Q, radii_k_q, False, True),
        Claim("qkq", Q, K, radii_q_in_k, False, False),
        Claim("thm-m1", J, RHO, radii_uniform_m1, False, False),
        Claim("thm-m2", J, K, radii_uniform_m2, False, False),
        Claim("thm-m3", J, Q, radii_uniform_m3, False, True),
    ]
}

SHARP_CLAIMS = [n for n, c in CLAIMS.items() if c.sharp]
K_CLAIMS = ["jkj", "kjk", "kqk", "qkq"]
UNIFORM_CLAIMS = ["thm-m1", "thm-m2", "thm-m3"]


def claim(name: str) -> Claim:
    from .errors import ConfigurationError

    try:
        return CLAIMS[name]
    except KeyError:
        raise ConfigurationError(f"unknown claim {name!r}; known: {', '.join(CLAIMS)}") from None


def inclusion_radii(name: str, absx: float, r: float) -> InclusionBound:
    return claim(name).radii(absx, r)
