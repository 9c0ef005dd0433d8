"""
The bounding functions alpha(eps) and beta(eps), the speed-limit time
T(eps; E, dE) and the forbidden region of the (t, P) plane.

alpha has no closed form.  Two numerical routes are provided:

* ``alpha_lower`` -- a min over theta of a max over q of a family of
  linear bounds, evaluated on seeded random grids and extrapolated to
  zero grid spacing;
* ``alpha_upper`` -- the fastest two-level state, a one-dimensional root
  solve.

The two agree, so downstream code uses ``alpha_upper`` (tabulated) and
keeps ``alpha_lower`` as a certificate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (AmbiguousRoot, Incompatible, NoBracket, OutOfRange,
                     Undefined)
from .numerics import (ExtrapolationResult, RootBracket, bisect,
                       bisect_array, extrapolate_linear, fit_line,
                       random_grid)

__all__ = [
    "beta", "beta_inverse", "TangentLine", "tangent_line", "tangent_slopes",
    "GridSpec", "alpha_lower", "alpha_upper", "alpha_upper_array",
    "AlphaEstimate", "alpha", "reconciled_alpha", "alpha_table",
    "alpha_interp", "alpha_inverse", "QslQuery", "qsl_time", "regime",
    "orthogonality_time", "forbidden_floor", "forbidden_floor_parts",
    "ML", "HEISENBERG",
]

ML = "ML"
HEISENBERG = "Heisenberg"
COMPAT_FLOOR = 1e-3
TABLE_POINTS = 2048
ROOT_TOL = 1e-14


def _check_unit(x, name="eps"):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr >= 0.0)) or np.any(~(arr <= 1.0)):
        raise OutOfRange(f"{name} must lie in [0, 1], got {x}")
    return arr


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def beta(eps):
    """``(2/pi) arccos(sqrt(eps))``."""
    e = _check_unit(eps)
    return _out(2.0 / math.pi * np.arccos(np.sqrt(e)))


def beta_inverse(x):
    """``cos^2(pi x / 2)``; exact inverse of :func:`beta` on ``[0, 1]``."""
    v = _check_unit(x, "x")
    return _out(np.cos(0.5 * math.pi * v) ** 2)


# ----------------------------------------------------------------------------
# Tangent lines to cos x + q sin x

def _slope_from_y(y, q):
    return (y + np.sqrt(y * y * (1.0 + q * q) + q * q)) / (1.0 + y * y)


def _tangency_residual(y, q):
    a = _slope_from_y(y, q)
    return np.sin(y) - (a * (1.0 - q * y) + q) / (1.0 + q * q)


def _y_interval(q):
    at = np.arctan(q)
    return 0.5 * np.pi + at, np.pi + at


@dataclass(frozen=True)
class TangentLine:
    """Line ``1 - a x`` through (0, 1) tangent to ``cos x + q sin x`` at ``x = y``."""
    q: float
    a: float
    y: float

    @property
    def residual(self) -> float:
        """``cos y + q sin y - (1 - a y)``; zero for a true tangency."""
        return math.cos(self.y) + self.q * math.sin(self.y) - (1.0 - self.a * self.y)

    def gap(self, x):
        """``cos x + q sin x - (1 - a x)``, nonnegative for ``x >= 0``."""
        x = np.asarray(x, dtype=float)
        return np.cos(x) + self.q * np.sin(x) - (1.0 - self.a * x)


def tangent_line(q: float, scan_points: int = 2001) -> TangentLine:
    """Smallest slope ``a`` such that ``cos x + q sin x >= 1 - a x`` for ``x >= 0``.

    Eliminating ``a`` from the tangency conditions leaves one equation in
    the contact abscissa ``y``, which is bisected on
    ``[pi/2 + arctan q, pi + arctan q]``.  The interval is first scanned so
    that a second sign change is reported rather than silently ignored.
    """
    if not q >= 0 or not math.isfinite(q):
        raise OutOfRange(f"q must be finite and nonnegative, got {q}")
    lo, hi = _y_interval(q)
    ys = np.linspace(lo, hi, scan_points)
    g = _tangency_residual(ys, q)
    changes = np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)
    if changes.size == 0:
        raise NoBracket(f"tangency condition has no root for q={q}")
    if changes.size > 1:
        raise AmbiguousRoot(f"{changes.size} tangency roots for q={q}")
    i = int(changes[0])
    f = lambda y: float(_tangency_residual(y, q))
    y = bisect(f, RootBracket(float(ys[i]), float(ys[i + 1]), float(g[i]), float(g[i + 1])),
               ROOT_TOL)
    return TangentLine(float(q), float(_slope_from_y(y, q)), y)


def tangent_slopes(q) -> np.ndarray:
    """Vectorized slopes ``a(q)`` for an array of ``q >= 0``."""
    q = np.asarray(q, dtype=float)
    if np.any(~(q >= 0)):
        raise OutOfRange("q must be nonnegative")
    lo, hi = _y_interval(q)
    y = bisect_array(lambda yy: _tangency_residual(yy, q), lo, hi, tol=ROOT_TOL)
    return _slope_from_y(y, q)


# ----------------------------------------------------------------------------
# Lower estimate: min over theta of max over q, extrapolated

@dataclass(frozen=True)
class GridSpec:
    """Random-grid ladder for :func:`alpha_lower`.

    ``theta_counts`` sets the theta spacings ``2 pi / n``.  At each theta
    level the q spacing runs ``q_spacing, q_spacing/2, ..., q_spacing/2**q_halvings``
    on ``[0, q_max)``; one q grid per rung is shared by all theta values.
    """
    theta_counts: tuple = (400, 800, 1600, 3200)
    q_spacing: float = 0.02
    q_halvings: int = 4
    q_max: float = 10.0
    seed: int = 0

    def __post_init__(self):
        counts = tuple(int(n) for n in self.theta_counts)
        if len(counts) < 3:
            raise ValueError("need at least three theta spacings")
        if any(b <= a for a, b in zip(counts, counts[1:])):
            raise ValueError("theta counts must increase (spacings strictly decrease)")
        if self.q_halvings < 2:
            raise ValueError("need at least two q halvings")
        object.__setattr__(self, "theta_counts", counts)

    @property
    def theta_spacings(self) -> tuple:
        return tuple(2.0 * math.pi / n for n in self.theta_counts)

    @property
    def q_spacings(self) -> np.ndarray:
        return self.q_spacing / 2.0 ** np.arange(self.q_halvings + 1)


_ROW_CHUNK = 256


def _inner_max(root_eps, theta, q, weight):
    """Row-wise max over q of ``[1 - r (cos th - q sin th)] * weight(q)``."""
    c = 1.0 - root_eps * np.cos(theta)
    s = root_eps * np.sin(theta)
    qw = q * weight
    best = np.empty(theta.size)
    where = np.empty(theta.size, dtype=np.intp)
    for i in range(0, theta.size, _ROW_CHUNK):
        sl = slice(i, i + _ROW_CHUNK)
        h = np.multiply.outer(c[sl], weight)
        h += np.multiply.outer(s[sl], qw)
        j = h.argmax(axis=1)
        where[sl] = j
        best[sl] = h[np.arange(j.size), j]
    return best, where


def alpha_lower(eps: float, grid: GridSpec | None = None) -> ExtrapolationResult:
    """Numerical lower bound on alpha(eps) from the tangent-line family.

    For every theta on a random grid the max over q is taken on a ladder
    of q grids and extrapolated linearly to zero q spacing; the min of
    those values over theta is then extrapolated linearly to zero theta
    spacing.  The error bar is the standard error of that last intercept.

    Raises
    ------
    OutOfRange
        The inner maximizer sits at the q cutoff, so the cutoff is too small.
    """
    e = float(_check_unit(eps))
    grid = grid or GridSpec()
    if e == 1.0:
        return ExtrapolationResult(0.0, 0.0, 0.0, (), 0.0, {"exact": True})
    root_eps = math.sqrt(e)
    rng = np.random.default_rng(grid.seed)
    dq = grid.q_spacings
    samples, level_diag = [], []
    inner_err = 0.0
    for n in grid.theta_counts:
        theta = random_grid(0.0, 2.0 * math.pi, 2.0 * math.pi / n, grid.seed, rng=rng).points
        rungs, top_q = [], None
        for k, spacing in enumerate(dq):
            q = random_grid(0.0, grid.q_max, spacing, grid.seed, rng=rng).points
            weight = 2.0 / (math.pi * tangent_slopes(q))
            best, where = _inner_max(root_eps, theta, q, weight)
            rungs.append(best)
            if k == dq.size - 1:
                top_q, q_last = q[where], q[-1]
        c0, _, err, _ = fit_line(dq, np.array(rungs))
        i = int(np.argmin(c0))
        if top_q[i] >= q_last:
            raise OutOfRange(f"inner maximum at the q cutoff {grid.q_max} "
                             f"(eps={e}, theta={theta[i]:.6f})")
        inner_err = max(inner_err, float(err[i]))
        samples.append((2.0 * math.pi / n, float(c0[i])))
        level_diag.append({"theta_count": n, "min": float(c0[i]),
                           "theta_at_min": float(theta[i]),
                           "q_at_max": float(top_q[i])})
    res = extrapolate_linear(samples)
    diag = {"levels": level_diag, "inner_error_bar": inner_err,
            "grid": {"theta_counts": list(grid.theta_counts),
                     "q_spacing": grid.q_spacing, "q_halvings": grid.q_halvings,
                     "q_max": grid.q_max, "seed": grid.seed}}
    return ExtrapolationResult(res.value_at_zero, res.error_bar, res.chi_squared,
                               res.samples, res.slope, diag)


# ----------------------------------------------------------------------------
# Upper estimate: fastest two-level state

def _stationarity(z, eps):
    """Derivative condition for ``z arccos u(z)`` in ``z = xi^2``.

    ``-inf`` at the lower end ``z = (1 - sqrt eps)/2`` and positive at ``z = 1/2``.
    """
    z = np.asarray(z, dtype=float)
    eps = np.asarray(eps, dtype=float)
    s = 2.0 * z * (1.0 - z)
    u = np.clip((eps - 1.0 + s) / s, -1.0, 1.0)
    # eps - 1 + 4z(1-z), written to avoid cancellation near z = 1/2.
    denom = eps - (1.0 - 2.0 * z) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = (1.0 - 2.0 * z) / (1.0 - z) * np.sqrt((1.0 - eps) / denom)
    tail = np.where(denom > 0, tail, np.inf)
    return np.arccos(u) - tail


def _two_level_value(z, eps):
    s = 2.0 * z * (1.0 - z)
    u = np.clip((eps - 1.0 + s) / s, -1.0, 1.0)
    return 2.0 / np.pi * z * np.arccos(u)


_COLLAPSED = 1e-12


def alpha_upper(eps: float) -> float:
    """Smallest normalized crossing time among two-level states.

    Minimizes ``(2/pi) z arccos[(eps - 1 + 2z(1-z)) / (2z(1-z))]`` over
    ``z = xi^2`` by bisecting its stationarity condition on
    ``((1 - sqrt eps)/2, 1/2]``.
    """
    e = float(_check_unit(eps))
    if e == 0.0:
        return 1.0
    if e == 1.0:
        return 0.0
    z_min = 0.5 * (1.0 - math.sqrt(e))
    if 0.5 - z_min <= _COLLAPSED:
        # The bracket has shrunk below rounding; the optimum is z = 1/2.
        return float(_two_level_value(0.5, e))
    f = lambda z: float(_stationarity(z, e))
    z = bisect(f, RootBracket(z_min, 0.5, -math.inf, f(0.5)), ROOT_TOL)
    return float(_two_level_value(z, e))


def alpha_upper_array(eps) -> np.ndarray:
    e = np.atleast_1d(_check_unit(eps)).astype(float)
    out = np.empty_like(e)
    out[e == 0.0] = 1.0
    out[e == 1.0] = 0.0
    collapsed = (e > 0.0) & (0.5 * np.sqrt(e) <= _COLLAPSED)
    out[collapsed] = _two_level_value(0.5, e[collapsed])
    inner = (e > 0.0) & (e < 1.0) & ~collapsed
    if np.any(inner):
        ei = e[inner]
        z_min = 0.5 * (1.0 - np.sqrt(ei))
        z = bisect_array(lambda zz: _stationarity(zz, ei), z_min, np.full_like(ei, 0.5),
                         tol=ROOT_TOL)
        out[inner] = _two_level_value(z, ei)
    return out


def reconciled_alpha(eps):
    """alpha(eps) for downstream use: the closed two-level branch."""
    if np.ndim(eps) == 0:
        return alpha_upper(float(eps))
    return alpha_upper_array(eps)


@dataclass(frozen=True)
class AlphaEstimate:
    epsilon: float
    lower: ExtrapolationResult
    upper: float
    reconciled: float
    compatible: bool

    @property
    def difference(self) -> float:
        """``upper - lower``."""
        return self.upper - self.lower.value_at_zero

    @property
    def within_error_bar(self) -> bool:
        """Whether the difference is compatible with zero at one error bar."""
        return abs(self.difference) <= self.lower.error_bar


def alpha(eps: float, grid: GridSpec | None = None, strict: bool = True) -> AlphaEstimate:
    """Both estimates of alpha(eps) and their reconciliation.

    ``compatible`` means ``|upper - lower| <= max(error_bar, 1e-3)``.  With
    ``strict`` an incompatible pair raises :class:`Incompatible`.
    """
    lower = alpha_lower(eps, grid)
    upper = alpha_upper(eps)
    diff = abs(upper - lower.value_at_zero)
    ok = diff <= max(lower.error_bar, COMPAT_FLOOR)
    if not ok and strict:
        raise Incompatible(f"alpha({eps}): upper {upper:.6g} vs lower "
                           f"{lower.value_at_zero:.6g} +- {lower.error_bar:.2g}")
    return AlphaEstimate(float(eps), lower, upper, upper, bool(ok))


# ----------------------------------------------------------------------------
# Tabulation and inverse

@dataclass(frozen=True, eq=False)
class _AlphaTable:
    eps: np.ndarray
    values: np.ndarray
    interp: PchipInterpolator = field(repr=False)
    inverse: PchipInterpolator = field(repr=False)


@lru_cache(maxsize=None)
def alpha_table(points: int = TABLE_POINTS) -> _AlphaTable:
    """alpha on ``points`` nodes uniform in ``sqrt(eps)``.

    The square-root spacing concentrates nodes near eps = 0, where alpha
    has infinite slope in eps but finite slope in ``sqrt(eps)``.
    """
    u = np.linspace(0.0, 1.0, points)
    eps = u * u
    vals = alpha_upper_array(eps)
    if np.any(np.diff(vals) >= 0):
        raise ArithmeticError("tabulated alpha is not strictly decreasing")
    return _AlphaTable(eps, vals, PchipInterpolator(u, vals),
                       PchipInterpolator(vals[::-1], u[::-1]))


def alpha_interp(eps):
    """alpha from the cached table (monotone cubic in ``sqrt(eps)``)."""
    e = _check_unit(eps)
    v = alpha_table().interp(np.sqrt(e))
    return _out(np.asarray(v, dtype=float))


def alpha_inverse(x, exact: bool = False):
    """``eps`` with ``alpha(eps) = x``, for ``x`` in ``[0, 1]``.

    By default the monotone interpolant of the swapped table is evaluated
    (round-trip error about 1e-11).  With ``exact`` the table only brackets
    the root and bisection on the two-level branch finishes it.
    """
    v = np.atleast_1d(_check_unit(x, "x")).astype(float)
    tab = alpha_table()
    out = np.empty_like(v)
    edge_hi, edge_lo = v >= 1.0, v <= 0.0
    inner = ~(edge_hi | edge_lo)
    out[edge_hi] = 0.0
    out[edge_lo] = 1.0
    if np.any(inner):
        target = v[inner]
        if exact:
            u_nodes = np.sqrt(tab.eps)
            # Table values decrease, so search the reversed array.
            j = np.searchsorted(tab.values[::-1], target, side="left")
            hi_idx = np.clip(tab.values.size - j, 1, tab.values.size - 1)
            u = bisect_array(lambda uu: alpha_upper_array(uu * uu) - target,
                             u_nodes[hi_idx - 1], u_nodes[hi_idx], tol=1e-15)
        else:
            u = np.clip(tab.inverse(target), 0.0, 1.0)
        out[inner] = u * u
    return float(out[0]) if np.ndim(x) == 0 else out


# ----------------------------------------------------------------------------
# Speed limit time and forbidden region

@dataclass(frozen=True)
class QslQuery:
    epsilon: float
    mean_energy: float
    spread: float

    def __post_init__(self):
        _check_unit(self.epsilon)
        if not (self.mean_energy >= 0 and self.spread >= 0):
            raise OutOfRange("energy and spread must be nonnegative")
        if self.epsilon < 1.0 and self.mean_energy == 0 and self.spread == 0:
            raise Undefined("stationary state with eps < 1 never rotates")


def _as_query(q, e, de) -> QslQuery:
    if isinstance(q, QslQuery):
        return q
    return QslQuery(float(q), float(e), float(de))


def qsl_time(query, e=None, de=None) -> float:
    """``max(alpha(eps) pi / (2E), beta(eps) pi / (2 dE))`` with hbar = 1.

    Accepts a :class:`QslQuery` or the three numbers ``(eps, E, dE)``.
    A branch whose resource is zero is infinite.
    """
    q = _as_query(query, e, de)
    if q.epsilon == 1.0:
        return 0.0
    a, b = reconciled_alpha(q.epsilon), beta(q.epsilon)
    t_ml = a * math.pi / (2.0 * q.mean_energy) if q.mean_energy > 0 else math.inf
    t_h = b * math.pi / (2.0 * q.spread) if q.spread > 0 else math.inf
    return max(t_ml, t_h)


def regime(query, e=None, de=None) -> str:
    """``"ML"`` when ``dE / E >= beta / alpha``, else ``"Heisenberg"``."""
    q = _as_query(query, e, de)
    a, b = reconciled_alpha(q.epsilon), beta(q.epsilon)
    return ML if q.spread * a >= q.mean_energy * b else HEISENBERG


def orthogonality_time(e: float, de: float) -> float:
    """``max(pi / (2E), pi / (2 dE))``, the eps = 0 speed limit."""
    return qsl_time(0.0, e, de)


def forbidden_floor_parts(t, e: float, de: float):
    """The two branches ``(alpha^-1(2Et/pi), beta^-1(2 dE t/pi))`` of the floor.

    Arguments beyond 1 give 0: that branch no longer constrains ``P``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise OutOfRange("t must be nonnegative")
    t0 = orthogonality_time(e, de)
    if np.any(t > t0 * (1.0 + 1e-12)):
        raise OutOfRange(f"t exceeds the orthogonality time {t0:.12g}")
    xa = np.minimum(2.0 * e * t / math.pi, 1.0)
    xb = np.minimum(2.0 * de * t / math.pi, 1.0)
    return _out(alpha_inverse(xa)), _out(beta_inverse(xb))


def forbidden_floor(t, e: float, de: float):
    """Lowest ``P`` allowed at time ``t`` for energy ``e`` and spread ``de``."""
    fa, fb = forbidden_floor_parts(t, e, de)
    return _out(np.maximum(fa, fb))
