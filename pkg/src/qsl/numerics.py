"""
Numerical kernels: bisection, seeded random grids, straight-line
extrapolation to zero spacing and a small dense Hermitian eigensolver.

Everything here is a pure function of its arguments.  Randomness only
enters through explicit integer seeds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (BadInterval, DegenerateFit, NoBracket, NonFinite,
                     NotHermitian, NotPSD)

__all__ = [
    "RootBracket", "bisect", "bisect_array",
    "RandomGrid", "random_grid",
    "ExtrapolationResult", "extrapolate_linear", "fit_line",
    "HermitianMatrix", "eigh", "matrix_sqrt_psd",
]

DEFAULT_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-12
# Eigenvalues below this (relative to max(1, largest)) are rounding noise.
# Keeping them would inject sqrt(noise) ~ 1e-8 into square roots.
SQRT_CUTOFF = 1e-14
MAX_DIMENSION = 64


# ----------------------------------------------------------------------------
# Root finding

@dataclass(frozen=True)
class RootBracket:
    """Interval ``[lo, hi]`` with function values of opposite sign at the ends."""
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BadInterval(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if math.isnan(self.f_lo) or math.isnan(self.f_hi):
            raise NonFinite("NaN function value at a bracket end")
        if self.f_lo * self.f_hi > 0:
            raise NoBracket(f"no sign change on [{self.lo}, {self.hi}]: "
                            f"f = ({self.f_lo:.3g}, {self.f_hi:.3g})")

    @classmethod
    def around(cls, f: Callable[[float], float], lo: float, hi: float):
        return cls(lo, hi, float(f(lo)), float(f(hi)))


def bisect(f: Callable[[float], float], bracket: RootBracket,
           tol: float = DEFAULT_TOL) -> float:
    """Root of ``f`` inside ``bracket`` by plain interval halving.

    Stops when the sign-change interval is no wider than ``tol`` (or cannot
    be split further in floating point) and returns its midpoint.  The
    sequence of evaluations depends only on the inputs, so repeated calls
    are bit-identical.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    lo, hi = bracket.lo, bracket.hi
    f_lo, f_hi = bracket.f_lo, bracket.f_hi
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = float(f(mid))
        if not math.isfinite(f_mid):
            raise NonFinite(f"f({mid!r}) = {f_mid}")
        if f_mid == 0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_array(f, lo, hi, tol: float = DEFAULT_TOL, max_iter: int = 200):
    """Vectorized bisection for many independent problems at once.

    ``f`` maps an array of abscissae to an array of values of the same
    shape; ``lo`` and ``hi`` broadcast against each other.  Ends where
    ``f`` is infinite are allowed, NaN is not.
    """
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float),
                                 np.asarray(hi, dtype=float))
    lo, hi = lo.copy(), hi.copy()
    if np.any(~(lo < hi)):
        raise BadInterval("need lo < hi element-wise")
    f_lo = np.asarray(f(lo), dtype=float)
    f_hi = np.asarray(f(hi), dtype=float)
    if np.any(np.isnan(f_lo)) or np.any(np.isnan(f_hi)):
        raise NonFinite("NaN function value at a bracket end")
    if np.any(np.sign(f_lo) * np.sign(f_hi) > 0):
        bad = int(np.argmax(np.sign(f_lo) * np.sign(f_hi) > 0))
        raise NoBracket(f"no sign change for element {bad}")
    neg_lo = f_lo < 0
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        f_mid = np.asarray(f(mid), dtype=float)
        if not np.all(np.isfinite(f_mid)):
            raise NonFinite("non-finite function value inside bracket")
        same = (f_mid < 0) == neg_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------------
# Random grids

@dataclass(frozen=True)
class RandomGrid:
    points: np.ndarray
    target_spacing: float
    seed: int
    lo: float = 0.0
    hi: float = 1.0

    @property
    def mean_gap(self) -> float:
        if self.points.size < 2:
            return float("nan")
        return float(np.mean(np.diff(self.points)))

    def __len__(self):
        return self.points.size


def random_grid(lo: float, hi: float, spacing: float, seed: int,
                rng: np.random.Generator | None = None) -> RandomGrid:
    """Sorted i.i.d. uniform points on ``[lo, hi)`` with mean spacing ``spacing``.

    The number of points is ``round((hi - lo) / spacing)`` (at least one).
    ``rng`` overrides the generator built from ``seed``; callers that draw
    many grids from one seed sequence pass it in.
    """
    if not lo < hi:
        raise BadInterval(f"need lo < hi, got [{lo}, {hi}]")
    if not 0 < spacing < hi - lo:
        raise BadInterval(f"spacing {spacing} outside (0, {hi - lo})")
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    n = max(1, int(round((hi - lo) / spacing)))
    gen = rng if rng is not None else np.random.default_rng(seed)
    points = np.sort(gen.uniform(lo, hi, n))
    return RandomGrid(points, float(spacing), int(seed), float(lo), float(hi))


# ----------------------------------------------------------------------------
# Straight-line extrapolation

@dataclass(frozen=True)
class ExtrapolationResult:
    value_at_zero: float
    error_bar: float
    chi_squared: float
    samples: tuple
    slope: float = 0.0
    diagnostics: dict = field(default_factory=dict, compare=False)


def fit_line(x, y):
    """Unit-weight least-squares line ``y = c0 + c1 x``.

    ``y`` may be 2-D with one column per independent data set sharing the
    abscissae ``x``.  Returns ``(intercept, slope, intercept_stderr, chi2)``,
    each with the trailing shape of ``y``.  The standard error propagates
    the residual variance ``chi2 / (n - 2)`` to the intercept, and is zero
    when ``n == 2``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 2:
        raise DegenerateFit("need at least two samples")
    xm = x.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0 or np.unique(x).size < 2:
        raise DegenerateFit("all spacings are equal")
    dx = (x - xm).reshape((n,) + (1,) * (y.ndim - 1))
    ym = y.mean(axis=0)
    slope = np.sum(dx * (y - ym), axis=0) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x.reshape(dx.shape))
    chi2 = np.sum(resid ** 2, axis=0)
    if n > 2:
        var = chi2 / (n - 2) * (1.0 / n + xm * xm / sxx)
        err = np.sqrt(var)
    else:
        err = np.zeros_like(chi2)
    return intercept, slope, err, chi2


def extrapolate_linear(samples: Sequence[tuple[float, float]]) -> ExtrapolationResult:
    """Extrapolate ``value(spacing)`` to zero spacing with a least-squares line.

    Parameters
    ----------
    samples : sequence of (spacing, value)
        At least three pairs with positive, distinct spacings.

    Returns
    -------
    ExtrapolationResult
        Intercept, its standard error (the "error bar"), the residual sum
        of squares, and the samples ordered by decreasing spacing.
    """
    pairs = sorted(((float(s), float(v)) for s, v in samples),
                   key=lambda p: -p[0])
    if len(pairs) < 3:
        raise DegenerateFit("need at least three samples")
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    if np.any(x <= 0):
        raise ValueError("spacings must be positive")
    if np.unique(x).size != x.size:
        raise DegenerateFit("spacings must be distinct")
    c0, c1, err, chi2 = fit_line(x, y)
    return ExtrapolationResult(float(c0), float(err), float(chi2),
                               tuple(pairs), float(c1))


# ----------------------------------------------------------------------------
# Dense Hermitian eigenproblem

@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise NotHermitian(f"need a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise NonFinite("matrix has non-finite entries")
        if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
            raise NotHermitian("matrix differs from its conjugate transpose")
        object.__setattr__(self, "entries", a)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]


def _as_hermitian(m) -> HermitianMatrix:
    return m if isinstance(m, HermitianMatrix) else HermitianMatrix(m)


def eigh(m, tol: float = 1e-15, max_sweeps: int = 60):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies the classical real rotation that annihilates it.  Sweeps stop
    once the off-diagonal Frobenius norm falls below ``tol`` times the
    matrix norm.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Ascending real eigenvalues and a unitary matrix whose columns are
        the matching eigenvectors, so that ``m = V diag(w) V^H``.
    """
    h = _as_hermitian(m)
    n = h.dimension
    if n > MAX_DIMENSION:
        raise ValueError(f"dimension {n} exceeds {MAX_DIMENSION}")
    a = 0.5 * (h.entries + h.entries.conj().T)
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), 1e-300)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if np.linalg.norm(a[offdiag]) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def matrix_sqrt_psd(m, cutoff: float = SQRT_CUTOFF) -> HermitianMatrix:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-1e-12, 0)`` are treated as zero, as are positive
    ones below ``cutoff * max(1, largest eigenvalue)``.
    """
    w, v = eigh(m)
    if w[0] < -PSD_TOL:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3g} is negative")
    floor = cutoff * max(1.0, float(w[-1]))
    root = np.sqrt(np.where(w <= floor, 0.0, w))
    r = (v * root) @ v.conj().T
    return HermitianMatrix(0.5 * (r + r.conj().T))
