"""Function synthesis from smoothed square waves built out of composed
gearbox circuits."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from . import expr as E

MAX_WAVES = 512
CHUNK_LIMIT = math.pi / 8


class SingularFitError(np.linalg.LinAlgError):
    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition estimate {condition:.3g})")
        self.condition = condition


def gb_iterate(x, k: int):
    """k-fold composed single-input gearbox: arctan(|tan x|^(2^k)).

    Continuous through the poles of tan, where it equals pi/2.
    """
    x = np.asarray(x, dtype=float)
    if k == 0:
        return x if x.ndim else float(x)
    # log form stays finite at the poles of tan, where the value is pi/2
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        log_t = np.log(np.abs(np.sin(x))) - np.log(np.abs(np.cos(x)))
        out = np.arctan(np.exp(2.0 ** k * log_t))
    return out if out.ndim else float(out)


def square_wave_basis(x, period, k, origin: float = 0.0):
    """(4/pi)(GB^k((x - origin) pi / T + pi/4) - pi/4), a wave in [-1, 1].

    ``k=None`` gives the limiting +-1 square wave.
    """
    theta = (np.asarray(x, dtype=float) - origin) * np.pi / period + np.pi / 4
    if k is None:
        # |tan| > 1 exactly when theta mod pi lies in (pi/4, 3pi/4)
        phase = np.mod(theta, np.pi)
        return np.where((phase > np.pi / 4) & (phase < 3 * np.pi / 4), 1.0, -1.0)
    return 4 / np.pi * (gb_iterate(theta, k) - np.pi / 4)


@dataclass
class SquareWaveFit:
    coefficients: np.ndarray
    periods: np.ndarray
    midpoints: np.ndarray
    k: int | None
    interval: tuple              # padded fitting interval
    padding: float = 0.0
    condition: float = field(default=float("nan"), compare=False)

    @property
    def origin(self) -> float:
        return self.interval[0]

    def design_matrix(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return square_wave_basis(x[:, None], self.periods[None, :], self.k, self.origin)

    def __call__(self, x):
        return square_wave_eval(self, x)

    def to_dict(self) -> dict:
        return {"coefficients": [float(v) for v in self.coefficients],
                "periods": [float(v) for v in self.periods],
                "midpoints": [float(v) for v in self.midpoints],
                "k": self.k,
                "interval": [float(v) for v in self.interval],
                "padding": float(self.padding)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SquareWaveFit":
        d = json.loads(text)
        return cls(np.array(d["coefficients"]), np.array(d["periods"]),
                   np.array(d["midpoints"]), d["k"], tuple(d["interval"]), d["padding"])


def mesh(lo: float, hi: float, n: int) -> tuple:
    """(midpoints, periods) of an n-cell uniform mesh on [lo, hi]."""
    j = np.arange(1, n + 1)
    return lo + (hi - lo) * (j - 0.5) / n, 2 * (hi - lo) * j / n


def _solve(y_mid, lo, hi, n, k, padding) -> SquareWaveFit:
    if not 1 <= n <= MAX_WAVES:
        raise ValueError(f"number of waves must be in [1, {MAX_WAVES}], got {n}")
    if not hi > lo:
        raise ValueError("empty interval")
    mids, periods = mesh(lo, hi, n)
    y_mid = np.asarray(y_mid, dtype=float)
    if not np.all(np.isfinite(y_mid)):
        raise ValueError("function values on the mesh must be finite")
    fit = SquareWaveFit(np.zeros(n), periods, mids, k, (lo, hi), padding)
    a = fit.design_matrix(mids)
    cond = float(np.linalg.cond(a))
    fit.condition = cond
    if not np.isfinite(cond) or cond > 1e13:
        raise SingularFitError("square-wave system is singular", cond)
    lu = scipy.linalg.lu_factor(a)
    coef = scipy.linalg.lu_solve(lu, y_mid)
    resid = np.linalg.norm(a @ coef - y_mid)
    if resid > 1e-8 * max(np.linalg.norm(y_mid), 1e-300):
        raise SingularFitError(f"solve residual {resid:.3g} too large", cond)
    fit.coefficients = coef
    return fit


def square_wave_fit(f, x_min: float, x_max: float, n: int, k: int | None = 8,
                    padding: float | None = None) -> SquareWaveFit:
    """Interpolate ``f`` at mesh midpoints of the padded interval.

    The waves are measured from the left end of the padded interval; the
    default padding is a tenth of the interval width on each side.
    """
    if padding is None:
        padding = 0.1 * (x_max - x_min)
    lo, hi = x_min - padding, x_max + padding
    mids, _ = mesh(lo, hi, n) if n >= 1 else (np.zeros(0), None)
    return _solve(f(mids), lo, hi, n, k, padding)


def square_wave_eval(fit: SquareWaveFit, x):
    """Linearized approximant sum_j a_j * wave_j(x)."""
    out = fit.design_matrix(x) @ fit.coefficients
    return out if np.ndim(x) else float(out[0])


def piecewise_error_bound(df_max: float, x_min: float, x_max: float, n: int) -> float:
    return df_max * (x_max - x_min) / (2 * n)


# circuit terms

def chunk_coefficient(a: float, limit: float = CHUNK_LIMIT) -> list:
    """Split ``a`` into equal pieces of magnitude at most ``limit``."""
    if a == 0:
        return []
    pieces = max(1, math.ceil(abs(a) / limit - 1e-12))
    return [a / pieces] * pieces


def _term(a: float, wave):
    if a < 0:
        return E.Neg(_term(-a, wave))
    return E.Sum(E.GB(E.Const(math.atan(math.sqrt(math.tan(2 * a)))), wave), E.Const(-a))


def wave_expr(period: float, k: int, origin: float = 0.0):
    """GB^k((x - origin) pi / T + pi/4) as nested single-input gearboxes."""
    scale = math.pi / period
    node = E.Affine(0, scale, math.pi / 4 - origin * scale)
    for _ in range(k):
        node = E.GB(node)
    return node


def square_wave_expr_term(a: float, period: float, k: int, origin: float = 0.0):
    """GB(arctan(sqrt(tan 2a)), GB^k(...)) - a, chunked so each |a| <= pi/8."""
    wave = wave_expr(period, k, origin)
    chunks = chunk_coefficient(a)
    if not chunks:
        return E.Const(0.0)
    terms = [_term(c, wave) for c in chunks]
    return terms[0] if len(terms) == 1 else E.Sum(*terms)


def square_wave_expr(fit: SquareWaveFit):
    if fit.k is None:
        raise ValueError("the limiting square wave has no finite circuit")
    return E.Sum(*[square_wave_expr_term(a, t, fit.k, fit.origin)
                   for a, t in zip(fit.coefficients, fit.periods)])


def square_wave_circuit_eval(fit: SquareWaveFit, x):
    """Ideal angle of the synthesized (near-linear) gearbox terms."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    total = np.zeros_like(x)
    for a, t in zip(fit.coefficients, fit.periods):
        for c in chunk_coefficient(a):
            s = abs(c)
            wave = gb_iterate((x - fit.origin) * np.pi / t + np.pi / 4, fit.k)
            g = math.atan(math.sqrt(math.tan(2 * s)))
            s2 = np.sin(g) ** 2 * np.sin(wave) ** 2
            total += math.copysign(1, c) * (np.arctan2(s2, 1 - s2) - s)
    return total


# estimator

def _check_uniform(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        if x.shape[1] != 1:
            raise ValueError("square-wave fits take one feature")
        x = x[:, 0]
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected a nonempty 1-d grid")
    if not np.all(np.isfinite(x)):
        raise ValueError("grid contains non-finite values")
    if x.size > 1:
        d = np.diff(x)
        if np.any(d <= 0) or np.ptp(d) > 1e-9 * max(abs(d[0]), 1e-300):
            raise ValueError("grid must be increasing and uniformly spaced")
    return x


class SquareWaveRegressor(RegressorMixin, BaseEstimator):
    """Square-wave interpolant with the sklearn fit/predict interface.

    ``fit(X, y)`` takes the function sampled at the midpoints of a uniform
    mesh; the mesh end points are inferred from the spacing (a single point
    needs ``cell_width``).
    """

    def __init__(self, k=8, cell_width=None):
        self.k = k
        self.cell_width = cell_width

    def fit(self, X, y):
        x = _check_uniform(X)
        y = np.asarray(y, dtype=float).ravel()
        if y.shape != x.shape:
            raise ValueError("X and y lengths differ")
        h = self.cell_width if x.size == 1 else x[1] - x[0]
        if h is None:
            raise ValueError("a one-point grid needs cell_width")
        lo, hi = x[0] - h / 2, x[-1] + h / 2
        self.fit_ = _solve(y, lo, hi, x.size, self.k, 0.0)
        self.coef_ = self.fit_.coefficients
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        x = np.asarray(X, dtype=float)
        if x.ndim == 2:
            x = x[:, 0]
        return square_wave_eval(self.fit_, np.atleast_1d(x))
