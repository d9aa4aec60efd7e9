"""Periodic warp factors of deSitter-Schwarzschild type.

Solves u'' = (1 - u'^2) / (2 u) - u / 2 with u(0) = a in (0, 1),
u'(0) = 0, the profile equation of the warped metric
dr^2 + u(r)^2 g_{S^2} with scalar curvature normalized to 2.
Solutions oscillate between u = a and a maximal radius, and carry the
first integral

    m = (u / 2) (1 - u'^2 - u^2 / 3)

whose initial value is m_a = (a / 2)(1 - a^2 / 3).

Dense evaluation between stored samples uses local Taylor expansions whose
coefficients come from the differential equation itself, so no derivative
of the numerical solution is ever estimated by finite differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import RangeError, SolveError

__all__ = [
    "WarpFactor",
    "SliceGeometry",
    "solve_warp_factor",
    "conserved_mass",
    "slice_geometry",
    "slice_mass_derivative",
    "static_chart_roots",
    "A_MIN",
    "A_MAX",
]

A_MIN = 1.0e-3
A_MAX = 1.0 - 1.0e-6

_DEFAULT_TOL = 1.0e-10
_SAMPLE_ORDER = 16
_BASE_ORDER = 28


def _ode_rhs(r, y):
    u, up = y
    return (up, (1.0 - up * up) / (2.0 * u) - 0.5 * u)


def _taylor_coeff_block(u0, up0, order):
    """Taylor coefficients of solutions through (u0, up0), vectorized.

    Input arrays of shape (n,); returns U of shape (order + 1, n) with
    u(r0 + s) = sum_k U[k] s^k.  Uses 2 u u'' = 1 - u'^2 - u^2 order by
    order.
    """
    u0 = np.atleast_1d(np.asarray(u0, dtype=float))
    up0 = np.atleast_1d(np.asarray(up0, dtype=float))
    n = u0.size
    U = np.zeros((order + 1, n))
    U[0], U[1] = u0, up0
    for k in range(0, order - 1):
        acc = np.zeros(n)
        # sum_{j<k} u_{k-j} * (j+1)(j+2) u_{j+2}   (the j = k term is unknown)
        for j in range(0, k):
            acc += 2.0 * U[k - j] * (j + 1) * (j + 2) * U[j + 2]
        # + (u'^2)_k + (u^2)_k
        for j in range(0, k + 1):
            acc += (j + 1) * U[j + 1] * (k - j + 1) * U[k - j + 1]
            acc += U[j] * U[k - j]
        rhs = (1.0 if k == 0 else 0.0) - acc
        U[k + 2] = rhs / (2.0 * U[0] * (k + 1) * (k + 2))
    return U


def _horner(coeffs, s):
    """Evaluate per-column polynomials: coeffs (K+1, n), s (n,)."""
    res = coeffs[-1].copy()
    for k in range(coeffs.shape[0] - 2, -1, -1):
        res = res * s + coeffs[k]
    return res


class TaylorPatch:
    """Taylor expansion of the warp factor around one base point."""

    def __init__(self, r0: float, u0: float, up0: float, order: int = _BASE_ORDER):
        self.r0 = float(r0)
        self.order = order
        U = _taylor_coeff_block(u0, up0, order)[:, 0]
        self.coeff_u = U
        self.coeff_up = U[1:] * np.arange(1, order + 1)
        # crude convergence radius from the tail growth rate
        ks = np.arange(order // 2, order + 1)
        mags = np.abs(U[ks])
        good = mags > 0.0
        if np.any(good):
            rho = np.max(mags[good] ** (1.0 / ks[good]))
            self.radius = 1.0 / rho if rho > 0 else np.inf
        else:
            self.radius = np.inf
        self.trust = 0.5 * self.radius

    def tail_bound(self, smax: float) -> float:
        x = abs(smax)
        if x >= self.radius:
            return np.inf
        top = abs(self.coeff_u[-1]) * x**self.order
        return top / (1.0 - x / self.radius)

    def eval(self, s):
        """(u, u') at r0 + s."""
        s = np.asarray(s, dtype=float)
        cu = np.broadcast_to(self.coeff_u[:, None], (self.order + 1, s.size))
        cp = np.broadcast_to(self.coeff_up[:, None], (self.order, s.size))
        u = _horner(cu, s.ravel()).reshape(s.shape)
        up = _horner(cp, s.ravel()).reshape(s.shape)
        return u, up

    def eval_delta(self, s):
        """(u, u', u - u(r0)) with the difference summed without the
        constant term, so it keeps full relative accuracy for small s."""
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        cu = np.broadcast_to(self.coeff_u[1:, None], (self.order, flat.size))
        delta = _horner(cu, flat) * flat
        cp = np.broadcast_to(self.coeff_up[:, None], (self.order, flat.size))
        up = _horner(cp, flat)
        u = self.coeff_u[0] + delta
        return (
            u.reshape(s.shape),
            up.reshape(s.shape),
            delta.reshape(s.shape),
        )


@dataclass
class SliceGeometry:
    """Closed-form geometry of one round slice of the warped metric."""

    r: float
    u: float
    uprime: float
    area: float
    mean_curvature: float
    shape_operator_sq: float
    gauss_curvature: float
    ricci_normal: float
    hawking_mass: float

    @property
    def jacobi_potential(self) -> float:
        """Ric(nu, nu) + |A|^2, the zeroth-order term of the stability
        operator."""
        return self.ricci_normal + self.shape_operator_sq


class WarpFactor:
    """Solved warp factor with dense sampled data and local evaluators.

    Attributes
    ----------
    a : float
        Minimal radius, the value of u at r = 0.
    mass : float
        Conserved first integral (a / 2)(1 - a^2 / 3).
    r_max : float
        End of the tabulated range [0, r_max]; negative arguments are
        served by evenness of u.
    samples : ndarray, shape (n, 3)
        Columns (r, u, u'), uniformly spaced.
    period : float or None
        Distance between consecutive returns to the minimal radius, when
        the tabulated range contains at least one full period.
    """

    def __init__(self, a, mass, samples, period, tol=_DEFAULT_TOL):
        self.a = float(a)
        self.mass = float(mass)
        self.samples = np.asarray(samples, dtype=float)
        if self.samples.ndim != 2 or self.samples.shape[1] != 3:
            raise ValueError("samples must have shape (n, 3)")
        if self.samples.shape[0] < 2:
            raise ValueError("need at least two samples")
        self.period = None if period is None else float(period)
        self.tol = float(tol)
        rs = self.samples[:, 0]
        steps = np.diff(rs)
        self.step = float(steps[0])
        if self.step <= 0 or np.max(np.abs(steps - self.step)) > 1e-9 * self.step:
            raise ValueError("samples must be uniformly spaced")
        self.r_max = float(rs[-1])
        self._coeffs = _taylor_coeff_block(
            self.samples[:, 1], self.samples[:, 2], _SAMPLE_ORDER
        )
        self._check_sample_density()

    # -- evaluation -----------------------------------------------------

    def _check_sample_density(self):
        half = 0.55 * self.step
        tail = np.abs(self._coeffs[-3:]) * half ** np.arange(
            _SAMPLE_ORDER - 2, _SAMPLE_ORDER + 1
        ).reshape(-1, 1)
        if float(np.max(tail)) > 1.0e-13:
            raise ValueError(
                "sample spacing too coarse for the local Taylor evaluator"
            )

    def evaluate(self, r):
        """(u, u') at radii r, vectorized; even continuation for r < 0."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        rf = np.abs(np.atleast_1d(r).ravel())
        if np.any(rf > self.r_max + 0.5 * self.step):
            raise RangeError(
                f"radius beyond tabulated range [0, {self.r_max:.6g}]"
            )
        idx = np.clip(
            np.rint(rf / self.step).astype(int), 0, self.samples.shape[0] - 1
        )
        s = rf - self.samples[idx, 0]
        u = _horner(self._coeffs[:, idx], s)
        dcoef = self._coeffs[1:, idx] * np.arange(1, _SAMPLE_ORDER + 1)[:, None]
        up = _horner(dcoef, s)
        sign = np.where(np.atleast_1d(r).ravel() < 0.0, -1.0, 1.0)
        up = up * sign
        if scalar:
            return float(u[0]), float(up[0])
        shape = np.atleast_1d(r).shape
        return u.reshape(shape), up.reshape(shape)

    def taylor_patch(self, r0: float, order: int = _BASE_ORDER) -> TaylorPatch:
        """Taylor expansion around r0, for graph builds near one slice."""
        u0, up0 = self.evaluate(float(r0))
        return TaylorPatch(float(r0), u0, up0, order)

    def curvature_accel(self, u, up):
        """u'' from the profile equation (never finite-differenced)."""
        u = np.asarray(u, dtype=float)
        up = np.asarray(up, dtype=float)
        return (1.0 - up * up) / (2.0 * u) - 0.5 * u

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "a": self.a,
                "mass": self.mass,
                "period": self.period,
                "samples": [[float(r), float(u), float(up)] for r, u, up in self.samples],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "WarpFactor":
        data = json.loads(text)
        mass = float(data["mass"])
        a = float(data["a"])
        expect = 0.5 * a * (1.0 - a * a / 3.0)
        if abs(mass - expect) > 1.0e-10:
            raise ValueError("stored mass inconsistent with stored a")
        return cls(
            a=a,
            mass=mass,
            samples=np.asarray(data["samples"], dtype=float),
            period=data["period"],
        )

    def __repr__(self):  # pragma: no cover
        return (
            f"WarpFactor(a={self.a}, r_max={self.r_max}, "
            f"period={self.period}, n={self.samples.shape[0]})"
        )


def solve_warp_factor(a: float, r_max: float, tol: float = _DEFAULT_TOL) -> WarpFactor:
    """Integrate the warp profile equation on [0, r_max].

    Parameters
    ----------
    a : float
        Minimal radius in [1e-3, 1 - 1e-6].
    r_max : float
        Length of the tabulated range; must be positive.
    tol : float
        Relative and absolute integrator tolerance.  The conserved first
        integral is verified to drift less than 10 * tol across the range.

    Returns
    -------
    WarpFactor
    """
    if not A_MIN <= a <= A_MAX:
        raise ValueError(f"a={a} outside admissible range [{A_MIN}, {A_MAX}]")
    if not 0.0 < r_max <= 1.0e3:
        raise ValueError("r_max must be in (0, 1e3]")
    if not 1.0e-13 <= tol <= 1.0e-4:
        raise ValueError("tol must be in [1e-13, 1e-4]")

    # integrate two decades tighter than requested so the conserved-mass
    # postcondition (drift < 10 * tol) holds with margin
    rtol = max(tol * 1.0e-2, 2.5e-14)
    atol = max(tol * 1.0e-3, 1.0e-15)
    sol = solve_ivp(
        _ode_rhs,
        (0.0, float(r_max)),
        [float(a), 0.0],
        method="DOP853",
        rtol=rtol,
        atol=atol,
        dense_output=True,
    )
    if not sol.success:
        raise SolveError(f"integrator failed: {sol.message}")

    mass = 0.5 * a * (1.0 - a * a / 3.0)
    step_target = min(0.02, a / 8.0)
    for _ in range(7):
        n = max(int(np.ceil(r_max / step_target)) + 1, 9)
        rs = np.linspace(0.0, r_max, n)
        u, up = sol.sol(rs)
        samples = np.column_stack([rs, u, up])
        samples[0] = (0.0, a, 0.0)
        drift = np.max(np.abs(0.5 * u * (1.0 - up * up - u * u / 3.0) - mass))
        if drift > 10.0 * tol:
            raise SolveError(
                f"conserved-mass drift {drift:.3e} exceeds 10*tol={10 * tol:.1e}"
            )
        try:
            w = WarpFactor(a, mass, samples, None, tol)
            break
        except ValueError:
            step_target *= 0.5  # sparser than the local Taylor radius allows
    else:
        raise SolveError("could not find a sample spacing dense enough")

    w.period = _detect_period(w)
    return w


def _detect_period(w: WarpFactor):
    """Distance between consecutive returns of u to its minimum.

    u' vanishes at multiples of half the period; the full period is the
    second interior zero, where u matches the minimal radius again.
    """
    up = w.samples[:, 2]
    zeros = []
    for i in range(1, up.size - 1):
        if up[i] == 0.0:
            zeros.append(w.samples[i, 0])
        elif up[i] * up[i + 1] < 0.0:
            f = lambda r: w.evaluate(r)[1]
            zeros.append(brentq(f, w.samples[i, 0], w.samples[i + 1, 0], xtol=1e-14))
        if len(zeros) >= 2:
            break
    if len(zeros) < 2:
        return None
    period = zeros[1]
    u_at, _ = w.evaluate(period)
    if abs(u_at - w.a) > 1.0e-6 * max(1.0, w.a) or abs(period - 2.0 * zeros[0]) > 1e-8:
        return None
    return float(period)


def conserved_mass(w: WarpFactor, r) -> float:
    """First integral (u/2)(1 - u'^2 - u^2/3) evaluated at radius r."""
    u, up = w.evaluate(r)
    val = 0.5 * u * (1.0 - up * up - u * u / 3.0)
    return float(val) if np.ndim(val) == 0 else val


def slice_geometry(w: WarpFactor, r: float) -> SliceGeometry:
    """Geometry of the round slice at radius r.

    The outward unit normal points toward increasing r; with that
    orientation the slice mean curvature is -2 u' / u.
    """
    u, up = w.evaluate(float(r))
    upp = w.curvature_accel(u, up)
    area = 4.0 * np.pi * u * u
    mean_curv = -2.0 * up / u
    shape_sq = 2.0 * up * up / (u * u)
    gauss = 1.0 / (u * u)
    ric_nn = -2.0 * upp / u
    willmore = mean_curv * mean_curv * area
    m_h = np.sqrt(area / (16.0 * np.pi)) * (
        1.0 - willmore / (16.0 * np.pi) - area / (12.0 * np.pi)
    )
    return SliceGeometry(
        r=float(r),
        u=float(u),
        uprime=float(up),
        area=float(area),
        mean_curvature=float(mean_curv),
        shape_operator_sq=float(shape_sq),
        gauss_curvature=float(gauss),
        ricci_normal=float(ric_nn),
        hawking_mass=float(m_h),
    )


def slice_mass_derivative(w: WarpFactor, r: float, accel_override=None) -> float:
    """Radial derivative of the slice Hawking mass.

    Equals (1/2) u' (1 - u'^2 - u^2 - 2 u u'') and vanishes identically
    along solutions of the profile equation.  ``accel_override`` replaces
    u'' (negative control: a non-solution value makes this nonzero).
    """
    u, up = w.evaluate(float(r))
    upp = w.curvature_accel(u, up) if accel_override is None else float(accel_override)
    return float(0.5 * up * (1.0 - up * up - u * u - 2.0 * u * upp))


def static_chart_roots(mass: float) -> tuple[float, float]:
    """Positive roots of 1 - r^2/3 - 2 m / r = 0, ascending.

    These are the horizon radii of the static chart and coincide with the
    minimal and maximal warp radii.  Both exist iff 0 < m < 1/3.
    """
    m = float(mass)
    if not 0.0 < m < 1.0 / 3.0:
        raise ValueError(f"mass {m} outside (0, 1/3); no two positive roots")
    roots = np.roots([1.0, 0.0, -3.0, 6.0 * m])
    real = roots[np.abs(roots.imag) < 1e-9].real
    pos = np.sort(real[real > 0.0])
    if pos.size != 2:
        raise SolveError("expected exactly two positive roots")
    out = []
    for r0 in pos:
        for _ in range(3):  # Newton polish
            f = r0**3 - 3.0 * r0 + 6.0 * m
            df = 3.0 * r0 * r0 - 3.0
            if df != 0.0:
                r0 = r0 - f / df
        out.append(float(r0))
    return out[0], out[1]
