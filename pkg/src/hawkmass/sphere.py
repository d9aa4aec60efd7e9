"""Spectral machinery on the round two-sphere.

Real orthonormal spherical harmonics on a Gauss-Legendre colatitude grid
crossed with a uniform azimuth grid.  With ``lmax + 1`` colatitude nodes and
``2 * lmax + 1`` azimuths the quadrature integrates products of harmonics
exactly up to combined degree ``2 * lmax``, so analysis
followed by synthesis is the identity on band-limited fields.

Conventions
-----------
Coefficients are stored flat with index ``l**2 + l + m`` for degree ``l``
and order ``m`` in ``[-l, l]``.  Positive orders carry ``cos(m*lon)``,
negative orders ``sin(|m|*lon)``.  The constant function 1 has sole
coefficient ``sqrt(4*pi)`` at ``(0, 0)``.

A field of coefficients ``c`` has unit-sphere integrals

* ``integral f^2          = sum c^2``              (Parseval)
* ``integral |grad f|^2   = sum l(l+1) c^2``
* ``integral (lap f)^2    = sum (l(l+1))^2 c^2``

and the same field read on a round slice of radius ``u`` scales these by
``u^2``, ``1`` and ``u^-2`` respectively.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SphereGrid",
    "HarmonicField",
    "SobolevNorms",
    "get_grid",
    "coeff_index",
    "analyze",
    "synthesize",
    "laplacian_unit",
    "gradient_norm_sq_integral",
    "sobolev_norms",
]


def coeff_index(l: int, m: int) -> int:
    """Flat storage index of the ``(l, m)`` coefficient."""
    if not 0 <= abs(m) <= l:
        raise ValueError(f"order {m} invalid for degree {l}")
    return l * l + l + m


def _legendre_tables(lmax: int, x: np.ndarray):
    """Normalized associated Legendre values and theta-derivatives.

    Returns ``(p, dp)`` with ``p[l, m, j]`` orthonormal on [-1, 1]
    (``int p_lm^2 dx = 1``); ``p`` extends to degree ``lmax + 1`` because
    the derivative recurrence couples neighbouring degrees.
    """
    nt = x.size
    s = np.sqrt(1.0 - x * x)
    lt = lmax + 1
    p = np.zeros((lt + 1, lt + 1, nt))
    p[0, 0] = 1.0 / np.sqrt(2.0)
    for m in range(1, lt + 1):
        p[m, m] = np.sqrt((2 * m + 1) / (2.0 * m)) * s * p[m - 1, m - 1]
    for m in range(0, lt):
        p[m + 1, m] = np.sqrt(2 * m + 3.0) * x * p[m, m]
        for l in range(m + 2, lt + 1):
            alpha = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            beta = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            p[l, m] = alpha * (x * p[l - 1, m] - beta * p[l - 2, m])

    dp = np.zeros((lmax + 1, lmax + 1, nt))
    for m in range(0, lmax + 1):
        for l in range(m, lmax + 1):
            e_up = np.sqrt(((l + 1.0) ** 2 - m * m) / (4.0 * (l + 1.0) ** 2 - 1.0))
            term = l * e_up * p[l + 1, m]
            if l - 1 >= m:
                e_dn = np.sqrt((l * l - m * m) / (4.0 * l * l - 1.0))
                term = term - (l + 1) * e_dn * p[l - 1, m]
            dp[l, m] = term / s
    return p[: lmax + 1, : lmax + 1], dp


class SphereGrid:
    """Quadrature grid plus cached harmonic tables for one band limit.

    Parameters
    ----------
    lmax : int
        Band limit.  The grid has ``lmax + 1`` Gauss-Legendre colatitude
        nodes (poles excluded) and ``2 * lmax + 1`` uniform azimuths.
    """

    def __init__(self, lmax: int):
        if lmax < 1:
            raise ValueError("lmax must be >= 1")
        self.lmax = int(lmax)
        x, w = np.polynomial.legendre.leggauss(lmax + 1)
        self.x = x
        self.theta = np.arccos(x)
        self.sin_theta = np.sqrt(1.0 - x * x)
        self.glweights = w
        self.n_lat = lmax + 1
        self.n_lon = 2 * lmax + 1
        self.lon = 2.0 * np.pi * np.arange(self.n_lon) / self.n_lon
        # quadrature weight per node; sums to 4*pi
        self.quad_weights = np.outer(w, np.full(self.n_lon, 2.0 * np.pi / self.n_lon))

        self._p, self._dp = _legendre_tables(lmax, x)
        ll = np.arange(lmax + 1)
        # second theta-derivative from the Legendre ODE:
        # p'' = -cot(theta) p' - (l(l+1) - m^2/sin^2) p
        cot = (x / self.sin_theta)[None, None, :]
        klm = (ll * (ll + 1.0))[:, None, None] - (ll**2)[None, :, None] / (
            self.sin_theta**2
        )[None, None, :]
        self._d2p = -cot * self._dp - klm * self._p

        m = np.arange(lmax + 1)
        ang = np.outer(m, self.lon)
        self._cos = np.cos(ang)
        self._sin = np.sin(ang)
        # azimuth normalization of the real harmonics
        self._azf = np.full(lmax + 1, 1.0 / np.sqrt(np.pi))
        self._azf[0] = 1.0 / np.sqrt(2.0 * np.pi)

        self.n_modes = (lmax + 1) ** 2
        self._lock = threading.Lock()
        self._basis_cache: dict[str, np.ndarray] = {}

    # -- coefficient <-> profile packing -------------------------------

    def _pack_profiles(self, coeffs: np.ndarray, table: np.ndarray):
        """Colatitude profiles (cosine and sine branches) of a coefficient
        vector against a value/derivative table."""
        lmax = self.lmax
        cosprof = np.zeros((lmax + 1, self.n_lat))
        sinprof = np.zeros((lmax + 1, self.n_lat))
        for m in range(0, lmax + 1):
            ls = np.arange(m, lmax + 1)
            idx_c = ls * ls + ls + m
            cosprof[m] = self._azf[m] * (coeffs[idx_c] @ table[m:, m, :])
            if m > 0:
                idx_s = ls * ls + ls - m
                sinprof[m] = self._azf[m] * (coeffs[idx_s] @ table[m:, m, :])
        return cosprof, sinprof

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        """Grid values of the field with the given flat coefficients."""
        coeffs = self._check_coeffs(coeffs)
        c, s = self._pack_profiles(coeffs, self._p)
        return c.T @ self._cos + s.T @ self._sin

    def synthesize_jet(self, coeffs: np.ndarray):
        """Values and first/second coordinate derivatives on the grid.

        Returns
        -------
        dict with keys ``f, ft, fl, ftt, ftl, fll`` (t = colatitude,
        l = longitude), each of shape ``(n_lat, n_lon)``.
        """
        coeffs = self._check_coeffs(coeffs)
        m = np.arange(self.lmax + 1)[:, None]
        c0, s0 = self._pack_profiles(coeffs, self._p)
        c1, s1 = self._pack_profiles(coeffs, self._dp)
        c2, s2 = self._pack_profiles(coeffs, self._d2p)
        out = {
            "f": c0.T @ self._cos + s0.T @ self._sin,
            "ft": c1.T @ self._cos + s1.T @ self._sin,
            "fl": (m * s0).T @ self._cos - (m * c0).T @ self._sin,
            "ftt": c2.T @ self._cos + s2.T @ self._sin,
            "ftl": (m * s1).T @ self._cos - (m * c1).T @ self._sin,
            "fll": -((m * m * c0).T @ self._cos + (m * m * s0).T @ self._sin),
        }
        return out

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """Flat coefficient vector of grid values (exact through lmax)."""
        if values.shape != (self.n_lat, self.n_lon):
            raise ValueError(
                f"values shape {values.shape} != {(self.n_lat, self.n_lon)}"
            )
        fc = (2.0 * np.pi / self.n_lon) * (values @ self._cos.T)  # (n_lat, m)
        fs = (2.0 * np.pi / self.n_lon) * (values @ self._sin.T)
        wfc = self.glweights[:, None] * fc
        wfs = self.glweights[:, None] * fs
        coeffs = np.zeros(self.n_modes)
        for m in range(0, self.lmax + 1):
            ls = np.arange(m, self.lmax + 1)
            proj = self._p[m:, m, :] @ wfc[:, m]
            coeffs[ls * ls + ls + m] = self._azf[m] * proj
            if m > 0:
                coeffs[ls * ls + ls - m] = self._azf[m] * (self._p[m:, m, :] @ wfs[:, m])
        return coeffs

    def integrate(self, values: np.ndarray) -> float:
        """Quadrature of grid values against the round area element."""
        return float(np.sum(self.quad_weights * values))

    # -- dense mode matrices (small lmax only) --------------------------

    def basis_matrix(self, kind: str = "value") -> np.ndarray:
        """Dense (n_nodes, n_modes) synthesis matrix.

        kind is one of ``value``, ``dtheta``, ``dlon``.  Guarded against
        accidental huge allocations; used by the weak Laplacian.
        """
        if kind not in ("value", "dtheta", "dlon"):
            raise ValueError(f"unknown basis matrix kind {kind!r}")
        n_nodes = self.n_lat * self.n_lon
        if n_nodes * self.n_modes > 6.0e7:
            raise ValueError(
                f"dense basis for lmax={self.lmax} would need "
                f"{n_nodes * self.n_modes:.2e} entries; keep lmax <= 40"
            )
        with self._lock:
            cached = self._basis_cache.get(kind)
            if cached is not None:
                return cached
            mat = np.zeros((n_nodes, self.n_modes))
            for m in range(0, self.lmax + 1):
                ls = np.arange(m, self.lmax + 1)
                colat = self._dp[m:, m, :] if kind == "dtheta" else self._p[m:, m, :]
                if kind == "dlon":
                    az_c = -m * self._sin[m]
                    az_s = m * self._cos[m]
                else:
                    az_c = self._cos[m]
                    az_s = self._sin[m]
                block = self._azf[m] * colat[:, :, None] * az_c[None, None, :]
                mat[:, ls * ls + ls + m] = block.reshape(ls.size, -1).T
                if m > 0:
                    block = self._azf[m] * colat[:, :, None] * az_s[None, None, :]
                    mat[:, ls * ls + ls - m] = block.reshape(ls.size, -1).T
            self._basis_cache[kind] = mat
            return mat

    def _check_coeffs(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.n_modes,):
            raise ValueError(
                f"coefficient vector has shape {coeffs.shape}, "
                f"expected {(self.n_modes,)}"
            )
        return coeffs

    def __repr__(self):  # pragma: no cover
        return f"SphereGrid(lmax={self.lmax})"


_GRID_CACHE: dict[int, SphereGrid] = {}
_GRID_LOCK = threading.Lock()


def get_grid(lmax: int) -> SphereGrid:
    """Shared grid instance for a band limit (built once, reused)."""
    with _GRID_LOCK:
        grid = _GRID_CACHE.get(lmax)
        if grid is None:
            grid = SphereGrid(lmax)
            _GRID_CACHE[lmax] = grid
        return grid


@dataclass
class SobolevNorms:
    """Norm estimates of a field read on a round slice of radius ``u``."""

    l2: float
    w12: float
    w22: float
    c0: float
    c1: float
    c2: float

    @property
    def c2_bound(self) -> float:
        """Scalar C^2 size used for rescaling: max of the grid maxima."""
        return max(self.c0, self.c1, self.c2)


class HarmonicField:
    """A real band-limited field stored by harmonic coefficients.

    Parameters
    ----------
    coeffs : array, shape ((lmax+1)**2,)
        Flat real coefficients, index ``l**2 + l + m``.
    grid : SphereGrid, optional
        Grid used for synthesis; defaults to the shared grid of the
        matching band limit.
    """

    def __init__(self, coeffs, grid: SphereGrid | None = None):
        coeffs = np.asarray(coeffs, dtype=float)
        n = coeffs.size
        lmax = int(round(np.sqrt(n))) - 1
        if (lmax + 1) ** 2 != n:
            raise ValueError(f"coefficient length {n} is not a perfect square")
        self.lmax = lmax
        self.coeffs = coeffs
        self.grid = grid if grid is not None else get_grid(max(lmax, 1))
        if self.grid.lmax < lmax:
            raise ValueError("grid band limit below field band limit")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zeros(cls, lmax: int, grid: SphereGrid | None = None) -> "HarmonicField":
        return cls(np.zeros((lmax + 1) ** 2), grid)

    @classmethod
    def single(cls, l: int, m: int, value: float = 1.0,
               grid: SphereGrid | None = None) -> "HarmonicField":
        c = np.zeros((l + 1) ** 2)
        c[coeff_index(l, m)] = value
        return cls(c, grid)

    # -- algebra --------------------------------------------------------

    def padded(self, lmax: int) -> np.ndarray:
        """Coefficients zero-padded (or validated) to a larger band limit."""
        if lmax < self.lmax:
            tail = self.coeffs[(lmax + 1) ** 2 :]
            if np.any(tail != 0.0):
                raise ValueError("cannot truncate nonzero coefficients")
            return self.coeffs[: (lmax + 1) ** 2].copy()
        out = np.zeros((lmax + 1) ** 2)
        out[: self.coeffs.size] = self.coeffs
        return out

    def degree_energies(self) -> np.ndarray:
        """Sum of squared coefficients per degree (unit-sphere L^2)."""
        e = np.zeros(self.lmax + 1)
        for l in range(self.lmax + 1):
            e[l] = float(np.sum(self.coeffs[l * l : (l + 1) ** 2] ** 2))
        return e

    def mean(self) -> float:
        """Mean over the unit sphere."""
        return float(self.coeffs[0]) / np.sqrt(4.0 * np.pi)

    def remove_mean(self) -> "HarmonicField":
        c = self.coeffs.copy()
        c[0] = 0.0
        return HarmonicField(c, self.grid)

    def scaled(self, factor: float) -> "HarmonicField":
        return HarmonicField(self.coeffs * float(factor), self.grid)

    def values(self) -> np.ndarray:
        return self.grid.synthesize(self.padded(self.grid.lmax))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        entries = []
        for l in range(self.lmax + 1):
            for m in range(-l, l + 1):
                v = self.coeffs[coeff_index(l, m)]
                if v != 0.0:
                    entries.append([l, m, float(v)])
        return json.dumps({"lmax": self.lmax, "coeffs": entries})

    @classmethod
    def from_json(cls, text: str, grid: SphereGrid | None = None) -> "HarmonicField":
        data = json.loads(text)
        lmax = int(data["lmax"])
        c = np.zeros((lmax + 1) ** 2)
        for l, m, v in data["coeffs"]:
            c[coeff_index(int(l), int(m))] = float(v)
        return cls(c, grid)

    def __repr__(self):  # pragma: no cover
        nz = int(np.count_nonzero(self.coeffs))
        return f"HarmonicField(lmax={self.lmax}, nonzero={nz})"


# -- module-level operations ------------------------------------------------


def analyze(grid: SphereGrid, values: np.ndarray) -> HarmonicField:
    """Project grid values onto harmonics up to the grid band limit."""
    return HarmonicField(grid.analyze(values), grid)


def synthesize(field: HarmonicField, grid: SphereGrid | None = None) -> np.ndarray:
    """Evaluate a field on a grid (defaults to the field's own)."""
    grid = grid if grid is not None else field.grid
    return grid.synthesize(field.padded(grid.lmax))


def laplacian_unit(field: HarmonicField) -> HarmonicField:
    """Laplace-Beltrami on the unit sphere: coefficients scaled by -l(l+1).

    On a round slice of radius u the Laplacian is this divided by u^2.
    """
    c = field.coeffs.copy()
    for l in range(field.lmax + 1):
        c[l * l : (l + 1) ** 2] *= -l * (l + 1.0)
    return HarmonicField(c, field.grid)


def gradient_norm_sq_integral(field: HarmonicField) -> float:
    """integral |grad f|^2 over the unit sphere: sum l(l+1) c^2.

    Scale-invariant: the same number is the slice integral on radius u.
    """
    e = field.degree_energies()
    ll = np.arange(field.lmax + 1)
    return float(np.sum(ll * (ll + 1.0) * e))


def sobolev_norms(field: HarmonicField, u: float = 1.0) -> SobolevNorms:
    """L^2 / W^{1,2} / W^{2,2} and C^0..C^2 estimates on a radius-u slice.

    The Sobolev squares are ``int phi^2 dsig``, ``+ int |grad phi|^2 dsig``
    and ``+ int (lap phi)^2 dsig`` with slice scalings; the C^k numbers are
    grid maxima of the field, its slice gradient norm and its slice
    covariant Hessian norm.
    """
    if u <= 0.0:
        raise ValueError("slice radius u must be positive")
    e = field.degree_energies()
    ll = np.arange(field.lmax + 1)
    k = ll * (ll + 1.0)
    s0 = float(np.sum(e))
    s1 = float(np.sum(k * e))
    s2 = float(np.sum(k * k * e))
    l2_sq = u * u * s0
    w12_sq = l2_sq + s1
    w22_sq = w12_sq + s2 / (u * u)

    # oversampled grid: the C^k numbers are sup estimates, and the
    # field's own band-limit grid is too coarse near the poles
    grid = get_grid(max(2 * field.lmax, 16))
    jet = grid.synthesize_jet(field.padded(grid.lmax))
    st = grid.sin_theta[:, None]
    c0 = float(np.max(np.abs(jet["f"])))
    grad_sq = jet["ft"] ** 2 + (jet["fl"] / st) ** 2
    c1 = float(np.sqrt(np.max(grad_sq))) / u
    # covariant Hessian of the round metric, orthonormal-frame components
    h_tt = jet["ftt"]
    h_tl = (jet["ftl"] - (grid.x / grid.sin_theta)[:, None] * jet["fl"]) / st
    h_ll = (jet["fll"] + (grid.sin_theta * grid.x)[:, None] * jet["ft"]) / st**2
    hess_sq = h_tt**2 + 2.0 * h_tl**2 + h_ll**2
    c2 = float(np.sqrt(np.max(hess_sq))) / (u * u)
    return SobolevNorms(
        l2=float(np.sqrt(l2_sq)),
        w12=float(np.sqrt(w12_sq)),
        w22=float(np.sqrt(w22_sq)),
        c0=c0,
        c1=c1,
        c2=c2,
    )
