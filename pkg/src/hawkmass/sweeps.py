"""Seeded perturbation sweeps, foliation scans, and convergence studies.

The sweep demonstrates strict local maximality of the Hawking mass at the
slices: every small non-constant normal graph loses mass, at the rate
predicted by the second-variation forms.  Records are fully deterministic
functions of the config (per-sample generators seeded by (master_seed,
index)), so reruns and worker counts cannot change a byte of the payload;
wall-clock metadata lives in a separate sidecar dict.
"""

from __future__ import annotations

import csv
import io
import json
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import InvariantViolation
from .graph import GraphSurface, hawking_mass_deficit
from .sphere import HarmonicField, get_grid, sobolev_norms
from .warp import WarpFactor, slice_geometry, slice_mass_derivative
from .variation import (
    jacobi_spectrum,
    quadratic_form_report,
    slice_second_variation,
    weak_stability_margin,
)

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "SweepReport",
    "FoliationScan",
    "CriticalPointReport",
    "ConvergenceStudy",
    "perturbation_sweep",
    "foliation_scan",
    "critical_point_classifier",
    "convergence_study",
    "build_meta",
]

_SLICE_NORM_TOL = 1.0e-8


@dataclass
class SweepConfig:
    """Replayable description of one perturbation sweep.

    ``epsilon`` is the C^2 radius of the sampled perturbations; every
    sample's C^2 estimate is a uniform draw in (0, epsilon].  Per-sample
    generators are seeded with (master_seed, index), which fixes the
    records independent of execution order or worker count.
    """

    a: float
    base_r: float
    epsilon: float
    n_samples: int
    master_seed: int
    lmax: int = 16
    fd_step: float = 1.0e-3
    tolerances: dict = field(default_factory=lambda: {
        "ratio_slack": 0.1,
        "slice_norm": _SLICE_NORM_TOL,
    })

    def validate(self) -> None:
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be > 0")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.lmax < 2:
            raise ValueError("lmax must be >= 2")
        if self.fd_step <= 0.0:
            raise ValueError("fd_step must be > 0")

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "base_r": self.base_r,
            "epsilon": self.epsilon,
            "n_samples": self.n_samples,
            "master_seed": self.master_seed,
            "lmax": self.lmax,
            "fd_step": self.fd_step,
            "tolerances": dict(sorted(self.tolerances.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        return cls(
            a=float(d["a"]), base_r=float(d["base_r"]),
            epsilon=float(d["epsilon"]), n_samples=int(d["n_samples"]),
            master_seed=int(d["master_seed"]), lmax=int(d["lmax"]),
            fd_step=float(d["fd_step"]),
            tolerances={k: float(v) for k, v in d["tolerances"].items()},
        )


@dataclass
class SweepRecord:
    """One sample: norms of the drawn perturbation, the measured mass
    deficit, the half-second-variation prediction, and the coercivity
    ratio deficit / (-(C_est/4) * w22_norm^2)."""

    index: int
    seed: int
    c2_norm: float
    w22_norm: float
    deficit: float
    prediction: float
    ratio: float
    ok: bool
    kind: str       # "graph" or "slice" (constant perturbations)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "seed": self.seed,
            "c2_norm": self.c2_norm,
            "w22_norm": self.w22_norm,
            "deficit": self.deficit,
            "prediction": self.prediction,
            "ratio": self.ratio,
            "pass": self.ok,
            "kind": self.kind,
        }


_CSV_COLUMNS = ["index", "seed", "c2_norm", "w22_norm", "deficit",
                "prediction", "ratio", "pass"]


@dataclass
class SweepReport:
    """Full sweep outcome: config, per-sample records in index order, and
    the aggregate verdict."""

    config: SweepConfig
    records: list
    c_est: float

    @property
    def all_negative(self) -> bool:
        return all(r.deficit < 0.0 for r in self.records if r.kind == "graph")

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.records)

    def aggregate(self) -> dict:
        ratios = [r.ratio for r in self.records if r.kind == "graph"]
        return {
            "n_samples": len(self.records),
            "n_graph": sum(1 for r in self.records if r.kind == "graph"),
            "all_negative": self.all_negative,
            "c_est": self.c_est,
            "min_ratio": min(ratios) if ratios else 0.0,
            "max_ratio": max(ratios) if ratios else 0.0,
            "pass": self.ok,
        }

    def records_payload(self) -> str:
        """Canonical JSON of config + records, the byte-identity surface."""
        return json.dumps(
            {"config": self.config.to_dict(),
             "records": [r.to_dict() for r in self.records]},
            sort_keys=True,
        )

    def to_json(self) -> str:
        return json.dumps(
            {"config": self.config.to_dict(),
             "records": [r.to_dict() for r in self.records],
             "aggregate": self.aggregate()},
            sort_keys=True,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(_CSV_COLUMNS)
        for r in self.records:
            d = r.to_dict()
            writer.writerow([repr(d[c]) if isinstance(d[c], float)
                             else ("true" if d[c] is True
                                   else "false" if d[c] is False else d[c])
                             for c in _CSV_COLUMNS])
        return buf.getvalue()

    def first_failure(self):
        for r in self.records:
            if not r.ok:
                return r
        return None


def build_meta(workers: int | None = None) -> dict:
    """Environment sidecar: never part of the comparable payload."""
    import datetime

    meta = {
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
    }
    try:
        import scipy
        meta["scipy"] = scipy.__version__
    except Exception:
        pass
    if workers is not None:
        meta["workers"] = workers
    return meta


def draw_perturbation(rng: np.random.Generator, lmax: int, epsilon: float,
                      u_base: float) -> tuple:
    """Draw one random perturbation field.

    Coefficients for degrees 1..lmax//2 are standard normal damped by
    l^{-2}, mean-removed, then rescaled so the C^2 estimate equals a
    uniform draw in (0, epsilon].  The call order (normals for all
    coefficients, then one uniform) is part of the determinism contract.
    """
    deg_max = max(1, lmax // 2)
    n_modes = (deg_max + 1) ** 2
    coeffs = np.zeros(n_modes)
    raw = rng.standard_normal(n_modes - 1)
    pos = 1
    for l in range(1, deg_max + 1):
        width = 2 * l + 1
        coeffs[l * l: l * l + width] = raw[pos - 1: pos - 1 + width] / (l * l)
        pos += width
    target = epsilon * (1.0 - rng.uniform())
    phi = HarmonicField(coeffs).remove_mean()
    norms = sobolev_norms(phi, u_base)
    scale = target / norms.c2_bound
    return phi.scaled(scale), target, scale


def _run_sample(cfg: SweepConfig, w: WarpFactor, c_est: float,
                grid_lmax: int, index: int) -> SweepRecord:
    rng = np.random.default_rng(
        np.random.SeedSequence([cfg.master_seed, index]))
    u_base, _ = w.evaluate(cfg.base_r)
    phi, target, _ = draw_perturbation(rng, cfg.lmax, cfg.epsilon, u_base)
    norms = sobolev_norms(phi, u_base)
    slice_tol = cfg.tolerances.get("slice_norm", _SLICE_NORM_TOL)
    slack = cfg.tolerances.get("ratio_slack", 0.1)
    if norms.c2_bound < slice_tol:
        deficit = hawking_mass_deficit(w, cfg.base_r, phi, 1.0,
                                       grid_lmax=grid_lmax)
        return SweepRecord(index=index, seed=cfg.master_seed,
                           c2_norm=norms.c2_bound, w22_norm=norms.w22,
                           deficit=deficit, prediction=0.0, ratio=0.0,
                           ok=abs(deficit) < 1.0e-12, kind="slice")
    deficit = hawking_mass_deficit(w, cfg.base_r, phi, 1.0,
                                   grid_lmax=grid_lmax)
    prediction = 0.5 * slice_second_variation(w, cfg.base_r, phi)
    bound = -(c_est / 4.0) * norms.w22 ** 2
    ratio = deficit / bound
    ok = (deficit < 0.0) and (ratio >= 1.0 - slack)
    return SweepRecord(index=index, seed=cfg.master_seed,
                       c2_norm=norms.c2_bound, w22_norm=norms.w22,
                       deficit=deficit, prediction=prediction, ratio=ratio,
                       ok=ok, kind="graph")


def perturbation_sweep(cfg: SweepConfig, workers: int = 1) -> SweepReport:
    """Run the sweep and return records in index order.

    The records are a pure function of cfg; ``workers`` only sets the
    thread fan-out.  Shared caches (warp solution, quadrature grid,
    coercivity constant) are warmed before the pool starts so worker
    threads only read them.
    """
    cfg.validate()
    if workers < 1:
        raise ValueError("workers must be >= 1")
    w = solve_for_config(cfg)
    deg_max = max(1, cfg.lmax // 2)
    grid_lmax = max(2 * deg_max, 16)
    get_grid(grid_lmax)
    get_grid(max(2 * deg_max, 16))
    c_est = quadratic_form_report(w, cfg.base_r, cfg.lmax).c_est
    indices = range(cfg.n_samples)
    if workers == 1:
        records = [_run_sample(cfg, w, c_est, grid_lmax, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(
                lambda i: _run_sample(cfg, w, c_est, grid_lmax, i), indices))
    return SweepReport(config=cfg, records=records, c_est=c_est)


_WARP_CACHE: dict = {}


def solve_for_config(cfg: SweepConfig) -> WarpFactor:
    """Solve (or reuse) the warp profile a sweep config needs."""
    from .warp import solve_warp_factor

    key = (cfg.a, round(abs(cfg.base_r) + 6.0, 6))
    w = _WARP_CACHE.get(key)
    if w is None:
        w = solve_warp_factor(cfg.a, abs(cfg.base_r) + 6.0)
        _WARP_CACHE[key] = w
    return w


@dataclass
class FoliationScan:
    """Identity checks across the slice foliation of one solved profile."""

    a: float
    conserved_mass: float
    r_values: np.ndarray
    masses: np.ndarray
    mass_deviation_max: float
    mass_derivative_max: float
    mean_curvatures: np.ndarray
    h_sign_ok: bool
    dh_dr_at_zero: float
    first_eigenvalue_minimal: float
    margins: np.ndarray
    margin_flip_radius: float | None
    lapse: float = 1.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "a": self.a,
                "conserved_mass": self.conserved_mass,
                "r_values": [float(v) for v in self.r_values],
                "masses": [float(v) for v in self.masses],
                "mass_deviation_max": self.mass_deviation_max,
                "mass_derivative_max": self.mass_derivative_max,
                "mean_curvatures": [float(v) for v in self.mean_curvatures],
                "h_sign_ok": self.h_sign_ok,
                "dh_dr_at_zero": self.dh_dr_at_zero,
                "first_eigenvalue_minimal": self.first_eigenvalue_minimal,
                "margins": [float(v) for v in self.margins],
                "margin_flip_radius": self.margin_flip_radius,
                "lapse": self.lapse,
            },
            sort_keys=True,
        )


def _slice_mean_curvature(w: WarpFactor, r: float) -> float:
    u, up = w.evaluate(r)
    return -2.0 * up / u


def foliation_scan(w: WarpFactor, r_grid) -> FoliationScan:
    """Scan the slice foliation: mass constancy, mean-curvature sign
    structure over one period, the curvature slope at the minimal slice,
    and the weak-stability margin profile with its sign-flip radius.

    The margin flip radius is reported, not asserted; the margin is only
    guaranteed positive near r = 0.
    """
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise ValueError("r_grid must be a 1-d grid with at least 2 points")
    period = w.period
    masses = np.empty(r.size)
    hs = np.empty(r.size)
    margins = np.empty(r.size)
    dmass = np.empty(r.size)
    for i, ri in enumerate(r):
        geo = slice_geometry(w, float(ri))
        masses[i] = geo.hawking_mass
        hs[i] = geo.mean_curvature
        margins[i] = weak_stability_margin(w, float(ri))
        dmass[i] = abs(slice_mass_derivative(w, float(ri)))
    # strict sign on the open half-periods, skipping the extremal slices
    edge = 1.0e-6
    sign_ok = True
    if period is not None:
        for ri, hi in zip(r, hs):
            s = float(ri) % period
            if edge < s < period / 2.0 - edge and not hi < 0.0:
                sign_ok = False
            if period / 2.0 + edge < s < period - edge and not hi > 0.0:
                sign_ok = False
    h_step = 1.0e-2
    dh = (-_slice_mean_curvature(w, 2 * h_step)
          + 8.0 * _slice_mean_curvature(w, h_step)
          - 8.0 * _slice_mean_curvature(w, -h_step)
          + _slice_mean_curvature(w, -2 * h_step)) / (12.0 * h_step)
    lam0 = float(jacobi_spectrum(w, 0.0, 0).lambda_by_degree[0])
    flip = None
    for i in range(r.size - 1):
        if margins[i] > 0.0 >= margins[i + 1]:
            flip = float(brentq(lambda x: weak_stability_margin(w, x),
                                r[i], r[i + 1], xtol=1.0e-12))
            break
    return FoliationScan(
        a=w.a,
        conserved_mass=w.mass,
        r_values=r,
        masses=masses,
        mass_deviation_max=float(np.max(np.abs(masses - w.mass))),
        mass_derivative_max=float(np.max(dmass)),
        mean_curvatures=hs,
        h_sign_ok=bool(sign_ok),
        dh_dr_at_zero=float(dh),
        first_eigenvalue_minimal=lam0,
        margins=margins,
        margin_flip_radius=flip,
    )


@dataclass
class CriticalPointReport:
    """Classifier outcome for one built graph surface."""

    critical: bool
    kind: str               # "minimal", "slice", or "none"
    slice_like: bool
    residual_max: float
    mean_curvature_max: float
    deviation_norm: float

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def critical_point_classifier(surface: GraphSurface,
                              tol: float = 1.0e-8) -> CriticalPointReport:
    """Classify a graph surface as a Hawking-mass critical point.

    Critical iff the Euler-Lagrange residual stays below tol.  The label
    is "minimal" when the mean curvature vanishes, "slice" when the
    perturbation is constant (deviation below tol in length units), else
    "none".  Minimal slices get "minimal" plus the slice flag.
    """
    res_max = surface.el_residual_max()
    critical = bool(res_max < tol)
    h_max = float(np.max(np.abs(surface.mean_curvature)))
    e = surface.phi.degree_energies()
    dev = abs(surface.scale) * float(np.sqrt(np.sum(e[1:])))
    slice_like = bool(dev < tol)
    if slice_like and h_max < tol:
        kind = "minimal"
    elif slice_like:
        kind = "slice"
    else:
        kind = "none"
    return CriticalPointReport(
        critical=critical, kind=kind, slice_like=slice_like,
        residual_max=float(res_max), mean_curvature_max=h_max,
        deviation_norm=float(dev),
    )


@dataclass
class ConvergenceStudy:
    """Resolution study: spectral saturation in the band limit and the
    O(h^2) order of the finite-difference oracle."""

    a: float
    base_r: float
    spectral_value: float
    grid_lmaxes: tuple
    masses_by_lmax: list
    mass_diffs: list
    fd_steps: tuple
    fd_values: list
    fd_errors: list
    fd_slope: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "a": self.a,
                "base_r": self.base_r,
                "spectral_value": self.spectral_value,
                "grid_lmaxes": list(self.grid_lmaxes),
                "masses_by_lmax": self.masses_by_lmax,
                "mass_diffs": self.mass_diffs,
                "fd_steps": list(self.fd_steps),
                "fd_values": self.fd_values,
                "fd_errors": self.fd_errors,
                "fd_slope": self.fd_slope,
            },
            sort_keys=True,
        )


def convergence_study(w: WarpFactor, base_r: float, phi: HarmonicField,
                      fd_steps=(1.0e-2, 1.0e-3, 1.0e-4),
                      grid_lmaxes=(16, 32, 64)) -> ConvergenceStudy:
    """Rerun a fixed deficit computation across quadrature band limits and
    finite-difference steps.

    Band-limited inputs saturate: graph masses agree across grid sizes to
    quadrature roundoff.  The fd errors against the closed form fit a
    log-log slope of 2; the stencil runs on a unit-slice-norm rescaling
    of phi so truncation dominates roundoff at every step.
    """
    from .graph import build_graph
    from .variation import fd_second_variation

    masses = []
    for lm in grid_lmaxes:
        if lm < 2 * phi.lmax:
            raise ValueError("grid band limit below the aliasing floor")
        s = build_graph(w, base_r, phi, scale=1.0, grid_lmax=int(lm))
        masses.append(s.hawking_mass())
    diffs = [abs(masses[i + 1] - masses[i]) for i in range(len(masses) - 1)]
    u_base, _ = w.evaluate(float(base_r))
    slice_norm = u_base * float(np.sqrt(np.sum(phi.degree_energies())))
    if slice_norm <= 0.0:
        raise ValueError("phi must be nonzero")
    phi_unit = phi.scaled(1.0 / slice_norm)
    spectral = slice_second_variation(w, base_r, phi_unit)
    fd_vals = []
    fd_errs = []
    for h in fd_steps:
        v = fd_second_variation(w, base_r, phi_unit, step=float(h)).value
        fd_vals.append(v)
        fd_errs.append(abs(v - spectral))
    logs = np.log(np.asarray(fd_steps))
    loge = np.log(np.maximum(np.asarray(fd_errs), 1.0e-300))
    slope = float(np.polyfit(logs, loge, 1)[0])
    return ConvergenceStudy(
        a=w.a, base_r=float(base_r), spectral_value=float(spectral),
        grid_lmaxes=tuple(int(v) for v in grid_lmaxes),
        masses_by_lmax=[float(v) for v in masses],
        mass_diffs=[float(v) for v in diffs],
        fd_steps=tuple(float(v) for v in fd_steps),
        fd_values=[float(v) for v in fd_vals],
        fd_errors=[float(v) for v in fd_errs],
        fd_slope=slope,
    )


def assert_sweep_passes(report: SweepReport) -> None:
    """Raise InvariantViolation carrying the first offending record."""
    if report.ok:
        return
    bad = report.first_failure()
    raise InvariantViolation(
        "sweep invariant failed: " + json.dumps(bad.to_dict(), sort_keys=True))
