"""Fixed-structure controller synthesis by nonsmooth minimization.

The objective p -> strong H-infinity norm of the closed loop is locally
Lipschitz but only piecewise smooth: kinks appear where active peaks swap or
the asymptotic branch takes over.  Each start therefore runs two phases:

  1. BFGS with a weak-Wolfe line search (c1 = 1e-4, c2 = 0.5).  The line
     search honors the stability barrier, where the objective is +inf, by
     bisection, so accepted iterates always stay strongly stable.
  2. Gradient sampling around the BFGS point: 2 dim(p) + 1 gradients in a
     ball of shrinking radius, smallest convex combination as descent
     direction, until the stationarity measure drops below tolerance.

Random starts are drawn uniformly from a box; the rng for start i is seeded
with seed + i, which makes multi-start runs reproducible and independent of
execution order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.optimize
from numpy.typing import NDArray

from .errors import CausalityError, NoStabilizingStart, StrongStabilityViolation
from .gradients import grad_strong_hinf
from .interconnect import (ClosedLoopTemplate, ControllerStructure, PlantModel,
                           build_template)
from .levelset import NormCertificate, strong_hinf

__all__ = ["OptimizerOptions", "SynthesisProblem", "StartTrace",
           "SynthesisResult", "objective", "optimize", "multistart_report"]

WOLFE_C1 = 1e-4
WOLFE_C2 = 0.5


@dataclass(frozen=True)
class OptimizerOptions:
    max_iter: int = 60               # BFGS iterations per start
    grad_tol: float = 1e-6           # gradient norm that ends the BFGS phase
    stagnation: int = 10             # BFGS iterations without decrease
    sampling_radii: tuple = (1e-1, 1e-2, 1e-3, 1e-4)
    sampling_iters: int = 10         # sampling steps per radius
    stationarity_tol: float = 1e-6
    norm_tol: float = 1e-6           # passed through to strong_hinf
    norm_N: int = 20


@dataclass
class SynthesisProblem:
    plant: PlantModel
    structure: ControllerStructure
    starts: list = field(default_factory=list)   # explicit start vectors
    n_random: int = 5
    seed: int = 0
    box: tuple[float, float] = (-10.0, 10.0)
    options: OptimizerOptions = field(default_factory=OptimizerOptions)
    _template: Optional[ClosedLoopTemplate] = field(default=None, repr=False)

    @property
    def template(self) -> ClosedLoopTemplate:
        if self._template is None:
            self._template = build_template(self.plant, self.structure)
        return self._template

    def start_points(self) -> list[NDArray[np.float64]]:
        npar = self.structure.n_params
        pts = [np.asarray(p, dtype=float).ravel() for p in self.starts]
        for p in pts:
            if p.size != npar:
                raise ValueError(f"start has {p.size} entries, expected {npar}")
        lo, hi = self.box
        for i in range(self.n_random):
            rng = np.random.default_rng(self.seed + i)
            pts.append(rng.uniform(lo, hi, npar))
        if not pts:
            raise ValueError("at least one start is required")
        return pts


@dataclass(frozen=True)
class StartTrace:
    index: int
    p0: NDArray[np.float64]
    values: tuple          # accepted objective values, in order
    grad_norms: tuple
    phase: str             # "unstable-start" | "bfgs" | "gradient-sampling"
    p: NDArray[np.float64]
    value: float
    stationarity: float    # gradient-sampling measure; inf if never sampled
    certificate: Optional[NormCertificate]


@dataclass(frozen=True)
class SynthesisResult:
    best_p: NDArray[np.float64]
    best_value: float
    certificate: NormCertificate
    traces: tuple


def objective(problem: SynthesisProblem, p):
    """(value, gradient, certificate) of the closed loop at p.

    Strong instability and causality loss act as a +inf barrier with no
    gradient; everything else propagates.
    """
    try:
        sys = problem.template.substitute(p)
        cert = strong_hinf(sys, tol=problem.options.norm_tol,
                           N=problem.options.norm_N)
    except (StrongStabilityViolation, CausalityError):
        return math.inf, None, None
    g = grad_strong_hinf(problem.template, p, cert)
    return cert.value, g.grad, cert


def _weak_wolfe(fg: Callable, p, f0: float, g0, d):
    """Lewis-Overton bisection line search for the weak Wolfe conditions.

    Returns (t, f, g, cert) or None.  An infinite trial value counts as an
    Armijo failure, which shrinks the bracket back into the stable region.
    """
    slope = float(g0 @ d)
    a, b = 0.0, math.inf
    t = 1.0
    best = None
    for _ in range(50):
        f, g, cert = fg(p + t * d)
        if not np.isfinite(f) or f > f0 + WOLFE_C1 * t * slope:
            b = t
        elif float(g @ d) < WOLFE_C2 * slope:
            a = t
            best = (t, f, g, cert)
        else:
            return t, f, g, cert
        t = 0.5 * (a + b) if np.isfinite(b) else 2.0 * t
    return best  # Armijo-only point, or None when even that never happened


def _bfgs_phase(fg: Callable, p, f, g, cert, opts: OptimizerOptions,
                values: list, grad_norms: list):
    n = p.size
    H = np.eye(n)
    since_decrease = 0
    for _ in range(opts.max_iter):
        if np.linalg.norm(g) < opts.grad_tol or since_decrease >= opts.stagnation:
            break
        d = -H @ g
        if float(g @ d) >= 0.0:
            H = np.eye(n)
            d = -g
        hit = _weak_wolfe(fg, p, f, g, d)
        if hit is None:
            break
        t, f_new, g_new, cert_new = hit
        s, y = t * d, g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            rho = 1.0 / sy
            I = np.eye(n)
            H = (I - rho * np.outer(s, y)) @ H @ (I - rho * np.outer(y, s)) \
                + rho * np.outer(s, s)
        since_decrease = since_decrease + 1 if f_new >= f - 1e-14 else 0
        p, f, g, cert = p + t * d, f_new, g_new, cert_new
        values.append(f)
        grad_norms.append(float(np.linalg.norm(g)))
    return p, f, g, cert


def _smallest_convex_combination(G: NDArray[np.float64]) -> tuple:
    """min ||G lam||^2 over the simplex; returns (direction, norm)."""
    m = G.shape[1]
    Q = G.T @ G

    def fun(lam):
        return float(lam @ Q @ lam), 2.0 * (Q @ lam)

    res = scipy.optimize.minimize(
        fun, np.full(m, 1.0 / m), jac=True, method="SLSQP",
        bounds=[(0.0, 1.0)] * m,
        constraints=[{"type": "eq", "fun": lambda lam: lam.sum() - 1.0,
                      "jac": lambda lam: np.ones(m)}],
        options={"maxiter": 200, "ftol": 1e-16})
    d = G @ res.x
    return d, float(np.linalg.norm(d))


def _sampling_phase(fg: Callable, p, f, g, cert, opts: OptimizerOptions,
                    rng: np.random.Generator, values: list, grad_norms: list):
    n = p.size
    stationarity = math.inf
    for radius in opts.sampling_radii:
        for _ in range(opts.sampling_iters):
            grads = [g]
            tries = 0
            while len(grads) < 2 * n + 1 and tries < 8 * n + 20:
                tries += 1
                step = rng.normal(size=n)
                step *= radius * rng.uniform() ** (1.0 / n) / np.linalg.norm(step)
                _, gs, _ = fg(p + step)
                if gs is not None:
                    grads.append(gs)
            d, nu = _smallest_convex_combination(np.column_stack(grads))
            stationarity = min(stationarity, nu)
            if nu < opts.stationarity_tol:
                return p, f, g, cert, stationarity
            d = -d / nu
            t, accepted = radius, None
            for _ in range(30):
                f_t, g_t, cert_t = fg(p + t * d)
                if np.isfinite(f_t) and f_t < f - WOLFE_C1 * t * nu:
                    accepted = (f_t, g_t, cert_t)
                    break
                t *= 0.5
            if accepted is None:
                break  # radius exhausted, shrink
            f, g, cert = accepted
            p = p + t * d
            values.append(f)
            grad_norms.append(float(np.linalg.norm(g)))
    return p, f, g, cert, stationarity


def _run_start(problem: SynthesisProblem, index: int, p0) -> StartTrace:
    opts = problem.options

    def fg(p):
        return objective(problem, p)

    f, g, cert = fg(p0)
    if not np.isfinite(f):
        return StartTrace(index=index, p0=p0, values=(), grad_norms=(),
                          phase="unstable-start", p=p0, value=math.inf,
                          stationarity=math.inf, certificate=None)
    values, grad_norms = [f], [float(np.linalg.norm(g))]
    p, f, g, cert = _bfgs_phase(fg, p0, f, g, cert, opts, values, grad_norms)
    rng = np.random.default_rng(problem.seed + index)
    p, f, g, cert, stationarity = _sampling_phase(fg, p, f, g, cert, opts,
                                                  rng, values, grad_norms)
    return StartTrace(index=index, p0=p0, values=tuple(values),
                      grad_norms=tuple(grad_norms), phase="gradient-sampling",
                      p=p, value=f, stationarity=stationarity,
                      certificate=cert)


def optimize(problem: SynthesisProblem) -> SynthesisResult:
    """Best controller over all starts; deterministic for a fixed seed."""
    traces = [_run_start(problem, i, p0)
              for i, p0 in enumerate(problem.start_points())]
    finite = [t for t in traces if np.isfinite(t.value)]
    if not finite:
        raise NoStabilizingStart(
            "no start produced a strongly stable closed loop; run a "
            "stabilization pre-phase or supply a stabilizing start")
    best = min(finite, key=lambda t: t.value)
    cert = strong_hinf(problem.template.substitute(best.p),
                       tol=problem.options.norm_tol, N=problem.options.norm_N)
    return SynthesisResult(best_p=best.p, best_value=cert.value,
                           certificate=cert, traces=tuple(traces))


def multistart_report(result: SynthesisResult) -> str:
    """Per-start summary table, one row per start."""
    rows = ["start  phase              value          stationarity  iters  branch"]
    for t in result.traces:
        if not np.isfinite(t.value):
            rows.append(f"{t.index:>5}  {t.phase:<17}  {'+inf':>13}  "
                        f"{'-':>12}  {0:>5}  -")
            continue
        branch = t.certificate.kind if t.certificate is not None else "-"
        stat = ("-" if not np.isfinite(t.stationarity)
                else f"{t.stationarity:.3e}")
        rows.append(f"{t.index:>5}  {t.phase:<17}  {t.value:>13.9f}  "
                    f"{stat:>12}  {len(t.values):>5}  {branch}")
    rows.append(f" best  p = {np.array2string(result.best_p, precision=6)}"
                f"  value = {result.best_value:.9f}")
    return "\n".join(rows)
