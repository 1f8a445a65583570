"""Experiment drivers: initial data, convergence studies, stability scans.

Initial data comes in two flavors: white noise (independent uniform values
on the dealiased grid, projected into the Galerkin space) and a developed
state obtained by flowing the noise to t = 64 eps^3 so interfaces have
formed.  Noise is drawn from the counter-based 64-bit Philox generator, so
a seed pins every experiment bitwise across platforms and runs.

Convergence errors are measured against a reference produced by the same
scheme (smaller step, or finer space restricted by coefficient truncation;
the Galerkin spaces are nested, so truncation stays inside the family).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .adaptive import AdaptiveConfig, adaptive_run
from .config import ExperimentConfig
from .legendre import GridField, SpectralField
from .operators import hminus1_norm, norms, project_grid
from .potential import PotentialSpec
from .scheme import BlowUpError, RunResult, SchemeParams, run_uniform

NORM_KEYS = ("hminus1", "l2", "h1")


@dataclass
class ConvergenceReport:
    """Errors of a refinement study plus fitted log-log slopes per norm."""

    abscissae: tuple[float, ...]
    errors: dict[str, tuple[float, ...]]
    slopes: dict[str, float | None]
    failed: tuple[float, ...] = ()
    meta: dict = field(default_factory=dict)


@dataclass
class StabilityScanResult:
    """Outcome of scanning one stabilization constant at a fixed step size."""

    axis: str
    tau: float
    candidates: tuple[float, ...]
    outcomes: tuple[str, ...]  # "stable" | "blow-up" | "skipped"
    minimal: float | None
    monotone: bool = True


@dataclass
class AdaptiveComparison:
    """Aligned traces of the adaptive run and its two uniform companions."""

    uniform_large: RunResult
    adaptive: RunResult
    uniform_small: RunResult


def random_initial(seed: int, M: int) -> tuple[GridField, SpectralField]:
    """Uniform(-1, 1) noise at the 2M x 2M Gauss nodes, plus its projection."""
    rng = np.random.Generator(np.random.Philox(seed))
    grid = GridField(rng.uniform(-1.0, 1.0, size=(2 * M, 2 * M)))
    return grid, project_grid(grid)


def prepare_phi1(seed: int, M: int, params: SchemeParams) -> SpectralField:
    """Developed initial state: flow seeded noise to t = 64 eps^3.

    The flow uses params.tau as its uniform step, so the result is fully
    determined by (seed, M, params).
    """
    end_time = 64.0 * params.eps ** 3
    if end_time <= params.tau:
        raise ValueError(
            f"preparation step {params.tau:g} is too coarse for the end time {end_time:g}"
        )
    _, phi0 = random_initial(seed, M)
    result = run_uniform(phi0, params, T=end_time)
    if result.outcome != "completed":
        raise BlowUpError(result.blow_up_step or 0, end_time)
    return result.state.curr


def truncate_field(fld: SpectralField, M: int) -> SpectralField:
    """Restrict to the leading M x M coefficients (nested Galerkin spaces)."""
    if M > fld.M:
        raise ValueError(f"cannot truncate M={fld.M} field to larger M={M}")
    return SpectralField(fld.coeffs[:M, :M].copy())


def error_norms(diff: SpectralField) -> dict[str, float]:
    """H^-1, L2, and H1-seminorm sizes of a (mean-free) difference field."""
    l2, h1 = norms(diff)
    return {"hminus1": hminus1_norm(diff), "l2": l2, "h1": h1}


def fit_loglog_slope(xs, ys) -> float | None:
    """Least-squares slope of log(y) against log(x); None below 3 points."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3:
        return None
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def temporal_convergence(cfg: ExperimentConfig, progress=None) -> ConvergenceReport:
    """Errors at t = T for each tested step against a small-step reference.

    Initial data is the developed state; the reference uses the same scheme
    at temporal.tau_ref.  Steps whose runs blow up are flagged and excluded
    from the fit.
    """
    if cfg.temporal is None:
        raise ValueError("configuration has no [temporal] study")
    if cfg.T is None:
        raise ValueError("temporal study needs run.T")
    say = progress or (lambda _msg: None)

    say(f"preparing developed initial state (M={cfg.M}, seed={cfg.seed})")
    phi_init = prepare_phi1(cfg.seed, cfg.M, cfg.scheme_params())
    say(f"reference run at tau={cfg.temporal.tau_ref:g}")
    ref = run_uniform(phi_init, cfg.scheme_params(tau=cfg.temporal.tau_ref), T=cfg.T)
    if ref.outcome != "completed":
        raise BlowUpError(ref.blow_up_step or 0, cfg.T)
    ref_final = ref.state.curr

    kept, failed = [], []
    errors = {k: [] for k in NORM_KEYS}
    for tau in cfg.temporal.tau_list:
        say(f"test run at tau={tau:g}")
        res = run_uniform(phi_init, cfg.scheme_params(tau=tau), T=cfg.T)
        if res.outcome != "completed":
            failed.append(tau)
            continue
        diff = SpectralField(res.state.curr.coeffs - ref_final.coeffs)
        for k, v in error_norms(diff).items():
            errors[k].append(v)
        kept.append(tau)

    slopes = {k: fit_loglog_slope(kept, errors[k]) for k in NORM_KEYS}
    meta = {"kind": "temporal", "M": cfg.M, "T": cfg.T, "tau_ref": cfg.temporal.tau_ref,
            "seed": cfg.seed, "potential": cfg.potential}
    return ConvergenceReport(tuple(kept), {k: tuple(v) for k, v in errors.items()},
                             slopes, tuple(failed), meta)


def spatial_convergence(cfg: ExperimentConfig, progress=None) -> ConvergenceReport:
    """Errors at t = T for each resolution against a finer-space reference.

    The developed initial state is generated at the reference resolution
    and truncated into each coarse space; final-state differences are
    measured in the coarse space after truncating the reference.
    """
    if cfg.spatial is None:
        raise ValueError("configuration has no [spatial] study")
    if cfg.T is None:
        raise ValueError("spatial study needs run.T")
    say = progress or (lambda _msg: None)

    m_ref = cfg.spatial.M_ref
    say(f"preparing developed initial state at reference resolution M={m_ref}")
    phi_init = prepare_phi1(cfg.seed, m_ref, cfg.scheme_params())
    say(f"reference run at M={m_ref}")
    ref = run_uniform(phi_init, cfg.scheme_params(), T=cfg.T)
    if ref.outcome != "completed":
        raise BlowUpError(ref.blow_up_step or 0, cfg.T)
    ref_final = ref.state.curr

    kept, failed = [], []
    errors = {k: [] for k in NORM_KEYS}
    for m in cfg.spatial.M_list:
        say(f"test run at M={m}")
        res = run_uniform(truncate_field(phi_init, m), cfg.scheme_params(), T=cfg.T)
        if res.outcome != "completed":
            failed.append(float(m))
            continue
        diff = SpectralField(res.state.curr.coeffs - truncate_field(ref_final, m).coeffs)
        for k, v in error_norms(diff).items():
            errors[k].append(v)
        kept.append(float(m))

    slopes = {k: fit_loglog_slope(kept, errors[k]) for k in NORM_KEYS}
    meta = {"kind": "spatial", "M_ref": m_ref, "T": cfg.T, "tau": cfg.tau,
            "seed": cfg.seed, "potential": cfg.potential}
    return ConvergenceReport(tuple(kept), {k: tuple(v) for k, v in errors.items()},
                             slopes, tuple(failed), meta)


def stability_scan(axis: str, candidates, *, eps: float, gamma: float, tau: float,
                   fixed: float, seed: int, M: int,
                   potential: PotentialSpec | None = None,
                   n_steps: int = 4096, scan_all: bool = False,
                   progress=None) -> StabilityScanResult:
    """Smallest value of one stabilization constant that survives n_steps.

    Candidates are tried in ascending order from seeded-noise initial data;
    a trial counts as blown up when the solver reports non-finite values or
    a grid max norm above the blow-up limit.  By default the scan stops at
    the first stable candidate; with scan_all every candidate runs and a
    violation of stable-above-minimal monotonicity is surfaced in the
    result.
    """
    if axis not in ("A", "B"):
        raise ValueError("axis must be 'A' or 'B'")
    cands = tuple(float(c) for c in candidates)
    if list(cands) != sorted(cands):
        raise ValueError("candidates must be ascending")
    say = progress or (lambda _msg: None)
    pot = potential if potential is not None else PotentialSpec()

    _, phi0 = random_initial(seed, M)
    outcomes: list[str] = []
    minimal = None
    for cand in cands:
        if minimal is not None and not scan_all:
            outcomes.append("skipped")
            continue
        a = cand if axis == "A" else fixed
        b = fixed if axis == "A" else cand
        params = SchemeParams(eps=eps, gamma=gamma, tau=tau, A=a, B=b, potential=pot)
        res = run_uniform(phi0, params, n_steps=n_steps)
        stable = res.outcome == "completed"
        say(f"{axis}={cand:g} at tau={tau:g}: {'stable' if stable else 'blow-up'}")
        outcomes.append("stable" if stable else "blow-up")
        if stable and minimal is None:
            minimal = cand
    monotone = True
    if minimal is not None:
        after = [o for c, o in zip(cands, outcomes) if c > minimal]
        monotone = all(o in ("stable", "skipped") for o in after)
    return StabilityScanResult(axis, tau, cands, tuple(outcomes), minimal, monotone)


def adaptive_comparison(cfg: ExperimentConfig, small_tau: float = 1e-5,
                        progress=None) -> AdaptiveComparison:
    """Run uniform-large, adaptive, and uniform-small trajectories to t = T.

    All three start from the same seeded-noise initial state; the large
    uniform step is scheme.tau, the adaptive controller uses the [adaptive]
    block (or its defaults).
    """
    if cfg.T is None:
        raise ValueError("adaptive comparison needs run.T")
    say = progress or (lambda _msg: None)
    _, phi0 = random_initial(cfg.seed, cfg.M)
    acfg = cfg.adaptive if cfg.adaptive is not None else AdaptiveConfig()

    say(f"uniform run at tau={cfg.tau:g}")
    large = run_uniform(phi0, cfg.scheme_params(), T=cfg.T)
    say("adaptive run")
    adaptive = adaptive_run(phi0, cfg.scheme_params(), acfg, cfg.T)
    say(f"uniform run at tau={small_tau:g}")
    small = run_uniform(phi0, cfg.scheme_params(tau=small_tau), T=cfg.T)
    return AdaptiveComparison(large, adaptive, small)
