"""The iterative scheme: schedule, trace collection, normal-form extraction.

Truncation orders grow super-exponentially, N_{n+1} = N_n^{1+sigma}, and the
resonance cutoffs follow as K_n = N_n^nu with nu > tau.  Each step applies
``conjugation_step`` and composes the conjugations H_n = G_n ... G_1 as a
factored GroupMap; the trace records the decay of eps_n, the growth of
||H_n||, the constants A_n, and the resonant step indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cocycle, fourier, kamstep, su2
from .errors import ConfigError, GateFailure, VerificationFailure

#: the scheme never runs truncation orders beyond this
SCHEDULE_CAP = 1_000_000

#: eps fluctuations below this are round-off, not divergence
NOISE_FLOOR = 1e-12


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds of the scheme loop."""

    eps_floor: float = 1e-13        # eps_0 below this counts as converged
    normal_form: float = 1e-8       # admissible ||Y_n||_0 on the verification run
    gap_grid: int = 256             # grid for the almost-reducibility gap


@dataclass(frozen=True)
class SchemeParams:
    """Schedule and smallness parameters.

    Defaults follow the standing choice sigma = 0.3, nu = tau + 1, N_1 = 10,
    s_0 = 8, at most 8 steps.
    """

    n1: int = 10
    sigma: float = 0.3
    tau: float = 2.0
    nu: float | None = None
    s0: int = 8
    eps_gate: float = 0.1           # admissible ||F||_0 on entry
    gate_constant: float = kamstep.GATE_CONSTANT
    max_steps: int = 8
    oversample: int | None = None   # per-step grid override (None: automatic)
    precision: int = 53
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.nu is None:
            object.__setattr__(self, "nu", self.tau + 1.0)
        if not 0.0 < self.sigma < 1.0:
            raise ConfigError("sigma must lie in (0, 1)")
        if self.nu <= self.tau:
            raise ConfigError("nu must exceed tau")
        if self.n1 < 2:
            raise ConfigError("N_1 must be at least 2")
        if self.precision < 53:
            raise ConfigError("precision below IEEE double (53 bits) is not meaningful")
        if self.precision > 53:
            raise ConfigError(
                "extended-precision mantissas are not implemented; run at precision 53"
            )
        if self.max_steps < 1:
            raise ConfigError("max_steps must be at least 1")


def schedule(params: SchemeParams, n: int) -> tuple:
    """(N_n, K_n) = (round(N_1^{(1+sigma)^{n-1}}), N_n^nu)."""
    if n < 1:
        raise ValueError("step index starts at 1")
    exponent = (1.0 + params.sigma) ** (n - 1)
    big_n = int(round(float(params.n1) ** exponent))
    if big_n > SCHEDULE_CAP:
        raise ConfigError(f"truncation order N_{n} = {big_n} exceeds {SCHEDULE_CAP}")
    return big_n, float(big_n) ** params.nu


@dataclass
class SchemeTrace:
    """Everything one run of the scheme produced."""

    params: SchemeParams
    initial_angle: float
    initial_eps: float
    steps: list = field(default_factory=list)       # StepReport per completed step
    records: list = field(default_factory=list)     # serializable row per step
    constants: list = field(default_factory=list)   # angles a_1, a_2, ...
    gaps: list = field(default_factory=list)        # (g1, g2) per step
    resonant_steps: list = field(default_factory=list)
    conjugations: list = field(default_factory=list)  # per-step G_n (factored)
    H: fourier.GroupMap = field(default_factory=fourier.identity_map)
    final: cocycle.PerturbedCocycle | None = None
    status: str = "not-run"
    growth_slope: float = 0.0       # fitted d log||H_n||_{s0} / d log N_n

    @property
    def eps_history(self) -> list:
        return [self.initial_eps] + [r.eps_out_0 for r in self.steps]

    def decay_ok(self, floor: float = 1e-12) -> bool:
        """eps_{n+1,0} <= max(eps_{n,0}^{1.5}, floor) for n >= 2."""
        e = self.eps_history
        return all(e[i + 1] <= max(e[i] ** 1.5, floor) for i in range(2, len(e) - 1))


def _record(step: int, big_n: int, big_k: float, rep, h0: float, hs: float) -> dict:
    return {
        "step": step,
        "N": big_n,
        "K": big_k,
        "k_r": rep.resonance.k if rep.resonance.found else None,
        "eps0": rep.eps_out_0,
        "eps_s0": rep.eps_out_s,
        "normG0": h0,
        "normGs0": hs,
        "angle": rep.angle_out,
        "warnings": list(rep.warnings),
    }


def run_scheme(c: cocycle.PerturbedCocycle, params: SchemeParams) -> SchemeTrace:
    """Iterate the conjugation step along the schedule.

    Stops on convergence (eps_0 below the floor), divergence (eps_0 grows two
    steps in a row), or max_steps.  GateFailure and AntipodeError propagate
    with the partial trace attached to the exception (attribute ``trace``).
    """
    eps0 = c.eps(0)
    if eps0 >= params.eps_gate:
        raise GateFailure(f"||F||_0 = {eps0:.3g} >= eps_gate = {params.eps_gate:.3g}")
    if fourier.algebra_norm(c.F, "Hs", params.s0) >= 1.0:
        raise GateFailure(f"||F||_(H^{params.s0}) must be < 1 on entry")

    trace = SchemeTrace(params=params, initial_angle=c.angle, initial_eps=eps0)
    trace.constants.append(c.angle)
    c0_general = c.to_general()
    grows = 0
    for n in range(1, params.max_steps + 1):
        big_n, big_k = schedule(params, n)
        m = None if params.oversample is None else params.oversample * (2 * c.F.band + 1)
        try:
            g, c, rep = kamstep.conjugation_step(
                c, big_n, big_k,
                s0=params.s0, tau=params.tau, nu=params.nu,
                gate_constant=params.gate_constant, m=m,
            )
        except Exception as exc:
            trace.status = "gate-failed" if isinstance(exc, GateFailure) else "error"
            exc.trace = trace
            raise
        trace.steps.append(rep)
        trace.conjugations.append(g)
        trace.H = g.compose(trace.H)
        trace.constants.append(rep.angle_out)
        if rep.resonance.found:
            trace.resonant_steps.append(n)
        h0 = trace.H.cs_norm(0, m=trace.params.tolerances.gap_grid)
        hs = trace.H.cs_norm(params.s0, m=trace.params.tolerances.gap_grid)
        trace.records.append(_record(n, big_n, big_k, rep, h0, hs))
        trace.gaps.append(
            cocycle.almost_reducibility_gap(
                c0_general, trace.H, su2.diagonal(rep.angle_out),
                m=params.tolerances.gap_grid,
            )
        )
        if rep.eps_out_0 < params.tolerances.eps_floor:
            trace.status = "converged"
            break
        grew = rep.eps_out_0 > rep.eps_in_0 and rep.eps_out_0 > NOISE_FLOOR
        grows = grows + 1 if grew else 0
        if grows >= 2:
            trace.status = "diverged"
            break
    else:
        trace.status = "max-steps"
    trace.final = c
    if len(trace.records) >= 2:
        logs = np.log([max(r["normGs0"], 1e-300) for r in trace.records])
        logn = np.log([r["N"] for r in trace.records])
        trace.growth_slope = float(np.polyfit(logn, logs, 1)[0])
    return trace


def _resonance_product(trace: SchemeTrace) -> fourier.GroupMap:
    """The C.B parts of the resonant steps, composed in the order they act in H."""
    out = fourier.identity_map()
    for n, g in zip(range(1, len(trace.conjugations) + 1), trace.conjugations):
        if n not in trace.resonant_steps:
            continue
        cb = tuple(f for f in g.factors if isinstance(f, fourier.GeodesicFactor))
        out = fourier.GroupMap(cb).compose(out)
    return out


@dataclass(frozen=True)
class NormalFormReport:
    """Verification outcome of the extracted normal form."""

    steps_checked: int
    y_norms: tuple
    max_y_norm: float
    tolerance: float
    passed: bool


def normal_form_extract(c: cocycle.PerturbedCocycle, params: SchemeParams) -> tuple:
    """(D, report): D undoes everything except the resonance reductions.

    D = (product of resonant C.B factors)^{-1} composed with H.  Verification:
    putting the resonance factors back and re-running the scheme must need
    only negligible smooth corrections, ||Y_n||_0 <= tolerance at every step;
    a violation raises VerificationFailure naming the step.
    """
    trace = run_scheme(c, params)
    if trace.status != "converged":
        raise VerificationFailure(f"scheme did not converge (status: {trace.status})")
    r = _resonance_product(trace)
    d = r.inverse().compose(trace.H)

    # Conj_R Conj_D c = Conj_H c: near-constant, so the re-run must be trivial
    residual = cocycle.conjugate(r, cocycle.conjugate(d, c.to_general()))
    c_ver, _ = cocycle.to_perturbed(residual, band=16)
    ver_trace = run_scheme(c_ver, params)
    tol = params.tolerances.normal_form
    y_norms = tuple(rep.y_norm_0 for rep in ver_trace.steps)
    for i, y in enumerate(y_norms, start=1):
        if y > tol:
            raise VerificationFailure(
                f"step {i} of the verification run has ||Y||_0 = {y:.3g} > {tol:.3g}"
            )
    report = NormalFormReport(
        steps_checked=len(y_norms),
        y_norms=y_norms,
        max_y_norm=max(y_norms) if y_norms else 0.0,
        tolerance=tol,
        passed=True,
    )
    return d, report
