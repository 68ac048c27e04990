"""
Property suites behind the `verify` and `oracle-check` commands.

Each suite draws its own random instances from RngStream(seed) and reports
how many checks ran and how many failed. Failures are reported, never raised.

    oracle            ao_solve reaches >= 95% of the brute-force rate on >= 95% of instances
    oracle-bisection  bisection δ* is not below the phase-grid optimum of the fixed-α subproblem
    prop1             neither ao_solve nor the bare relaying loop beats C2* when min{ρ̃_U*, ρ_C*} <= ρ_U*
    prop2             relaying strictly beats C2* when check_prop2 holds at θ_C*
    prop3             no α on a 1e-4 grid beats the closed-form α* by more than 1e-3
    ao-contract       AO rate traces are non-decreasing and bounded by min{R̃_U*, R_C*}
    closed-form       the phase-aligned vector beats random unit-modulus vectors
    lifting           θ̄^H B θ̄ + |h|² = |h + q^H θ|² on random (θ, t = 1)
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from channel.channels import cascade
from channel.instances import random_channel_set
from experiment.runner import VerifySettings
from numerics.rng import RngStream, sample_cn
from optimizer.alternating import Mode, Solution, ao_solve, relaying_search
from optimizer.conditions import check_prop1, check_prop2, optimal_alpha
from optimizer.oracle import brute_force_p1, grid_p31_value
from optimizer.sdr import bisection_p31, build_lifted
from optimizer.settings import AOConfig
from rate.snr import PowerBudget, align_phases, closed_form_optima, combined_gain, rate_breakdown, relay_rate

logger = logging.getLogger(__name__)

SUITE_POWER = PowerBudget(p_a=1.0, p_c=1.0, p_max=1.0, sigma2=0.1)

ORACLE_RATIO = 0.95
ORACLE_PASS_FRACTION = 0.95
BISECTION_CHECKS = 20
BISECTION_TOL = 1e-3
BISECTION_ALPHA = 0.5
RATE_TOL = 1e-9
PROP3_GRID_STEP = 1e-4
PROP3_TOL = 1e-3
CLOSED_FORM_SAMPLES = 10_000
LIFTING_TOL = 1e-12
MAX_DRAW_FACTOR = 50


@dataclass
class SuiteReport:
    name: str
    seed: int
    checks: int = 0
    failures: int = 0
    detail: str = ""
    failed: bool | None = None     # set when pass/fail is not simply failures > 0

    @property
    def ok(self) -> bool:
        return not self.failed if self.failed is not None else self.failures == 0

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "seed": self.seed,
            "checks": self.checks,
            "failures": self.failures,
            "ok": self.ok,
            "detail": self.detail,
        }


@dataclass
class _Collected:
    relaying_runs: list[Solution] = field(default_factory=list)


def _instances(rng: RngStream, m: int, count: int, accept=None):
    """Up to `count` random instances (at most MAX_DRAW_FACTOR*count draws) passing `accept`."""
    found = 0
    for i in range(MAX_DRAW_FACTOR * count):
        cs = random_channel_set(rng.substream(i), m)
        casc = cascade(cs)
        if accept is None or accept(cs, casc):
            yield cs, casc
            found += 1
            if found == count:
                return


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def oracle_ratios(settings: VerifySettings, ao: AOConfig, seed: int, m: int, count: int,
                  collected: _Collected | None = None, progress: bool = False) -> np.ndarray:
    """ao_solve rate / brute_force_p1 rate on `count` random M = m instances."""
    rng = RngStream(seed).substream(1, m)
    ratios = []
    for k, (cs, casc) in enumerate(tqdm(_instances(rng.substream(0), m, count), total=count, desc=f"oracle M={m}",
                                        disable=not progress)):
        solution = ao_solve(cs, casc, SUITE_POWER, ao, rng.substream(1, k))
        reference = brute_force_p1(cs, casc, SUITE_POWER, settings.phase_grid_points, settings.alpha_grid_points)
        ratios.append(solution.rate / reference.rate if reference.rate > 0 else 1.0)
        if collected is not None and solution.mode is Mode.RELAYING:
            collected.relaying_runs.append(solution)
    return np.array(ratios)


def suite_oracle(settings, ao, seed, collected, progress=False) -> SuiteReport:
    ratios = oracle_ratios(settings, ao, seed, settings.oracle_m, settings.oracle_instances, collected, progress)
    below = int(np.sum(ratios < ORACLE_RATIO))
    fraction = 1.0 - below / ratios.size
    return SuiteReport(
        name="oracle",
        seed=seed,
        checks=int(ratios.size),
        failures=below,
        failed=fraction < ORACLE_PASS_FRACTION,
        detail=f"{fraction:.1%} of instances within {ORACLE_RATIO:.0%} of brute force (min ratio {ratios.min():.4f})",
    )


def suite_oracle_bisection(settings, ao, seed) -> SuiteReport:
    report = SuiteReport(name="oracle-bisection", seed=seed)
    rng = RngStream(seed).substream(2)
    count = min(BISECTION_CHECKS, settings.oracle_instances)
    worst = np.inf
    for k, (cs, casc) in enumerate(_instances(rng.substream(0), settings.oracle_m, count)):
        opt = closed_form_optima(SUITE_POWER, cs, casc)
        rb = rate_breakdown(SUITE_POWER, cs, casc, opt.theta_c_star)
        lifted = build_lifted(cs.h_au, casc.q_u, cs.h_ac, casc.q_c)
        result = bisection_p31(BISECTION_ALPHA, lifted, rb, SUITE_POWER, ao, rng.substream(1, k),
                               init=np.append(opt.theta_c_star, 1.0))
        reference = grid_p31_value(BISECTION_ALPHA, SUITE_POWER, cs, casc, settings.phase_grid_points)
        gap = result.delta_star - reference
        worst = min(worst, gap)
        report.checks += 1
        if gap < -BISECTION_TOL or result.delta_star > result.bracket_top + ao.bisection_eps:
            report.failures += 1
            logger.debug(f"bisection check {k}: delta*={result.delta_star:.6f}, grid optimum {reference:.6f}")
    report.detail = f"worst delta* - grid optimum = {worst:.3e}"
    return report


def suite_prop1(settings, ao, seed) -> SuiteReport:
    report = SuiteReport(name="prop1", seed=seed)
    rng = RngStream(seed).substream(3)

    def holds(cs, casc):
        opt = closed_form_optima(SUITE_POWER, cs, casc)
        return check_prop1(rate_breakdown(SUITE_POWER, cs, casc, opt.theta_u_star))

    iterated = 0
    for k, (cs, casc) in enumerate(_instances(rng.substream(0), settings.oracle_m, settings.ao_instances, holds)):
        opt = closed_form_optima(SUITE_POWER, cs, casc)
        solution = ao_solve(cs, casc, SUITE_POWER, ao, rng.substream(1, k))
        # the relaying loop itself, without the early return to C2*
        run = relaying_search(cs, casc, SUITE_POWER, ao, rng.substream(2, k), opt)
        report.checks += 1
        if run is not None and len(run.trace) >= 2:
            iterated += 1
        found = max(solution.rate, run.rate) if run is not None else solution.rate
        if found > opt.c2_star + RATE_TOL:
            report.failures += 1
    report.detail = (
        f"{report.checks} instances with min(rho~_U*, rho_C*) <= rho_U*, "
        f"{iterated} with at least one AO phase update"
    )
    return report


def suite_prop2(settings, ao, seed, collected) -> SuiteReport:
    report = SuiteReport(name="prop2", seed=seed)
    rng = RngStream(seed).substream(4)

    def holds(cs, casc):
        opt = closed_form_optima(SUITE_POWER, cs, casc)
        rb = rate_breakdown(SUITE_POWER, cs, casc, opt.theta_c_star)
        return check_prop2(rb, rb.r_u, rb.r_c)

    for k, (cs, casc) in enumerate(_instances(rng.substream(0), settings.oracle_m, settings.ao_instances, holds)):
        solution = ao_solve(cs, casc, SUITE_POWER, ao, rng.substream(1, k))
        report.checks += 1
        if not solution.rate > closed_form_optima(SUITE_POWER, cs, casc).c2_star:
            report.failures += 1
        if solution.mode is Mode.RELAYING:
            collected.relaying_runs.append(solution)
    report.detail = f"{report.checks} instances passing the test at theta_C*"
    return report


def suite_prop3(settings, seed) -> SuiteReport:
    rng = RngStream(seed).substream(5)
    n = settings.instances
    draws = rng.uniform(0.0, 10.0, size=(n, 3))
    # R_C > R_U and R~_U* > R_U so that α* is defined
    r_u = draws[:, 0]
    r_c = r_u + draws[:, 1] + 1e-3
    r_ut = r_u + draws[:, 2] + 1e-3
    alphas = np.arange(0.0, 1.0 + PROP3_GRID_STEP / 2, PROP3_GRID_STEP)

    failures = 0
    worst = -np.inf
    for a, b, c in zip(r_u, r_c, r_ut):
        closed = relay_rate(a, b, c, optimal_alpha(a, b, c))
        excess = float(np.max(relay_rate(a, b, c, alphas))) - closed
        worst = max(worst, excess)
        failures += excess > PROP3_TOL
    return SuiteReport(name="prop3", seed=seed, checks=n, failures=int(failures),
                       detail=f"largest grid excess {worst:.3e} bps/Hz")


def suite_ao_contract(seed, collected: _Collected) -> SuiteReport:
    report = SuiteReport(name="ao-contract", seed=seed)
    for solution in collected.relaying_runs:
        rb = solution.breakdown
        bound = min(rb.r_u_tilde_star, rb.r_c_star) + RATE_TOL
        trace = np.asarray(solution.rate_trace)
        report.checks += 1
        if trace.size and (np.any(np.diff(trace) < -RATE_TOL) or np.any(trace > bound)):
            report.failures += 1
    report.detail = f"{report.checks} relaying-mode AO runs"
    return report


def suite_closed_form(settings, seed) -> SuiteReport:
    report = SuiteReport(name="closed-form", seed=seed)
    rng = RngStream(seed).substream(6)
    for k in range(settings.instances):
        sub = rng.substream(k)
        m = 1 + k % 8
        h = complex(sample_cn(sub, 1)[0])
        q = sample_cn(sub, m)
        best = combined_gain(h, q, align_phases(h, q))
        phases = sub.uniform(0.0, 2 * np.pi, size=(m, CLOSED_FORM_SAMPLES))
        report.checks += 1
        if np.any(combined_gain(h, q, np.exp(1j * phases)) > best * (1 + 1e-12)):
            report.failures += 1
    return report


def suite_lifting(settings, seed) -> SuiteReport:
    report = SuiteReport(name="lifting", seed=seed)
    rng = RngStream(seed).substream(7)
    for k in range(settings.instances):
        sub = rng.substream(k)
        m = 1 + k % 8
        cs = random_channel_set(sub.substream(0), m)
        casc = cascade(cs)
        theta = np.exp(1j * sub.uniform(0.0, 2 * np.pi, size=m))
        theta_bar = np.append(theta, 1.0)
        lifted = build_lifted(cs.h_au, casc.q_u, cs.h_ac, casc.q_c)
        lhs = float(np.real(theta_bar.conj() @ lifted.b_u @ theta_bar)) + abs(cs.h_au) ** 2
        rhs = float(combined_gain(cs.h_au, casc.q_u, theta))
        report.checks += 1
        if abs(lhs - rhs) > LIFTING_TOL * max(1.0, rhs):
            report.failures += 1
    return report


# ---------------------------------------------------------------------------
# Drivers
# ---------------------------------------------------------------------------

def run_verify(settings: VerifySettings, ao: AOConfig, seeds=None, progress: bool = False) -> list[SuiteReport]:
    reports = []
    for seed in seeds if seeds is not None else settings.seeds:
        logger.info(f"Running verification suites with seed {seed}")
        collected = _Collected()
        reports += [
            suite_oracle(settings, ao, seed, collected, progress),
            suite_oracle_bisection(settings, ao, seed),
            suite_prop1(settings, ao, seed),
            suite_prop2(settings, ao, seed, collected),
            suite_prop3(settings, seed),
            suite_ao_contract(seed, collected),
            suite_closed_form(settings, seed),
            suite_lifting(settings, seed),
        ]
        for report in reports[-8:]:
            log = logger.info if report.ok else logger.error
            log(f"[{'PASS' if report.ok else 'FAIL'}] {report.name} (seed {seed}): "
                f"{report.checks - report.failures}/{report.checks} {report.detail}")
    return reports


def summarize_ratios(ratios: np.ndarray) -> dict:
    return {
        "instances": int(ratios.size),
        "min": float(ratios.min()),
        "median": float(np.median(ratios)),
        "mean": float(ratios.mean()),
        "fraction_at_least_0.95": float(np.mean(ratios >= ORACLE_RATIO)),
    }
