"""
Subcommand bodies. Each returns a process exit status; errors propagate to
main.py, which logs them and turns them into a nonzero status.

    sweep          rate-vs-distance sweep -> trials/aggregate CSV + JSON
    single         one channel draw, one ao_solve, printed report
    verify         property suites, pass/fail counts
    oracle-check   ao_solve vs brute force at a chosen M
"""

import json
import logging
from pathlib import Path

import numpy as np

from channel.channels import cascade
from cli.output import write_atomic, write_sweep
from cli.verify import ORACLE_PASS_FRACTION, oracle_ratios, run_verify, summarize_ratios
from errors import TooLargeError
from experiment.runner import ExperimentConfig, draw_trial, sweep_distance
from numerics.rng import RngStream
from optimizer.alternating import ao_solve
from optimizer.oracle import MAX_ORACLE_M
from optimizer.settings import AOConfig
from rate.snr import rate_c1

logger = logging.getLogger(__name__)


def cmd_sweep(cfg: ExperimentConfig, ao: AOConfig, out: Path, progress: bool = True) -> int:
    result = sweep_distance(cfg, ao, progress=progress)
    write_sweep(out, result)
    logger.info(f"Sweep tables written to {out}")
    return 0


def single_report(cfg: ExperimentConfig, ao: AOConfig, d0: float) -> dict:
    """One draw at distance d0 from RngStream(cfg.seed), solved jointly."""
    rng = RngStream(cfg.seed)
    channels = draw_trial(cfg, d0, rng)
    solution = ao_solve(channels, cascade(channels), cfg.power, ao, rng.substream(1))
    rb = solution.breakdown
    report = solution.to_dict()
    report.update({
        "d0_m": float(d0),
        "seed": cfg.seed,
        "m": channels.m,
        "c1": rate_c1(rb, solution.alpha),
        "r_c_star": rb.r_c_star,
        "channels": channels.to_dict(),
    })
    return report


def _format_single(report: dict) -> str:
    trace = ", ".join(f"{r:.6f}" for r in report["rate_trace"]) or "-"
    lines = [
        f"d0 = {report['d0_m']:g} m, M = {report['m']}, seed = {report['seed']}",
        f"  mode        {report['mode']}",
        f"  alpha       {report['alpha']:.6f}",
        f"  R_U         {report['r_u']:.6f} bps/Hz",
        f"  R_C         {report['r_c']:.6f} bps/Hz",
        f"  R~_U*       {report['r_u_tilde_star']:.6f} bps/Hz",
        f"  C1          {report['c1']:.6f} bps/Hz",
        f"  C2*         {report['c2_star']:.6f} bps/Hz",
        f"  rate        {report['rate']:.6f} bps/Hz",
        f"  AO trace    {trace}",
    ]
    return "\n".join(lines)


def cmd_single(cfg: ExperimentConfig, ao: AOConfig, d0: float, out: Path | None = None) -> int:
    report = single_report(cfg, ao, d0)
    logger.info(f"d0={d0:g} m: {report['mode']} mode, {report['rate']:.4f} bps/Hz after {report['iterations']} AO iterations")
    print(_format_single(report))
    text = json.dumps(report, indent=2)
    print(text)
    if out is not None:
        write_atomic(Path(out) / "single.json", text + "\n")
    return 0


def cmd_verify(cfg: ExperimentConfig, ao: AOConfig, out: Path | None = None, seed: int | None = None,
               progress: bool = True) -> int:
    seeds = (seed,) if seed is not None else None
    reports = run_verify(cfg.verify, ao, seeds=seeds, progress=progress)
    failed = [r for r in reports if not r.ok]

    for r in reports:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name:<17} seed={r.seed:<4} {r.checks - r.failures}/{r.checks}  {r.detail}")
    print(f"{len(reports) - len(failed)} suites passed, {len(failed)} failed")

    if out is not None:
        write_atomic(Path(out) / "verify.json", json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    return 1 if failed else 0


def cmd_oracle_check(cfg: ExperimentConfig, ao: AOConfig, m: int, out: Path | None = None, progress: bool = True) -> int:
    if not 1 <= m <= MAX_ORACLE_M:
        raise TooLargeError(f"oracle-check supports 1 <= M <= {MAX_ORACLE_M}, got {m}")
    seed = cfg.seed
    ratios = oracle_ratios(cfg.verify, ao, seed, m, cfg.verify.oracle_instances, progress=progress)
    summary = {"m": m, "seed": seed, **summarize_ratios(ratios)}
    quantiles = np.quantile(ratios, [0.05, 0.25, 0.5, 0.75, 0.95])
    summary["quantiles"] = dict(zip(("p05", "p25", "p50", "p75", "p95"), quantiles.tolist()))

    print(json.dumps(summary, indent=2))
    if out is not None:
        write_atomic(Path(out) / f"oracle_m{m}.json", json.dumps(summary, indent=2) + "\n")
    return 0 if summary["fraction_at_least_0.95"] >= ORACLE_PASS_FRACTION else 1
