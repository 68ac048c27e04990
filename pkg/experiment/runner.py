"""
Monte Carlo harness for the rate-vs-distance comparison.

For every (d0, trial) one ChannelSet is drawn and shared by all schemes, so
scheme comparisons are paired. Randomness is keyed by (seed, d0 index,
trial): substream 0 draws the channels, substream 1 feeds the solvers.
Parallel runs re-sort their records and produce the same table as serial runs.
"""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

from tqdm import tqdm

from channel.channels import ChannelSet, cascade, draw_channel_set
from channel.fading import FadingSpec
from channel.geometry import Geometry
from errors import UnknownSchemeError, ValidationError
from experiment.records import Scheme, TrialRecord, paired_wins
from experiment.results import SweepResult
from numerics.rng import SEED_BITS, RngStream
from optimizer.alternating import Solution, ao_solve, conventional_solution, fixed_alpha_solve
from optimizer.oracle import brute_force_p1
from optimizer.settings import AOConfig
from rate.snr import PowerBudget, dbm_to_mw

logger = logging.getLogger(__name__)

EQUAL_ALPHA = 0.5


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

def _default_power() -> PowerBudget:
    p = dbm_to_mw(8.0)
    return PowerBudget(p_a=p, p_c=p, p_max=p, sigma2=dbm_to_mw(-50.0))


def _default_d0_values() -> tuple[float, ...]:
    return tuple(float(d) for d in range(10, 101, 10))


@dataclass(frozen=True)
class VerifySettings:
    """Sizes of the property suites run by `verify` and `oracle-check`."""

    instances: int = 1000
    ao_instances: int = 1000
    oracle_instances: int = 200
    oracle_m: int = 2
    phase_grid_points: int = 64
    alpha_grid_points: int = 1001
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        for name in ("instances", "ao_instances", "oracle_instances", "phase_grid_points", "alpha_grid_points"):
            if getattr(self, name) < 1:
                raise ValidationError(f"verify.{name} must be >= 1, got {getattr(self, name)}")
        if not 0 <= self.oracle_m <= 4:
            raise ValidationError(f"verify.oracle_m must lie in 0..4, got {self.oracle_m}")
        if self.alpha_grid_points < 2:
            raise ValidationError(f"verify.alpha_grid_points must be >= 2, got {self.alpha_grid_points}")
        if not self.seeds:
            raise ValidationError("verify.seeds must name at least one seed")


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: Geometry = field(default_factory=Geometry)
    fading: FadingSpec = field(default_factory=FadingSpec)
    power: PowerBudget = field(default_factory=_default_power)
    d0_values: tuple[float, ...] = field(default_factory=_default_d0_values)
    trials: int = 50
    seed: int = 0
    schemes: tuple[Scheme, ...] = tuple(Scheme)
    m_override: int | None = None    # 0 removes the IRS after drawing
    workers: int = 1
    verify: VerifySettings = field(default_factory=VerifySettings)

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError(f"sweep.trials must be >= 1, got {self.trials}")
        if not self.d0_values:
            raise ValidationError("sweep needs at least one d0 value")
        if any(d <= 0 for d in self.d0_values):
            raise ValidationError(f"d0 values must be > 0, got {list(self.d0_values)}")
        if not 0 <= self.seed < 2 ** SEED_BITS:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.schemes:
            raise ValidationError("sweep needs at least one scheme")
        if self.workers < 1:
            raise ValidationError(f"sweep.workers must be >= 1, got {self.workers}")
        if self.m_override is not None:
            if self.m_override < 0:
                raise ValidationError(f"geometry.m must be >= 0, got {self.m_override}")
            if self.m_override > 0 and self.m_override != self.geometry.m:
                raise ValidationError(
                    f"geometry.m = {self.m_override} disagrees with the {self.geometry.irs_rows}x{self.geometry.irs_cols} array"
                )

    @property
    def irs_enabled(self) -> bool:
        return self.m_override != 0

    @property
    def m(self) -> int:
        return self.geometry.m if self.irs_enabled else 0


# ---------------------------------------------------------------------------
# One trial
# ---------------------------------------------------------------------------

def trial_stream(cfg: ExperimentConfig, d0_index: int, trial: int) -> RngStream:
    return RngStream(cfg.seed).substream(d0_index, trial)


def draw_trial(cfg: ExperimentConfig, d0: float, rng: RngStream) -> ChannelSet:
    """ChannelSet at distance d0 from substream 0 of a trial stream."""
    channels = draw_channel_set(rng.substream(0), cfg.geometry, cfg.fading, d0)
    return channels if cfg.irs_enabled else channels.without_irs()


def paired_draws(cfg: ExperimentConfig, d0_index: int, trial: int) -> ChannelSet:
    """The ChannelSet every scheme sees at (d0_values[d0_index], trial)."""
    return draw_trial(cfg, cfg.d0_values[d0_index], trial_stream(cfg, d0_index, trial))


def solve_scheme(scheme: Scheme, channels: ChannelSet, pb: PowerBudget, ao: AOConfig, rng: RngStream) -> Solution:
    casc = cascade(channels)
    if scheme is Scheme.RELAYING_OPT_ALPHA:
        return ao_solve(channels, casc, pb, ao, rng)
    if scheme is Scheme.RELAYING_EQUAL_ALPHA:
        return fixed_alpha_solve(channels, casc, pb, ao, EQUAL_ALPHA, rng)
    if scheme is Scheme.CONVENTIONAL_IRS:
        return conventional_solution(pb, channels, casc)
    if scheme is Scheme.RELAY_NO_IRS:
        direct = channels.without_irs()
        return brute_force_p1(direct, cascade(direct), pb)
    raise UnknownSchemeError(f"no solver for scheme {scheme!r}")


def run_scenario(
    cfg: ExperimentConfig,
    scheme: Scheme | str,
    d0: float,
    rng: RngStream,
    ao: AOConfig | None = None,
    channels: ChannelSet | None = None,
    trial: int = 0,
) -> TrialRecord:
    """
    Draw one ChannelSet from `rng` (unless `channels` is given) and run the
    scheme's optimizer on it.
    """
    scheme = scheme if isinstance(scheme, Scheme) else Scheme.parse(scheme)
    ao = ao if ao is not None else AOConfig()
    channels = channels if channels is not None else draw_trial(cfg, d0, rng)
    solution = solve_scheme(scheme, channels, cfg.power, ao, rng.substream(1))
    return TrialRecord(
        d0=float(d0),
        scheme=scheme,
        trial=trial,
        rate=solution.rate,
        mode=solution.mode.value,
        alpha=solution.alpha,
        seed=cfg.seed,
    )


def _run_trial(cfg: ExperimentConfig, ao: AOConfig, d0_index: int, trial: int) -> list[TrialRecord]:
    rng = trial_stream(cfg, d0_index, trial)
    d0 = cfg.d0_values[d0_index]
    channels = draw_trial(cfg, d0, rng)
    return [run_scenario(cfg, scheme, d0, rng, ao, channels, trial) for scheme in cfg.schemes]


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

def sweep_distance(cfg: ExperimentConfig, ao: AOConfig | None = None, progress: bool = True) -> SweepResult:
    """Every scheme at every d0 for cfg.trials paired draws."""
    ao = ao if ao is not None else AOConfig()
    tasks = [(i, t) for i in range(len(cfg.d0_values)) for t in range(cfg.trials)]
    logger.info(
        f"Sweeping {len(cfg.d0_values)} distances x {cfg.trials} trials x {len(cfg.schemes)} schemes "
        f"(M={cfg.m}, seed={cfg.seed}, workers={cfg.workers})"
    )

    records: list[TrialRecord] = []
    bar = tqdm(total=len(tasks), desc="trials", unit="trial", disable=not progress)
    if cfg.workers == 1:
        for d0_index, trial in tasks:
            records.extend(_run_trial(cfg, ao, d0_index, trial))
            bar.update()
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_run_trial, cfg, ao, d0_index, trial) for d0_index, trial in tasks]
            for future in as_completed(futures):
                records.extend(future.result())
                bar.update()
    bar.close()

    order = {scheme: i for i, scheme in enumerate(cfg.schemes)}
    records.sort(key=lambda r: (r.d0, order[r.scheme], r.trial))
    result = SweepResult.from_records(records, cfg.schemes)

    for row in result.rows:
        logger.info(
            f"d0={row.d0:g} m, {row.scheme.value}: mean {row.mean_rate:.4f} bps/Hz, "
            f"relaying in {row.relay_fraction:.0%} of trials"
        )
    _log_paired_dominance(cfg, records)
    return result


def _log_paired_dominance(cfg: ExperimentConfig, records: list[TrialRecord]) -> None:
    """Warn when optimized relaying falls below the conventional IRS on a shared draw."""
    if not {Scheme.RELAYING_OPT_ALPHA, Scheme.CONVENTIONAL_IRS} <= set(cfg.schemes):
        return
    for d0 in cfg.d0_values:
        wins = paired_wins(records, d0, Scheme.RELAYING_OPT_ALPHA, Scheme.CONVENTIONAL_IRS)
        if wins < cfg.trials:
            logger.warning(f"d0={d0:g} m: RelayingOptAlpha below ConventionalIRS in {cfg.trials - wins}/{cfg.trials} trials")
        else:
            logger.debug(f"d0={d0:g} m: RelayingOptAlpha >= ConventionalIRS in all {cfg.trials} trials")


