from dataclasses import replace

import numpy as np
import pytest

from channel.channels import ChannelSet
from channel.geometry import Geometry
from errors import UnknownSchemeError, ValidationError
from experiment.records import Scheme, TrialRecord, paired_wins, rates_by_scheme
from experiment.results import AGGREGATE_HEADER, TRIAL_HEADER, SweepResult
from experiment.runner import (
    ExperimentConfig,
    paired_draws,
    run_scenario,
    sweep_distance,
    trial_stream,
)
from numerics.rng import RngStream
from optimizer.settings import AOConfig

FAST_AO = AOConfig(bisection_eps=1e-3, max_ao_iters=5, randomization_count=30, bm_max_iters=300)


@pytest.fixture
def small_cfg() -> ExperimentConfig:
    return ExperimentConfig(
        geometry=Geometry(irs_rows=2, irs_cols=2),
        d0_values=(30.0, 50.0),
        trials=2,
        seed=11,
    )


class TestConfig:

    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.d0_values == tuple(float(d) for d in range(10, 101, 10))
        assert cfg.trials == 50
        assert cfg.power.p_a == pytest.approx(6.309573, rel=1e-6)
        assert cfg.power.sigma2 == pytest.approx(1e-5)
        assert cfg.m == 64

    @pytest.mark.parametrize("kwargs", [
        dict(trials=0),
        dict(d0_values=(10.0, -5.0)),
        dict(d0_values=()),
        dict(workers=0),
        dict(schemes=()),
        dict(m_override=-1),
        dict(m_override=9),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            ExperimentConfig(**kwargs)

    def test_no_irs(self):
        assert ExperimentConfig(m_override=0).m == 0

    def test_scheme_names(self):
        assert Scheme.parse("RelayNoIRS") is Scheme.RELAY_NO_IRS
        with pytest.raises(UnknownSchemeError):
            Scheme.parse("Bogus")


class TestPairedDraws:

    def test_same_key_same_channels(self, small_cfg):
        a = paired_draws(small_cfg, 1, 0)
        b = paired_draws(small_cfg, 1, 0)
        assert a.h_au == b.h_au
        np.testing.assert_array_equal(a.h_ai, b.h_ai)

    def test_trials_differ(self, small_cfg):
        assert paired_draws(small_cfg, 0, 0).h_au != paired_draws(small_cfg, 0, 1).h_au

    def test_m_override_zero(self, small_cfg):
        assert paired_draws(replace(small_cfg, m_override=0), 0, 0).m == 0


class TestRunScenario:

    def test_conventional_without_cascaded_channels(self, small_cfg):
        zeros = np.zeros(4)
        cs = ChannelSet(h_au=1e-3, h_ai=zeros, h_ac=1e-3, h_ic=zeros, g_iu=zeros, g_cu=1e-3)
        record = run_scenario(small_cfg, Scheme.CONVENTIONAL_IRS, 50.0, RngStream(0), channels=cs)
        pb = small_cfg.power
        assert record.rate == pytest.approx(np.log2(1 + pb.p_a * 1e-6 / pb.sigma2))
        assert record.mode == "conventional"

    def test_unknown_scheme(self, small_cfg):
        with pytest.raises(UnknownSchemeError):
            run_scenario(small_cfg, "Bogus", 50.0, RngStream(0))

    def test_shared_draw_dominance(self, small_cfg):
        rng = trial_stream(small_cfg, 1, 0)
        channels = paired_draws(small_cfg, 1, 0)
        opt = run_scenario(small_cfg, Scheme.RELAYING_OPT_ALPHA, 50.0, rng, FAST_AO, channels)
        conv = run_scenario(small_cfg, Scheme.CONVENTIONAL_IRS, 50.0, rng, FAST_AO, channels)
        assert opt.rate >= conv.rate - 1e-9

    def test_relay_without_irs(self, small_cfg):
        record = run_scenario(small_cfg, Scheme.RELAY_NO_IRS, 50.0, trial_stream(small_cfg, 1, 0), FAST_AO)
        assert record.rate > 0
        assert 0.0 < record.alpha <= 1.0


class TestSweep:

    def test_shape_and_dominance(self, small_cfg, caplog):
        result = sweep_distance(small_cfg, FAST_AO, progress=False)
        assert "below ConventionalIRS" not in caplog.text
        assert len(result.rows) == 2 * 4
        assert len(result.records) == 2 * 2 * 4
        for d0 in small_cfg.d0_values:
            rates = rates_by_scheme(list(result.records), d0)
            assert np.all(rates[Scheme.RELAYING_OPT_ALPHA] >= rates[Scheme.CONVENTIONAL_IRS] - 1e-9)
            assert result.row(d0, Scheme.RELAYING_OPT_ALPHA).mean_rate >= result.row(d0, Scheme.CONVENTIONAL_IRS).mean_rate - 1e-9

    def test_deterministic_csv(self, small_cfg):
        cfg = replace(small_cfg, trials=1, schemes=(Scheme.CONVENTIONAL_IRS, Scheme.RELAYING_OPT_ALPHA))
        a = sweep_distance(cfg, FAST_AO, progress=False)
        b = sweep_distance(cfg, FAST_AO, progress=False)
        assert a.trial_csv() == b.trial_csv()
        assert a.aggregate_csv() == b.aggregate_csv()

    @pytest.mark.slow
    def test_parallel_matches_serial(self, small_cfg):
        cfg = replace(small_cfg, schemes=(Scheme.CONVENTIONAL_IRS, Scheme.RELAYING_EQUAL_ALPHA))
        serial = sweep_distance(cfg, FAST_AO, progress=False)
        parallel = sweep_distance(replace(cfg, workers=2), FAST_AO, progress=False)
        assert serial.trial_csv() == parallel.trial_csv()

    @pytest.mark.slow
    def test_rate_against_distance_at_full_array(self):
        cfg = ExperimentConfig(d0_values=(30.0, 40.0, 50.0, 60.0, 70.0), trials=8, seed=5)
        assert cfg.m == 64
        result = sweep_distance(cfg, FAST_AO, progress=False)

        def mean(d0, scheme):
            return result.row(d0, scheme).mean_rate

        equal = [mean(d0, Scheme.RELAYING_EQUAL_ALPHA) for d0 in cfg.d0_values]
        # equal split is capped by the AP-controller hop
        assert max(equal) - min(equal) < 0.2 * np.mean(equal)

        for d0 in (40.0, 50.0, 60.0):
            bare_relay = mean(d0, Scheme.RELAY_NO_IRS)
            assert mean(d0, Scheme.RELAYING_EQUAL_ALPHA) > bare_relay
            assert mean(d0, Scheme.RELAYING_OPT_ALPHA) > bare_relay
            assert mean(d0, Scheme.RELAYING_OPT_ALPHA) >= mean(d0, Scheme.CONVENTIONAL_IRS) - 1e-9


class TestResults:

    def records(self):
        return [
            TrialRecord(10.0, Scheme.CONVENTIONAL_IRS, 0, 2.0, "conventional", 1.0, 7),
            TrialRecord(10.0, Scheme.CONVENTIONAL_IRS, 1, 4.0, "conventional", 1.0, 7),
            TrialRecord(10.0, Scheme.RELAYING_OPT_ALPHA, 0, 3.0, "relaying", 0.5, 7),
            TrialRecord(10.0, Scheme.RELAYING_OPT_ALPHA, 1, 4.0, "conventional", 1.0, 7),
        ]

    def test_aggregate(self):
        result = SweepResult.from_records(self.records(), (Scheme.RELAYING_OPT_ALPHA, Scheme.CONVENTIONAL_IRS))
        first, second = result.rows
        assert first.scheme is Scheme.RELAYING_OPT_ALPHA
        assert first.mean_rate == pytest.approx(3.5)
        assert first.relay_fraction == pytest.approx(0.5)
        assert first.mean_alpha == pytest.approx(0.75)
        assert second.std_rate == pytest.approx(np.sqrt(2.0))

    def test_single_trial_std_is_zero(self):
        result = SweepResult.from_records(self.records()[:1], (Scheme.CONVENTIONAL_IRS,))
        assert result.rows[0].std_rate == 0.0

    def test_paired_wins(self):
        records = self.records()
        assert paired_wins(records, 10.0, Scheme.RELAYING_OPT_ALPHA, Scheme.CONVENTIONAL_IRS) == 2
        assert paired_wins(records, 10.0, Scheme.CONVENTIONAL_IRS, Scheme.RELAYING_OPT_ALPHA) == 1
        np.testing.assert_array_equal(rates_by_scheme(records, 10.0)[Scheme.CONVENTIONAL_IRS], [2.0, 4.0])

    def test_csv_headers(self):
        result = SweepResult.from_records(self.records(), tuple(Scheme))
        assert result.trial_csv().splitlines()[0] == ",".join(TRIAL_HEADER)
        assert result.aggregate_csv().splitlines()[0] == ",".join(AGGREGATE_HEADER)
        assert result.trial_csv().splitlines()[1] == "10,ConventionalIRS,0,2,conventional,1,7"
