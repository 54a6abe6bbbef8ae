import numpy as np
import pytest

from stoch_imc.apps import AppKind, synthetic_input
from stoch_imc.arch import ArchConfig
from stoch_imc.bitstream import Bitstream, RandomSource, encode_unipolar
from stoch_imc.reliability import (
    DEFAULT_RATES,
    FaultSpec,
    ReliabilityError,
    SweepResult,
    error_sweep,
    inject_bitflips,
    lifetime_compare,
    sweep_csv,
)


def _streams(n=65536, seed=0):
    src = RandomSource(seed, 60)
    return {
        "x": encode_unipolar(0.3, n, src.child("x")),
        "y": encode_unipolar(0.8, n, src.child("y")),
    }


class TestInjection:
    def test_rate_zero_identity(self):
        streams = _streams(256)
        out = inject_bitflips(streams, FaultSpec(0.0, RandomSource(1)))
        assert out["x"] == streams["x"]
        assert out["y"] == streams["y"]

    def test_rate_one_complements(self):
        streams = _streams(256)
        out = inject_bitflips(streams, FaultSpec(1.0, RandomSource(1)))
        assert np.array_equal(out["x"].bits, 1 - streams["x"].bits)

    def test_flip_fraction_matches_rate(self):
        streams = _streams()
        out = inject_bitflips(streams, FaultSpec(0.1, RandomSource(2)))
        frac = np.mean(out["x"].bits != streams["x"].bits)
        assert frac == pytest.approx(0.1, abs=3 * np.sqrt(0.09 / 65536))

    def test_half_rate_drives_value_to_half(self):
        streams = _streams()
        out = inject_bitflips(streams, FaultSpec(0.5, RandomSource(3)))
        assert out["x"].value() == pytest.approx(0.5, abs=0.02)
        assert out["y"].value() == pytest.approx(0.5, abs=0.02)

    def test_targets_respected(self):
        streams = _streams(256)
        spec = FaultSpec(1.0, RandomSource(4), targets=frozenset(["x"]))
        out = inject_bitflips(streams, spec)
        assert out["y"] == streams["y"]
        assert np.array_equal(out["x"].bits, 1 - streams["x"].bits)

    def test_unknown_target_rejected(self):
        spec = FaultSpec(0.1, RandomSource(5), targets=frozenset(["ghost"]))
        with pytest.raises(ReliabilityError):
            inject_bitflips(_streams(256), spec)

    def test_deterministic(self):
        streams = _streams(256)
        a = inject_bitflips(streams, FaultSpec(0.2, RandomSource(6)))
        b = inject_bitflips(streams, FaultSpec(0.2, RandomSource(6)))
        assert a["x"] == b["x"]

    def test_rate_validated(self):
        with pytest.raises(ReliabilityError):
            FaultSpec(1.5, RandomSource(0))


@pytest.fixture(scope="module")
def sweep():
    app = synthetic_input(AppKind.HDP, seed=0)
    return error_sweep(app, ArchConfig(), RandomSource(0, 61),
                       rates=(0.0, 0.1, 0.2), trials=30)


class TestSweep:
    def test_shape(self, sweep):
        assert sweep.app is AppKind.HDP
        assert sweep.rates == (0.0, 0.1, 0.2)
        assert len(sweep.mean_error) == len(sweep.std_error) == 3

    def test_error_grows_with_rate_within_one_se(self, sweep):
        for i in range(len(sweep.rates) - 1):
            slack = sweep.std_error[i + 1]
            assert sweep.mean_error[i + 1] >= sweep.mean_error[i] - slack

    def test_zero_rate_matches_unfaulted_accuracy(self, sweep):
        assert sweep.mean_error[0] < 5.0

    def test_deterministic(self):
        app = synthetic_input(AppKind.HDP, seed=0)
        a = error_sweep(app, ArchConfig(), RandomSource(2, 61),
                        rates=(0.0, 0.2), trials=30)
        b = error_sweep(app, ArchConfig(), RandomSource(2, 61),
                        rates=(0.0, 0.2), trials=30)
        assert a.mean_error == b.mean_error

    def test_minimum_trials_enforced(self):
        with pytest.raises(ReliabilityError):
            SweepResult(app=AppKind.HDP, rates=(0.0,), mean_error=(1.0,),
                        std_error=(0.1,), trials=10)

    def test_default_rates(self):
        assert DEFAULT_RATES == (0.0, 0.05, 0.10, 0.15, 0.20)

    def test_csv(self, sweep):
        text = sweep_csv([sweep])
        lines = text.strip().splitlines()
        assert lines[0] == "app,rate,mean_error,stderr,trials"
        assert len(lines) == 1 + len(sweep.rates)
        assert lines[1].startswith("hdp,0.0,")


class TestLifetime:
    def test_parallel_outlives_serial(self):
        app = synthetic_input(AppKind.HDP, seed=1)
        par = ArchConfig()
        ser = ArchConfig(mode="bit-serial")
        score_ratio, wear_ratio = lifetime_compare(app, par, ser, RandomSource(3, 62))
        assert score_ratio >= 10.0
        assert wear_ratio >= 100.0

    def test_identical_configs_give_unity(self):
        app = synthetic_input(AppKind.HDP, seed=1)
        cfg = ArchConfig()
        score_ratio, wear_ratio = lifetime_compare(app, cfg, cfg, RandomSource(3, 62))
        assert score_ratio == pytest.approx(1.0)
        assert wear_ratio == pytest.approx(1.0)
