import numpy as np
import pytest

from stoch_imc.apps import (
    AppError,
    AppKind,
    HdpInput,
    ImageGrid,
    KdeInput,
    LitInput,
    OlInput,
    app_result_csv,
    golden_eval,
    load_inputs,
    load_pgm,
    save_pgm,
    stochastic_eval,
    synthetic_input,
)
from stoch_imc.arch import ArchConfig
from stoch_imc.bitstream import RandomSource


def _cfg():
    return ArchConfig()


class TestGoldenModels:
    def test_lit_constant_image_has_zero_deviation(self):
        img = ImageGrid(np.full((5, 5), 128, dtype=np.uint8))
        out = golden_eval(LitInput(image=img, window=3))
        v = 128 / 255
        assert out == pytest.approx(np.full(25, v * (0.0 + 1.0) / 2.0))

    def test_lit_windows_are_edge_padded(self):
        img = ImageGrid(np.array([[0, 255], [255, 0]], dtype=np.uint8))
        out = golden_eval(LitInput(image=img, window=3))
        assert out.shape == (4,)
        # diagonal symmetry of the padded checkerboard
        assert out[0] == pytest.approx(out[3])
        assert out[1] == pytest.approx(out[2])

    def test_ol_product_of_six(self):
        c = np.full((2, 2, 6), 0.9)
        out = golden_eval(OlInput(conditionals=c))
        assert out == pytest.approx(np.full(4, 0.9 ** 6))

    def test_hdp_symmetric_beliefs_give_half(self):
        app = HdpInput(p_bp=0.5, p_cp=0.5, p_e=0.5, p_d=0.5,
                       table=(0.5, 0.5, 0.5, 0.5))
        assert golden_eval(app)[0] == pytest.approx(0.5)

    def test_hdp_strong_beliefs_move_toward_one(self):
        app = HdpInput(p_bp=0.9, p_cp=0.9, p_e=0.5, p_d=0.5,
                       table=(0.5, 0.5, 0.5, 0.5))
        assert golden_eval(app)[0] > 0.9

    def test_kde_identical_history_scores_one(self):
        cur = np.full((3, 3), 0.4)
        app = KdeInput(history=np.stack([cur, cur]), current=cur, lam=4.0)
        assert golden_eval(app) == pytest.approx(np.ones(9))

    def test_kde_distance_decays(self):
        cur = np.zeros((1, 1))
        far = np.ones((1, 1, 1))
        out = golden_eval(KdeInput(history=far, current=cur, lam=4.0))
        assert out[0] == pytest.approx(np.exp(-4.0))


class TestInputValidation:
    def test_even_window_rejected(self):
        img = ImageGrid(np.zeros((4, 4), dtype=np.uint8))
        with pytest.raises(AppError):
            LitInput(image=img, window=4)

    def test_ol_shape_enforced(self):
        with pytest.raises(AppError):
            OlInput(conditionals=np.zeros((2, 2, 5)))

    def test_hdp_probability_range(self):
        with pytest.raises(AppError):
            HdpInput(p_bp=1.2, p_cp=0.5, p_e=0.5, p_d=0.5,
                     table=(0.5, 0.5, 0.5, 0.5))

    def test_kde_rate_range(self):
        cur = np.zeros((2, 2))
        with pytest.raises(AppError):
            KdeInput(history=cur[None], current=cur, lam=6.0)
        with pytest.raises(AppError):
            KdeInput(history=cur[None], current=cur, lam=0.0)

    def test_kde_frame_shape(self):
        with pytest.raises(AppError):
            KdeInput(history=np.zeros((2, 3, 3)), current=np.zeros((2, 2)))


class TestStochasticEval:
    def test_lit_small_image_accuracy(self):
        app = synthetic_input(AppKind.LIT, seed=1, size=4, window=3)
        res = stochastic_eval(app, _cfg(), RandomSource(1, 40), with_arch=False)
        assert res.kind is AppKind.LIT
        assert res.mae_percent < 7.0

    def test_ol_accuracy(self):
        app = synthetic_input(AppKind.OL, seed=2, size=4)
        res = stochastic_eval(app, _cfg(), RandomSource(2, 40), with_arch=False)
        assert res.mae_percent < 7.0

    def test_hdp_accuracy(self):
        app = synthetic_input(AppKind.HDP, seed=3)
        res = stochastic_eval(app, _cfg(), RandomSource(3, 40), with_arch=False)
        assert res.mae_percent < 7.0

    def test_kde_accuracy(self):
        app = synthetic_input(AppKind.KDE, seed=4, size=3, n_history=3)
        res = stochastic_eval(app, _cfg(), RandomSource(4, 40), with_arch=False)
        assert res.mae_percent < 7.0

    def test_deterministic_for_fixed_seed(self):
        app = synthetic_input(AppKind.OL, seed=5, size=3)
        a = stochastic_eval(app, _cfg(), RandomSource(9, 40), with_arch=False)
        b = stochastic_eval(app, _cfg(), RandomSource(9, 40), with_arch=False)
        assert np.array_equal(a.stochastic, b.stochastic)

    def test_arch_and_functional_paths_agree_bitwise(self):
        app = synthetic_input(AppKind.HDP, seed=6)
        fn = stochastic_eval(app, _cfg(), RandomSource(6, 40), with_arch=False)
        hw = stochastic_eval(app, _cfg(), RandomSource(6, 40), with_arch=True)
        assert np.array_equal(fn.stochastic, hw.stochastic)

    def test_trace_names_unique(self):
        app = synthetic_input(AppKind.LIT, seed=7, size=3, window=3)
        res = stochastic_eval(app, _cfg(), RandomSource(7, 40), with_arch=False)
        names = res.trace_names()
        assert len(names) == len(set(names))
        assert names  # boundaries were actually traced

    def test_totals_collected_with_arch(self):
        app = synthetic_input(AppKind.HDP, seed=8)
        res = stochastic_eval(app, _cfg(), RandomSource(8, 40), with_arch=True)
        assert res.totals["ops"] > 0
        assert res.totals["energy_aj"] > 0
        assert res.totals["writes"] > 0
        assert res.totals["max_per_cell_writes"] == 2


class TestSyntheticInputs:
    @pytest.mark.parametrize("kind", list(AppKind))
    def test_deterministic(self, kind):
        a = synthetic_input(kind, seed=11, size=4, window=3, n_history=2)
        b = synthetic_input(kind, seed=11, size=4, window=3, n_history=2)
        ga, gb = golden_eval(a), golden_eval(b)
        assert np.array_equal(ga, gb)

    def test_seed_changes_data(self):
        a = golden_eval(synthetic_input(AppKind.OL, seed=1, size=4))
        b = golden_eval(synthetic_input(AppKind.OL, seed=2, size=4))
        assert not np.array_equal(a, b)


class TestFileIO:
    def test_pgm_round_trip(self, tmp_path):
        px = np.arange(20, dtype=np.uint8).reshape(4, 5)
        p = tmp_path / "img.pgm"
        save_pgm(p, ImageGrid(px))
        again = load_pgm(p)
        assert np.array_equal(again.pixels, px)

    def test_pgm_bad_magic(self, tmp_path):
        p = tmp_path / "bad.pgm"
        p.write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
        with pytest.raises(AppError) as err:
            load_pgm(p)
        assert "PGM" in str(err.value)
        assert "byte offset" in str(err.value)

    def test_pgm_truncated_payload(self, tmp_path):
        p = tmp_path / "short.pgm"
        p.write_bytes(b"P5\n4 4\n255\n\x00\x00")
        with pytest.raises(AppError):
            load_pgm(p)

    def test_json_probability_out_of_range(self, tmp_path):
        p = tmp_path / "hdp.json"
        p.write_text('{"p_bp": 1.3, "p_cp": 0.5, "p_e": 0.5, "p_d": 0.5,'
                     ' "table": [0.5, 0.5, 0.5, 0.5]}')
        with pytest.raises(AppError):
            load_inputs(p, AppKind.HDP)

    def test_json_malformed(self, tmp_path):
        p = tmp_path / "ol.json"
        p.write_text('{"grid": [[[0.5')
        with pytest.raises(AppError) as err:
            load_inputs(p, AppKind.OL)
        assert "line" in str(err.value)

    def test_load_lit_from_pgm(self, tmp_path):
        p = tmp_path / "img.pgm"
        save_pgm(p, ImageGrid(np.zeros((6, 6), dtype=np.uint8)))
        app = load_inputs(p, AppKind.LIT, window=3)
        assert isinstance(app, LitInput)
        assert app.window == 3

    def test_result_csv(self):
        app = synthetic_input(AppKind.HDP, seed=12)
        res = stochastic_eval(app, _cfg(), RandomSource(12, 40), with_arch=False)
        text = app_result_csv(res)
        lines = text.strip().splitlines()
        assert lines[0] == "input-id,golden,stochastic,abs-error"
        assert len(lines) == 1 + len(res.golden)
