import pytest

from stoch_imc.config import (
    ConfigError,
    config_schema,
    load_config,
)
from stoch_imc.netlist import Kind


class TestSchema:
    def test_contains_core_keys(self):
        schema = config_schema()
        for key in ("arch.dims.rows", "arch.dims.cols", "arch.bitstream_length",
                    "arch.mode", "arch.gate_energy.AND", "mtj.r_p", "mtj.delta"):
            assert key in schema

    def test_composite_fields_not_exposed_directly(self):
        schema = config_schema()
        assert "arch.dims" not in schema
        assert "arch.gate_energy_aj" not in schema


class TestLoadConfig:
    def test_defaults(self):
        bundle = load_config()
        assert bundle.arch.bitstream_length == 256
        assert bundle.mtj.r_p == 12.7e3

    def test_file_values(self, tmp_path):
        cf = tmp_path / "c.json"
        cf.write_text('{"arch.dims.rows": 64, "arch.n": 4, "arch.m": 4,'
                      ' "mtj.r_p": 13000.0, "mtj.r_ap": 78000.0,'
                      ' "mtj.tmr": 5.0}')
        bundle = load_config(str(cf))
        assert bundle.arch.dims.rows == 64
        assert bundle.arch.subarrays == 16
        assert bundle.mtj.r_p == 13000.0

    def test_override_wins_over_file(self, tmp_path):
        cf = tmp_path / "c.json"
        cf.write_text('{"arch.bitstream_length": 64}')
        bundle = load_config(str(cf), ["arch.bitstream_length=512"])
        assert bundle.arch.bitstream_length == 512

    def test_gate_energy_override(self):
        bundle = load_config(None, ["arch.gate_energy.NOR=9.9"])
        assert bundle.arch.gate_energy_aj[Kind.NOR] == 9.9

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            load_config(None, ["arch.flux_capacitor=1"])

    def test_bad_value_type(self):
        with pytest.raises(ConfigError):
            load_config(None, ["arch.bitstream_length=soon"])

    def test_bad_override_shape(self):
        with pytest.raises(ConfigError):
            load_config(None, ["arch.bitstream_length"])

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("/nonexistent/config.json")

    def test_malformed_json(self, tmp_path):
        cf = tmp_path / "c.json"
        cf.write_text("{")
        with pytest.raises(ConfigError) as err:
            load_config(str(cf))
        assert "line" in str(err.value)

    def test_nullable_fields(self):
        bundle = load_config(None, ["arch.transfer_cycles=none",
                                    "arch.e_sbg_aj=null"])
        assert bundle.arch.transfer_cycles is None
        assert bundle.arch.e_sbg_aj is None

    def test_invalid_combination_surfaces_as_config_error(self):
        with pytest.raises(ConfigError):
            load_config(None, ["arch.n=4"])  # breaks the square layout

    def test_env_var_fallback(self, tmp_path, monkeypatch):
        cf = tmp_path / "c.json"
        cf.write_text('{"arch.bitstream_length": 1024}')
        monkeypatch.setenv("STOCH_IMC_CONFIG", str(cf))
        assert load_config().arch.bitstream_length == 1024
