import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curved_mie.config import ATOMIC_UNITS, ConfigError, RunConfig, load_config, parse_config, thread_count
from curved_mie.io import format_value, jsonable, to_csv, to_json
from curved_mie.spectrum import VALIDATED_MODE, SolvabilityMode


class TestConfig:
    def test_defaults(self):
        cfg = parse_config({})
        assert cfg == RunConfig()
        assert cfg.mode is VALIDATED_MODE
        assert cfg.N == 8192 and cfg.k_states == 4

    def test_full_document(self):
        cfg = parse_config({
            "params": {"hbar": 1, "mu": 2, "R": 3, "a": 0.5, "V0": 4},
            "molecules": {"X": {"epsilon_depth": 0.1, "a": 2.0, "reduced_mass": 7.0, "note": "demo"}},
            "mode": "rederived",
            "grid": {"N": 1024, "k_states": 3},
            "tolerances": {"eig_tol": 1e-10, "verify_tol": 1e-3},
            "output": {"format": "json", "path": "out.json"},
        })
        assert cfg.params.mu == 2 and cfg.params.V0 == 4
        assert cfg.mode is SolvabilityMode.REDERIVED
        assert cfg.N == 1024 and cfg.verify_tol == 1e-3
        assert cfg.output_format == "json" and cfg.output_path == "out.json"
        mp = cfg.molecule_params("X")
        assert (mp.mu, mp.a, mp.V0, mp.R) == (7.0, 2.0, 0.2, 3.0)

    @pytest.mark.parametrize(
        "doc, key",
        [
            ({"bogus": 1}, "bogus"),
            ({"params": {"V": 1}}, "V"),
            ({"grid": {"M": 2}}, "M"),
            ({"tolerances": {"tol": 1}}, "tol"),
            ({"molecules": {"X": {"epsilon_depth": 1, "a": 1, "reduced_mass": 1, "color": "red"}}}, "color"),
            ({"units": {"time": 1}}, "time"),
        ],
    )
    def test_unknown_keys_named(self, doc, key):
        with pytest.raises(ConfigError, match=repr(key)):
            parse_config(doc)

    @pytest.mark.parametrize(
        "doc",
        [
            {"params": {"R": -1}},
            {"params": {"R": "big"}},
            {"params": {"R": True}},
            {"mode": "paper"},
            {"grid": {"N": 63}},
            {"grid": {"k_states": 0}},
            {"output": {"format": "xml"}},
            {"params": {"V0": 1, "epsilon": 1}},
            {"params": {"k": 2}},
            {"molecules": {"X": {"a": 1}}},
            [],
        ],
    )
    def test_invalid(self, doc):
        with pytest.raises(ConfigError):
            parse_config(doc)

    def test_epsilon_form(self):
        assert parse_config({"params": {"epsilon": 0.5, "k": 1}}).params.V0 == 1.0

    def test_units_block(self):
        cfg = parse_config({"units": ATOMIC_UNITS, "params": {"mu": 1.0, "R": 1.0, "a": 1.0, "V0": 1.0}})
        assert cfg.params.mu == pytest.approx(1822.888486, rel=1e-8)
        assert cfg.params.a == pytest.approx(1.8897261, rel=1e-7)
        assert cfg.params.V0 == pytest.approx(1 / 27.211386, rel=1e-7)

    def test_unknown_molecule_lists_known(self):
        cfg = parse_config({"molecules": {"CH": {"epsilon_depth": 1, "a": 1, "reduced_mass": 1}}})
        with pytest.raises(ConfigError, match="CH"):
            cfg.molecule_params("NO")

    def test_load_missing(self, tmp_path):
        path = tmp_path / "absent.json"
        with pytest.raises(ConfigError, match="absent.json"):
            load_config(path)

    def test_load_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config(path)

    def test_load_none(self):
        assert load_config(None) == RunConfig()

    def test_shipped_example_loads(self):
        from pathlib import Path

        cfg = load_config(Path(__file__).parents[1] / "demos" / "molecules.example.json")
        assert set(cfg.molecules) == {"CH", "NO", "N2"}
        assert all("user-supplied" in m.note for m in cfg.molecules.values())

    def test_threads(self, monkeypatch):
        monkeypatch.setenv("CURVED_MIE_THREADS", "3")
        assert thread_count() == 3
        monkeypatch.setenv("CURVED_MIE_THREADS", "0")
        assert thread_count() >= 1
        monkeypatch.setenv("CURVED_MIE_THREADS", "x")
        with pytest.raises(ConfigError):
            thread_count()


class TestIO:
    def test_float_format(self):
        assert format_value(0.1) == "0.10000000000000001"
        assert format_value(1e-20) == "9.9999999999999995e-21"
        assert format_value(np.float64(-2.5e300)) == "-2.5000000000000001e+300"
        assert format_value(3) == "3" and format_value(None) == "" and format_value(True) == "true"

    def test_csv_shape(self):
        text = to_csv(("a", "b"), [{"a": 1, "b": 0.5}, {"a": 2}])
        assert text == "a,b\n1,0.5\n2,\n"
        assert "\r" not in text

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
    def test_csv_floats_round_trip(self, xs):
        text = to_csv(("x",), [{"x": x} for x in xs])
        back = [float(line) for line in text.splitlines()[1:]]
        assert back == xs

    json_values = st.recursive(
        st.none() | st.booleans() | st.integers(-10**12, 10**12) | st.floats(allow_nan=False, allow_infinity=False) | st.text(max_size=8),
        lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=6), inner, max_size=4),
        max_leaves=20,
    )

    @given(json_values)
    def test_json_round_trip(self, value):
        assert json.loads(to_json(value)) == value

    def test_jsonable_numpy_and_complex(self):
        out = jsonable({"x": np.float64(1.5), "n": np.int64(2), "z": 1 + 2j, "bad": math.inf})
        assert out == {"x": 1.5, "n": 2, "z": {"re": 1.0, "im": 2.0}, "bad": "inf"}
