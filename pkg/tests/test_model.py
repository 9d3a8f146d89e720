import math

import numpy as np
import pytest
from draws import draws
from hypothesis import given, settings
from hypothesis import strategies as st

from hydrostab.dissipativity import theorem1_inequalities
from hydrostab.hyperbolicity import hyperbolicity_margins
from hydrostab.model import (
    PARAM_KEYS,
    ConfigError,
    DomainError,
    ModelParameters,
    adapted_basis,
    assemble_symbols,
    compute_sound_speed,
    format_config,
    full_symbols,
    parse_config,
    rescale_to_unit_cs,
)

DEMO = ModelParameters(kappa=1, mu=1, nu=1, eta=0.3, chi=0.9, tau=3, omega=3, cs=1)

coef = st.floats(-3.0, 3.0, allow_nan=False)
finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@st.composite
def params_strategy(draw, values=coef):
    vals = {k: draw(values) for k in PARAM_KEYS if k != "cs"}
    return ModelParameters(cs=draw(st.floats(0.05, 1.0)), **vals)


class TestModelParameters:
    def test_sigma_is_derived_exactly(self):
        assert DEMO.sigma == 0.9 - 4.0 * 0.3 / 3.0
        assert ModelParameters(1, 1, 0.5, -1, -1, 1, -1.0 / 3.0, 0.5).sigma == -1.0

    @given(params_strategy(finite))
    def test_sigma_accessor_matches_expression(self, p):
        assert p.sigma == p.chi - 4.0 * p.eta / 3.0

    def test_from_sigma(self):
        p = ModelParameters.from_sigma(kappa=1, mu=1, eta=0.3, nu=1, tau=3, omega=3, sigma=0.5)
        assert p.chi == pytest.approx(0.9)
        assert p.sigma == pytest.approx(0.5)

    @pytest.mark.parametrize("cs", [0.0, -1.0])
    def test_rejects_nonpositive_cs(self, cs):
        with pytest.raises(ConfigError) as err:
            ModelParameters(1, 1, 1, 1, 1, 1, 1, cs)
        assert err.value.key == "cs"

    def test_rejects_nonfinite(self):
        with pytest.raises(ConfigError) as err:
            ModelParameters(1, math.nan, 1, 1, 1, 1, 1, 1)
        assert err.value.key == "mu"

    def test_no_sign_constraints(self):
        p = ModelParameters(-1, -2, -3, -4, -5, -6, -7, 0.1)
        assert p.kappa == -1.0

    def test_replace(self):
        assert DEMO.replace(omega=1.5).omega == 1.5
        assert DEMO.omega == 3.0


class TestConfig:
    def test_parse(self):
        text = "# demo\nkappa = 1\nmu: 1\nnu = 1\neta = 0.3\nchi = 0.9  # sigma 0.5\ntau = 3\nomega = 3\ncs = 1\n"
        assert parse_config(text) == DEMO

    def test_missing_key_named(self):
        text = format_config(DEMO).replace("omega = 3.0\n", "")
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert err.value.key == "omega"

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError) as err:
            parse_config(format_config(DEMO) + "zeta = 1\n")
        assert err.value.key == "zeta"

    def test_bad_value_named(self):
        with pytest.raises(ConfigError) as err:
            parse_config(format_config(DEMO).replace("tau = 3.0", "tau = three"))
        assert err.value.key == "tau"

    def test_duplicate_key(self):
        with pytest.raises(ConfigError) as err:
            parse_config(format_config(DEMO) + "mu = 2\n")
        assert err.value.key == "mu"

    @given(params_strategy(finite))
    def test_round_trip_bit_exact(self, p):
        q = parse_config(format_config(p))
        for key in PARAM_KEYS:
            assert getattr(q, key) == getattr(p, key)


class TestSoundSpeed:
    @pytest.mark.parametrize("args, expected", [((1, 1, 1), 1.0), ((4, 1, 1), 2.0),
                                                ((0.3, 1.2, 2.0), math.sqrt(0.125))])
    def test_examples(self, args, expected):
        assert compute_sound_speed(*args) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("args, word", [((0, 1, 1), "p'"), ((1, -1, 1), "p''"), ((1, 1, 0), "temperature")])
    def test_domain_errors(self, args, word):
        with pytest.raises(DomainError, match=word):
            compute_sound_speed(*args)


class TestRescale:
    def test_identity_at_unit_cs(self):
        assert rescale_to_unit_cs(DEMO) == DEMO

    def test_kappa_example(self):
        r = rescale_to_unit_cs(DEMO.replace(kappa=16.0, cs=0.5))
        assert r.kappa == 1.0 and r.cs == 1.0

    @given(params_strategy())
    def test_sigma_fixed_and_idempotent(self, p):
        r = rescale_to_unit_cs(p)
        assert r.sigma == pytest.approx(p.sigma, abs=1e-12)
        assert rescale_to_unit_cs(r) == r

    def test_c13_scales_by_cs4(self):
        for p in draws(11, 1000):
            raw = p.cs ** -2 * (p.omega + p.tau) - p.kappa - p.cs ** -4 * p.sigma
            r = rescale_to_unit_cs(p)
            assert r.omega + r.tau - r.kappa - r.sigma == pytest.approx(p.cs ** 4 * raw, rel=1e-9, abs=1e-12)

    @settings(max_examples=300)
    @given(params_strategy())
    def test_inequalities_scale_by_positive_powers(self, p):
        # raw forms carry cs explicitly; each rescaled form is cs^k times the raw one
        ic = p.cs ** -2
        k, m, n, s, t, w = p.kappa, p.mu, p.nu, p.sigma, p.tau, p.omega
        K = (t + m) * (n + w) - k * s - n * m
        S, P = k + ic * m, t + w + m - ic * s
        raw = {
            "C1_1": (K, 4),
            "C1_2": (K * K - 4 * n * m * k * s, 8),
            "C1_3": (ic * (w + t) - k - ic * ic * s, 4),
            "C1_4": (S * P * ((t + m) * (w + n) - (m * n + k * s)) - k * m * P * P - S * S * n * s, 10),
        }
        after = theorem1_inequalities(p)
        for key, (value, power) in raw.items():
            assert after[key] == pytest.approx(p.cs ** power * value, rel=1e-8, abs=1e-10), key
            if abs(value) > 1e-8:
                assert np.sign(after[key]) == np.sign(value)
        r = rescale_to_unit_cs(p)
        h_raw, h_res = hyperbolicity_margins(p), hyperbolicity_margins(r)
        assert h_res["C2_1b"] == pytest.approx(p.cs ** 4 * h_raw["C2_1b"], rel=1e-9, abs=1e-12)
        assert r.tau + r.mu == pytest.approx(p.cs ** 2 * (t + m), abs=1e-12)
        assert r.sigma + r.mu == pytest.approx(s + p.cs ** 2 * m, abs=1e-12)


class TestSymbols:
    def test_demo_blocks(self):
        sym = assemble_symbols(DEMO)
        np.testing.assert_array_equal(sym.B00_par, -np.eye(2))
        np.testing.assert_allclose(sym.B_par(1.0), -np.diag([1.0, 0.5]))
        np.testing.assert_allclose(sym.C_par(1.0), -np.array([[0.0, 4.0], [4.0, 0.0]]))
        assert sym.B00_perp == -1.0
        assert sym.B_perp(2.0) == pytest.approx(0.3 * 4)

    def test_row_convention_of_C(self):
        p = DEMO.replace(tau=2.0, omega=5.0)
        C = assemble_symbols(p).C_par(1.0)
        assert C[0, 1] == -(p.tau + p.mu) and C[1, 0] == -(p.omega + p.nu)

    @given(params_strategy())
    def test_zero_wave_number(self, p):
        sym = assemble_symbols(p)
        for M in (sym.B_par(0.0), sym.C_par(0.0), sym.A_par(0.0)):
            assert not np.any(M)
        assert sym.C_perp == 0 and sym.A_perp == 0

    @given(params_strategy())
    def test_first_order_part_symmetric(self, p):
        sym = assemble_symbols(p)
        A = sym.A_par(1.7)
        np.testing.assert_array_equal(A, A.T)
        assert np.all(np.linalg.eigvalsh(sym.A0_par) > 0)
        assert np.allclose(sym.A0_par, np.diag([p.cs ** -2, 1.0]))

    @settings(max_examples=200)
    @given(params_strategy(), st.tuples(*[st.floats(-3, 3)] * 3).filter(lambda v: np.linalg.norm(v) > 1e-2))
    def test_block_consistency(self, p, xi_vec):
        xi_vec = np.array(xi_vec)
        Q = adapted_basis(xi_vec)
        xi = np.linalg.norm(xi_vec)
        sym = assemble_symbols(p)
        full = full_symbols(p, xi_vec)
        for name, par, perp in [("B00", sym.B00_par, sym.B00_perp), ("B", sym.B_par(xi), sym.B_perp(xi)),
                                ("C", sym.C_par(xi), 0.0), ("A0", sym.A0_par, sym.A0_perp),
                                ("A", sym.A_par(xi), 0.0)]:
            M = Q.T @ full[name] @ Q
            scale = max(1.0, np.abs(M).max())
            assert np.abs(M[:2, 2:]).max() < 1e-12 * scale
            assert np.abs(M[2:, :2]).max() < 1e-12 * scale
            np.testing.assert_allclose(M[:2, :2], par, atol=1e-12 * scale)
            np.testing.assert_allclose(M[2:, 2:], perp * np.eye(2), atol=1e-12 * scale)
