import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydrostab.catalog import load_preset
from hydrostab.decay import (
    InitialProfile,
    ModeState,
    Propagator,
    decay_norm_trace,
    default_time_grid,
    evolve_mode,
    fit_decay_exponent,
    parallel_companion,
    perpendicular_companion,
)
from hydrostab.dispersion import dispersion_roots

DEMO = load_preset("bdn19-demo").params
FT_C2 = load_preset("ft-c2").params


def random_state(rng):
    return ModeState(rng.normal(size=4) + 1j * rng.normal(size=4), rng.normal(size=4) + 1j * rng.normal(size=4))


class TestModeEvolution:
    def test_identity_at_t0(self):
        rng = np.random.default_rng(71)
        init = random_state(rng)
        out = evolve_mode(DEMO, 0.7, init, 0.0)
        np.testing.assert_allclose(out.v, init.v, atol=1e-14)
        np.testing.assert_allclose(out.vdot, init.vdot, atol=1e-14)

    def test_constant_at_zero_wave_number(self):
        init = ModeState([1.0, -2.0, 0.5, 3.0], np.zeros(4))
        for t in (0.5, 10.0, 1e3):
            out = evolve_mode(DEMO, 0.0, init, t)
            np.testing.assert_allclose(out.v, init.v, atol=1e-12)
            np.testing.assert_allclose(out.vdot, 0.0, atol=1e-12)

    @pytest.mark.parametrize("xi", [0.05, 1.0, 20.0])
    def test_eigenmode_evolves_exponentially(self, xi):
        M = parallel_companion(DEMO, xi)
        w, V = np.linalg.eig(M)
        for k in range(4):
            x = V[:, k]
            init = ModeState(np.concatenate([x[:2], [0, 0]]), np.concatenate([x[2:], [0, 0]]))
            for t in (0.3, 2.0, 7.0):
                out = evolve_mode(DEMO, xi, init, t)
                np.testing.assert_allclose(out.v[:2], np.exp(w[k] * t) * x[:2], rtol=1e-10, atol=1e-12)

    def test_companion_eigenvalues_are_dispersion_roots(self):
        for xi in (0.01, 0.5, 3.0, 50.0):
            r = dispersion_roots(DEMO, xi)
            for M, roots in ((parallel_companion(DEMO, xi), r.parallel),
                             (perpendicular_companion(DEMO, xi), r.perpendicular)):
                ev = np.linalg.eigvals(M)
                gap = np.abs(ev[:, None] - roots[None, :]).min(axis=1)
                assert gap.max() <= 1e-9 * max(1.0, np.abs(roots).max())

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.0, 30.0), st.floats(0.0, 50.0), st.integers(0, 2 ** 32 - 1))
    def test_linearity(self, xi, t, seed):
        rng = np.random.default_rng(seed)
        a, b = random_state(rng), random_state(rng)
        c1, c2 = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        combo = ModeState(c1 * a.v + c2 * b.v, c1 * a.vdot + c2 * b.vdot)
        lhs = evolve_mode(DEMO, xi, combo, t)
        ra, rb = evolve_mode(DEMO, xi, a, t), evolve_mode(DEMO, xi, b, t)
        scale = max(1.0, np.abs(ra.v).max() * abs(c1), np.abs(rb.v).max() * abs(c2))
        assert np.abs(lhs.v - (c1 * ra.v + c2 * rb.v)).max() <= 1e-13 * scale * 10

    def test_log_slope_matches_branch(self):
        xi = 0.3
        M = parallel_companion(DEMO, xi)
        w, V = np.linalg.eig(M)
        r = dispersion_roots(DEMO, xi)
        k = int(np.argmax(w.real))
        x = V[:, k]
        init = ModeState(np.concatenate([x[:2], [0, 0]]), np.concatenate([x[2:], [0, 0]]))
        t1, t2 = 5.0, 25.0
        n1 = np.linalg.norm(evolve_mode(DEMO, xi, init, t1).v)
        n2 = np.linalg.norm(evolve_mode(DEMO, xi, init, t2).v)
        slope = (math.log(n2) - math.log(n1)) / (t2 - t1)
        assert slope == pytest.approx(r.parallel.real.max(), abs=1e-6)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            evolve_mode(DEMO, -1.0, ModeState(np.ones(4), np.zeros(4)), 1.0)
        with pytest.raises(ValueError):
            ModeState([np.nan, 0, 0, 0], np.zeros(4))

    def test_propagator_fallback_for_defective_matrix(self):
        J = np.array([[-1.0, 1.0], [0.0, -1.0]], dtype=complex)
        prop = Propagator(J)
        assert not prop.use_eig
        out = prop.apply(np.array([0.0, 1.0]), [2.0])[0]
        np.testing.assert_allclose(out, [2 * math.exp(-2), math.exp(-2)], rtol=1e-12)


class TestProfile:
    @pytest.mark.parametrize("s", [0.0, 1.0, 2.5])
    def test_initial_norm_matches_closed_form(self, s):
        prof = InitialProfile(width=0.8, amplitudes=(1.0, 0.5, 0.0, -0.3))
        trace = decay_norm_trace(DEMO, prof, s=s, t_grid=np.array([0.0, 1.0]))
        assert trace.hs_norms[0] ** 2 == pytest.approx(prof.hs_norm_squared(s), rel=1e-6)

    def test_validation(self):
        with pytest.raises(ValueError):
            InitialProfile(width=0.0)
        with pytest.raises(ValueError):
            InitialProfile(amplitudes=(0, 0, 0, 0))
        with pytest.raises(ValueError):
            InitialProfile(amplitudes=(1, 0, 0))


class TestDecayTrace:
    def test_shear_data_decays_diffusively(self):
        trace = decay_norm_trace(DEMO, InitialProfile(amplitudes=(0, 0, 1, 0)))
        assert trace.fitted_exponent == pytest.approx(-0.75, abs=0.02)

    def test_refinement_is_stable(self):
        prof = InitialProfile(amplitudes=(1, 0, 0, 0))
        times = default_time_grid(1e2, 1e4, 10)
        coarse = decay_norm_trace(DEMO, prof, t_grid=times, epsrel=1e-8)
        fine = decay_norm_trace(DEMO, prof, t_grid=times, epsrel=1e-10)
        assert np.max(np.abs(coarse.hs_norms / fine.hs_norms - 1)) < 1e-6

    @pytest.mark.parametrize("name, t_start", [("bdn19-demo", 1.0), ("ft-c2", 1.0),
                                               ("bdn19-causal", 5.0), ("bdn18-symmetric", 5.0)])
    @pytest.mark.parametrize("amps", [(1, 0, 0, 0), (0, 1, 0, 0)])
    def test_monotone_after_transient(self, name, t_start, amps):
        times = np.concatenate([[0.0], np.logspace(np.log10(t_start), 3, 30)])
        trace = decay_norm_trace(load_preset(name).params, InitialProfile(amplitudes=amps), t_grid=times)
        late = trace.l2_norms[1:]
        assert np.all(np.diff(late) < 0)

    def test_csv_and_dict(self):
        trace = decay_norm_trace(DEMO, InitialProfile(), t_grid=default_time_grid(1e2, 1e3, 5),
                                 fit_window=(1e2, 1e3))
        lines = trace.to_csv().splitlines()
        assert lines[0].startswith("# fitted_exponent=")
        assert lines[3] == "t,hs_norm,l2_norm"
        assert len(lines) == 4 + 6
        d = trace.to_dict()
        assert d["fit_window"] == [1e2, 1e3] and len(d["times"]) == 6

    def test_l2_and_hs_agree_at_s0(self):
        trace = decay_norm_trace(FT_C2, InitialProfile(), t_grid=default_time_grid(1e2, 1e3, 5))
        np.testing.assert_allclose(trace.hs_norms, trace.l2_norms, rtol=1e-14)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            decay_norm_trace(DEMO, InitialProfile(), s=-1.0)
        with pytest.raises(ValueError):
            decay_norm_trace(DEMO, InitialProfile(), t_grid=np.array([1.0, 0.5]))


def test_fit_exponent_recovers_power_law():
    t = default_time_grid()
    assert fit_decay_exponent(t, (1 + t) ** -0.75) == pytest.approx(-0.75, abs=1e-12)
    assert math.isnan(fit_decay_exponent(t, (1 + t) ** -1, window=(1e5, 1e6)))
