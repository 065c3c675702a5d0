import math

import numpy as np
import pytest
from scipy import integrate as sci_integrate

from dixlab import maps


def _rng(seed=0):
    return np.random.Generator(np.random.Philox(seed))


def _random_step(seed, n=40, lo=0.0):
    r = _rng(seed)
    b = np.sort(r.random(n) * 50.0) + lo
    b[0] = lo
    vals = r.random(n) * 4.0 - 1.0
    return maps.PiecewiseFunction(
        "step", b, vals, lo, float(b[-1] + 1.0 + r.random()), float(vals[-1])
    )


class TestPiecewiseValidation:
    def test_breakpoints_must_increase(self):
        with pytest.raises(ValueError):
            maps.PiecewiseFunction(
                "step", np.array([0.0, 2.0, 1.0]), np.zeros(3), 0.0, 5.0, 0.0
            )

    def test_first_breakpoint_pins_domain_start(self):
        with pytest.raises(ValueError):
            maps.PiecewiseFunction(
                "step", np.array([0.5, 1.0]), np.zeros(2), 0.0, 5.0, 0.0
            )

    def test_step_horizon_strictly_past_last_knot(self):
        with pytest.raises(ValueError):
            maps.PiecewiseFunction(
                "step", np.array([0.0, 1.0]), np.zeros(2), 0.0, 1.0, 0.0
            )

    def test_evaluate_tail_and_left_limit(self):
        f = maps.PiecewiseFunction(
            "step", np.array([0.0, 2.0]), np.array([1.0, 5.0]), 0.0, 4.0,
            -3.0,
        )
        assert maps.evaluate(f, 1.0) == 1.0
        assert maps.evaluate(f, 2.0) == 5.0
        assert maps.evaluate(f, 3.999) == 5.0
        assert maps.evaluate(f, 4.0) == -3.0  # tail constant past horizon
        assert maps.evaluate(f, 100.0) == -3.0


class TestIntegration:
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_integral_matches_quadrature(self, seed):
        f = _random_step(seed)
        t0 = f.domain_start + 0.3
        t1 = f.horizon - 0.2
        want, _ = sci_integrate.quad(
            lambda t: maps.evaluate(f, t), t0, t1, limit=300,
            points=f.breakpoints[
                (f.breakpoints > t0) & (f.breakpoints < t1)
            ],
        )
        assert maps.integral(f, t0, t1) == pytest.approx(want, rel=1e-9)

    def test_cumulative_matches_pointwise_integral(self):
        f = _random_step(7)
        ts = np.linspace(f.domain_start, f.horizon, 113)
        got = maps.cumulative_integral(f, ts)
        want = [maps.integral(f, f.domain_start, t) for t in ts]
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)

    def test_linear_integral_exact_trapezoid(self):
        b = np.array([0.0, 1.0, 3.0])
        v = np.array([0.0, 2.0, 0.0])
        f = maps.PiecewiseFunction("linear", b, v, 0.0, 3.0, 0.0)
        assert maps.integral(f, 0.0, 3.0) == pytest.approx(3.0, abs=1e-15)

    def test_log_cesaro_window_matches_quadrature(self):
        f = _random_step(11)
        t0, t1 = 5.0, 9.0

        def inner(s):
            return maps.integral(f, 0.0, s) / s

        want, _ = sci_integrate.quad(inner, t0, t1, limit=200)
        got = maps.log_cesaro_window(f, t0, t1)
        assert got == pytest.approx(want, rel=1e-9)


class TestEmbeddingsAndRestriction:
    def test_floor_embed_restrict_identity(self):
        a = _rng(3).random(50) * 3.0
        assert np.array_equal(maps.restrict(maps.floor_embed(a)), a)

    def test_linear_embed_restrict_identity(self):
        a = _rng(4).random(50) * 3.0
        assert np.array_equal(maps.restrict(maps.linear_embed(a)), a)

    def test_floor_embed_is_right_continuous_step(self):
        a = np.array([2.0, 7.0, 1.0])
        f = maps.floor_embed(a)
        assert maps.evaluate(f, 0.999) == 2.0
        assert maps.evaluate(f, 1.0) == 7.0

    def test_window_avg_exact_on_step_data(self):
        f = maps.floor_embed(_rng(5).random(30))
        E = maps.window_avg(f)
        for t in (0.0, 0.25, 3.7, 11.5, 28.9):
            want = maps.unit_window_integral(f, t)
            assert maps.evaluate(E, t) == pytest.approx(want, abs=1e-13)

    def test_window_avg_knot_exact_on_linear_data(self):
        f = maps.linear_embed(_rng(6).random(30))
        E = maps.window_avg(f)
        for t in E.breakpoints[:-1]:
            want = maps.unit_window_integral(f, float(t))
            assert maps.evaluate(E, float(t)) == pytest.approx(want,
                                                               abs=1e-13)

    def test_window_sequence_matches_unit_integrals(self):
        f = maps.floor_embed(_rng(8).random(20))
        got = maps.window_sequence(f, 19)
        want = [maps.unit_window_integral(f, float(k)) for k in range(19)]
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-13)


class TestContinuousMaps:
    def test_shift_cont_is_exact_translation(self):
        f = _random_step(9)
        g = maps.shift_cont(f, 4.5)
        for t in (f.domain_start + 0.05, 3.71, 17.3):
            if t + 4.5 < f.horizon:
                assert maps.evaluate(g, t) == maps.evaluate(f, t + 4.5)

    def test_dilate_cont_rescales_argument(self):
        f = _random_step(10)
        g = maps.dilate_cont(f, 2.0)
        for t in (0.1, 5.3, 20.7):
            if t / 2.0 < f.horizon:
                assert maps.evaluate(g, t) == maps.evaluate(f, t / 2.0)

    def test_cesaro_cont_matches_discrete_at_integers(self):
        a = _rng(11).random(64)
        f = maps.floor_embed(a)
        ca = maps.cesaro_discrete(a)
        for n in (1, 7, 31, 64):
            got = maps.cesaro_cont_at(f, float(n))
            assert got == pytest.approx(float(ca[n - 1]), rel=1e-13)

    def test_cesaro_cont_function_knot_exact(self):
        f = maps.linear_embed(_rng(12).random(40))
        C = maps.cesaro_cont(f)
        for t in C.breakpoints[1:]:
            assert maps.evaluate(C, float(t)) == pytest.approx(
                maps.cesaro_cont_at(f, float(t)), abs=1e-12
            )
        assert C.tail_value == pytest.approx(
            maps.cesaro_cont_at(f, f.horizon), abs=1e-12
        )

    def test_power_cont_exact_on_steps(self):
        f = _random_step(13)
        g = maps.power_cont(f, 2.0)
        for t in (1.7, 4.4, 6.9):
            if t * t < f.horizon and t >= g.domain_start:
                assert maps.evaluate(g, t) == maps.evaluate(f, t * t)


class TestConjugation:
    def test_log_exp_round_trip_on_steps(self):
        a = _rng(14).random(48) + 0.25
        f = maps.floor_embed(a)
        g = maps.exp_conjugate(maps.log_conjugate(f))
        for t in (0.4, 7.25, 31.8, 46.6):
            assert maps.evaluate(g, t) == maps.evaluate(f, t)

    def test_conjugated_shift_is_dilation(self):
        # log-domain translation by c acts as t -> t * e^c
        a = _rng(15).random(200) + 0.5
        f = maps.PiecewiseFunction(
            "step", np.arange(1.0, 201.0), a, 1.0, 201.0, float(a[-1])
        )
        c = math.log(2.0)
        g = maps.conjugate_map(maps.shift_cont, f, c)
        for t in (3.3, 21.6, 77.7):
            if 2.0 * t < f.horizon and t < g.horizon:
                assert maps.evaluate(g, t) == pytest.approx(
                    maps.evaluate(f, 2.0 * t), abs=1e-12
                )


class TestCommutatorDefects:
    def test_shift_embed_defect_is_exactly_zero(self):
        for seed in range(10):
            a = _rng(seed).random(300) * 2.0
            d = maps.commutator_defect(("shift", "floor_embed"), a,
                                       t=111.3, j=5)
            assert d == 0.0

    def test_shift_window_defect_is_exactly_zero(self):
        for seed in range(10):
            f = maps.floor_embed(_rng(seed).random(300) * 2.0)
            d = maps.commutator_defect(("shift", "window_restrict"), f,
                                       t=97, j=4)
            assert d == 0.0

    @pytest.mark.parametrize("pair", [
        ("cesaro", "floor_embed"),
        ("cesaro", "linear_embed"),
    ])
    def test_cesaro_embed_defect_envelope(self, pair):
        t = 100.0
        for seed in range(10):
            a = _rng(seed).random(128) * 2.0
            f_sup = float(np.max(np.abs(a)))
            d = maps.commutator_defect(pair, a, t=t)
            assert d <= 3.0 * f_sup / t

    def test_cesaro_window_defect_envelope(self):
        t = 100
        for seed in range(10):
            f = maps.floor_embed(_rng(seed).random(128) * 2.0)
            d = maps.commutator_defect(("cesaro", "window_restrict"), f, t=t)
            assert d <= 3.0 * f.sup_norm() / t

    def test_unknown_pair_rejected(self):
        with pytest.raises(ValueError):
            maps.commutator_defect(("shift", "nonsense"), np.ones(4), t=1.0)


class TestOscillationAndAlmostConvergence:
    def test_oscillation_at_a_jump(self):
        f = maps.floor_embed(np.array([1.0, 4.0, 2.0]))
        assert maps.oscillation_K(f, 0.5) == pytest.approx(3.0)
        assert maps.oscillation_K(f, 1.5) == pytest.approx(2.0)
        # constant piece: no oscillation inside [1, 2)
        assert maps.oscillation_K(f, 1.0) == 0.0

    def test_oscillation_domain_guard(self):
        f = maps.floor_embed(np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            maps.oscillation_K(f, 2.0)

    def test_alternating_sequence_is_almost_convergent(self):
        a = np.where(np.arange(4096) % 2 == 0, 1.0, -1.0)
        f = maps.floor_embed(a)
        passed, profile = maps.almost_convergence_test(f, (64, 512, 2048))
        assert passed
        assert profile[-1] <= 1e-2

    def test_log_oscillation_is_not_almost_convergent(self):
        n = np.arange(1, 20001, dtype=np.float64)
        a = np.sin(np.log(n))
        f = maps.floor_embed(a)
        passed, profile = maps.almost_convergence_test(f, (256, 2048, 16384))
        assert not passed
        assert profile[-1] > 1e-2
