import math

import numpy as np
import pytest

from coxvanet import analytic
from coxvanet.analytic import NonUnimodalObjective, PcModel
from coxvanet.params import NetworkParams
from coxvanet.quadrature import integrate_semi_infinite

from oracles import laplace_i1_monte_carlo

BASELINE = NetworkParams(mu_l=10, lambda_v=20, p=1, d=0.01, alpha=4, beta=1)
CROWDED = NetworkParams(mu_l=30, lambda_v=60, p=0.5, d=0.01, alpha=4, beta=1)
MODELS = list(PcModel)


def raw_i0(s, params):
    # Straight quadrature of the along-line interference functional.
    c = s * params.p_t
    integral, _ = integrate_semi_infinite(lambda r: c / (c + r**params.alpha))
    return math.exp(-2 * params.p * params.lambda_v * integral)


def test_laplace_i0_trivial_cases():
    assert analytic.laplace_i0(0.0, BASELINE) == 1.0
    assert analytic.laplace_i0(1.0, BASELINE.replace(p=0)) == 1.0
    with pytest.raises(ValueError):
        analytic.laplace_i0(-1.0, BASELINE)


def test_laplace_i0_strong_interference():
    value = analytic.laplace_i0(1.0, BASELINE)
    assert value == pytest.approx(5.13e-20, rel=1e-2)
    assert value == pytest.approx(raw_i0(1.0, BASELINE), rel=1e-8)


@pytest.mark.parametrize("s", [1e-8, 1e-3, 1.0])
@pytest.mark.parametrize("lambda_v", [1.0, 20.0])
@pytest.mark.parametrize("alpha", [2.5, 4.0])
def test_laplace_i0_matches_quadrature(s, lambda_v, alpha):
    params = BASELINE.replace(lambda_v=lambda_v, alpha=alpha)
    assert abs(analytic.laplace_i0(s, params) / raw_i0(s, params) - 1) < 1e-7


def test_laplace_i1_trivial_cases():
    assert analytic.laplace_i1(0.0, BASELINE) == 1.0
    assert analytic.laplace_i1(1e-8, BASELINE.replace(mu_l=0)) == 1.0
    assert analytic.laplace_i1(1e-8, BASELINE.replace(p=0)) == 1.0


def test_laplace_i1_against_monte_carlo_oracle():
    s = 1e-8
    reference = laplace_i1_monte_carlo(s, mu_l=10, lambda_v=20, p=1, alpha=4)
    assert reference == pytest.approx(0.9179079, abs=5e-7)
    value = analytic.laplace_i1(s, BASELINE)
    assert value == pytest.approx(0.91790806, abs=1e-8)
    assert f"{value:.3g}" == f"{reference:.3g}"
    assert abs(value - reference) < 1e-5


def test_other_lines_integral_slow_decay():
    # Frozen from an independent 20-digit mpmath evaluation (k = 1, alpha = 2.5).
    j = analytic._other_lines_integral(1.0, 2.5, analytic.DEFAULT_SPEC)
    assert j == pytest.approx(2.6901309150853605, rel=1e-8)
    params = BASELINE.replace(alpha=2.5)
    s = (1 / (2 * params.lambda_v)) ** 2.5
    assert analytic.laplace_i1(s, params) == pytest.approx(math.exp(-2 * params.mu_l * j / 40), rel=1e-8)


def test_factorization():
    s = BASELINE.beta * BASELINE.d**BASELINE.alpha
    assert analytic.laplace_total(s, BASELINE) == analytic.laplace_i0(s, BASELINE) * analytic.laplace_i1(s, BASELINE)
    assert analytic.success_probability(BASELINE) == pytest.approx(analytic.laplace_total(s, BASELINE), rel=1e-15)
    noisy = BASELINE.replace(sigma2=1e7)
    assert analytic.success_probability(noisy) == pytest.approx(
        math.exp(-noisy.noise_exponent) * analytic.laplace_total(s, noisy), rel=1e-15)


@pytest.mark.parametrize("model", MODELS)
def test_zero_threshold_and_silent_network(model):
    assert analytic.success_probability(BASELINE.replace(beta=0), model) == 1.0
    noisy = BASELINE.replace(p=0, sigma2=2e7)
    assert analytic.success_probability(noisy, model) == pytest.approx(math.exp(-noisy.noise_exponent), rel=1e-15)


def test_limit_1d_value():
    assert analytic.pc_limit_1d(BASELINE) == pytest.approx(0.6412805169680226, rel=1e-12)
    assert math.exp(-2 * 20 * 0.01 * math.pi / 4 * math.sqrt(2)) == pytest.approx(0.64128, abs=1e-5)


def test_cox_regression_value():
    assert analytic.success_probability(BASELINE) == pytest.approx(0.5886365554196177, rel=1e-9)


def _grid(axis, values, model, base):
    return [analytic.success_probability(base.replace(**{axis: v}), model) for v in values]


AXES = {
    "beta": [0.1, 0.5, 1.0, 3.0, 10.0],
    "p": [0.1, 0.3, 0.5, 0.8, 1.0],
    "lambda_v": [1.0, 5.0, 20.0, 40.0, 80.0],
    "mu_l": [0.0, 1.0, 10.0, 30.0, 100.0],
    "d": [0.002, 0.005, 0.01, 0.02, 0.04],
    "sigma2": [0.0, 1e6, 1e7, 1e8, 1e9],
}


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("axis", sorted(AXES))
def test_pc_non_increasing(axis, model):
    values = _grid(axis, AXES[axis], model, BASELINE.replace(sigma2=1e6) if axis != "sigma2" else BASELINE)
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("model", MODELS)
def test_pc_non_decreasing_in_power_with_noise(model):
    values = _grid("p_t", [0.1, 1.0, 10.0, 100.0], model, BASELINE.replace(sigma2=1e7))
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_cox_between_limits_and_approaches_1d():
    pc_1d = analytic.pc_limit_1d(BASELINE)
    previous = None
    for mu in [0.001, 0.01, 0.1, 1.0, 10.0]:
        pc = analytic.success_probability(BASELINE.replace(mu_l=mu))
        assert pc <= pc_1d + 1e-12
        if previous is not None:
            assert pc <= previous
        previous = pc
    assert pc_1d - analytic.success_probability(BASELINE.replace(mu_l=1e-3)) < 1e-5


def test_cox_approaches_2d_at_fixed_active_density():
    lam = 50 * 1.0 * 1.0
    gaps = []
    for mu in [10.0, 50.0, 250.0, 1000.0]:
        params = NetworkParams(mu_l=mu, lambda_v=lam / mu, p=1, d=0.01, alpha=4, beta=1)
        gaps.append(analytic.pc_limit_2d(params) - analytic.success_probability(params))
    assert all(g > 0 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)
    # The remaining gap shrinks like 1 / mu_l.
    assert gaps[-1] * 1000 == pytest.approx(gaps[-2] * 250, rel=0.05)


def test_ase_examples():
    result = analytic.ase(CROWDED)
    assert result.lambda_active == pytest.approx(900.0)
    assert result.ase == pytest.approx(900 * result.pc, rel=1e-15)
    assert result.recompute() == pytest.approx(result.ase, rel=1e-15)
    assert analytic.ase(CROWDED.replace(lambda_v=24, p=0.5)).ase == pytest.approx(
        360 * analytic.success_probability(CROWDED.replace(lambda_v=24)), rel=1e-15)
    for model in MODELS:
        assert analytic.ase(CROWDED.replace(p=0), model).ase == 0.0
        assert analytic.ase(CROWDED.replace(beta=0), model).ase == 0.0


def test_ase_per_line():
    result = analytic.ase_per_line(CROWDED)
    assert result.lambda_active == 30.0
    assert result.pc == analytic.pc_limit_1d(CROWDED)


def test_optimal_p_limit_1d():
    result = analytic.optimal_p(CROWDED, PcModel.LIMIT_1D)
    assert result.p_star == pytest.approx(0.7502, abs=1e-3)
    grid = np.linspace(1e-4, 1, 10001)
    ases = [analytic.ase(CROWDED.replace(p=p), PcModel.LIMIT_1D).ase for p in grid]
    assert abs(grid[int(np.argmax(ases))] - result.p_star) < 1e-3


def test_optimal_p_capped():
    assert analytic.optimal_p(CROWDED.replace(lambda_v=10), PcModel.LIMIT_1D).p_star == 1.0
    assert analytic.optimal_p(CROWDED, PcModel.LIMIT_2D).p_star == 1.0
    assert analytic.optimal_p(CROWDED.replace(mu_l=0), PcModel.LIMIT_2D).p_star == 1.0


def test_optimal_p_cox():
    result = analytic.optimal_p(CROWDED)
    assert result.p_star == pytest.approx(0.5251574443791536, abs=1e-9)
    assert result.ase_star == pytest.approx(322.4958702221902, rel=1e-9)
    assert result.iterations == 14
    p_1d = analytic.optimal_p(CROWDED, PcModel.LIMIT_1D).p_star
    p_2d = analytic.optimal_p(CROWDED, PcModel.LIMIT_2D).p_star
    assert result.p_star < p_1d - 0.01 and result.p_star < p_2d - 0.01
    for p in (result.p_star - 0.01, result.p_star + 0.01):
        assert analytic.ase(CROWDED.replace(p=p)).ase < result.ase_star


def test_optimal_p_ignores_input_p():
    assert analytic.optimal_p(CROWDED.replace(p=0.1)) == analytic.optimal_p(CROWDED)


def test_non_unimodal_objective(monkeypatch):
    def bumpy(params, model=PcModel.COX, spec=None):
        return 1.0 + 0.5 * math.sin(12 * math.pi * params.p) / max(params.p, 1e-9)

    monkeypatch.setattr(analytic, "success_probability", bumpy)
    with pytest.raises(NonUnimodalObjective) as info:
        analytic.optimal_p(CROWDED)
    assert len(info.value.maxima) >= 2
