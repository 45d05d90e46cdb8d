import numpy as np
import pytest
from scipy.stats import norm

from subag.models import Gaussian, GaussPointMass, PointMass, StudentT, TwoPointSparse
from subag.prox import Huber, Lasso, Square, env_prime, soft_threshold
from subag.quadrature import (
    IntegrationError,
    QuadratureConfig,
    expect_corr_pair,
    expect_noise_g,
    expect_theta_h,
    expect_theta_pair,
    gauss_hermite,
    noise_nodes,
    signal_nodes,
)
from subag.smoothed import loss_env_moments, reg_err_moments
from subag.systems import _loss_moments, _reg_moments

CFG = QuadratureConfig()


def test_weights_sum_to_one():
    for n in (8, 32, 64, 127):
        _, w = gauss_hermite(n)
        assert abs(w.sum() - 1.0) < 1e-12
    for sig in (TwoPointSparse(2.0, 0.3), GaussPointMass(0.4, 2.0), PointMass(1.5)):
        _, w = signal_nodes(sig, CFG)
        assert abs(w.sum() - 1.0) < 1e-12
    for noise in (Gaussian(1.3), StudentT(2.0), StudentT(5.0, 0.5)):
        _, w = noise_nodes(noise, CFG)
        assert abs(w.sum() - 1.0) < 1e-12
    _, w = noise_nodes(StudentT(2.0), QuadratureConfig(noise_nodes=400))
    assert abs(w.sum() - 1.0) < 1e-12


def test_config_invariants():
    with pytest.raises(ValueError):
        QuadratureConfig(gauss_nodes=4)
    with pytest.raises(ValueError):
        QuadratureConfig(tail_truncation=-1.0)


def test_trivial_identities():
    assert expect_theta_h(lambda th, h: th * h, CFG, TwoPointSparse(2.0, 0.5)) == pytest.approx(0.0, abs=1e-12)
    assert expect_theta_h(lambda th, h: h * h, CFG, PointMass(3.0)) == pytest.approx(1.0, abs=1e-12)
    # second moment of the signal is recovered exactly from the atoms
    assert expect_theta_h(lambda th, h: th * th, CFG, TwoPointSparse(2.0, 0.5)) == pytest.approx(4.0)
    assert expect_theta_h(lambda th, h: th * th, CFG, GaussPointMass(0.25, 2.0)) == pytest.approx(0.5)


def test_corr_pair_identities():
    for eta in (-1.0, -0.5, 0.0, 0.5, 1.0):
        v = expect_corr_pair(lambda z, g, gt: g * gt, eta, CFG, Gaussian(1.0))
        assert v == pytest.approx(eta, abs=1e-12)
    v = expect_corr_pair(lambda z, g, gt: (z + g) * (z + gt), 0.0, CFG, Gaussian(1.0))
    assert v == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        expect_corr_pair(lambda z, g, gt: g, 1.5, CFG, Gaussian(1.0))


def test_theta_pair_symmetry():
    sig = TwoPointSparse(1.5, 0.4)
    f = lambda th, h, ht: (th + h) * (th + ht)  # noqa: E731 - symmetric in (h, ht)
    a = expect_theta_pair(f, 0.37, CFG, sig)
    b = expect_theta_pair(lambda th, h, ht: f(th, ht, h), 0.37, CFG, sig)
    assert a == pytest.approx(b, abs=1e-12)


def test_square_loss_pair_closed_form():
    # env' is linear for square loss, so the pair expectation has a closed form
    rng = np.random.default_rng(5)
    for _ in range(8):
        alpha = float(rng.uniform(0.3, 2.5))
        kappa = float(rng.uniform(0.2, 3.0))
        eta = float(rng.uniform(-0.95, 0.95))
        sigma = float(rng.uniform(0.4, 1.6))
        got = expect_corr_pair(
            lambda z, g, gt: env_prime(Square(), z + alpha * g, kappa)
            * env_prime(Square(), z + alpha * gt, kappa),
            eta,
            CFG,
            Gaussian(sigma),
        )
        want = (sigma**2 + eta * alpha**2) / (1 + kappa) ** 2
        assert got == pytest.approx(want, abs=1e-9)


def test_square_pair_spec_point_and_mc_oracle():
    got = expect_corr_pair(
        lambda z, g, gt: env_prime(Square(), z + g, 1.0) * env_prime(Square(), z + gt, 1.0),
        0.3,
        CFG,
        Gaussian(1.0),
    )
    assert got == pytest.approx(1.3 / 4.0, abs=1e-10)
    rng = np.random.default_rng(11)
    n = 1_000_000
    z = rng.standard_normal(n)
    g = rng.standard_normal(n)
    gt = 0.3 * g + np.sqrt(1 - 0.09) * rng.standard_normal(n)
    mc = np.mean((z + g) * (z + gt)) / 4.0
    se = np.std((z + g) * (z + gt) / 4.0) / np.sqrt(n)
    assert abs(got - mc) < 3 * se


def test_soft_threshold_moment_against_trapezoid_oracle():
    # E[soft(H; 1)^2]: the closed-form inner integration used by the system
    # solvers must match a dense trapezoid oracle to 1e-6
    h = np.linspace(-12.0, 12.0, 1_000_001)
    dens = np.exp(-0.5 * h * h) / np.sqrt(2 * np.pi)
    oracle = np.trapezoid(soft_threshold(h, 1.0) ** 2 * dens, h)
    smoothed, _ = _reg_moments(Lasso(1.0), 1.0, 1.0, PointMass(0.0), CFG)
    assert smoothed == pytest.approx(oracle, abs=1e-9)
    # the generic tensor engine converges to the same value but only at the
    # algebraic rate of Gauss-Hermite on a kinked integrand
    generic = expect_theta_h(
        lambda th, hh: (soft_threshold(th + hh, 1.0) - th) ** 2, CFG, PointMass(0.0)
    )
    assert generic == pytest.approx(oracle, abs=5e-4)


def test_smoothed_moments_match_generic_quadrature():
    # smoothed (closed-form inner) vs generic tensor quadrature on smooth
    # regions: the two engines agree on ridge (polynomial) integrands exactly
    sig = GaussPointMass(0.5, 1.7)
    from subag.prox import Ridge, prox

    m2s, mhs = _reg_moments(Ridge(0.8), 1.3, 0.9, sig, CFG)
    err = lambda th, h: prox(Ridge(0.8), th + 1.3 * h, 0.9) - th  # noqa: E731
    m2g = expect_theta_h(lambda th, h: err(th, h) ** 2, CFG, sig)
    mhg = expect_theta_h(lambda th, h: err(th, h) * h, CFG, sig)
    assert m2s == pytest.approx(m2g, abs=1e-12)
    assert mhs == pytest.approx(mhg, abs=1e-12)


def test_node_doubling_drift_below_1e8():
    # system expectations with Gaussian noise: moving 32 -> 64 outer nodes
    # changes the values by less than 1e-8 (the inner kinked integrals are
    # closed-form, so the outer integrand is smooth)
    sig = TwoPointSparse(2.0, 0.1)
    for loss in (Square(), Huber(1.0)):
        vals = []
        for nodes in (32, 64):
            cfg = QuadratureConfig(gauss_nodes=nodes)
            vals.append(_loss_moments(loss, 1.2, 0.8, Gaussian(1.0), cfg))
        assert abs(vals[0][0] - vals[1][0]) < 1e-8
        assert abs(vals[0][1] - vals[1][1]) < 1e-8
    vals = []
    for nodes in (32, 64):
        cfg = QuadratureConfig(gauss_nodes=nodes)
        vals.append(_reg_moments(Lasso(0.5), 1.1, 0.7, sig, cfg)[0])
    assert abs(vals[0] - vals[1]) < 1e-8


def test_student_t_monte_carlo_stability():
    # bounded Huber integrand under t_2 noise: finite, stable, se < 1e-3 at 1e6
    n = 1_000_000
    rng = np.random.default_rng(0)
    z = StudentT(2.0).sample(rng, n)
    g = rng.standard_normal(n)
    vals = env_prime(Huber(1.0), z + 1.3 * g, 0.9) ** 2
    se = float(vals.std() / np.sqrt(n))
    assert np.isfinite(vals.mean()) and se < 1e-3
    cfg = QuadratureConfig(mc_samples=n, mc_seed=1)
    engine = _loss_moments(Huber(1.0), 1.3, 0.9, StudentT(2.0), cfg)[0]
    assert abs(engine - vals.mean()) < 4 * se


def test_student_t_quadrature_mode_close_to_mc():
    cfg_nodes = QuadratureConfig(noise_nodes=800)
    cfg_mc = QuadratureConfig(mc_samples=2_000_000, mc_seed=3)
    a = _loss_moments(Huber(1.0), 1.0, 1.0, StudentT(2.0), cfg_nodes)[0]
    b = _loss_moments(Huber(1.0), 1.0, 1.0, StudentT(2.0), cfg_mc)[0]
    assert a == pytest.approx(b, abs=5e-3)


def test_nonfinite_integrand_reports_location():
    with pytest.raises(IntegrationError):
        expect_theta_h(lambda th, h: np.where(h > 3, np.inf, 1.0), CFG, PointMass(0.0))


def test_smoothed_loss_moments_match_brute_force():
    # direct check of the truncated-moment algebra on a dense grid
    z = np.array([-2.0, -0.3, 0.0, 1.7])
    w = np.linspace(-10, 10, 400_001)
    dens = np.exp(-0.5 * w * w) / np.sqrt(2 * np.pi)
    for loss, alpha, kappa in [(Huber(0.8), 1.3, 0.6), (Square(), 0.7, 1.9)]:
        sq, cross = loss_env_moments(loss, alpha, kappa, z)
        for i, zi in enumerate(z):
            f = env_prime(loss, zi + alpha * w, kappa)
            assert sq[i] == pytest.approx(np.trapezoid(f * f * dens, w), abs=1e-7)
            assert cross[i] == pytest.approx(np.trapezoid(f * w * dens, w), abs=1e-7)
    th = np.array([-1.0, 0.0, 2.2])
    for reg, h, s in [(Lasso(0.9), 1.4, 0.8), (Huber(1.0), 0.9, 1.1)]:
        sq, cross = reg_err_moments(reg, h, s, th)
        from subag.prox import prox

        for i, ti in enumerate(th):
            d = prox(reg, ti + h * w, s) - ti
            assert sq[i] == pytest.approx(np.trapezoid(d * d * dens, w), abs=1e-7)
            assert cross[i] == pytest.approx(np.trapezoid(d * w * dens, w), abs=1e-7)


def test_expect_noise_g_matches_loss_moments_for_smooth_case():
    got = expect_noise_g(
        lambda z, g: env_prime(Square(), z + 0.9 * g, 1.1) ** 2, CFG, Gaussian(1.2)
    )
    want = _loss_moments(Square(), 0.9, 1.1, Gaussian(1.2), CFG)[0]
    assert got == pytest.approx(want, abs=1e-12)
