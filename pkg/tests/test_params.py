"""Parameter maps from the dissipation controls and the stability bounds."""

import numpy as np
import pytest

from galpha import (
    ConfigurationError,
    MethodParams,
    RhoSpectrum,
    params_from_rho,
    validate_stability,
)


def test_single_stage_no_dissipation_is_trapezoid():
    prm = params_from_rho([1.0])
    assert prm.k == 1
    assert prm.alpha == (0.5,)
    assert prm.alpha_f == 0.5
    assert prm.gamma == (0.5,)


def test_single_stage_full_dissipation():
    prm = params_from_rho([0.0])
    assert prm.alpha == (1.5,)
    assert prm.alpha_f == 1.0
    assert prm.gamma == (1.0,)


def test_two_stage_mixed_controls_exact():
    # rho = [0.8, 0.2]: alpha = (19/18, 7/6), alpha_f = 5/6, gamma = (5/9, 5/6)
    prm = params_from_rho([0.8, 0.2])
    assert prm.alpha == (19.0 / 18.0, 7.0 / 6.0)
    assert prm.alpha_f == 5.0 / 6.0
    assert prm.gamma == (5.0 / 9.0, 5.0 / 6.0)


def test_gamma_is_reciprocal_of_one_plus_rho():
    # both stage formulas collapse to gamma_j = 1/(1 + rho_j)
    rng = np.random.default_rng(42)
    for _ in range(200):
        k = int(rng.integers(1, 5))
        rho = rng.uniform(0.0, 1.0, k)
        prm = params_from_rho(rho.tolist())
        np.testing.assert_allclose(prm.gamma, 1.0 / (1.0 + rho), rtol=1e-14)


def test_gamma_strictly_decreasing_in_rho():
    rng = np.random.default_rng(3)
    for _ in range(100):
        lo, hi = np.sort(rng.uniform(0.0, 1.0, 2))
        if lo == hi:
            continue
        g_lo = params_from_rho([lo]).gamma[0]
        g_hi = params_from_rho([hi]).gamma[0]
        assert g_hi < g_lo


def test_bounds_hold_across_the_whole_control_range():
    # closed-form values sit exactly on the bounds at the endpoints;
    # validation must accept them without epsilon slop
    for rho in np.linspace(0.0, 1.0, 101):
        for k in (1, 2, 3, 4):
            prm = params_from_rho([float(rho)] * k)
            report = validate_stability(prm)
            assert report.ok, report.violations


def test_rho_spectrum_uniform():
    controls = RhoSpectrum.uniform(0.5, 3)
    assert controls.k == 3
    assert controls.values == (0.5, 0.5, 0.5)
    prm = params_from_rho(controls)
    assert prm.k == 3


def test_params_accepts_plain_sequence():
    assert params_from_rho([0.5, 0.5]) == params_from_rho(RhoSpectrum((0.5, 0.5)))


def test_empty_rho_rejected():
    with pytest.raises(ConfigurationError, match="k must be >= 1"):
        RhoSpectrum(())


def test_rho_out_of_range_names_the_offender():
    with pytest.raises(ConfigurationError, match=r"rho\[1\] = 1.2"):
        RhoSpectrum((0.5, 1.2))
    with pytest.raises(ConfigurationError, match=r"rho\[0\]"):
        RhoSpectrum((-0.1,))


def test_violation_strings_name_each_bound():
    report = validate_stability(MethodParams(2, (0.9, 1.2), 0.8, (0.4, 0.9)))
    assert not report.ok
    assert "alpha_1 >= 1" in report.violations

    report = validate_stability(MethodParams(1, (0.4,), 0.45, (0.7,)))
    assert "alpha_1 >= alpha_f" in report.violations
    assert "alpha_f >= 1/2" in report.violations

    report = validate_stability(MethodParams(1, (1.0,), 0.5, (0.0,)))
    assert "gamma_1 > 0" in report.violations


def test_valid_params_report_no_violations():
    report = validate_stability(params_from_rho([0.3, 0.9]))
    assert report.ok
    assert report.violations == ()


def test_with_gamma_replaces_only_gamma():
    prm = params_from_rho([0.5, 0.5])
    pert = prm.with_gamma((prm.gamma[0] + 0.01, prm.gamma[1]))
    assert pert.alpha == prm.alpha
    assert pert.alpha_f == prm.alpha_f
    assert pert.gamma[0] == prm.gamma[0] + 0.01
    assert pert.gamma[1] == prm.gamma[1]


def test_method_params_length_mismatch_rejected():
    with pytest.raises(ConfigurationError):
        MethodParams(2, (1.0,), 0.5, (0.5, 0.5))
    with pytest.raises(ConfigurationError):
        MethodParams(2, (1.0, 1.0), 0.5, (0.5,))
