"""Tests for basis evaluation, product coefficients and moment lifting."""

import numpy as np
import pytest
from numpy.polynomial import legendre

from rn_spectra.errors import ConfigurationError, ContractError, InputError, InsufficientDataError
from rn_spectra.orthopoly import (
    BasisFamily,
    BasisSpec,
    DomainMap,
    canonical_integrals,
    eval_basis,
    lift_moments,
    multiply_by_first,
    normalized_vander,
    product_coeffs,
    vander,
    vander_derivative,
)

FAMILIES = list(BasisFamily)

# 40-point Gauss-Legendre integrates every product used below exactly
NODES, WEIGHTS = legendre.leggauss(40)


def test_domain_map_from_interval():
    dm = DomainMap.from_interval(0.0, 20.0)
    assert dm.to_canonical(0.0) == pytest.approx(-1.0)
    assert dm.to_canonical(20.0) == pytest.approx(1.0)
    assert dm.to_canonical(10.0) == pytest.approx(0.0, abs=1e-15)
    assert dm.to_raw(dm.to_canonical(7.3)) == pytest.approx(7.3)


def test_domain_map_rejects_empty_interval():
    with pytest.raises(InsufficientDataError):
        DomainMap.from_interval(3.0, 3.0)


def test_basis_family_parse():
    assert BasisFamily.parse("Legendre") is BasisFamily.LEGENDRE
    assert BasisFamily.parse(BasisFamily.MONOMIAL) is BasisFamily.MONOMIAL
    with pytest.raises(ConfigurationError):
        BasisFamily.parse("hermite")


def test_basis_spec_validates_dimension():
    with pytest.raises(ConfigurationError):
        BasisSpec("chebyshev", 0)
    assert BasisSpec("chebyshev", 4).n_moments == 7


def test_chebyshev_values_match_trigonometric_form():
    spec = BasisSpec("chebyshev", 5)
    t = np.linspace(-1, 1, 11)
    values = vander(spec, t)
    k = np.arange(spec.n_moments)
    expected = np.cos(np.outer(np.arccos(t), k))
    np.testing.assert_allclose(values, expected, atol=1e-13)


def test_vander_rejects_non_finite():
    spec = BasisSpec("legendre", 3)
    with pytest.raises(InputError):
        vander(spec, np.array([0.0, np.nan]))


def test_derivative_in_raw_units():
    # [0, 2] -> t = x - 1
    spec = BasisSpec("chebyshev", 3, DomainMap.from_interval(0.0, 2.0))
    x = np.array([0.25, 1.5, 1.9])
    t = x - 1.0
    d = vander_derivative(spec, x)
    np.testing.assert_allclose(d[:, 0], 0.0)
    np.testing.assert_allclose(d[:, 1], 1.0)
    np.testing.assert_allclose(d[:, 2], 4 * t)
    np.testing.assert_allclose(d[:, 3], 12 * t**2 - 3)

    wide = BasisSpec("monomial", 3, DomainMap.from_interval(0.0, 4.0))
    xw = np.array([1.0, 3.0])
    tw = wide.domain_map.to_canonical(xw)
    np.testing.assert_allclose(vander_derivative(wide, xw)[:, 3], 0.5 * 3 * tw**2)


def test_eval_basis_bounds():
    spec = BasisSpec("chebyshev", 3)
    assert eval_basis(spec, 2, 0.5) == pytest.approx(-0.5)
    with pytest.raises(ContractError):
        eval_basis(spec, 5, 0.0)
    with pytest.raises(InputError):
        eval_basis(spec, 1, float("inf"))


@pytest.mark.parametrize("family", FAMILIES)
def test_normalized_vander_matches_direct_values(family):
    spec = BasisSpec(family, 21)
    # 1e7 lies past the direct-evaluation limit for degree 40, Q_40 is still finite
    x = np.array([-0.3, 0.8, 5.0, -2e3, 1e7, -1e7])
    rows, scale = normalized_vander(spec, x, 40)
    np.testing.assert_allclose(np.max(np.abs(rows), axis=1), 1.0)
    np.testing.assert_allclose(scale[:, None] * rows, vander(spec, x, 40), rtol=1e-12, atol=0)


def test_normalized_vander_stays_finite_past_overflow():
    spec = BasisSpec("chebyshev", 50, DomainMap.from_interval(0.0, 10.0))
    rows, scale = normalized_vander(spec, np.array([1e8, -1e300]), 49)
    assert np.all(np.isfinite(rows))
    assert np.all(np.isinf(scale))
    # T_k(t) / t^49 tends to 2^48 at k = 49 and to 0 below
    np.testing.assert_allclose(rows[:, -1], [1.0, 1.0])
    assert np.max(np.abs(rows[:, :-1])) < 1e-6
    with pytest.raises(InputError):
        normalized_vander(spec, np.array([np.inf]), 49)


@pytest.mark.parametrize("family", FAMILIES)
def test_product_coefficients_are_exact(family):
    spec = BasisSpec(family, 5)
    t = np.linspace(-0.95, 0.95, 9)
    values = vander(spec, t)
    for j in range(5):
        for k in range(5):
            expansion = product_coeffs(spec, j, k)
            np.testing.assert_allclose(
                expansion.evaluate(spec, t), values[:, j] * values[:, k], atol=1e-12
            )


def test_product_coefficients_contract():
    spec = BasisSpec("legendre", 3)
    with pytest.raises(ContractError):
        product_coeffs(spec, 3, 2)
    with pytest.raises(ContractError):
        product_coeffs(spec, -1, 0)


@pytest.mark.parametrize("family", FAMILIES)
def test_canonical_integrals(family):
    spec = BasisSpec(family, 6)
    expected = WEIGHTS @ vander(spec, NODES)
    np.testing.assert_allclose(canonical_integrals(family, spec.n_moments), expected, atol=1e-13)


@pytest.mark.parametrize("family", FAMILIES)
def test_lift_gives_gram_matrix(family):
    n = 6
    spec = BasisSpec(family, n)
    moments = canonical_integrals(family, spec.n_moments)
    basis = vander(spec, NODES, n - 1)
    direct = basis.T @ (WEIGHTS[:, None] * basis)
    np.testing.assert_allclose(lift_moments(family, moments, n), direct, atol=1e-12)


def test_legendre_gram_is_diagonal():
    n = 8
    moments = canonical_integrals(BasisFamily.LEGENDRE, 2 * n - 1)
    gram = lift_moments(BasisFamily.LEGENDRE, moments, n)
    np.testing.assert_allclose(gram, np.diag(2.0 / (2 * np.arange(n) + 1)), atol=1e-14)


def test_lift_needs_enough_moments():
    with pytest.raises(ContractError):
        lift_moments(BasisFamily.CHEBYSHEV, np.ones(4), 3)


@pytest.mark.parametrize("family", FAMILIES)
def test_multiply_by_first(family):
    spec = BasisSpec(family, 4)
    count = spec.n_moments
    moments = canonical_integrals(family, count + 1)
    expected = WEIGHTS @ (NODES[:, None] * vander(spec, NODES, count - 1))
    np.testing.assert_allclose(multiply_by_first(family, moments), expected, atol=1e-13)
