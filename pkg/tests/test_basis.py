from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from liqspec import Basis, accumulate, evaluate, generate, make_basis, solve
from liqspec.analytics import equilibrium_price
from liqspec.basis import BasisError
from liqspec.measures import GramPair
from liqspec.synth import random_walk_profile

from conftest import elem_rel, rel_err, series_from_arrays, wide_price_profile


def test_degree_zero_is_constant(walk_series):
    b = make_basis(1, walk_series)
    assert np.all(evaluate(b, [1.0, 650.0, 701.3]) == 1.0)


def test_midpoint_maps_to_zero():
    b = Basis(3, "chebyshev", Decimal("690"), Decimal("705"))
    assert evaluate(b, 697.5)[1] == 0.0


def test_chebyshev_endpoints():
    b = Basis(7, "chebyshev", Decimal("690"), Decimal("705"))
    assert evaluate(b, 690.0).tolist() == [1, -1, 1, -1, 1, -1, 1]
    assert evaluate(b, 705.0).tolist() == [1] * 7


def test_recurrence_exact_at_special_points():
    b = Basis(12, "chebyshev", Decimal(-1), Decimal(1))
    k = np.arange(12)
    assert np.array_equal(b.evaluate_unit(1.0), np.ones(12))
    assert np.array_equal(b.evaluate_unit(-1.0), (-1.0) ** k)
    zero = np.where(k % 2 == 1, 0.0, (-1.0) ** (k // 2))
    assert np.array_equal(b.evaluate_unit(0.0), zero)


@pytest.mark.parametrize("d", [1, 2, 5, 9])
def test_recurrence_matches_symbolic_expansion(d):
    x = sympy.Symbol("x")
    b = Basis(d, "chebyshev", Decimal(-1), Decimal(1))
    rng = np.random.default_rng(d)
    for xv in rng.uniform(-1.3, 1.3, 20):
        xr = sympy.Rational(Fraction(float(xv)))
        expected = [float(sympy.expand(sympy.chebyshevt(k, x)).subs(x, xr)) for k in range(d)]
        got = b.evaluate_unit(xv)
        assert rel_err(got, expected) <= 1e-12


def test_power_coefficients_have_exact_degree():
    for family in ("chebyshev", "monomial"):
        c = Basis(8, family, Decimal(1), Decimal(2)).power_coefficients()
        for k in range(8):
            assert c[k, k] != 0 and np.all(c[k, k + 1 :] == 0)
        xs = np.linspace(-1, 1, 7)
        direct = Basis(8, family, Decimal(-1), Decimal(1)).evaluate_unit(xs)
        via_coeffs = np.polynomial.polynomial.polyval(xs, c.T).T
        assert rel_err(direct, via_coeffs) <= 1e-13


def test_degenerate_support():
    series = series_from_arrays([1, 2, 3], ["5.00"] * 3, [1, 2, 3])
    with pytest.raises(BasisError, match="degenerate price support"):
        make_basis(2, series)
    assert make_basis(1, series).d == 1


def test_rejects_bad_dimension_and_family():
    with pytest.raises(BasisError):
        Basis(0, "chebyshev", Decimal(1), Decimal(2))
    with pytest.raises(BasisError):
        Basis(65, "chebyshev", Decimal(1), Decimal(2))
    with pytest.raises(BasisError):
        Basis(2, "legendre", Decimal(1), Decimal(2))


def test_exact_unit_map_matches_float_map(walk_series):
    b = make_basis(4, walk_series)
    exact = b.series_to_unit(walk_series)
    assert np.max(np.abs(exact - b.to_unit(walk_series.prices))) < 1e-12
    assert exact.min() == -1.0 and exact.max() == 1.0


def test_monomial_is_badly_conditioned_near_700():
    series = generate(random_walk_profile(20, seed=2, trades_per_level=50))
    assert len(series) == 1000
    conds = {}
    for family in ("chebyshev", "monomial"):
        gram = accumulate(series, make_basis(4, series, family))
        conds[family] = np.linalg.cond(gram.Gt)
    assert conds["monomial"] >= 1e6 * conds["chebyshev"]


def _transform(gram: GramPair, t: np.ndarray) -> GramPair:
    return GramPair(
        Gt=t.T @ gram.Gt @ t,
        Gv=t.T @ gram.Gv @ t,
        Xt=t.T @ gram.Xt @ t,
        Xv=t.T @ gram.Xv @ t,
        total_time=gram.total_time,
        total_volume=gram.total_volume,
        basis=gram.basis,
    )


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_spectrum_invariant_under_linear_basis_change(seed):
    series = _walk_for_invariance()
    gram = accumulate(series, make_basis(5, series))
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    t = q @ np.diag(rng.uniform(0.3, 3.0, 5))
    ref, other = solve(gram), solve(_transform(gram, t))
    assert elem_rel(other.lambdas, ref.lambdas) <= 1e-6
    assert abs(equilibrium_price(_transform(gram, t), other) / equilibrium_price(gram, ref) - 1) <= 1e-6


_INVARIANCE_SERIES = []


def _walk_for_invariance():
    if not _INVARIANCE_SERIES:
        _INVARIANCE_SERIES.append(generate(random_walk_profile(60, seed=4, trades_per_level=40)))
    return _INVARIANCE_SERIES[0]


def test_chebyshev_and_monomial_agree_where_monomial_is_viable():
    series = generate(wide_price_profile())
    spectra = {f: solve(accumulate(series, make_basis(4, series, f))) for f in ("chebyshev", "monomial")}
    assert elem_rel(spectra["monomial"].lambdas, spectra["chebyshev"].lambdas) <= 1e-6
