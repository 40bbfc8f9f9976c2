"""Coefficient-budget closed forms against independent series summation."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

import bakerlab as bl
from bakerlab import PoleCase


def _recip_sq_enclosure(n_terms: int = 10 ** 7) -> tuple[float, float]:
    """Enclosure of sum_{k in Z, k != 0} 1/k^2 from partial sums.

    Partial sum of 10^7 terms plus the integral bracket
    1/(M+1) <= sum_{k > M} 1/k^2 <= 1/M.
    """
    ks = np.arange(1, n_terms + 1, dtype=np.float64)
    partial = float(np.sum(1.0 / (ks * ks)))
    return 2.0 * (partial + 1.0 / (n_terms + 1)), 2.0 * (partial + 1.0 / n_terms)


_RS_LO, _RS_HI = _recip_sq_enclosure()


def _budget_oracle(case: PoleCase, eps: float) -> tuple[float, float]:
    mult = 4.0 if case in (PoleCase.CASE_II, PoleCase.CASE_II_PLUS) else 16.0
    hi = eps ** 3 / (8.0 * (1.0 + mult * _RS_LO))
    lo = eps ** 3 / (8.0 * (1.0 + mult * _RS_HI))
    return lo, hi


def test_recip_sq_encloses_closed_form():
    assert _RS_LO <= bl.mapfamily.NONZERO_INT_RECIP_SQ <= _RS_HI


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, 0.5])
@pytest.mark.parametrize("case", list(PoleCase))
def test_budget_matches_series_oracle(case, eps):
    lo, hi = _budget_oracle(case, eps)
    value = bl.coefficient_budget(case, eps)
    assert lo <= value <= hi
    mid = 0.5 * (lo + hi)
    assert abs(value - mid) / mid < 1e-9


def test_budget_frozen_values():
    assert abs(bl.coefficient_budget(PoleCase.CASE_II, 0.1) - 8.8280e-6) < 1e-9
    assert abs(bl.coefficient_budget(PoleCase.CASE_III, 0.1) - 2.3305e-6) < 1e-9


def test_casewise_constants():
    """Imaginary-axis budget reuses the lattice constant; line variants agree."""
    assert bl.coefficient_budget(PoleCase.CASE_I, 0.2) == \
        bl.coefficient_budget(PoleCase.CASE_III, 0.2)
    assert bl.coefficient_budget(PoleCase.CASE_II, 0.2) == \
        bl.coefficient_budget(PoleCase.CASE_II_PLUS, 0.2)
    assert bl.coefficient_budget(PoleCase.CASE_III, 0.2) < \
        bl.coefficient_budget(PoleCase.CASE_II, 0.2)


@given(st.floats(min_value=1e-6, max_value=0.5), st.floats(min_value=1e-6, max_value=0.5))
def test_budget_monotone_in_epsilon(e1, e2):
    """Cubic in epsilon, hence strictly monotone and vanishing at zero."""
    b1 = bl.coefficient_budget(PoleCase.CASE_II, e1)
    b2 = bl.coefficient_budget(PoleCase.CASE_II, e2)
    if e1 < e2:
        assert b1 < b2
    elif e1 > e2:
        assert b1 > b2
    else:
        assert b1 == b2


@pytest.mark.parametrize("eps", [0.0, -0.1, 0.50000001, 1.0])
def test_budget_domain_errors(eps):
    with pytest.raises(ValueError):
        bl.coefficient_budget(PoleCase.CASE_II, eps)


def test_normalizer_closed_forms():
    """Geometric normalizers against direct summation over a large window."""
    r = 0.25
    assert abs(bl.coeff_normalizer(PoleCase.CASE_II, r) - 5.0 / 3.0) < 1e-15
    direct_line = sum(r ** abs(p) for p in range(-80, 81))
    assert abs(bl.coeff_normalizer(PoleCase.CASE_II, r) - direct_line) < 1e-14
    assert abs(bl.coeff_normalizer(PoleCase.CASE_I, r) - direct_line) < 1e-14
    direct_plus = sum(r ** p for p in range(1, 120))
    assert abs(bl.coeff_normalizer(PoleCase.CASE_II_PLUS, r) - direct_plus) < 1e-14
    direct_lattice = sum(r ** (abs(j) + abs(m))
                         for j in range(-80, 81) for m in range(-80, 81))
    assert abs(bl.coeff_normalizer(PoleCase.CASE_III, r) - direct_lattice) < 1e-13


@pytest.mark.parametrize("case", list(PoleCase))
def test_built_model_exhausts_safety_fraction(case):
    model = bl.build_map(case, 0.1, 0.25, 0.9)
    budget = bl.coefficient_budget(case, 0.1)
    assert abs(model.coeff_sum - 0.9 * budget) < 1e-12 * budget
    assert model.coeff_sum < budget


def test_coefficients_symmetric_in_l1_norm(model_i):
    for m in range(1, 6):
        assert bl.coefficient(model_i, 1j * m) == bl.coefficient(model_i, -1j * m)


def test_coefficient_rejects_non_pole(model_i):
    with pytest.raises(ValueError):
        bl.coefficient(model_i, 1.0 + 0j)


def test_overfull_model_rejected():
    budget = bl.coefficient_budget(PoleCase.CASE_II, 0.1)
    amp = 1.01 * budget / bl.coeff_normalizer(PoleCase.CASE_II, 0.25)
    with pytest.raises(ValueError):
        bl.MapModel(case=PoleCase.CASE_II, epsilon=0.1, delta=0.2,
                    coeff_amplitude=amp, coeff_decay=0.25)


def test_build_map_parameter_validation():
    with pytest.raises(ValueError):
        bl.build_map(PoleCase.CASE_II, 0.1, decay=1.0)
    with pytest.raises(ValueError):
        bl.build_map(PoleCase.CASE_II, 0.1, safety=1.0)
    with pytest.raises(ValueError):
        bl.build_map(PoleCase.CASE_II, 0.6)
