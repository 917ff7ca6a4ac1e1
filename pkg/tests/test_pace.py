import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jrplab.pace import (
    DEFAULT_B,
    DEFAULT_C,
    DEFAULT_P,
    MixtureParams,
    PaceSpec,
    Piece,
    density_cdf,
    density_D,
    pace_1srp,
    pace_combined,
    pace_table,
    ratio_report,
    solve_lower_bound_constants,
    waiting_ratio,
    waiting_supremand,
    xi,
    xi_numeric,
)
from oracles import one_srp_waiting_ratio_closed_form, waiting_ratio_grid, xi_quad

EXACT_DEFAULTS = MixtureParams(Fraction(str(DEFAULT_C)), Fraction(str(DEFAULT_P)), Fraction(str(DEFAULT_B)))


def test_piecewise_evaluation_and_integral():
    g = PaceSpec((Piece(0, Fraction(1, 2), (0, 4)), Piece(Fraction(1, 2), 1, (4, -4))))
    assert g(Fraction(1, 4)) == 1 and g(Fraction(3, 4)) == 1 and g(1) == 0
    assert g.integral() == 1 and g.integral(0, Fraction(1, 2)) == Fraction(1, 2)
    assert g.sup() == 2
    assert (g + g).integral() == 2 and g.scaled(3).integral() == 3


def test_1srp_trapezoid_shape():
    c = Fraction(1, 4)
    g = pace_1srp(c)
    assert g.integral() == 1
    assert g(c / 2) == Fraction(2, 3) and g(Fraction(1, 2)) == Fraction(4, 3) and g(1 - c / 2) == Fraction(2, 3)
    assert g.breakpoints() == [0, c, 1 - c, 1]
    # c = 1/2 degenerates to a triangle
    assert pace_1srp(Fraction(1, 2)).integral() == 1 and pace_1srp(Fraction(1, 2)).sup() == 2
    with pytest.raises(ValueError):
        pace_1srp(0.6)


def test_density_is_a_probability_density_in_exact_arithmetic():
    d = density_D(EXACT_DEFAULTS)
    assert d.integral() == 1
    assert d(Fraction(1, 2)) == 0
    assert density_cdf(MixtureParams(), 1 - DEFAULT_B) == 0 and density_cdf(MixtureParams(), 1) == 1


def test_combined_pace_integrates_to_one_exactly():
    assert pace_combined(EXACT_DEFAULTS).integral() == 1


def test_density_at_one():
    assert float(density_D(MixtureParams())(1.0)) == pytest.approx(8.737082, abs=1e-6)


def test_xi_three_routes():
    p = MixtureParams()
    assert xi(p) == pytest.approx(1.0700663722759791, abs=1e-15)
    assert xi_numeric(p) == pytest.approx(xi(p), abs=1e-12)
    assert xi_quad(p) == pytest.approx(xi(p), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.5), st.floats(0.1, 0.95), st.floats(0.01, 1.0))
def test_xi_closed_form_matches_quadrature(c, p, frac):
    params = MixtureParams(c, p, max(1e-3, frac * c))
    assert xi(params) == pytest.approx(xi_quad(params), rel=1e-9)


def test_ratio_report_defaults():
    rep = ratio_report(MixtureParams())
    assert rep.r1 == pytest.approx(2.7002762125153486, abs=1e-12)
    assert rep.r2 == pytest.approx(1.5499672011054868, abs=1e-12)
    assert rep.r3 == pytest.approx(1.5499671556791919, abs=1e-12)
    assert rep.R1 == rep.r1 and rep.R2 == max(rep.r2, rep.r3)
    assert rep.R == pytest.approx(1.7907124992237995, abs=1e-12)
    assert rep.q == pytest.approx(0.5349505607362244, abs=1e-12)
    assert rep.R == pytest.approx((2 * rep.R1 - rep.R2) / (rep.R1 - rep.R2 + 1))


def test_pure_1srp_report():
    rep = ratio_report(MixtureParams(0.25, 1.0, 0.1))
    assert rep.r1 == 4 and rep.r2 == pytest.approx(4 / 3)


def test_combined_pace_is_flat_at_the_top():
    gc = pace_combined(MixtureParams())
    zs = np.linspace(1 - DEFAULT_B, 1, 50)
    vals = [float(gc(z)) for z in zs]
    assert max(vals) - min(vals) < 1e-9
    assert vals[0] == pytest.approx(1.549967, abs=1e-6)
    assert float(gc.sup()) == pytest.approx(vals[0], abs=1e-9)


@pytest.mark.parametrize("c", [0.1, 0.2, 0.25, 1 / 3, 0.4, 0.5])
def test_1srp_waiting_ratio_three_routes(c):
    w = waiting_ratio(pace_1srp(c))
    assert w == pytest.approx(one_srp_waiting_ratio_closed_form(c), abs=1e-12)
    assert w == pytest.approx(waiting_ratio_grid(pace_1srp(c)), abs=1e-6)


def test_supremand_at_the_ramp_end_is_nine_eighths():
    assert waiting_supremand(pace_1srp(Fraction(1, 3)), Fraction(1, 3)) == Fraction(9, 8)


def test_waiting_ratio_of_a_uniform_pace_is_one():
    assert waiting_ratio(PaceSpec((Piece(0, 1, (1,)),))) == 1


def test_waiting_ratio_bounds_the_combined_pace():
    gc = pace_combined(MixtureParams())
    assert float(waiting_ratio(gc)) == pytest.approx(waiting_ratio_grid(gc), abs=1e-6)


def test_lower_bound_constants():
    c, s0, s, R = solve_lower_bound_constants()
    assert abs(c ** 3 + c ** 2 - 1) <= 1e-12
    assert s0 == c * c and s == c ** 4 and R == 2 + c
    assert s == pytest.approx(c * c + c - 1, abs=1e-12)
    assert 0.7548 < c < 0.7549 and R >= 2.754


def test_params_validation():
    for bad in [dict(c=0.6), dict(p=1.2), dict(b=0.5), dict(lam=0.9), dict(q_override=2)]:
        with pytest.raises(ValueError):
            MixtureParams(**bad)
    with pytest.raises(ValueError):
        MixtureParams(p=1.0).slope


def test_pace_table_rows():
    rows = pace_table(MixtureParams(), 0.01)
    assert len(rows) == 101
    assert rows[0] == (0.0, 0.0, 0.0, 0.0)
    z, g1, d, gc = rows[-1]
    assert z == 1.0 and gc == pytest.approx(1.549968, abs=1e-6)
    # slope changes of the trapezoid at c and 1-c
    g = [r[1] for r in rows]
    slopes = np.diff(g)
    assert slopes[10] > 0 and abs(slopes[40]) < 1e-12 and slopes[80] < 0
    assert math.isclose(sum(r[1] for r in rows) * 0.01, 1, abs_tol=0.02)
