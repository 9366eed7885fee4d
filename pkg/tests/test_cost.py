import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latgauss.cost import (
    CostInputs,
    combine_classical_sis_cost,
    combine_dual_costs,
    combine_sis_cost,
    log2_sum,
    measured_delta_and_w,
    table_rows,
)
from latgauss.errors import MissingInput, ParamConstraint
from latgauss.gaussian import GaussianParams, c_const, rho_interval, rho_z
from latgauss.lattice import gram_schmidt_qr
from latgauss.samplers import KleinConfig


@pytest.mark.parametrize("row,expect", [((146, 119, 50), 146), ((219, 179, 72), 219), ((312, 259, 100), 312)])
def test_quantum_sis_rows(row, expect):
    t, s, p = row
    assert combine_sis_cost(CostInputs(t_qbkz=t, t_qsample=s, neg_log2_p=p)).rounded()["quantum_sis"] == expect


@pytest.mark.parametrize("row,printed", [((201, 159, 39), 202), ((288, 230, 55), 289), ((400, 323, 74), 400)])
def test_classical_sis_rows(row, printed):
    t, s, n = row
    got = combine_classical_sis_cost(CostInputs(t_bkz=t, t_sample=s, n_samples=n)).rounded()["classical_sis"]
    assert abs(got - printed) <= 1


def test_shipped_tables():
    rows = table_rows()
    assert len(rows) == 6 and all(r["within_tolerance"] for r in rows)
    assert [r["diff"] for r in rows if r["table"] == "quantum"] == [0, 0, 0]


def test_unit_components_reduce():
    inp = CostInputs(t_qbkz=100.0, delta_log2=0.0, n_samples=0.0, q_pow_nguess_half=50.0)
    rep = combine_dual_costs(inp)
    for total in rep.totals.values():
        assert total == pytest.approx(log2_sum(100.0, 50.0), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 300), st.floats(-80, -0.01), st.floats(0, 80), st.floats(0, 80))
def test_dual_cost_relations(tb, d, n, qh):
    rep = combine_dual_costs(CostInputs(t_qbkz=tb, delta_log2=d, n_samples=n, q_pow_nguess_half=qh))
    t = rep.totals
    assert t["improved_qram"] <= t["qram"] + 1e-12
    assert t["improved_no_qram"] <= t["no_qram"] + 1e-12
    assert rep.terms["improved_no_qram"]["search"] == pytest.approx(rep.terms["no_qram"]["search"] + d / 2, abs=1e-12)
    for k, terms in rep.terms.items():
        assert t[k] >= max(terms.values()) - 1e-12
        assert rep.dominant[k] == max(terms, key=terms.get)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 400), st.floats(0, 400), st.floats(0, 200), st.floats(0, 10))
def test_sis_monotone(a, b, c, bump):
    base = combine_sis_cost(CostInputs(t_qbkz=a, t_qsample=b, neg_log2_p=c)).totals["quantum_sis"]
    for kw in ({"t_qbkz": a + bump, "t_qsample": b, "neg_log2_p": c}, {"t_qbkz": a, "t_qsample": b + bump, "neg_log2_p": c}, {"t_qbkz": a, "t_qsample": b, "neg_log2_p": c + bump}):
        assert combine_sis_cost(CostInputs(**kw)).totals["quantum_sis"] >= base - 1e-12
    cl = combine_classical_sis_cost(CostInputs(t_bkz=a, t_sample=b, n_samples=c)).totals["classical_sis"]
    assert combine_classical_sis_cost(CostInputs(t_bkz=a, t_sample=b, n_samples=c + bump)).totals["classical_sis"] >= cl - 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-500, 500), min_size=1, max_size=6))
def test_log2_sum_against_mpmath(terms):
    mpmath.mp.dps = 50
    ref = mpmath.log(mpmath.fsum(mpmath.power(2, mpmath.mpf(t)) for t in terms), 2)
    assert abs(log2_sum(*terms) - float(ref)) <= 1e-12 * max(1.0, abs(float(ref)))


def test_missing_and_invalid_inputs():
    with pytest.raises(MissingInput):
        combine_sis_cost(CostInputs(t_qbkz=1.0))
    with pytest.raises(ParamConstraint):
        CostInputs(neg_log2_p=-1.0)
    with pytest.raises(ParamConstraint):
        CostInputs(t_bkz=math.inf)
    with pytest.raises(ParamConstraint):
        CostInputs.from_dict({"t_bkz": 1.0, "unknown": 2})
    assert CostInputs.from_dict({"t_bkz": 3.0}).t_bkz == 3.0


@pytest.mark.parametrize("m", [1, 2, 3])
def test_delta_w_unit_lattice(m):
    L = gram_schmidt_qr(np.eye(m, dtype=int).tolist())
    dw = measured_delta_and_w(KleinConfig(L, GaussianParams(1.0, 0.0, 6)))
    assert 0.5 <= dw.product <= 2


def test_delta_w_one_dimension():
    M = 4
    dw = measured_delta_and_w(KleinConfig(gram_schmidt_qr([[1]]), GaussianParams(1.0, 0.0, M)))
    ratio = rho_interval(GaussianParams(1.0, 0.0, M), 0.0) / rho_z(1.0)
    assert dw.w == pytest.approx(c_const(M), rel=1e-12)
    assert abs(dw.product - ratio) <= 1e-6


def test_delta_w_scale_invariant(ref_basis):
    a = measured_delta_and_w(KleinConfig(ref_basis, GaussianParams(2.0, 0.0, 3)))
    b = measured_delta_and_w(KleinConfig(ref_basis.scaled(2), GaussianParams(4.0, 0.0, 3)))
    assert a.delta == pytest.approx(b.delta, rel=1e-9) and a.w == pytest.approx(b.w, rel=1e-9)
