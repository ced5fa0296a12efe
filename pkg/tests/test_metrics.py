import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsp_sim.errors import ValidationError
from rsp_sim.metrics import (
    build_report,
    cic,
    intrinsic_efficiency,
    our_scheme_row,
    table2_report,
    tsp_formula,
)
from rsp_sim.protocol import MAX_X, ChannelSpec

H = 1 / math.sqrt(2)
xs = st.floats(0, MAX_X)


class TestTsp:
    def test_maximal_is_one(self):
        assert tsp_formula(ChannelSpec((H, H))) == 1.0

    def test_half_maximal(self):
        assert tsp_formula(ChannelSpec((0.6, H))) == pytest.approx(0.72, abs=1e-12)

    @pytest.mark.parametrize("x", [(0.0,), (0.0, 0.4), (0.3, 0.5, 0.0)])
    def test_zero_coefficient(self, x):
        assert tsp_formula(ChannelSpec(x)) == 0

    @given(st.lists(xs, min_size=1, max_size=4), st.integers(0, 3), st.floats(0, 1))
    def test_nondecreasing_in_each_coefficient(self, x, k, t):
        k %= len(x)
        bigger = list(x)
        bigger[k] = x[k] + t * (MAX_X - x[k])
        assert tsp_formula(ChannelSpec(tuple(bigger))) >= tsp_formula(ChannelSpec(tuple(x))) - 1e-15

    @given(st.lists(xs, min_size=1, max_size=6))
    def test_in_unit_interval(self, x):
        assert 0 <= tsp_formula(ChannelSpec(tuple(x))) <= 1


class TestCic:
    def test_two_qubit_maximal(self):
        assert cic(ChannelSpec.maximal(2)) == pytest.approx(4, abs=1e-12)

    def test_three_qubit_maximal(self):
        assert cic(ChannelSpec.maximal(3)) == pytest.approx(6, abs=1e-12)

    def test_vanishing_limit(self):
        assert cic(ChannelSpec((0.0, 0.5))) == 0
        assert cic(ChannelSpec((1e-150, 1e-150))) < 1e-200

    @settings(max_examples=50)
    @given(st.lists(st.floats(1e-6, MAX_X), min_size=1, max_size=4))
    def test_closed_form(self, x):
        w = math.prod(v * v for v in x)
        assert cic(ChannelSpec(tuple(x))) == pytest.approx(2 ** (len(x) + 1) * w * math.log2(1 / w), rel=1e-9)


class TestEfficiency:
    @pytest.mark.parametrize("args", [(2, 6, 4, 1), (3, 9, 6, 1)])
    def test_published_rows(self, args):
        assert intrinsic_efficiency(*args) == 0.2

    def test_zero_tsp(self):
        assert intrinsic_efficiency(2, 6, 4, 0) == 0

    def test_zero_denominator(self):
        with pytest.raises(ValidationError):
            intrinsic_efficiency(1, 0, 0.0, 1)


class TestReport:
    def test_fields(self):
        ch = ChannelSpec((0.6, H))
        rep = build_report(ch, 0.72)
        assert (rep.qs, rep.qq) == (2, 6)
        assert rep.qc == rep.cic == cic(ch)
        assert rep.gamma == pytest.approx(2 / (6 + rep.cic) * 0.72)

    def test_disagreement_rejected(self):
        with pytest.raises(ValidationError):
            build_report(ChannelSpec((0.6, H)), 0.7)


class TestTable2:
    def test_our_rows_exact(self):
        assert {k: our_scheme_row(2)[k] for k in ("cic", "tsp", "gamma")} == {"cic": 4.0, "tsp": 1.0, "gamma": 0.2}
        assert {k: our_scheme_row(3)[k] for k in ("cic", "tsp", "gamma")} == {"cic": 6.0, "tsp": 1.0, "gamma": 0.2}

    def test_literature_rows(self):
        rows = table2_report()
        lit = [r for r in rows if r["source"] == "literature"]
        assert len(lit) == 6
        epr3 = next(r for r in lit if r["m"] == 3 and r["protocol"] == "Ref-EPR")
        assert (epr3["cic"], epr3["tsp"], epr3["gamma"]) == (3, 1 / 8, 0.0833)
        assert {r["gamma"] for r in lit if r["protocol"] != "Ref-EPR"} == {0.125, 0.1364}

    def test_our_rows_improve_on_epr_baseline(self):
        rows = table2_report()
        for m, factor in ((2, 4), (3, 8)):
            ours = next(r for r in rows if r["m"] == m and r["source"] == "computed")
            epr = next(r for r in rows if r["m"] == m and r["protocol"] == "Ref-EPR")
            assert ours["tsp"] / epr["tsp"] == factor
            assert ours["entanglement"].startswith({2: "two", 3: "three"}[m])
