import csv
import io

import pytest

from lieadequacy import adequacy as adq
from conftest import gl2, sl2
from lieadequacy.cohom import hom_to_additive
from oracles import hom_count_dim

REPORT_KEYS = {"family", "p", "b", "q", "order", "modulus", "a", "dim", "a1", "a2", "a3", "a4",
               "adequate", "hypothesis_notes"}


def test_sl2_7_v5_adequate():
    r = adq.check_adequacy(7, 1, 5)
    assert r.adequate is True
    assert r.a4 == {"pass": True, "span_dim": 36, "ambient": 36}
    assert r.a3["ext_dim"] == 0
    assert r.hypothesis_notes["end_weights_distinct_mod_q_minus_1"] is False
    assert r.hypothesis_notes["end_weight_collision"] == [-6, 0]


def test_sl2_11_v5_not_adequate():
    r = adq.check_adequacy(11, 1, 5)
    assert r.adequate is False
    assert r.a3["pass"] is False and r.a3["ext_dim"] == 1
    assert r.a1["pass"] and r.a2["pass"] and r.a4["pass"]


def test_a1_fails_at_p_minus_one():
    r = adq.check_adequacy(5, 1, 4)
    assert r.a1 == {"pass": False, "dim_mod_p": 0}
    assert r.adequate is False


def test_report_schema_and_invariants():
    r = adq.check_adequacy(5, 1, 2).to_dict()
    assert set(r) == REPORT_KEYS
    assert r["a4"]["span_dim"] <= r["a4"]["ambient"]
    flags = [r[k]["pass"] for k in ("a1", "a2", "a3", "a4")]
    assert r["adequate"] == all(flags)


def test_undetermined_is_reported():
    # nonzero H^1 cannot be certified, and the full computation is refused
    r = adq.check_adequacy(11, 1, 5, full_cap=100)
    assert r.a3["pass"] is None and r.a3["status"] == "undetermined"
    assert r.adequate == adq.UNKNOWN
    assert adq.cell_undetermined(r.to_dict())


def test_input_errors():
    for args in [(4, 1, 1), (5, 0, 1), (5, 1, 5), (5, 1, -1)]:
        with pytest.raises(adq.AdequacyInputError):
            adq.check_adequacy(*args)
    with pytest.raises(adq.AdequacyInputError):
        adq.check_adequacy(5, 1, 1, "SL3")


def test_adequacy_from_normal():
    assert adq.adequacy_from_normal(True, 0) is True
    assert adq.adequacy_from_normal(True, 1) is False
    assert adq.adequacy_from_normal(False, 0) is False


@pytest.mark.parametrize("p,a,b,want", [(11, 3, 1, True), (7, 5, 1, False), (5, 3, 2, True),
                                        (11, 4, 1, False), (5, 4, 2, False), (13, 5, 1, False), (17, 5, 1, True)])
def test_big_inequality(p, a, b, want):
    v = adq.check_big_sl2(p, a, b)
    assert v.inequality_pass is want
    assert v.proof_conditions["weight_spaces_all_dim_one"] is True


def test_big_proof_conditions():
    v = adq.check_big_sl2(11, 3, 1)
    assert v.proof_conditions["ext_vanishes"] is True
    # V (x) V weights 6..-6 collide mod 10
    assert v.proof_conditions["weights_distinct_mod"] is False
    v = adq.check_big_sl2(5, 3, 2)
    assert v.proof_conditions == {"ext_vanishes": True, "weight_spaces_all_dim_one": True,
                                  "weights_distinct_mod": True}
    assert adq.check_big_sl2(5, 7, 1).proof_conditions["ext_vanishes"] is None


def test_sweep_small():
    cells = adq.sweep([3, 5], [2], 3)
    assert [(c["p"], c["a"]) for c in cells] == [(3, 0), (3, 1), (3, 2), (5, 0), (5, 1), (5, 2), (5, 3)]
    for c in cells:
        assert c["adequate"] is (c["a"] < c["p"] - 1)
    assert adq.sweep([], [1], 3) == []


def test_sweep_records_errors_and_continues():
    cells = adq.sweep([4, 3], [1], 0)
    assert "error" in cells[0] and cells[1]["adequate"] is False


def test_sweep_parallel_matches_serial():
    assert adq.sweep([2, 3, 5], [1], 2, jobs=3) == adq.sweep([2, 3, 5], [1], 2, jobs=1)


def test_sweep_11_final_row():
    cells = adq.sweep([11], [1], 5)
    assert cells[-1]["a"] == 5 and cells[-1]["adequate"] is False


def test_csv_columns():
    text = adq.to_csv(adq.sweep([2], [1], 0) + [adq._error_cell(4, 1, 0, "SL2", ValueError("x"))])
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == adq.CSV_COLUMNS + ["error"]
    assert rows[1] == ["2", "1", "0", "6", "1", "true", "false", "false", "true", "1", "1", "false", ""]
    assert rows[2][-1].startswith("ValueError")


@pytest.mark.parametrize("p,b", [(3, 1), (5, 1)])
def test_gl2_matches_deduction(p, b):
    for a in range(p):
        s = adq.check_adequacy(p, b, a, "SL2")
        g = adq.check_adequacy(p, b, a, "GL2")
        h1g = hom_to_additive(gl2(p, b))
        assert h1g == hom_count_dim(gl2(p, b))
        if adq.adequacy_from_normal(s.adequate is True, h1g):
            assert g.adequate is True
        if s.adequate is True:
            assert g.a4["pass"] and g.a1["pass"]
