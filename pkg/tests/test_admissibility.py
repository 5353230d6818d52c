import json
import math
import os
from fractions import Fraction as F

import pytest

from modkg import admissibility as adm
from modkg.errors import InvalidExponent, ThetaOutOfRange

GOLDEN = os.path.join(os.path.dirname(__file__), "data", "admissibility_golden.json")


def run(window="statement", **kw):
    n = kw.pop("n")
    return adm.check_all(adm.ProblemParams.parse(n, **kw), window)


def cond(verdict, name):
    for c in verdict.conditions:
        if c.name == name:
            return c
    raise KeyError(name)


def perturbed(kw, key, eps):
    """Shift ``key`` by ``eps`` (as a float); the other inputs stay exact."""
    out = dict(kw)
    out[key] = float(adm.parse_number(kw[key])) + eps
    return out


# ---------------------------------------------------------------- parsing


def test_parse_number():
    assert adm.parse_number("3/4") == F(3, 4) and isinstance(adm.parse_number("2"), F)
    assert adm.parse_number("0.25") == 0.25 and isinstance(adm.parse_number("0.25"), float)
    assert math.isinf(adm.parse_number("inf"))
    with pytest.raises(ValueError):
        adm.parse_number("1/0")


def test_param_validation():
    with pytest.raises(ThetaOutOfRange):
        adm.ProblemParams.parse(3, theta="3/2")
    with pytest.raises(InvalidExponent):
        adm.ProblemParams.parse(3, p="1/2")
    with pytest.raises(InvalidExponent):
        adm.ProblemParams.parse(4)
    with pytest.raises(InvalidExponent):
        adm.ProblemParams.parse(1, k="0")


def test_relation_statuses():
    assert adm.evaluate(F(1), "<", F(1)) == adm.BOUNDARY
    assert adm.evaluate(F(1), "<=", F(1)) == adm.PASS
    assert adm.evaluate(1.0, "<", 1.0 + 1e-13) == adm.BOUNDARY
    assert adm.evaluate(1.0, "<", 1.0 + 1e-9) == adm.PASS
    assert adm.evaluate(None, "<", 1) == adm.SKIPPED


# ---------------------------------------------------------------- golden file


def test_golden_file_reproduced():
    with open(GOLDEN) as fh:
        rows = json.load(fh)
    assert len(rows) == 200
    mismatches = []
    for row in rows:
        inputs = dict(row["inputs"])
        rep = run(row["p_window"], **inputs)
        got = {v.name: v.status for v in rep.results}
        if got != row["expected"]:
            mismatches.append((row["tag"], inputs, got, row["expected"]))
    assert not mismatches, mismatches[:3]
    statuses = {s for r in rows for s in r["expected"].values()}
    assert statuses == {adm.PASS, adm.FAIL, adm.BOUNDARY, adm.NOT_COVERED, adm.INCOMPLETE}


# ---------------------------------------------------------------- hand anchors

THM1 = dict(n=3, q="3/2", k="5/2", s="7/5", p="4")
THM3_N3 = dict(n=3, theta="1", k="14/3", s="29/20", p="17/8", q="2", gamma="34")
THM3_N2 = dict(n=2, theta="1", k="5", s="19/20", p="9/4", q="2", gamma="36")
THM4_UPPER = dict(n=3, theta="1", p="4", q="2", s="3", mu="4")
THM4_FLOOR = dict(n=3, theta="1", p="16/7", q="2", s="1", mu="3/4")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_theta1_k_threshold_is_4_plus_2_over_n(n):
    assert adm._theorem3_k_threshold(n, F(1)) == 4 + F(2, n)
    assert math.isinf(adm._theorem3_k_threshold(n, F(0)))


def test_theorem1_example_and_window():
    rep = run(**THM1)
    v = rep.result("Theorem1")
    assert v.status == adm.PASS
    lows = [c.lhs for c in v.conditions if "lower bound" in c.name]
    assert lows == [F(1, 2), F(13, 10)]
    assert cond(v, "s < (1.3) upper bound").rhs == F(3, 2)
    assert run(**dict(THM1, q="2")).result("Theorem1").status == adm.NOT_COVERED


@pytest.mark.parametrize(
    "kw,key,check",
    [
        (dict(THM1, s="3/2"), "s", ("Theorem1", -1)),  # s < 3/2 strict upper
        (dict(THM1, s="13/10"), "s", ("Theorem1", +1)),  # 13/10 < s strict lower
        (THM3_N3, "k", ("Theorem3", +1)),  # k > 14/3
        (THM3_N2, "k", ("Theorem3", +1)),  # k > 5
        (THM4_UPPER, "p", ("Theorem4", -1)),  # (1 - 2/p) < 1/2 strict
    ],
)
def test_exact_boundaries_and_flips(kw, key, check):
    name, good = check
    assert run(**kw).result(name).status == adm.BOUNDARY
    inside = run(**perturbed(kw, key, good * 1e-9)).result(name).status
    outside = run(**perturbed(kw, key, -good * 1e-9)).result(name).status
    assert (inside, outside) == (adm.PASS, adm.FAIL)


def test_hartree_mu_floor_three_quarters():
    assert adm.mu_floor(3, F(1), "proof") == F(3, 4)
    assert adm.mu_floor(3, F(1), "statement") == F(3, 2)
    assert run("proof", **THM4_FLOOR).result("Theorem4").status == adm.PASS
    assert run("statement", **THM4_FLOOR).result("Theorem4").status == adm.FAIL
    # Non-strict mu >= 2n(1 - 2/p): the exact floor passes, a hair below fails.
    assert run("proof", **perturbed(THM4_FLOOR, "mu", -1e-9)).result("Theorem4").status == adm.FAIL
    assert run("proof", **perturbed(THM4_FLOOR, "mu", 1e-9)).result("Theorem4").status == adm.PASS
    assert adm.mz_mu_range(F(0)) == (F(3, 2), F(2))


def test_theorem2_p2_forces_q2():
    base = dict(n=1, p="2", q="2", k="3", s="1")
    v = run(**base).result("Theorem2")
    assert cond(v, "p <= q").status == adm.PASS and cond(v, "q <= p'").status == adm.PASS
    assert any("forces q = 2" in note for note in v.notes)
    up = run(**perturbed(base, "q", 1e-9)).result("Theorem2")
    down = run(**perturbed(base, "q", -1e-9)).result("Theorem2")
    assert cond(up, "q <= p'").status == adm.FAIL
    assert cond(down, "p <= q").status == adm.FAIL


def test_case_gates_and_routing():
    assert run(n=1, p="3/2", q="2", k="3", s="1").result("Corollary1").status == adm.NOT_COVERED
    assert run(n=1, p="3", q="2", k="3", s="1").result("Theorem2").status == adm.NOT_COVERED
    assert run(n=1, p="3/2", q="2", k="3", s="1").result("Theorem3").status == adm.NOT_COVERED
    rep = run(n=1, p="2", q="3", k="3", s="1", r="1")
    assert rep.result("Lemma3").status == adm.NOT_COVERED
    assert "Remark6-high" in rep.result("Lemma3").notes[0]
    assert rep.result("Remark6-low").status == adm.NOT_COVERED


def test_theorem3_unreachable_cases():
    # theta = 0: threshold infinite; n = 1: delta = 0 so gamma >= 2/delta fails.
    v0 = run(n=3, theta="0", k="100", s="29/20", p="17/8", q="2", gamma="34").result("Theorem3")
    assert cond(v0, "k > 4/theta + 2/n").status == adm.FAIL
    v1 = run(n=1, theta="1", k="100", s="1", p="4", q="2", gamma="8").result("Theorem3")
    assert cond(v1, "gamma >= 2/delta").status == adm.FAIL


def test_passing_tuples_for_every_check():
    assert run(n=2, k="5/2", s="3/10", p="11/8", q="3/2").result("Theorem2").status == adm.PASS
    assert run(n=2, k="1", s="11/10", p="17/8", q="9/4").result("Theorem1").status == adm.PASS
    assert run(n=2, k="1/2", s="1/2", p="2", q="5/4", r="1").result("Remark6-low").status == adm.PASS
    assert run(n=2, k="1/2", s="11/10", p="2", q="9/4", r="1").result("Remark6-high").status == adm.PASS
    assert run(n=1, p="4", q="2", k="5/2", s="37/125", r="13/25").result("Lemma3").status == adm.PASS
    assert run(**dict(THM3_N3, k="5")).result("Theorem3").status == adm.PASS


def test_missing_parameters_are_incomplete_and_exit_codes():
    rep = run(n=3, theta="1", k="4")
    assert rep.result("Theorem3").status == adm.FAIL
    assert rep.result("Theorem1").status == adm.INCOMPLETE
    assert rep.exit_code() == 2
    assert run(**THM1).exit_code() == 0
    d = json.loads(rep.to_json())
    failed = [r for r in d["results"] if r["name"] == "Theorem3"][0]["failed"]
    assert failed["name"] == "k > 4/theta + 2/n" and failed["rhs_exact"] == "14/3"


def test_derived_quantities():
    rep = run(n=3, theta="1", p="4", q="2", s="1")
    assert rep.derived["rho_beta"] == F(2)
    assert rep.derived["beta_range"] == (F(0), F(1))
    assert adm.alpha_delta(F(1), 2, F(4)) == (F(3, 4), F(1, 4))
    lo, hi = adm.theorem4_window(3, F(1), "statement")
    assert (lo, hi) == (F(1, 4), F(1, 2))


def test_sweep_and_csv(tmp_path):
    grid = {"n": [1, 3], "p": ["2", "4"], "q": ["3/2"], "k": ["5/2"], "s": ["7/5"]}
    rows = list(adm.sweep(grid))
    assert len(rows) == 4
    path = tmp_path / "sweep.csv"
    adm.write_sweep_csv(path, rows)
    lines = path.read_text().splitlines()
    assert len(lines) == 5 and lines[0].startswith("n,k,s,p,q")
