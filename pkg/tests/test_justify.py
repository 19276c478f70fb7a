import itertools

import pytest

from qkds.core import X, And, Bottom, Box, Diamond, Instance, Signature, Top, Var, conjoin
from qkds.errors import OpenFormula, UnknownAtom
from qkds.expansion import expand
from qkds.justify import (
    believed,
    belief_formula,
    has_inconsistent_instance,
    instance_consistent,
    justifiable,
    justification_formula,
    minimal_inconsistent_instances,
)
from qkds.parser import parse_formula
from qkds.selftest import running_example
from qkds.semantics import holds
from qkds.tableau import solve

PROBLEM = running_example()
SIGMA, SIG = PROBLEM.assertions, PROBLEM.signature
CORE = ["o1", "o2", "r1", "r3", "r4", "g1", "g2"]


def test_instance_consistency_examples():
    assert instance_consistent(SIGMA, CORE, SIG).verdict == "no"
    report = instance_consistent(SIGMA, ["o1"], SIG)
    assert report.verdict == "yes"
    assert holds(report.model, 0, Diamond(SIG.instance(["o1"]), Top()))
    assert instance_consistent(SIGMA, SIG.full).verdict == "no"
    # the same verdict through the expansion path
    assert not solve(expand(And(conjoin(SIGMA), Diamond(SIG.full, Top()))), SIG)
    with pytest.raises(UnknownAtom):
        instance_consistent(SIGMA, ["zz"], SIG)


def test_justifiable_change_lane():
    report = justifiable(SIGMA, Var("changeLane"), SIG)
    assert report.verdict == "yes"
    claim = justification_formula(Var("changeLane"), SIG)
    assert holds(report.model, 0, claim.body, report.witness)
    # {o1,r1,r3,g1} is an admissible witness as well
    s = SIG.instance(["o1", "r1", "r3", "g1"])
    assert solve(And(conjoin(SIGMA), And(Diamond(s, Top()), Box(s, Var("changeLane")))), SIG)


def test_justifiable_falsum_is_never_yes():
    assert justifiable(SIGMA, Bottom(), SIG).verdict == "no"
    assert justifiable([], Bottom(), Signature(("a", "b"))).verdict == "no"
    with pytest.raises(OpenFormula):
        justifiable(SIGMA, Box(X, Var("A")), SIG)


def test_inconsistent_instance_duality():
    report = has_inconsistent_instance(SIGMA, SIG)
    assert report.verdict == "yes"
    assert report.witness.names == CORE
    assert not solve(And(conjoin(SIGMA), PROBLEM.query("q1")), SIG)
    ab = Signature(("a", "b"))
    assert has_inconsistent_instance([], ab).verdict == "no"


def test_belief_examples():
    a = Signature(("a",))
    sigma1 = [parse_formula("<a> true", a), parse_formula("[a] A", a)]
    assert believed(sigma1, Var("A"), a).verdict == "yes"
    assert believed(sigma1, Top(), a).verdict == "yes"
    ab = Signature(("a", "b"))
    sigma2 = [parse_formula(t, ab) for t in ("<a> true", "<b> true", "[a] A", "[b] ~A")]
    report = believed(sigma2, Var("A"), ab)
    assert report.verdict == "no"
    assert not holds(report.model, 0, belief_formula(Var("A"), ab))
    # the expansion path agrees on both
    assert not solve(expand(And(conjoin(sigma1), ~belief_formula(Var("A"), a))), a)
    assert solve(expand(And(conjoin(sigma2), ~belief_formula(Var("A"), ab))), ab)


def test_belief_modes():
    ab = Signature(("a", "b"))
    sigma = [parse_formula("<a> true", ab)]
    # satisfiable together with the belief, but not entailed by sigma
    assert believed(sigma, Var("A"), ab, mode="sat").verdict == "yes"
    assert believed(sigma, Var("A"), ab).verdict == "no"
    with pytest.raises(ValueError):
        believed(sigma, Var("A"), ab, mode="maybe")


def test_minimal_cores_running_example():
    cores = minimal_inconsistent_instances(SIGMA, SIG)
    assert SIG.instance(CORE) in cores
    without_g2 = [phi for phi in SIGMA if "g2" not in str(phi)]
    assert all("r4" not in c for c in minimal_inconsistent_instances(without_g2, SIG))
    assert minimal_inconsistent_instances([], SIG) == []


def test_several_cores():
    sig = Signature(("a", "b", "c", "d"))
    sigma = [parse_formula(t, sig) for t in ("[a] A", "[b] ~A", "[c] ~A", "[d] B")]
    cores = minimal_inconsistent_instances(sigma, sig)
    assert sorted(c.names for c in cores) == [["a", "b"], ["a", "c"]]
    assert len(minimal_inconsistent_instances(sigma, sig, cap=1)) == 1


def test_cores_match_subset_sweep():
    sig = Signature(("a", "b", "c", "d"))
    sigma = [parse_formula(t, sig) for t in ("[a] A", "[b] (A -> B)", "[c] ~B", "[d] ~A | B")]
    consistent = {
        bits: bool(solve(expand(And(conjoin(sigma), Diamond(Instance(sig, bits), Top()))), sig))
        for bits in range(1, 16)
    }
    minimal = {
        bits
        for bits, ok in consistent.items()
        if not ok and all(consistent[bits & ~(1 << i)] for i in range(4) if bits & ~(1 << i) and bits >> i & 1)
    }
    cores = minimal_inconsistent_instances(sigma, sig)
    assert {c.bits for c in cores} == minimal
    for s, t in itertools.combinations(cores, 2):
        assert not (s <= t or t <= s)
