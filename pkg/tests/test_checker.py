import random

import pytest
from hypothesis import given, strategies as st

from milcheck import CheckConfig, check, check_with_certificate, parse
from milcheck.bisim import example_models
from milcheck.checker import (
    BudgetExhausted, DiamondCert, NonFlatError, OrCert, UnregisteredAtomError,
    check_flat, replay,
)
from milcheck.corpus import (
    random_dep_formula, random_flat_formula, random_formula, random_model, random_team,
)
from milcheck.dining import build_model, phi_global
from milcheck.formula import GenAtom
from milcheck.kripke import KripkeModel

import oracle

NO_SHORTCUT = CheckConfig(enable_flat_shortcut=False)
NO_MEMO = CheckConfig(enable_memo=False)


def _case(seed, gen=random_formula, max_worlds=3):
    rng = random.Random(seed)
    f = gen(rng)
    m = random_model(rng, max_worlds)
    return f, m, random_team(rng, m, nonempty=False)


def test_zero_example():
    M, M2 = example_models()
    f = parse("[] D[zero](x)")
    assert check(M, {0}, f)
    assert not check(M2, {0}, f)


def test_split_example():
    m = KripkeModel.build(2, [], [{"p"}, set()])
    assert check(m, {0, 1}, parse("p | ~p"))
    assert not check(m, {0, 1}, parse("p"))
    ok, cert = check_with_certificate(m, {0, 1}, parse("p | ~p"), NO_SHORTCUT)
    assert ok and isinstance(cert, OrCert)
    assert cert.left_team == {0} and cert.right_team == {1}


def test_contradiction_has_no_certificate():
    m = KripkeModel.build(1, [], [{"p"}])
    assert check_with_certificate(m, {0}, parse("p & ~p")) == (False, None)


@given(st.integers(0, 10**6))
def test_agrees_with_reference(seed):
    f, m, t = _case(seed)
    assert check(m, t, f) == oracle.sat(m, t, f)


@given(st.integers(0, 10**6))
def test_empty_team_satisfies_everything(seed):
    rng = random.Random(seed)
    f = random_formula(rng, depth=rng.randint(0, 3))
    m = random_model(rng)
    assert check(m, set(), f)


@given(st.integers(0, 10**6))
def test_shortcut_and_memo_are_transparent(seed):
    f, m, t = _case(seed, max_worlds=4)
    v = check(m, t, f)
    assert check(m, t, f, NO_SHORTCUT) == v
    assert check(m, t, f, NO_MEMO) == v


@given(st.integers(0, 10**6))
def test_certificates_replay(seed):
    f, m, t = _case(seed, max_worlds=4)
    ok, cert = check_with_certificate(m, t, f, NO_SHORTCUT)
    assert (cert is not None) == ok
    if ok:
        assert replay(m, f, cert)


@given(st.integers(0, 10**6))
def test_flatness(seed):
    f, m, t = _case(seed, gen=random_flat_formula, max_worlds=4)
    assert check_flat(m, t, f) == check(m, t, f, NO_SHORTCUT)
    assert check(m, t, f, NO_SHORTCUT) == all(check(m, {w}, f) for w in t)


@given(st.integers(0, 10**6))
def test_downward_closure_dep_fragment(seed):
    f, m, t = _case(seed, gen=random_dep_formula, max_worlds=4)
    if check(m, t, f):
        for t2 in oracle.subsets(t):
            assert check(m, t2, f)


def test_indep_not_downward_closed():
    m = KripkeModel.build(4, [], [set(), {"x"}, {"y"}, {"x", "y"}])
    f = parse("indep(x ; ; y)")
    assert check(m, {0, 1, 2, 3}, f)
    assert not check(m, {0, 3}, f)


@given(st.integers(0, 10**6))
def test_dep_equals_indep_rewrite(seed):
    rng = random.Random(seed)
    m = random_model(rng, 4)
    t = random_team(rng, m, nonempty=False)
    dets = [rng.choice("pqr") for _ in range(rng.randint(0, 2))]
    q = rng.choice("pqr")
    a = parse(f"dep({', '.join(dets)} ; {q})")
    b = parse(f"indep({q} ; {', '.join(dets)} ; {q})")
    assert check(m, t, a) == check(m, t, b)


def test_check_flat_examples():
    m = KripkeModel.build(3, [(0, 1), (0, 2)], [set(), {"p"}, set()])
    assert check_flat(m, {1}, parse("p"))
    assert check_flat(m, {0}, parse("<>p"))
    with pytest.raises(NonFlatError):
        check_flat(m, {0}, parse("dep(;p)"))


def test_budget_is_distinct_and_monotone():
    rng = random.Random(3)
    m = KripkeModel.build(6, [], [frozenset(rng.sample("pq", rng.randint(0, 2))) for _ in range(6)])
    f = parse("(indep(p;;q) | indep(q;;p)) | (dep(;p) | dep(;q))")
    t = set(range(6))
    with pytest.raises(BudgetExhausted):
        check(m, t, f, CheckConfig(enable_flat_shortcut=False, max_enumeration_budget=3))
    want = check(m, t, f)
    ok_at = None
    for b in (10, 100, 1000, 10**4, 10**5, 10**6):
        try:
            v = check(m, t, f, CheckConfig(max_enumeration_budget=b))
        except BudgetExhausted:
            assert ok_at is None
            continue
        assert v == want
        ok_at = ok_at or b
    assert ok_at is not None


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        CheckConfig(max_enumeration_budget=0)


def test_unregistered_atom():
    m = KripkeModel.build(1)
    with pytest.raises(UnregisteredAtomError):
        check(m, {0}, GenAtom("nope", ("p",)))


def test_dining_global_certificate_uses_singleton_witnesses():
    inst = build_model(3)
    ok, cert = check_with_certificate(inst.model, {0}, phi_global(3), NO_SHORTCUT)
    assert ok and replay(inst.model, phi_global(3), cert)
    stack, seen = [cert], 0
    while stack:
        c = stack.pop()
        if isinstance(c, DiamondCert):
            assert len(c.witness) == 1
            seen += 1
        stack.extend(getattr(c, k) for k in ("left", "right", "body") if hasattr(c, k))
    assert seen > 0


def test_flat_diamond_on_large_team_is_fast():
    inst = build_model(3)
    team = set(inst.final_worlds)
    # every final world is terminal, so <>p fails; [] of anything holds
    assert not check(inst.model, team, parse("<>p_0"))
    assert check(inst.model, team, parse("[]p_0"))
