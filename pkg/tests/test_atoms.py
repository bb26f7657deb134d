import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from milcheck import parse, check
from milcheck.atoms import (
    AtomRegistrationError, AtomRegistry, GeneralizedAtom, WidthError, builtin_atoms,
    default_registry, eval_atom, matrix_structure, team_matrix, team_structure,
)
from milcheck.corpus import random_model
from milcheck.fol import holds
from milcheck.kripke import KripkeModel

from oracle import gen_ok

REG = default_registry()


def test_team_matrix():
    m = KripkeModel.build(3, [], [{"p"}, set(), {"p"}])
    assert team_matrix(m, {0, 1}, ["p"]).tolist() == [[1], [0]]
    assert team_matrix(m, set(), ["p"]).shape == (0, 1)
    assert team_matrix(m, {0, 2}, ["p"]).tolist() == [[1], [1]]


def test_eval_examples():
    dep, indep, zero = REG["dep"], REG["indep"], REG["zero"]
    assert not eval_atom(dep, [[1, 1], [1, 0]])
    assert eval_atom(dep, [[1, 1], [0, 0]])
    assert not eval_atom(indep, [[0, 0], [1, 1]])
    assert eval_atom(indep, [[0, 0], [0, 1], [1, 0], [1, 1]])
    assert eval_atom(zero, [[0]])
    assert not eval_atom(zero, [[0], [0]])
    assert not eval_atom(zero, [[1]])


def test_empty_matrix():
    for name in ("dep", "inc", "exc"):
        assert eval_atom(REG[name], np.zeros((0, 2), dtype=np.uint8))
    assert eval_atom(REG["indep"], np.zeros((0, 3), dtype=np.uint8))
    assert not eval_atom(REG["zero"], np.zeros((0, 1), dtype=np.uint8))


def test_width_errors():
    with pytest.raises(WidthError):
        eval_atom(REG["zero"], [[0, 0]])
    with pytest.raises(WidthError):
        eval_atom(REG["inc"], [[0, 0, 0]])
    with pytest.raises(WidthError):
        eval_atom(REG["indep"], [[0]])


def test_builtins_definitions():
    names = {a.name: a for a in builtin_atoms()}
    assert set(names) == {"dep", "indep", "inc", "exc", "zero"}
    assert names["zero"].fo_definition is None
    d = names["dep"].fo_definition(3)
    assert [q for q, _ in d.prefix] == ["forall", "forall"]
    assert [q for q, _ in names["inc"].fo_definition(2).prefix] == ["forall", "exists"]
    assert [q for q, _ in names["exc"].fo_definition(2).prefix] == ["forall", "forall"]


WIDTHS = {"dep": [1, 2, 3], "indep": [2, 3, 4, 6], "inc": [2, 4], "exc": [2, 4]}


@given(st.integers(0, 100_000))
def test_definitions_agree_with_evaluators(seed):
    rng = random.Random(seed)
    m = random_model(rng, max_worlds=5)
    team = frozenset(w for w in m.worlds if rng.random() < 0.7)
    for name, widths in WIDTHS.items():
        a = REG[name]
        for n in widths:
            args = [rng.choice("pqr") for _ in range(n)]
            mat = team_matrix(m, team, args)
            want = eval_atom(a, mat)
            assert holds(a.fo_definition(n), team_structure(m, team, args)) == want
            assert holds(a.fo_definition(n), matrix_structure(mat)) == want
            assert gen_ok(m, team, name, args) == want


@given(st.integers(0, 100_000))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    for name, widths in WIDTHS.items():
        for n in widths:
            mat = rng.integers(0, 2, size=(int(rng.integers(0, 7)), n), dtype=np.uint8)
            perm = rng.permutation(mat.shape[0])
            assert eval_atom(REG[name], mat) == eval_atom(REG[name], mat[perm])


def test_register_and_use():
    reg = default_registry().copy()
    first_zero = GeneralizedAtom(
        "first_zero", lambda mat: mat.shape[0] > 0 and mat[0, 0] == 0, width=1
    )
    with pytest.raises(AtomRegistrationError):
        reg.register(first_zero)
    all_true = GeneralizedAtom("all_true", lambda mat: bool(mat.all()), width=1)
    reg.register(all_true)
    with pytest.raises(AtomRegistrationError):
        reg.register(all_true)
    m = KripkeModel.build(2, [], [{"p"}, {"p"}])
    f = parse("D[all_true](p)", registry=reg)
    assert check(m, {0, 1}, f, registry=reg)
    assert "all_true" not in default_registry()


def test_registry_is_mapping():
    reg = AtomRegistry(builtin_atoms())
    assert len(reg) == 5 and "inc" in reg and sorted(reg) == sorted(a.name for a in builtin_atoms())
