from milcheck import parse, render
from milcheck.corpus import ATOM_KINDS, atom_kinds, corpus_to_json, gen_corpus
from milcheck.formula import modal_depth


def test_reproducible():
    assert corpus_to_json(gen_corpus(1, 40)) == corpus_to_json(gen_corpus(1, 40))
    assert corpus_to_json(gen_corpus(1, 40)) != corpus_to_json(gen_corpus(2, 40))


def test_every_atom_kind_and_depth_present():
    c = gen_corpus(1, 50)
    kinds = set().union(*(atom_kinds(f) for f in c.formulas))
    assert set(ATOM_KINDS) <= kinds
    assert {modal_depth(f) for f in c.formulas} == {0, 1, 2}


def test_round_trip_and_bounds():
    c = gen_corpus(9, 60)
    for f in c.formulas:
        assert parse(render(f)) == f
    for m, t in c.models:
        assert 1 <= m.n_worlds <= 4 and len(m.propositions) <= 3 and t
