"""Seeded random formulas and models for the property suites."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .formula import (
    And, Box, Dep, Diamond, GenAtom, Indep, NegProp, Or, Prop, render, subformulas,
)
from .kripke import KripkeModel, model_to_dict

__all__ = [
    "VARS", "ATOM_KINDS", "Corpus", "random_formula", "random_flat_formula",
    "random_dep_formula", "random_model", "random_team", "gen_corpus", "corpus_to_json",
    "atom_kinds",
]

VARS = ("p", "q", "r")
ATOM_KINDS = ("literal", "dep", "indep", "inc", "exc")


def _literal(rng, vars):
    v = rng.choice(vars)
    return Prop(v) if rng.random() < 0.5 else NegProp(v)


def _sample(rng, vars, lo, hi):
    return tuple(rng.choice(vars) for _ in range(rng.randint(lo, hi)))


def _atom(rng, kind, vars):
    if kind == "literal":
        return _literal(rng, vars)
    if kind == "dep":
        return Dep(_sample(rng, vars, 0, 2), rng.choice(vars))
    if kind == "indep":
        return Indep(_sample(rng, vars, 1, 2), _sample(rng, vars, 0, 1), _sample(rng, vars, 1, 2))
    if kind in ("inc", "exc"):
        h = rng.randint(1, 2)
        return GenAtom(kind, _sample(rng, vars, h, h) + _sample(rng, vars, h, h))
    raise ValueError(f"unknown atom kind {kind!r}")


def _tree(rng, depth, leaf, size):
    """Formula of modal depth exactly ``depth`` with about ``size`` binary
    connectives; ``leaf()`` supplies depth-0 leaves."""
    if depth == 0 and size <= 0:
        return leaf()
    if depth > 0 and (size <= 0 or rng.random() < 0.45):
        body = _tree(rng, depth - 1, leaf, size - 1)
        return Diamond(body) if rng.random() < 0.5 else Box(body)
    op = And if rng.random() < 0.5 else Or
    keep = _tree(rng, depth, leaf, (size - 1) // 2)
    other = _tree(rng, rng.randint(0, depth), leaf, (size - 1) // 2)
    return op(keep, other) if rng.random() < 0.5 else op(other, keep)


def atom_kinds(f):
    out = set()
    for g in subformulas(f):
        if isinstance(g, (Prop, NegProp)):
            out.add("literal")
        elif isinstance(g, Dep):
            out.add("dep")
        elif isinstance(g, Indep):
            out.add("indep")
        elif isinstance(g, GenAtom):
            out.add(g.atom)
    return out


def random_formula(rng, depth=None, kind=None, vars=VARS, size=None):
    """Formula with atoms of all kinds; if ``kind`` is given at least one
    atom of that kind occurs."""
    depth = rng.randint(0, 2) if depth is None else depth
    size = rng.randint(0, 3) if size is None else size
    kinds = ATOM_KINDS

    def leaf():
        return _atom(rng, "literal" if rng.random() < 0.5 else rng.choice(kinds), vars)

    f = _tree(rng, depth, leaf, size)
    if kind is not None and kind not in atom_kinds(f):
        f = And(f, _atom(rng, kind, vars))
    return f


def random_flat_formula(rng, depth=None, vars=VARS, size=None):
    """Atom-free formula (literals, connectives, modalities)."""
    depth = rng.randint(0, 2) if depth is None else depth
    size = rng.randint(0, 4) if size is None else size
    return _tree(rng, depth, lambda: _literal(rng, vars), size)


def random_dep_formula(rng, depth=None, vars=VARS, size=None):
    """Formula over literals and dependence atoms containing at least one
    dependence atom."""
    depth = rng.randint(0, 2) if depth is None else depth
    size = rng.randint(0, 3) if size is None else size

    def leaf():
        return _atom(rng, "dep" if rng.random() < 0.5 else "literal", vars)

    f = _tree(rng, depth, leaf, size)
    if "dep" not in atom_kinds(f):
        f = And(f, _atom(rng, "dep", vars))
    return f


def random_model(rng, max_worlds=4, vars=VARS, edge_p=0.35):
    n = rng.randint(1, max_worlds)
    edges = frozenset((a, b) for a in range(n) for b in range(n) if rng.random() < edge_p)
    labels = tuple(frozenset(v for v in vars if rng.random() < 0.5) for _ in range(n))
    return KripkeModel(n, edges, labels)


def random_team(rng, m, nonempty=True):
    while True:
        t = frozenset(w for w in m.worlds if rng.random() < 0.6)
        if t or not nonempty:
            return t


@dataclass(frozen=True)
class Corpus:
    seed: int
    formulas: tuple
    models: tuple  # (model, team) pairs


def gen_corpus(seed, size, max_worlds=4, vars=VARS):
    """``size`` formulas cycling through atom kinds and modal depths 0..2,
    plus ``size`` random pointed models. Deterministic in ``seed``."""
    rng = random.Random(seed)
    formulas = []
    for k in range(size):
        kind = ATOM_KINDS[k % len(ATOM_KINDS)]
        depth = (k // len(ATOM_KINDS)) % 3
        formulas.append(random_formula(rng, depth=depth, kind=kind, vars=vars))
    models = []
    for _ in range(size):
        m = random_model(rng, max_worlds, vars)
        models.append((m, random_team(rng, m)))
    return Corpus(seed, tuple(formulas), tuple(models))


def corpus_to_json(c):
    doc = {
        "format": "milcheck-corpus",
        "version": 1,
        "seed": c.seed,
        "formulas": [render(f) for f in c.formulas],
        "models": [model_to_dict(m, t) for m, t in c.models],
    }
    return json.dumps(doc, indent=1, sort_keys=True)
