"""First-order syntax over relational vocabularies.

Used for the definitions attached to generalized atoms and for the sentences
produced by :mod:`milcheck.fo_translate`. Variables are plain strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
__all__ = [
    "Atom", "Eq", "Not", "Conj", "Disj", "Implies", "Iff", "Forall", "Exists",
    "TOP", "BOTTOM", "FOSentence", "ESOSentence", "FOStructure",
    "conj", "disj", "free_vars", "predicates", "holds", "fo_size", "substitute",
    "rename_preds", "is_quantifier_free", "has_equality",
]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class Conj:
    parts: tuple


@dataclass(frozen=True)
class Disj:
    parts: tuple


@dataclass(frozen=True)
class Implies:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Iff:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Forall:
    var: str
    body: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


TOP = Conj(())
BOTTOM = Disj(())


def conj(*parts):
    flat = []
    for p in parts:
        if isinstance(p, Conj):
            flat.extend(p.parts)
        else:
            flat.append(p)
    return flat[0] if len(flat) == 1 else Conj(tuple(flat))


def disj(*parts):
    flat = []
    for p in parts:
        if isinstance(p, Disj):
            flat.extend(p.parts)
        else:
            flat.append(p)
    return flat[0] if len(flat) == 1 else Disj(tuple(flat))


@dataclass(frozen=True)
class FOSentence:
    """Prenex sentence: quantifier ``prefix`` of ``("forall"|"exists", var)``
    pairs followed by ``matrix``. Nothing forces the matrix to be
    quantifier-free; :func:`milcheck.fo_translate.verify_prefix` checks."""

    prefix: tuple
    matrix: object

    def as_formula(self):
        f = self.matrix
        for q, v in reversed(self.prefix):
            f = Forall(v, f) if q == "forall" else Exists(v, f)
        return f


@dataclass(frozen=True)
class ESOSentence:
    """``exists Y1 ... Ym`` (unary) in front of a first-order body."""

    so_vars: tuple
    body: FOSentence


@dataclass(frozen=True)
class FOStructure:
    universe: tuple
    relations: dict = field(hash=False, compare=True)

    def rel(self, name):
        return self.relations.get(name, frozenset())


def _children(f):
    if isinstance(f, (Atom, Eq)):
        return ()
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (Conj, Disj)):
        return f.parts
    if isinstance(f, (Implies, Iff)):
        return (f.lhs, f.rhs)
    if isinstance(f, (Forall, Exists)):
        return (f.body,)
    raise TypeError(f"not a first-order formula: {f!r}")


def _walk(f):
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(_children(g))


def fo_size(f):
    return sum(1 + (len(g.args) if isinstance(g, Atom) else 0) for g in _walk(f))


def is_quantifier_free(f):
    return not any(isinstance(g, (Forall, Exists)) for g in _walk(f))


def has_equality(f):
    return any(isinstance(g, Eq) for g in _walk(f))


def predicates(f):
    """``{name: arity}`` of all predicate symbols in ``f``."""
    out = {}
    for g in _walk(f):
        if isinstance(g, Atom):
            out.setdefault(g.pred, len(g.args))
    return out


def free_vars(f, bound=frozenset()):
    if isinstance(f, Atom):
        return frozenset(a for a in f.args if a not in bound)
    if isinstance(f, Eq):
        return frozenset(a for a in (f.left, f.right) if a not in bound)
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body, bound | {f.var})
    out = frozenset()
    for c in _children(f):
        out |= free_vars(c, bound)
    return out


def substitute(f, mapping):
    """Rename free and bound variables according to ``mapping``."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(mapping.get(a, a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(mapping.get(f.left, f.left), mapping.get(f.right, f.right))
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, Conj):
        return Conj(tuple(substitute(p, mapping) for p in f.parts))
    if isinstance(f, Disj):
        return Disj(tuple(substitute(p, mapping) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(substitute(f.lhs, mapping), substitute(f.rhs, mapping))
    if isinstance(f, Iff):
        return Iff(substitute(f.lhs, mapping), substitute(f.rhs, mapping))
    if isinstance(f, Forall):
        return Forall(mapping.get(f.var, f.var), substitute(f.body, mapping))
    if isinstance(f, Exists):
        return Exists(mapping.get(f.var, f.var), substitute(f.body, mapping))
    raise TypeError(f"not a first-order formula: {f!r}")


def rename_preds(f, mapping):
    if isinstance(f, Atom):
        return Atom(mapping.get(f.pred, f.pred), f.args)
    if isinstance(f, Eq):
        return f
    if isinstance(f, Not):
        return Not(rename_preds(f.body, mapping))
    if isinstance(f, Conj):
        return Conj(tuple(rename_preds(p, mapping) for p in f.parts))
    if isinstance(f, Disj):
        return Disj(tuple(rename_preds(p, mapping) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(rename_preds(f.lhs, mapping), rename_preds(f.rhs, mapping))
    if isinstance(f, Iff):
        return Iff(rename_preds(f.lhs, mapping), rename_preds(f.rhs, mapping))
    if isinstance(f, Forall):
        return Forall(f.var, rename_preds(f.body, mapping))
    if isinstance(f, Exists):
        return Exists(f.var, rename_preds(f.body, mapping))
    raise TypeError(f"not a first-order formula: {f!r}")


def holds(f, st, env=None):
    """Tarskian truth of ``f`` in ``st`` under ``env``, by plain recursion."""
    env = env or {}
    if isinstance(f, FOSentence):
        f = f.as_formula()
    if isinstance(f, Atom):
        return tuple(env[a] for a in f.args) in st.rel(f.pred)
    if isinstance(f, Eq):
        return env[f.left] == env[f.right]
    if isinstance(f, Not):
        return not holds(f.body, st, env)
    if isinstance(f, Conj):
        return all(holds(p, st, env) for p in f.parts)
    if isinstance(f, Disj):
        return any(holds(p, st, env) for p in f.parts)
    if isinstance(f, Implies):
        return (not holds(f.lhs, st, env)) or holds(f.rhs, st, env)
    if isinstance(f, Iff):
        return holds(f.lhs, st, env) == holds(f.rhs, st, env)
    if isinstance(f, Forall):
        return all(holds(f.body, st, {**env, f.var: e}) for e in st.universe)
    if isinstance(f, Exists):
        return any(holds(f.body, st, {**env, f.var: e}) for e in st.universe)
    raise TypeError(f"not a first-order formula: {f!r}")

