"""Translation of team-semantics formulas into existential monadic
second-order sentences ``exists Y1..Ym forall x y exists z1..zk theta``.

The encoding of a model ``(W, R, labels)`` with team ``T`` is the structure
with universe ``W``, binary ``E`` (the edges), unary ``T`` and one unary
``A_p`` per proposition ``p``. :func:`translate` produces a sentence that
holds in that structure iff the team satisfies the formula.

Each subformula is translated relative to the unary predicate standing for
its current team. Disjunction and the modalities introduce a fresh
predicate ``Y`` for the subteam they pass down, together with clauses that
pin ``Y`` to a legal choice: a cover of the team inside it for ``|``, the
exact successor set for ``[]``, and a covering subset of the successors for
``<>``.

With ``literal_clauses=True`` the disjunction and modal clauses are emitted
without the containment conjuncts (``Y`` inside the team, resp. inside the
successor set) and the box clause as the plain biconditional
``(T(x) & E(x,y)) <-> Y(y)``. That variant is kept for comparison only: it
is not equivalent to team satisfaction (see the tests).
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .atoms import default_registry
from .fol import (
    TOP, Atom, Conj, Disj, ESOSentence, Eq, FOSentence, FOStructure,
    Iff, Implies, Not, conj, fo_size, free_vars, has_equality, is_quantifier_free,
    predicates, rename_preds, substitute,
)
from .formula import (
    And, Box, Dep, Diamond, GenAtom, Indep, NegProp, Or, Prop, rewrite_dep_to_indep,
)

__all__ = [
    "TranslationError", "EsoBudgetExhausted", "translate", "translate_atom_definition",
    "verify_prefix", "fo_part", "encode_structure", "eval_eso", "eval_eso_naive",
    "export", "render_eso", "sentence_size", "atom_pred",
]

TEAM = "T"
EDGE = "E"


class TranslationError(ValueError):
    pass


class EsoBudgetExhausted(RuntimeError):
    pass


def atom_pred(p):
    return f"A_{p}"


class _Fresh:
    def __init__(self):
        self.y = 0
        self.z = 0

    def Y(self):
        self.y += 1
        return f"Y{self.y}"

    def z_(self):
        self.z += 1
        return f"z{self.z}"


def _u(pred, v):
    return Atom(pred, (v,))


def _edge(a, b):
    return Atom(EDGE, (a, b))


def _eq(ps, v, w):
    return Conj(tuple(Iff(_u(atom_pred(p), v), _u(atom_pred(p), w)) for p in ps))


def translate_atom_definition(a, args, team_pred, fresh=None):
    """Relativize the first-order definition of atom ``a`` to ``team_pred``
    and instantiate ``A1..An`` with ``args``.

    The definition must be prenex, equality-free, with at most two
    universal quantifiers followed by existential ones. Universals become
    ``x`` and ``y``; existentials become fresh ``z`` variables. Returns an
    :class:`FOSentence` with prefix ``forall x, forall y, exists z...``.
    """
    fresh = fresh or _Fresh()
    if a.fo_definition is None:
        raise TranslationError(f"atom {a.name!r} has no first-order definition")
    if not a.admits(len(args)):
        raise TranslationError(f"atom {a.name!r} does not admit width {len(args)}")
    d = a.fo_definition(len(args))
    if has_equality(d.matrix) or not is_quantifier_free(d.matrix):
        raise TranslationError(f"definition of {a.name!r} is not an equality-free prenex sentence")
    quants = [q for q, _ in d.prefix]
    n_forall = 0
    while n_forall < len(quants) and quants[n_forall] == "forall":
        n_forall += 1
    if n_forall > 2 or any(q != "exists" for q in quants[n_forall:]):
        raise TranslationError(
            f"definition of {a.name!r} has prefix {''.join('A' if q == 'forall' else 'E' for q in quants)}, "
            "need at most two universals followed by existentials"
        )
    allowed = {f"A{i}" for i in range(1, len(args) + 1)}
    if not set(predicates(d.matrix)) <= allowed:
        raise TranslationError(f"definition of {a.name!r} uses predicates outside A1..A{len(args)}")
    mapping = {}
    universals = []
    exists = []
    for (q, v), target in zip(d.prefix, ["x", "y"] + [None] * len(d.prefix)):
        if q == "forall":
            mapping[v] = target
            universals.append(target)
        else:
            z = fresh.z_()
            mapping[v] = z
            exists.append(z)
    body = substitute(d.matrix, mapping)
    body = rename_preds(body, {f"A{i}": atom_pred(p) for i, p in enumerate(args, 1)})
    guard = conj(*[_u(team_pred, v) for v in universals]) if universals else TOP
    body = conj(*[_u(team_pred, z) for z in exists], body)
    clause = Implies(guard, body) if universals else body
    prefix = (("forall", "x"), ("forall", "y")) + tuple(("exists", z) for z in exists)
    return FOSentence(prefix, clause)


def _tr(f, team, fresh, ys, zs, registry, lit=False):
    """Clauses (quantifier-free, over x, y and fresh z's) for ``f`` relative
    to team predicate ``team``."""
    if isinstance(f, Prop):
        return [Implies(_u(team, "x"), _u(atom_pred(f.name), "x"))]
    if isinstance(f, NegProp):
        return [Implies(_u(team, "x"), Not(_u(atom_pred(f.name), "x")))]
    if isinstance(f, And):
        return _tr(f.left, team, fresh, ys, zs, registry, lit) + _tr(f.right, team, fresh, ys, zs, registry, lit)
    if isinstance(f, Or):
        y1, y2 = fresh.Y(), fresh.Y()
        ys.extend([y1, y2])
        out = _tr(f.left, y1, fresh, ys, zs, registry, lit) + _tr(f.right, y2, fresh, ys, zs, registry, lit)
        out.append(Implies(_u(team, "x"), Disj((_u(y1, "x"), _u(y2, "x")))))
        if not lit:
            out.append(Implies(_u(y1, "x"), _u(team, "x")))
            out.append(Implies(_u(y2, "x"), _u(team, "x")))
        return out
    if isinstance(f, Box):
        y = fresh.Y()
        ys.append(y)
        out = _tr(f.body, y, fresh, ys, zs, registry, lit)
        if lit:
            out.append(Iff(Conj((_u(team, "x"), _edge("x", "y"))), _u(y, "y")))
            return out
        z = fresh.z_()
        zs.append(z)
        out.append(Implies(Conj((_u(team, "x"), _edge("x", "y"))), _u(y, "y")))
        out.append(Implies(_u(y, "y"), Conj((_u(team, z), _edge(z, "y")))))
        return out
    if isinstance(f, Diamond):
        y = fresh.Y()
        ys.append(y)
        out = _tr(f.body, y, fresh, ys, zs, registry, lit)
        z1 = fresh.z_()
        zs.append(z1)
        out.append(Implies(_u(team, "x"), Conj((_u(y, z1), _edge("x", z1)))))
        if not lit:
            z2 = fresh.z_()
            zs.append(z2)
            out.append(Implies(_u(y, "y"), Conj((_u(team, z2), _edge(z2, "y")))))
        return out
    if isinstance(f, Indep):
        z = fresh.z_()
        zs.append(z)
        lhs = Conj((_u(team, "x"), _u(team, "y"), _eq(f.cond, "x", "y")))
        rhs = Conj((_u(team, z), _eq(f.cond, "x", z), _eq(f.left, "x", z), _eq(f.right, "y", z)))
        return [Implies(lhs, rhs)]
    if isinstance(f, GenAtom):
        if f.atom not in registry:
            raise TranslationError(f"atom {f.atom!r} is not registered")
        s = translate_atom_definition(registry[f.atom], f.args, team, fresh)
        zs.extend(v for q, v in s.prefix if q == "exists")
        return [s.matrix]
    if isinstance(f, Dep):
        return _tr(rewrite_dep_to_indep(f), team, fresh, ys, zs, registry, lit)
    raise TypeError(f"not a formula: {f!r}")


def translate(f, registry=None, literal_clauses=False):
    """ESO sentence equivalent to ``f`` on encoded structures."""
    registry = registry if registry is not None else default_registry()
    fresh = _Fresh()
    ys, zs = [], []
    clauses = _tr(rewrite_dep_to_indep(f), TEAM, fresh, ys, zs, registry, literal_clauses)
    if not zs:
        zs.append(fresh.z_())
    prefix = (("forall", "x"), ("forall", "y")) + tuple(("exists", z) for z in zs)
    matrix = clauses[0] if len(clauses) == 1 else Conj(tuple(clauses))
    return ESOSentence(tuple(ys), FOSentence(prefix, matrix))


def fo_part(s):
    """First-order part of ``s``; the ``Y`` predicates stay in the
    vocabulary as uninterpreted symbols."""
    return s.body if isinstance(s, ESOSentence) else s


def _terms_ok(f, bound):
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            if not all(isinstance(a, str) and a in bound for a in g.args):
                return False
        elif isinstance(g, Eq):
            return False
        elif isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, (Conj, Disj)):
            stack.extend(g.parts)
        elif isinstance(g, (Implies, Iff)):
            stack.extend((g.lhs, g.rhs))
        else:
            return False
    return True


def verify_prefix(s):
    """True iff the first-order part is ``forall forall exists*`` over a
    quantifier-free, equality-free, function-free matrix whose second-order
    variables are all unary."""
    if isinstance(s, ESOSentence):
        so, body = s.so_vars, s.body
    elif isinstance(s, FOSentence):
        so, body = (), s
    else:
        return False
    prefix = body.prefix
    if len(prefix) < 2 or prefix[0][0] != "forall" or prefix[1][0] != "forall":
        return False
    if any(q != "exists" for q, _ in prefix[2:]):
        return False
    names = [v for _, v in prefix]
    if len(set(names)) != len(names):
        return False
    m = body.matrix
    if not is_quantifier_free(m) or has_equality(m):
        return False
    if not _terms_ok(m, set(names)):
        return False
    arity = predicates(m)
    if any(arity.get(y, 1) != 1 for y in so):
        return False
    return True


def sentence_size(s):
    return len(s.so_vars) + len(s.body.prefix) + fo_size(s.body.matrix)


# ------------------------------------------------------------ structures


def encode_structure(m, team):
    team = m.check_team(team)
    rels = {
        EDGE: frozenset(m.edges),
        TEAM: frozenset((w,) for w in team),
    }
    for p in sorted(m.propositions):
        rels[atom_pred(p)] = frozenset((w,) for w in m.worlds if p in m.labels[w])
    return FOStructure(tuple(m.worlds), rels)


# ------------------------------------------------------------ evaluation


class _Vec:
    """Evaluates a quantifier-free matrix as a boolean array with one batch
    axis (second-order instantiations) followed by one axis per first-order
    variable."""

    def __init__(self, st, so_index, yvals, axes, W):
        self.st = st
        self.so_index = so_index
        self.yvals = yvals  # (B, m, W)
        self.axes = axes
        self.ndim = 1 + len(axes)
        self.W = W
        self.index = {e: i for i, e in enumerate(st.universe)}
        self._unary = {}
        self._binary = {}

    def _place(self, arr, vars_):
        shape = [1] * self.ndim
        for v in vars_:
            shape[self.axes[v]] = self.W
        return arr.reshape(shape)

    def unary(self, pred):
        got = self._unary.get(pred)
        if got is None:
            got = np.zeros(self.W, dtype=np.bool_)
            for (e,) in self.st.rel(pred):
                got[self.index[e]] = True
            self._unary[pred] = got
        return got

    def binary(self, pred):
        got = self._binary.get(pred)
        if got is None:
            got = np.zeros((self.W, self.W), dtype=np.bool_)
            for a, b in self.st.rel(pred):
                got[self.index[a], self.index[b]] = True
            self._binary[pred] = got
        return got

    def ev(self, f):
        if isinstance(f, Atom):
            if len(f.args) == 1:
                (v,) = f.args
                if f.pred in self.so_index:
                    arr = self.yvals[:, self.so_index[f.pred], :]
                    shape = [arr.shape[0]] + [1] * (self.ndim - 1)
                    shape[self.axes[v]] = self.W
                    return arr.reshape(shape)
                return self._place(self.unary(f.pred), [v])
            if len(f.args) == 2:
                return self._pair(self.binary(f.pred), *f.args)
            raise TranslationError(f"unsupported arity {len(f.args)} for {f.pred}")
        if isinstance(f, Eq):
            return self._pair(np.eye(self.W, dtype=np.bool_), f.left, f.right)
        if isinstance(f, Not):
            return ~self.ev(f.body)
        if isinstance(f, Conj):
            out = np.ones([1] * self.ndim, dtype=np.bool_)
            for p in f.parts:
                out = out & self.ev(p)
            return out
        if isinstance(f, Disj):
            out = np.zeros([1] * self.ndim, dtype=np.bool_)
            for p in f.parts:
                out = out | self.ev(p)
            return out
        if isinstance(f, Implies):
            return ~self.ev(f.lhs) | self.ev(f.rhs)
        if isinstance(f, Iff):
            return self.ev(f.lhs) == self.ev(f.rhs)
        raise TranslationError("matrix must be quantifier-free")

    def _pair(self, mat, a, b):
        if a == b:
            return self._place(np.diagonal(mat).copy(), [a])
        ia, ib = self.axes[a], self.axes[b]
        arr = mat if ia < ib else mat.T
        shape = [1] * self.ndim
        shape[ia] = self.W
        shape[ib] = self.W
        return arr.reshape(shape)


def _groups(parts, exist_vars):
    """Partition conjuncts into groups connected by shared existential
    variables; returns ``[(parts, zvars)]``."""
    ev = set(exist_vars)
    groups = []
    for p in parts:
        zs = set(free_vars(p)) & ev
        merged_parts, merged_zs = [p], set(zs)
        rest = []
        for gp, gz in groups:
            if gz & merged_zs:
                merged_parts = gp + merged_parts
                merged_zs |= gz
            else:
                rest.append((gp, gz))
        rest.append((merged_parts, merged_zs))
        groups = rest
    return groups


def eval_eso(s, st, max_assignments=1 << 24):
    """Decide ``st |= s``: is there an interpretation of the unary
    second-order variables making the first-order part true?

    The first-order part is evaluated over all first-order assignments at
    once as numpy boolean arrays. For the ``forall* exists*`` prefix the
    matrix conjuncts are split into groups sharing existential variables;
    second-order variables are then fixed one at a time (all ``2^|W|``
    extensions per surviving partial assignment, batched) and a partial
    assignment is dropped as soon as a group whose predicates are all fixed
    fails. Other prefixes fall back to trying every full assignment.

    Raises :class:`EsoBudgetExhausted` once more than ``max_assignments``
    (partial) assignments would have to be examined.
    """
    if isinstance(s, FOSentence):
        s = ESOSentence((), s)
    ys = list(s.so_vars)
    W = len(st.universe)
    prefix = s.body.prefix
    quants = [q for q, _ in prefix]
    k = 0
    while k < len(quants) and quants[k] == "forall":
        k += 1
    universals = [v for _, v in prefix[:k]]
    matrix = s.body.matrix
    so_index = {y: i for i, y in enumerate(ys)}
    if W == 0:
        return not any(q == "exists" for q in quants)
    if not all(q == "exists" for q in quants[k:]):
        return _eval_unpruned(s, st, so_index, max_assignments)

    parts = list(matrix.parts) if isinstance(matrix, Conj) else [matrix]
    by_level = {}
    for g, zs in _groups(parts, [v for _, v in prefix[k:]]):
        used = [so_index[p] for p in predicates(Conj(tuple(g))) if p in so_index]
        by_level.setdefault(max(used, default=-1), []).append((g, sorted(zs)))

    def survivors(yvals, level):
        keep = np.ones(yvals.shape[0], dtype=np.bool_)
        for g, zs in by_level.get(level, ()):
            cells = W ** (len(universals) + len(zs))
            chunk = max(1, (1 << 22) // cells)
            for start in range(0, yvals.shape[0], chunk):
                sl = slice(start, start + chunk)
                idx = np.nonzero(keep[sl])[0] + start
                if idx.size == 0:
                    continue
                ok = _eval_group(st, so_index, yvals[idx], universals, g, zs, W)
                keep[idx[~ok]] = False
        return keep

    cur = np.zeros((1, 0, W), dtype=np.bool_)
    if not survivors(cur, -1).all():
        return False
    ext = ((np.arange(1 << W)[:, None] >> np.arange(W)[None, :]) & 1).astype(np.bool_)
    seen = 0
    for j in range(len(ys)):
        B = cur.shape[0]
        seen += B << W
        if seen > max_assignments:
            raise EsoBudgetExhausted(
                f"more than {max_assignments} partial second-order assignments"
            )
        new = np.empty((B << W, j + 1, W), dtype=np.bool_)
        new[:, :j, :] = np.repeat(cur, 1 << W, axis=0)
        new[:, j, :] = np.tile(ext, (B, 1))
        cur = new[survivors(new, j)]
        if cur.shape[0] == 0:
            return False
    return True


def _eval_group(st, so_index, yvals, universals, parts, zs, W):
    B = yvals.shape[0]
    axes = {v: i + 1 for i, v in enumerate(universals)}
    for j, z in enumerate(zs):
        axes[z] = 1 + len(universals) + j
    f = parts[0] if len(parts) == 1 else Conj(tuple(parts))
    arr = _Vec(st, so_index, yvals, axes, W).ev(f)
    arr = np.broadcast_to(arr, (B,) + (W,) * (len(universals) + len(zs)))
    for i in range(len(universals) + len(zs)):
        arr = arr.any(axis=-1) if i < len(zs) else arr.all(axis=-1)
    return arr


def _eval_unpruned(s, st, so_index, max_assignments):
    ys = s.so_vars
    W = len(st.universe)
    prefix = s.body.prefix
    total_bits = len(ys) * W
    if total_bits > 62 or (1 << total_bits) > max_assignments:
        raise EsoBudgetExhausted(
            f"{len(ys)} second-order variables over {W} elements exceed the budget"
        )
    axes = {v: i + 1 for i, (_, v) in enumerate(prefix)}
    chunk = max(1, (1 << 22) // W ** len(prefix))
    n_total = 1 << total_bits
    for start in range(0, n_total, chunk):
        idx = np.arange(start, min(n_total, start + chunk), dtype=np.int64)
        bits = ((idx[:, None] >> np.arange(total_bits, dtype=np.int64)[None, :]) & 1).astype(np.bool_)
        yvals = bits.reshape(len(idx), len(ys), W)
        arr = _Vec(st, so_index, yvals, axes, W).ev(s.body.matrix)
        arr = np.broadcast_to(arr, (len(idx),) + (W,) * len(prefix))
        for i in range(len(prefix), 0, -1):
            arr = arr.any(axis=i) if prefix[i - 1][0] == "exists" else arr.all(axis=i)
        if arr.any():
            return True
    return False


def eval_eso_naive(s, st):
    """Reference evaluation by plain recursion; only for tiny inputs."""
    from .fol import holds

    if isinstance(s, FOSentence):
        s = ESOSentence((), s)
    ys = list(s.so_vars)
    U = st.universe
    for choice in product((False, True), repeat=len(ys) * len(U)):
        rels = dict(st.relations)
        for j, y in enumerate(ys):
            rels[y] = frozenset(
                (e,) for i, e in enumerate(U) if choice[j * len(U) + i]
            )
        if holds(s.body, FOStructure(U, rels)):
            return True
    return False


# ------------------------------------------------------------ export


def _tptp_pred(name):
    return name[0].lower() + name[1:] if name[0].isupper() else name


def _tptp_var(v):
    return v[0].upper() + v[1:]


def _tptp(f):
    if isinstance(f, Atom):
        return f"{_tptp_pred(f.pred)}({','.join(_tptp_var(a) for a in f.args)})"
    if isinstance(f, Not):
        return f"~ {_tptp(f.body)}"
    if isinstance(f, Conj):
        if not f.parts:
            return "$true"
        return "(" + " & ".join(_tptp(p) for p in f.parts) + ")"
    if isinstance(f, Disj):
        if not f.parts:
            return "$false"
        return "(" + " | ".join(_tptp(p) for p in f.parts) + ")"
    if isinstance(f, Implies):
        return f"({_tptp(f.lhs)} => {_tptp(f.rhs)})"
    if isinstance(f, Iff):
        return f"({_tptp(f.lhs)} <=> {_tptp(f.rhs)})"
    raise TranslationError(f"cannot export {f!r}")


def _smt(f):
    if isinstance(f, Atom):
        return f"({f.pred} {' '.join(f.args)})"
    if isinstance(f, Not):
        return f"(not {_smt(f.body)})"
    if isinstance(f, Conj):
        if not f.parts:
            return "true"
        return "(and " + " ".join(_smt(p) for p in f.parts) + ")"
    if isinstance(f, Disj):
        if not f.parts:
            return "false"
        return "(or " + " ".join(_smt(p) for p in f.parts) + ")"
    if isinstance(f, Implies):
        return f"(=> {_smt(f.lhs)} {_smt(f.rhs)})"
    if isinstance(f, Iff):
        return f"(= {_smt(f.lhs)} {_smt(f.rhs)})"
    raise TranslationError(f"cannot export {f!r}")


def _vocabulary(s):
    preds = dict(predicates(s.body.matrix))
    preds.setdefault(TEAM, 1)
    preds.setdefault(EDGE, 2)
    for y in s.so_vars:
        preds.setdefault(y, 1)

    def key(name):
        if name == TEAM:
            return (0, 0, name)
        if name == EDGE:
            return (1, 0, name)
        if name in s.so_vars:
            return (3, int(name[1:]) if name[1:].isdigit() else 0, name)
        return (2, 0, name)

    return [(p, preds[p]) for p in sorted(preds, key=key)]


def export(s, fmt):
    """TPTP FOF or SMT-LIB 2 text for the first-order part of ``s``.

    The second-order variables become uninterpreted unary predicates, which
    preserves satisfiability.
    """
    if not verify_prefix(s):
        raise TranslationError("export needs a sentence in the forall-forall-exists* class")
    body = fo_part(s)
    so = s.so_vars if isinstance(s, ESOSentence) else ()
    vocab = _vocabulary(s if isinstance(s, ESOSentence) else ESOSentence((), s))
    if fmt == "tptp":
        lines = ["% milcheck translation: first-order part, second-order predicates free"]
        if so:
            lines.append("% second-order: " + " ".join(_tptp_pred(y) for y in so))
        uni = [_tptp_var(v) for q, v in body.prefix if q == "forall"]
        ex = [_tptp_var(v) for q, v in body.prefix if q == "exists"]
        text = _tptp(body.matrix)
        if ex:
            text = f"? [{','.join(ex)}] : {text}"
        text = f"! [{','.join(uni)}] : ({text})"
        lines.append(f"fof(mil_translation, axiom, ({text})).")
        return "\n".join(lines) + "\n"
    if fmt == "smtlib":
        lines = ["; milcheck translation: first-order part, second-order predicates free",
                 "(set-logic UF)", "(declare-sort W 0)"]
        for p, ar in vocab:
            lines.append(f"(declare-fun {p} ({' '.join(['W'] * ar)}) Bool)")
        uni = " ".join(f"({v} W)" for q, v in body.prefix if q == "forall")
        ex = " ".join(f"({v} W)" for q, v in body.prefix if q == "exists")
        text = _smt(body.matrix)
        if ex:
            text = f"(exists ({ex}) {text})"
        lines.append(f"(assert (forall ({uni}) {text}))")
        lines.append("(check-sat)")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unsupported export format {fmt!r} (use 'tptp' or 'smtlib')")


def _text(f):
    if isinstance(f, Atom):
        return f"{f.pred}({','.join(f.args)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Not):
        return f"~{_text(f.body)}"
    if isinstance(f, Conj):
        return "(" + " & ".join(_text(p) for p in f.parts) + ")" if f.parts else "true"
    if isinstance(f, Disj):
        return "(" + " | ".join(_text(p) for p in f.parts) + ")" if f.parts else "false"
    if isinstance(f, Implies):
        return f"({_text(f.lhs)} -> {_text(f.rhs)})"
    if isinstance(f, Iff):
        return f"({_text(f.lhs)} <-> {_text(f.rhs)})"
    raise TranslationError(f"cannot render {f!r}")


def render_eso(s):
    """Plain-text form, one top-level conjunct per line."""
    if isinstance(s, FOSentence):
        s = ESOSentence((), s)
    head = ""
    if s.so_vars:
        head = "exists " + " ".join(s.so_vars) + " . "
    for q, v in s.body.prefix:
        head += f"{'forall' if q == 'forall' else 'exists'} {v} . "
    m = s.body.matrix
    parts = m.parts if isinstance(m, Conj) and m.parts else (m,)
    return head + "\n  " + "\n  & ".join(_text(p) for p in parts) + "\n"
