"""Team-semantics model checking.

``check`` decides ``M, T |= phi`` by exhaustive search over the choices the
semantics leaves open: the cover ``T1 ∪ T2 = T`` for a disjunction and the
successor team for a diamond. Verdicts of (subformula, team) obligations are
memoized. Flat subformulas (no dependence-type atoms) are decided pointwise
from a per-world labelling when ``enable_flat_shortcut`` is on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as K
from .atoms import default_registry, eval_atom, team_matrix
from .formula import (
    And, Box, Dep, Diamond, GenAtom, Indep, NegProp, Or, Prop, is_flat,
)
from .kripke import mask_members, mask_team, successor_masks, team_mask

__all__ = [
    "CheckConfig", "BudgetExhausted", "UnregisteredAtomError", "NonFlatError",
    "Checker", "check", "check_with_certificate", "check_flat", "holds_at", "replay",
    "LeafCert", "FlatCert", "AndCert", "OrCert", "DiamondCert", "BoxCert",
]


class BudgetExhausted(RuntimeError):
    """The step budget ran out before a verdict was reached."""

    def __init__(self, steps):
        super().__init__(f"enumeration budget exhausted after {steps} steps")
        self.steps = steps


class UnregisteredAtomError(KeyError):
    pass


class NonFlatError(ValueError):
    pass


@dataclass(frozen=True)
class CheckConfig:
    enable_flat_shortcut: bool = True
    enable_memo: bool = True
    max_enumeration_budget: Optional[int] = None

    def __post_init__(self):
        b = self.max_enumeration_budget
        if b is not None and b <= 0:
            raise ValueError("max_enumeration_budget must be positive")


# ------------------------------------------------------------ certificates


@dataclass(frozen=True)
class LeafCert:
    """Literal or atom verdict on ``team``."""

    team: frozenset


@dataclass(frozen=True)
class FlatCert:
    """Flat subformula decided world by world on ``team``."""

    team: frozenset


@dataclass(frozen=True)
class AndCert:
    team: frozenset
    left: object
    right: object


@dataclass(frozen=True)
class OrCert:
    team: frozenset
    left_team: frozenset
    right_team: frozenset
    left: object
    right: object


@dataclass(frozen=True)
class DiamondCert:
    team: frozenset
    witness: frozenset
    body: object


@dataclass(frozen=True)
class BoxCert:
    team: frozenset
    body: object


# ------------------------------------------------------------ checker


def _submasks_desc(m):
    s = m
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & m


class Checker:
    """Reusable checker for one model and one formula; memo entries survive
    across calls to :meth:`prove`."""

    def __init__(self, model, formula, cfg=None, registry=None):
        self.model = model
        self.formula = formula
        self.cfg = cfg or CheckConfig()
        self.registry = registry if registry is not None else default_registry()
        self.steps = 0
        self.memo = {}
        self._classical = {}
        self._ids = {}
        self.nodes = []
        self.flat = []
        self.root = self._compile(formula)

    # compile ---------------------------------------------------------

    def _codes(self, vars):
        out = np.zeros(self.model.n_worlds, dtype=np.int64)
        for bit, v in enumerate(vars):
            for w in mask_members(self.model.var_mask(v)):
                out[w] |= 1 << bit
        return out

    def _compile(self, f):
        nid = self._ids.get(f)
        if nid is not None:
            return nid
        if isinstance(f, (Prop, NegProp)):
            node = ("prop" if isinstance(f, Prop) else "neg", self.model.var_mask(f.name))
        elif isinstance(f, (And, Or)):
            node = ("and" if isinstance(f, And) else "or",
                    self._compile(f.left), self._compile(f.right))
        elif isinstance(f, (Diamond, Box)):
            node = ("dia" if isinstance(f, Diamond) else "box", self._compile(f.body))
        elif isinstance(f, Dep):
            node = ("dep", self._codes(f.determiners), self._codes([f.determined]))
        elif isinstance(f, Indep):
            node = ("indep", self._codes(f.left), self._codes(f.cond), self._codes(f.right))
        elif isinstance(f, GenAtom):
            if f.atom not in self.registry:
                raise UnregisteredAtomError(f"atom {f.atom!r} is not registered")
            atom = self.registry[f.atom]
            if not atom.admits(len(f.args)):
                raise ValueError(f"atom {f.atom!r} does not admit width {len(f.args)}")
            node = ("gen", atom, self.model.label_matrix(list(f.args)))
        else:
            raise TypeError(f"not a formula: {f!r}")
        kind = node[0]
        if kind in ("prop", "neg"):
            flat = True
        elif kind in ("and", "or"):
            flat = self.flat[node[1]] and self.flat[node[2]]
        elif kind in ("dia", "box"):
            flat = self.flat[node[1]]
        else:
            flat = False
        nid = len(self.nodes)
        self.nodes.append(node)
        self.flat.append(flat)
        self._ids[f] = nid
        return nid

    # helpers ---------------------------------------------------------

    def _tick(self):
        self.steps += 1
        b = self.cfg.max_enumeration_budget
        if b is not None and self.steps > b:
            raise BudgetExhausted(self.steps)

    def _succ(self, t):
        out = 0
        sm = self.model.succ_masks
        for w in mask_members(t):
            out |= sm[w]
        return out

    def classical(self, nid):
        """Bitmask of worlds satisfying flat node ``nid`` under single-world
        semantics."""
        got = self._classical.get(nid)
        if got is not None:
            return got
        node = self.nodes[nid]
        kind = node[0]
        full = self.model.full_mask
        sm = self.model.succ_masks
        if kind == "prop":
            s = node[1]
        elif kind == "neg":
            s = full & ~node[1]
        elif kind == "and":
            s = self.classical(node[1]) & self.classical(node[2])
        elif kind == "or":
            s = self.classical(node[1]) | self.classical(node[2])
        elif kind == "dia":
            b = self.classical(node[1])
            s = 0
            for w in range(self.model.n_worlds):
                if sm[w] & b:
                    s |= 1 << w
        elif kind == "box":
            b = self.classical(node[1])
            s = 0
            for w in range(self.model.n_worlds):
                if not sm[w] & ~b:
                    s |= 1 << w
        else:
            raise NonFlatError("classical labelling needs a flat subformula")
        self._classical[nid] = s
        return s

    # search ----------------------------------------------------------

    def prove(self, nid=None, t=0):
        """Certificate for node ``nid`` on team bitmask ``t``, or None."""
        if nid is None:
            nid = self.root
        key = (nid, t)
        if self.cfg.enable_memo and key in self.memo:
            return self.memo[key]
        self._tick()
        cert = self._prove(nid, t)
        if self.cfg.enable_memo:
            self.memo[key] = cert
        return cert

    def _prove(self, nid, t):
        node = self.nodes[nid]
        kind = node[0]
        shortcut = self.cfg.enable_flat_shortcut
        if shortcut and self.flat[nid] and kind not in ("prop", "neg"):
            return FlatCert(mask_team(t)) if not t & ~self.classical(nid) else None
        if kind == "prop":
            return LeafCert(mask_team(t)) if not t & ~node[1] else None
        if kind == "neg":
            return LeafCert(mask_team(t)) if not t & node[1] else None
        if kind == "and":
            a = self.prove(node[1], t)
            if a is None:
                return None
            b = self.prove(node[2], t)
            return AndCert(mask_team(t), a, b) if b is not None else None
        if kind == "or":
            return self._prove_or(node[1], node[2], t)
        if kind == "dia":
            return self._prove_diamond(node[1], t)
        if kind == "box":
            b = self.prove(node[1], self._succ(t))
            return BoxCert(mask_team(t), b) if b is not None else None
        rows = mask_members(t)
        if kind == "dep":
            ok = K.dep_holds(node[1][rows], node[2][rows])
        elif kind == "indep":
            ok = K.indep_holds(node[1][rows], node[2][rows], node[3][rows])
        else:
            ok = eval_atom(node[1], node[2][rows])
        return LeafCert(mask_team(t)) if ok else None

    def _prove_or(self, left, right, t):
        team = mask_team(t)
        if self.cfg.enable_flat_shortcut and (self.flat[left] or self.flat[right]):
            # a flat disjunct is downward closed, so it can take every team
            # world it satisfies and the other side must cover the rest
            if self.flat[right]:
                sat = t & self.classical(right)
                base = t & ~sat
                for s in _submasks_desc(sat):
                    c = self.prove(left, base | s)
                    if c is not None:
                        return OrCert(team, mask_team(base | s), mask_team(sat), c, FlatCert(mask_team(sat)))
                return None
            sat = t & self.classical(left)
            base = t & ~sat
            for s in _submasks_desc(sat):
                c = self.prove(right, base | s)
                if c is not None:
                    return OrCert(team, mask_team(sat), mask_team(base | s), FlatCert(mask_team(sat)), c)
            return None
        for t1 in _submasks_desc(t):
            c1 = self.prove(left, t1)
            if c1 is None:
                continue
            rest = t & ~t1
            for s in _submasks_desc(t1):
                c2 = self.prove(right, rest | s)
                if c2 is not None:
                    return OrCert(team, mask_team(t1), mask_team(rest | s), c1, c2)
        return None

    def _prove_diamond(self, body, t):
        team = mask_team(t)
        sm = self.model.succ_masks
        members = mask_members(t)
        if any(sm[w] == 0 for w in members):
            return None
        if self.cfg.enable_flat_shortcut and self.flat[body]:
            sat = self.classical(body)
            witness = 0
            for w in members:
                hit = sm[w] & sat
                if not hit:
                    return None
                witness |= hit & -hit
            return DiamondCert(team, mask_team(witness), FlatCert(mask_team(witness)))
        for t2 in successor_masks(self.model, t):
            self._tick()
            c = self.prove(body, t2)
            if c is not None:
                return DiamondCert(team, mask_team(t2), c)
        return None


def check_with_certificate(m, team, f, cfg=None, registry=None):
    """``(verdict, certificate)``; the certificate is None iff the verdict
    is false. Raises :class:`BudgetExhausted` when the budget runs out."""
    t = team_mask(m.check_team(team))
    cert = Checker(m, f, cfg, registry).prove(None, t)
    return cert is not None, cert


def check(m, team, f, cfg=None, registry=None):
    return check_with_certificate(m, team, f, cfg, registry)[0]


# ------------------------------------------------------------ classical


def holds_at(m, w, f):
    """Single-world modal semantics of a flat formula."""
    if isinstance(f, Prop):
        return f.name in m.labels[w]
    if isinstance(f, NegProp):
        return f.name not in m.labels[w]
    if isinstance(f, And):
        return holds_at(m, w, f.left) and holds_at(m, w, f.right)
    if isinstance(f, Or):
        return holds_at(m, w, f.left) or holds_at(m, w, f.right)
    if isinstance(f, Diamond):
        return any(holds_at(m, u, f.body) for u in m.successors(w))
    if isinstance(f, Box):
        return all(holds_at(m, u, f.body) for u in m.successors(w))
    raise NonFlatError(f"not a flat formula: {f!r}")


def check_flat(m, team, f):
    if not is_flat(f):
        raise NonFlatError("check_flat needs a formula without dependence-type atoms")
    return all(holds_at(m, w, f) for w in m.check_team(team))


# ------------------------------------------------------------ replay


def _agree(m, w, v, vars):
    return all((x in m.labels[w]) == (x in m.labels[v]) for x in vars)


def _dep_direct(m, team, dets, q):
    return all(
        _agree(m, w, v, [q]) for w in team for v in team if _agree(m, w, v, dets)
    )


def _indep_direct(m, team, left, cond, right):
    for w in team:
        for v in team:
            if not _agree(m, w, v, cond):
                continue
            if not any(
                _agree(m, u, w, cond) and _agree(m, u, w, left) and _agree(m, u, v, right)
                for u in team
            ):
                return False
    return True


def replay(m, f, cert, registry=None):
    """Re-derive a true verdict from ``cert`` without any search."""
    registry = registry if registry is not None else default_registry()
    if cert is None:
        return False
    team = cert.team
    if isinstance(cert, FlatCert):
        return is_flat(f) and all(holds_at(m, w, f) for w in team)
    if isinstance(f, Prop):
        return isinstance(cert, LeafCert) and all(f.name in m.labels[w] for w in team)
    if isinstance(f, NegProp):
        return isinstance(cert, LeafCert) and all(f.name not in m.labels[w] for w in team)
    if isinstance(f, Dep):
        return isinstance(cert, LeafCert) and _dep_direct(m, team, f.determiners, f.determined)
    if isinstance(f, Indep):
        return isinstance(cert, LeafCert) and _indep_direct(m, team, f.left, f.cond, f.right)
    if isinstance(f, GenAtom):
        return isinstance(cert, LeafCert) and eval_atom(
            registry[f.atom], team_matrix(m, team, f.args)
        )
    if isinstance(f, And):
        return (
            isinstance(cert, AndCert)
            and cert.left.team == team and cert.right.team == team
            and replay(m, f.left, cert.left, registry)
            and replay(m, f.right, cert.right, registry)
        )
    if isinstance(f, Or):
        return (
            isinstance(cert, OrCert)
            and cert.left_team | cert.right_team == team
            and cert.left.team == cert.left_team and cert.right.team == cert.right_team
            and replay(m, f.left, cert.left, registry)
            and replay(m, f.right, cert.right, registry)
        )
    succ = frozenset(u for w in team for u in m.successors(w))
    if isinstance(f, Diamond):
        if not isinstance(cert, DiamondCert) or cert.body.team != cert.witness:
            return False
        wit = cert.witness
        if not wit <= succ:
            return False
        if not all(any((w, u) in m.edges for u in wit) for w in team):
            return False
        return replay(m, f.body, cert.body, registry)
    if isinstance(f, Box):
        return (
            isinstance(cert, BoxCert)
            and cert.body.team == succ
            and replay(m, f.body, cert.body, registry)
        )
    return False
