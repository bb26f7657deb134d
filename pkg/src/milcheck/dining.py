"""Dining cryptographers case study.

The protocol is unfolded into a three-layer Kripke model: a root ``q0``,
one world per payer (the NSA or cryptographer ``i``) and, below each payer,
one final world per vector of shared random bits. Cryptographer indices are
taken modulo ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .formula import (
    And, Box, Diamond, GenAtom, Indep, NegProp, Or, Prop, conjunction, conjuncts,
    is_flat, modal_depth, subformulas, variables,
)
from .kripke import KripkeModel

__all__ = [
    "DcInstance", "bit_var", "pay_var", "announce_var", "knowledge_vars", "build_model",
    "phi_global", "phi_local", "anonymity_formula", "verify_proposition",
    "consistent_assignments", "collapse", "succinct_family", "succinct_chain",
    "min_branching", "restrict_conjuncts", "NSA",
]

NSA = "p_NSA"


def pay_var(i):
    return f"p_{i}"


def announce_var(i):
    return f"announce_{i}"


def bit_var(n, i, j):
    """Name of the bit shared by neighbours ``i`` and ``j``."""
    i, j = i % n, j % n
    if j == (i + 1) % n:
        return f"bit_{i}_{j}"
    if i == (j + 1) % n:
        return f"bit_{j}_{i}"
    raise ValueError(f"cryptographers {i} and {j} are not neighbours")


def knowledge_vars(n, i):
    """Ordered knowledge set of cryptographer ``i``: own payment bit, the
    two shared bits, and every other cryptographer's announcement."""
    return [pay_var(i), bit_var(n, i, i - 1), bit_var(n, i, i + 1)] + [
        announce_var(j) for j in range(n) if j != i
    ]


@dataclass(frozen=True)
class DcInstance:
    n: int
    model: KripkeModel
    root: int
    payers: tuple
    finals: dict

    @property
    def final_worlds(self):
        return sorted(self.finals)


def build_model(n):
    """The protocol model for ``n >= 3`` cryptographers.

    World 0 is ``q0``; worlds ``1..n+1`` are the payer worlds (NSA first);
    final worlds follow in (payer, bit vector) order. Bit ``i`` of the
    vector is ``bit_{i,i+1}``. ``finals`` maps each final world to its
    ``(payer, bits)`` where payer is None for the NSA.
    """
    if n < 3:
        raise ValueError("the protocol needs at least 3 cryptographers")
    payers = [None] + list(range(n))
    labels = [frozenset()]
    edges = []
    payer_worlds = []
    for a, payer in enumerate(payers):
        w = 1 + a
        payer_worlds.append(w)
        labels.append(frozenset({NSA if payer is None else pay_var(payer)}))
        edges.append((0, w))
    finals = {}
    for a, payer in enumerate(payers):
        paid = NSA if payer is None else pay_var(payer)
        for b in range(2 ** n):
            w = 1 + len(payers) + a * 2 ** n + b
            bits = tuple((b >> i) & 1 for i in range(n))
            ls = {paid}
            for i in range(n):
                if bits[i]:
                    ls.add(bit_var(n, i, i + 1))
            for i in range(n):
                p = 1 if payer == i else 0
                if p ^ bits[(i - 1) % n] ^ bits[i]:
                    ls.add(announce_var(i))
            labels.append(frozenset(ls))
            edges.append((payer_worlds[a], w))
            finals[w] = (payer, bits)
    model = KripkeModel(len(labels), frozenset(edges), tuple(labels))
    return DcInstance(n, model, 0, tuple(payer_worlds), finals)


def _compat(a, b):
    return Diamond(Diamond(And(a, b)))


def _all_combinations(v, p):
    return [
        _compat(Prop(v), Prop(p)),
        _compat(Prop(v), NegProp(p)),
        _compat(NegProp(v), Prop(p)),
        _compat(NegProp(v), NegProp(p)),
    ]


def phi_global(n):
    """Every single observed variable is compatible with both values of
    every payment bit; every pair of payment bits shows all combinations
    except both set."""
    parts = []
    observed = [bit_var(n, i, i + 1) for i in range(n)] + [announce_var(i) for i in range(n)]
    for v in observed:
        for k in range(n):
            parts.extend(_all_combinations(v, pay_var(k)))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            pi, pj = pay_var(i), pay_var(j)
            parts.append(_compat(Prop(pi), NegProp(pj)))
            parts.append(_compat(NegProp(pi), Prop(pj)))
            parts.append(_compat(NegProp(pi), NegProp(pj)))
    return conjunction(parts)


def phi_local(n, i, k):
    """Box-box over the chain ``V1 ⊥ V2, V1..2 ⊥ V3, ...`` of cryptographer
    ``i``'s knowledge set, each conditioned on ``p_k``."""
    if i == k:
        raise ValueError("phi_local needs i != k")
    if not (0 <= i < n and 0 <= k < n):
        raise ValueError("cryptographer index out of range")
    kv = knowledge_vars(n, i)
    cond = (pay_var(k),)
    chain = [Indep(tuple(kv[:j]), cond, (kv[j],)) for j in range(1, len(kv))]
    return Box(Box(conjunction(chain)))


def anonymity_formula(n):
    parts = [phi_global(n)]
    for i in range(n):
        for k in range(n):
            if i != k:
                parts.append(phi_local(n, i, k))
    return conjunction(parts)


# ------------------------------------------------------------ proposition


def consistent_assignments(n, i):
    """Observations ``I`` of cryptographer ``i`` (on the knowledge set plus
    ``announce_i``) that follow the protocol, have ``p_i = 0`` and an odd
    number of announcements."""
    kv = knowledge_vars(n, i)
    own = announce_var(i)
    for vals in product((0, 1), repeat=len(kv)):
        asg = dict(zip(kv, vals))
        if asg[pay_var(i)] != 0:
            continue
        asg[own] = asg[pay_var(i)] ^ asg[bit_var(n, i, i - 1)] ^ asg[bit_var(n, i, i + 1)]
        if sum(asg[announce_var(j)] for j in range(n)) % 2 != 1:
            continue
        yield asg


def _matches(labels, asg):
    return all((v in labels) == bool(val) for v, val in asg.items())


def verify_proposition(inst, detail=False):
    """Direct check of the anonymity condition on the team of worlds two
    steps below the root: for all ``i != k`` and every consistent
    observation ``I`` of ``i`` there are worlds agreeing with ``I`` where
    ``p_k`` is true and where it is false.

    With ``detail=True`` returns ``(ok, failures)`` where ``failures`` lists
    ``(i, k, I)`` triples lacking a witness.
    """
    m = inst.model
    succ = {inst.root}
    for _ in range(2):
        succ = {u for w in succ for u in m.successors(w)}
    team = sorted(succ)
    failures = []
    n = inst.n
    for i in range(n):
        for asg in consistent_assignments(n, i):
            hits = [w for w in team if _matches(m.labels[w], asg)]
            for k in range(n):
                if k == i:
                    continue
                pk = pay_var(k)
                pos = any(pk in m.labels[w] for w in hits)
                neg = any(pk not in m.labels[w] for w in hits)
                if not (pos and neg):
                    failures.append((i, k, asg))
                    if not detail:
                        return False
    return (not failures, failures) if detail else not failures


# ------------------------------------------------------------ succinctness


def collapse(f):
    """Replace every ``<><>`` by ``<>`` and every ``[][]`` by ``[]``."""
    if isinstance(f, Diamond):
        body = f.body.body if isinstance(f.body, Diamond) else f.body
        return Diamond(collapse(body))
    if isinstance(f, Box):
        body = f.body.body if isinstance(f.body, Box) else f.body
        return Box(collapse(body))
    if isinstance(f, And):
        return And(collapse(f.left), collapse(f.right))
    if isinstance(f, Or):
        return Or(collapse(f.left), collapse(f.right))
    return f


def succinct_family(i):
    """Anonymity formula for ``i`` cryptographers with modal depth 1."""
    if i < 3:
        raise ValueError("succinct_family needs i >= 3")
    return collapse(anonymity_formula(i))


def succinct_chain(i, secret="s", prefix="v"):
    """Small member of the same pattern: ``i`` observed bits ``v1..vi`` and
    one secret ``s``. Each bit must be compatible with both secret values
    in one step, and under the box the observed bits must be chained
    independent given the secret. Every root satisfying it has at least
    ``2 ** (i + 1)`` successors."""
    if i < 1:
        raise ValueError("succinct_chain needs i >= 1")
    vs = [f"{prefix}{j}" for j in range(1, i + 1)]
    parts = []
    for v in vs:
        for a in (Prop(v), NegProp(v)):
            for b in (Prop(secret), NegProp(secret)):
                parts.append(Diamond(And(a, b)))
    chain = [Indep(tuple(vs[:j]), (secret,), (vs[j],)) for j in range(1, i)]
    if chain:
        parts.append(Box(conjunction(chain)))
    return conjunction(parts)


def restrict_conjuncts(f, allowed):
    """Conjunction of the top-level conjuncts of ``f`` whose variables all
    lie in ``allowed``; None if there are none."""
    keep = [g for g in conjuncts(f) if variables(g) <= frozenset(allowed)]
    return conjunction(keep) if keep else None


def _root_vars(f):
    """Variables occurring outside every modal operator."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (And, Or)):
            stack.extend((g.left, g.right))
        elif isinstance(g, (Diamond, Box)):
            continue
        else:
            out |= variables(g)
    return sorted(out)


def min_branching(f, bound, cfg=None, registry=None):
    """Least out-degree of the root over pointed models ``M, {root}``
    satisfying ``f`` with at most ``bound`` worlds; None if there is none.

    Formulas of modal depth at most 1 whose atoms are all first-order
    definable are searched over one-step trees: root plus a set of
    distinctly labelled leaves. This is exact for such formulas because
    merging equally labelled successors or unfolding the root preserves
    them. Any other formula falls back to :func:`bounded_min_branching`.
    """
    from .atoms import default_registry
    from .checker import Checker, holds_at
    from .kripke import team_mask

    registry = registry if registry is not None else default_registry()
    fo_ok = all(
        registry[g.atom].fo_definition is not None
        for g in subformulas(f) if isinstance(g, GenAtom)
    )
    if modal_depth(f) > 1 or not fo_ok:
        return bounded_min_branching(f, bound, cfg, registry)
    vs = sorted(variables(f))
    rvs = _root_vars(f)
    assignments = [frozenset(c) for r in range(len(vs) + 1) for c in combinations(vs, r)]
    root_labels = [frozenset(c) for r in range(len(rvs) + 1) for c in combinations(rvs, r)]
    # a top-level <>psi with flat psi needs some leaf satisfying psi
    needs = []
    for g in conjuncts(f):
        if isinstance(g, Diamond) and is_flat(g.body):
            hit = 0
            for j, a in enumerate(assignments):
                if holds_at(KripkeModel(1, frozenset(), (a,)), 0, g.body):
                    hit |= 1 << j
            needs.append(hit)
    index = {a: j for j, a in enumerate(assignments)}
    for k in range(0, bound):
        for leaves in combinations(assignments, k):
            chosen = 0
            for a in leaves:
                chosen |= 1 << index[a]
            if any(not (chosen & h) for h in needs):
                continue
            for rl in root_labels:
                m = KripkeModel(
                    k + 1,
                    frozenset((0, j) for j in range(1, k + 1)),
                    (rl,) + tuple(leaves),
                )
                if Checker(m, f, cfg, registry).prove(None, team_mask({0})) is not None:
                    return k
    return None


def bounded_min_branching(f, bound, cfg=None, registry=None):
    """:func:`min_branching` by plain enumeration of all models up to
    isomorphism with at most ``bound`` worlds."""
    from .bounded_sat import canonical_enumeration
    from .checker import Checker

    vs = sorted(variables(f))
    best = None
    for n in range(1, bound + 1):
        for m in canonical_enumeration(n, vs):
            checker = Checker(m, f, cfg, registry)
            for w in range(n):
                deg = len(m.successors(w))
                if best is not None and deg >= best:
                    continue
                if checker.prove(None, 1 << w) is not None:
                    best = deg
    return best
