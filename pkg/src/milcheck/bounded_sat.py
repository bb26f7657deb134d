"""Bounded satisfiability: search all models with at most ``max_worlds``
worlds (up to isomorphism) and all teams on them for a witness."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations, product

import numpy as np

from .checker import Checker, check
from .formula import modal_depth, variables
from .kripke import KripkeModel, mask_team

__all__ = ["SatQuery", "bounded_sat", "canonical_enumeration", "count_isomorphism_classes"]

_CHUNK = 1 << 18


@dataclass(frozen=True)
class SatQuery:
    formula: object
    max_worlds: int
    require_nonempty_team: bool = True

    def __post_init__(self):
        if self.max_worlds < 1:
            raise ValueError("max_worlds must be at least 1")


def _stabilizer(codes):
    """All permutations of ``range(n)`` that map each world to one with the
    same label code."""
    blocks = {}
    for w, c in enumerate(codes):
        blocks.setdefault(c, []).append(w)
    groups = list(blocks.values())
    out = []
    for choice in product(*(permutations(g) for g in groups)):
        perm = [0] * len(codes)
        for g, img in zip(groups, choice):
            for a, b in zip(g, img):
                perm[a] = b
        out.append(perm)
    return out


def _minimal_edge_codes(n, perms):
    """Edge codes (bit ``a*n+b`` for edge ``a->b``) that are minimal in
    their orbit under ``perms``."""
    nbits = n * n
    total = 1 << nbits
    src = np.array([a * n + b for a in range(n) for b in range(n)], dtype=np.int64)
    images = [
        np.array([perm[a] * n + perm[b] for a in range(n) for b in range(n)], dtype=np.int64)
        for perm in perms if perm != list(range(n))
    ]
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        bits = (codes[:, None] >> src[None, :]) & 1
        keep = np.ones(len(codes), dtype=bool)
        for img in images:
            moved = (bits << img[None, :]).sum(axis=1)
            keep &= codes <= moved
        yield from codes[keep].tolist()


def canonical_enumeration(n_worlds, vars):
    """All Kripke models with ``n_worlds`` worlds over ``vars``, one per
    isomorphism class.

    Labelings are listed with non-decreasing label codes; for each, the edge
    relations kept are those whose code is least among all renamings that
    preserve the labeling.
    """
    vars = sorted(vars)
    n = n_worlds
    label_sets = [frozenset(v for i, v in enumerate(vars) if (c >> i) & 1) for c in range(1 << len(vars))]
    for codes in combinations_with_replacement(range(1 << len(vars)), n):
        labels = tuple(label_sets[c] for c in codes)
        for ec in _minimal_edge_codes(n, _stabilizer(codes)):
            edges = frozenset(
                (a, b) for a in range(n) for b in range(n) if (ec >> (a * n + b)) & 1
            )
            yield KripkeModel(n, edges, labels)


def count_isomorphism_classes(n_worlds, vars):
    """Unpruned reference: enumerate every labelled model and count distinct
    canonical forms (least image over all world renamings)."""
    vars = sorted(vars)
    n = n_worlds
    seen = set()
    pairs = [(a, b) for a in range(n) for b in range(n)]
    perms = list(permutations(range(n)))
    for labs in product(range(1 << len(vars)), repeat=n):
        for bits in product((0, 1), repeat=len(pairs)):
            edges = [p for p, b in zip(pairs, bits) if b]
            best = None
            for perm in perms:
                inv_labs = [0] * n
                for w in range(n):
                    inv_labs[perm[w]] = labs[w]
                form = (tuple(inv_labs), tuple(sorted((perm[a], perm[b]) for a, b in edges)))
                if best is None or form < best:
                    best = form
            seen.add(best)
    return len(seen)


def _relevant(m, team_mask, depth):
    """True iff every world is reachable from the team within ``depth``
    steps and worlds first reached at step ``depth`` have no successors.
    Models failing this can be shrunk without changing the verdict."""
    seen = team_mask
    frontier = team_mask
    succ = m.succ_masks
    for _ in range(depth):
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= succ[low.bit_length() - 1]
            f ^= low
        frontier = nxt & ~seen
        seen |= nxt
    if seen != m.full_mask:
        return False
    f = frontier if depth > 0 else team_mask
    while f:
        low = f & -f
        if succ[low.bit_length() - 1]:
            return False
        f ^= low
    return True


def bounded_sat(q, cfg=None, registry=None):
    """Smallest witness ``(model, team)`` for ``q.formula`` with at most
    ``q.max_worlds`` worlds, or None.

    Worlds are deepened one at a time; within a size, models come in
    enumeration order and teams in increasing bitmask order, so the result
    is reproducible. Every witness is re-verified by :func:`check` before it
    is returned. Budget exhaustion in the checker propagates as
    :class:`milcheck.checker.BudgetExhausted`.
    """
    f = q.formula
    vs = sorted(variables(f))
    md = modal_depth(f)
    for n in range(1, q.max_worlds + 1):
        for m in canonical_enumeration(n, vs):
            checker = None
            first = 1 if q.require_nonempty_team else 0
            for t in range(first, 1 << n):
                if t and not _relevant(m, t, md):
                    continue
                if checker is None:
                    checker = Checker(m, f, cfg, registry)
                if checker.prove(None, t) is not None:
                    team = mask_team(t)
                    if not check(m, team, f, registry=registry):
                        raise AssertionError("bounded_sat witness failed re-verification")
                    return m, team
    return None
