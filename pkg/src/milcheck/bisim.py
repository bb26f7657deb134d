"""Modal bisimulations between finite models and team bisimilarity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .atoms import default_registry
from .checker import check
from .formula import GenAtom, subformulas, variables
from .kripke import KripkeModel

__all__ = [
    "Bisimulation", "InvarianceError", "largest_bisimulation", "is_bisimulation",
    "teams_bisimilar", "unfold", "unfold_with_origin", "duplicate_worlds",
    "check_invariance", "invariance_expected", "example_models",
]


class InvarianceError(ValueError):
    """The teams handed to :func:`check_invariance` are not bisimilar."""


@dataclass(frozen=True)
class Bisimulation:
    pairs: frozenset

    def __contains__(self, pair):
        return pair in self.pairs

    def __len__(self):
        return len(self.pairs)

    def partners(self, w):
        return sorted(b for a, b in self.pairs if a == w)

    def inverse_partners(self, w2):
        return sorted(a for a, b in self.pairs if b == w2)


def _agreement(m, m2, vars):
    a = m.label_matrix(vars)
    b = m2.label_matrix(vars)
    if not vars:
        return np.ones((m.n_worlds, m2.n_worlds), dtype=np.bool_)
    return (a[:, None, :] == b[None, :, :]).all(axis=2)


def largest_bisimulation(m, m2, vars=None):
    """Greatest bisimulation between ``m`` and ``m2`` with label agreement
    on ``vars`` (all propositions of either model if None)."""
    if vars is None:
        vars = m.propositions | m2.propositions
    vars = sorted(vars)
    z = _agreement(m, m2, vars)
    z = K.refine_bisimulation(z, m.adjacency(), m2.adjacency())
    return Bisimulation(frozenset((int(a), int(b)) for a, b in zip(*np.nonzero(z))))


def is_bisimulation(z, m, m2, vars):
    """Check label agreement and the forward and backward conditions for
    every pair of ``z``."""
    vars = list(vars)
    for w, w2 in z.pairs:
        if any((v in m.labels[w]) != (v in m2.labels[w2]) for v in vars):
            return False
        for u in m.successors(w):
            if not any((u, u2) in z.pairs for u2 in m2.successors(w2)):
                return False
        for u2 in m2.successors(w2):
            if not any((u, u2) in z.pairs for u in m.successors(w)):
                return False
    return True


def teams_bisimilar(z, t, t2):
    t, t2 = frozenset(t), frozenset(t2)
    return all(any((w, w2) in z.pairs for w2 in t2) for w in t) and all(
        any((w, w2) in z.pairs for w in t) for w2 in t2
    )


def unfold_with_origin(m, w, depth):
    """Tree unfolding of ``m`` from ``w`` cut at ``depth``. Returns the tree,
    its root (always 0) and the list mapping tree nodes to worlds of ``m``."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    origin = [w]
    level = [0]
    edges = []
    for _ in range(depth):
        nxt = []
        for node in level:
            for u in m.successors(origin[node]):
                origin.append(u)
                edges.append((node, len(origin) - 1))
                nxt.append(len(origin) - 1)
        level = nxt
    tree = KripkeModel(len(origin), frozenset(edges), tuple(m.labels[o] for o in origin))
    return tree, 0, origin


def unfold(m, w, depth):
    tree, root, _ = unfold_with_origin(m, w, depth)
    return tree, root


def duplicate_worlds(m, worlds):
    """Copy each world in ``worlds``: the copy gets the same labels, the
    same successors and the same predecessors. Returns the new model and the
    bisimulation linking each original world to itself and to its copy."""
    worlds = sorted(set(worlds))
    copy_of = {w: m.n_worlds + i for i, w in enumerate(worlds)}
    edges = set(m.edges)
    for a, b in m.edges:
        for x in ([a] + ([copy_of[a]] if a in copy_of else [])):
            for y in ([b] + ([copy_of[b]] if b in copy_of else [])):
                edges.add((x, y))
    labels = m.labels + tuple(m.labels[w] for w in worlds)
    m2 = KripkeModel(m.n_worlds + len(worlds), frozenset(edges), labels)
    pairs = {(w, w) for w in m.worlds} | {(w, c) for w, c in copy_of.items()}
    return m2, Bisimulation(frozenset(pairs))


def invariance_expected(f, registry=None):
    """Bisimulation invariance is guaranteed when every generalized atom in
    ``f`` is first-order definable; the core atoms always are."""
    registry = registry if registry is not None else default_registry()
    return all(
        g.atom in registry and registry[g.atom].fo_definition is not None
        for g in subformulas(f) if isinstance(g, GenAtom)
    )


def check_invariance(m, t, m2, t2, f, cfg=None, registry=None):
    """Do both sides give the same verdict on ``f``? The teams must be
    bisimilar with respect to the variables of ``f``."""
    z = largest_bisimulation(m, m2, variables(f))
    if not teams_bisimilar(z, t, t2):
        raise InvarianceError("teams are not bisimilar on the formula's variables")
    return check(m, t, f, cfg, registry) == check(m2, t2, f, cfg, registry)


def example_models():
    """Two bisimilar pointed models told apart by the ``zero`` atom: ``w``
    with one successor, ``w'`` with two, every world labelled empty.
    Returns ``(M, M2)``; the distinguished worlds are 0 in both."""
    m = KripkeModel(2, frozenset({(0, 1)}), (frozenset(), frozenset()))
    m2 = KripkeModel(3, frozenset({(0, 1), (0, 2)}), (frozenset(),) * 3)
    return m, m2
