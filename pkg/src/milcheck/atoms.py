"""Generalized dependence atoms.

An atom of width ``n`` is a row-permutation-invariant set of Boolean
``n``-column matrices. Applied to variables ``p1..pn`` on a team, it holds
iff the team's truth matrix (one row per world, one column per variable)
belongs to the set. Atoms are given by an evaluator on matrices and may
carry a first-order definition over unary predicates ``A1..An``.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .fol import (
    Atom, Conj, Disj, FOSentence, FOStructure, Iff, Implies, Not, conj,
)

__all__ = [
    "GeneralizedAtom", "AtomRegistry", "AtomRegistrationError", "WidthError",
    "team_matrix", "eval_atom", "register_atom", "builtin_atoms", "default_registry",
    "matrix_structure", "team_structure", "indep_definition", "indep_split",
    "validate_permutation_invariance",
]


class AtomRegistrationError(ValueError):
    pass


class WidthError(ValueError):
    pass


@dataclass(frozen=True)
class GeneralizedAtom:
    """A named atom.

    ``width`` fixes a single admissible width; with ``width=None`` the atom
    is a family and ``admits_width`` (default: every width >= 1) says which
    widths are allowed. ``fo_definition(n)`` returns a sentence over
    ``A1..An`` defining the width-``n`` member, or is None.
    """

    name: str
    evaluate: Callable[[np.ndarray], bool]
    width: Optional[int] = None
    admits_width: Optional[Callable[[int], bool]] = None
    fo_definition: Optional[Callable[[int], FOSentence]] = None
    description: str = ""

    def admits(self, n):
        if self.width is not None:
            return n == self.width
        if self.admits_width is not None:
            return bool(self.admits_width(n))
        return n >= 1


def team_matrix(m, team, vars):
    """Truth matrix of ``vars`` on ``team``; rows in ascending world order."""
    rows = sorted(m.check_team(team))
    full = m.label_matrix(list(vars))
    return full[rows, :] if rows else np.zeros((0, len(vars)), dtype=np.uint8)


def eval_atom(a, mat):
    mat = np.asarray(mat, dtype=np.uint8)
    if mat.ndim != 2:
        raise WidthError("truth matrix must be two-dimensional")
    if not a.admits(mat.shape[1]):
        raise WidthError(f"atom {a.name!r} does not admit width {mat.shape[1]}")
    return bool(a.evaluate(mat))


# ------------------------------------------------------------ structures


def matrix_structure(mat):
    """The matrix as a first-order structure: rows are elements, column
    ``i`` (1-based) is the unary relation ``A{i}``."""
    mat = np.asarray(mat)
    universe = tuple(range(mat.shape[0]))
    rels = {
        f"A{j + 1}": frozenset((r,) for r in universe if mat[r, j])
        for j in range(mat.shape[1])
    }
    return FOStructure(universe, rels)


def team_structure(m, team, vars):
    """Team as a structure with universe ``team`` and ``A{i}`` the worlds
    where ``vars[i-1]`` holds."""
    universe = tuple(sorted(team))
    rels = {
        f"A{j + 1}": frozenset((w,) for w in universe if v in m.labels[w])
        for j, v in enumerate(vars)
    }
    return FOStructure(universe, rels)


# ------------------------------------------------------------ definitions


def _a(i, v):
    return Atom(f"A{i}", (v,))


def _eq_block(cols_v, cols_w, v, w):
    """Conjunction of ``A_i(v) <-> A_j(w)`` over paired column indices."""
    return Conj(tuple(Iff(_a(i, v), _a(j, w)) for i, j in zip(cols_v, cols_w)))


def indep_definition(la, lc, lb):
    """Definition of ``left ⊥_cond right`` for list lengths ``la, lc, lb``;
    columns are numbered left, then cond, then right."""
    a = list(range(1, la + 1))
    c = list(range(la + 1, la + lc + 1))
    b = list(range(la + lc + 1, la + lc + lb + 1))
    body = Implies(
        _eq_block(c, c, "x", "y"),
        conj(_eq_block(c, c, "x", "z"), _eq_block(a, a, "x", "z"), _eq_block(b, b, "y", "z")),
    )
    return FOSentence((("forall", "x"), ("forall", "y"), ("exists", "z")), body)


def indep_split(n):
    """Column split ``(left, cond, right)`` for the width-``n`` independence
    atom: thirds when ``n`` is a multiple of 3, otherwise halves with an
    empty conditioning list."""
    if n >= 3 and n % 3 == 0:
        k = n // 3
        return k, k, k
    if n >= 2 and n % 2 == 0:
        return n // 2, 0, n // 2
    raise WidthError(f"independence atom does not admit width {n}")


def _dep_eval(mat):
    n = mat.shape[1]
    return K.dep_holds(K.row_codes(mat, range(n - 1)), K.row_codes(mat, [n - 1]))


def _dep_def(n):
    body = Implies(
        _eq_block(range(1, n), range(1, n), "w", "v"),
        Iff(_a(n, "w"), _a(n, "v")),
    )
    return FOSentence((("forall", "w"), ("forall", "v")), body)


def _indep_eval(mat):
    la, lc, lb = indep_split(mat.shape[1])
    return K.indep_holds(
        K.row_codes(mat, range(la)),
        K.row_codes(mat, range(la, la + lc)),
        K.row_codes(mat, range(la + lc, la + lc + lb)),
    )


def _indep_def(n):
    return indep_definition(*indep_split(n))


def _halves(mat):
    h = mat.shape[1] // 2
    return K.row_codes(mat, range(h)), K.row_codes(mat, range(h, 2 * h))


def _inc_eval(mat):
    return K.inc_holds(*_halves(mat))


def _inc_def(n):
    h = n // 2
    body = _eq_block(range(1, h + 1), range(h + 1, n + 1), "w", "v")
    return FOSentence((("forall", "w"), ("exists", "v")), body)


def _exc_eval(mat):
    return K.exc_holds(*_halves(mat))


def _exc_def(n):
    h = n // 2
    body = Disj(tuple(Iff(_a(i, "w"), Not(_a(h + i, "v"))) for i in range(1, h + 1)))
    return FOSentence((("forall", "w"), ("forall", "v")), body)


def _zero_eval(mat):
    return mat.shape == (1, 1) and mat[0, 0] == 0


def _even(n):
    return n >= 2 and n % 2 == 0


def builtin_atoms():
    return [
        GeneralizedAtom(
            "dep", _dep_eval, fo_definition=_dep_def,
            description="last column is a function of the others",
        ),
        GeneralizedAtom(
            "indep", _indep_eval,
            admits_width=lambda n: (n >= 3 and n % 3 == 0) or _even(n),
            fo_definition=_indep_def,
            description="conditional independence (thirds, or halves with empty condition)",
        ),
        GeneralizedAtom(
            "inc", _inc_eval, admits_width=_even, fo_definition=_inc_def,
            description="inclusion: every left row value occurs as a right row value",
        ),
        GeneralizedAtom(
            "exc", _exc_eval, admits_width=_even, fo_definition=_exc_def,
            description="exclusion: no left row value occurs as a right row value",
        ),
        GeneralizedAtom(
            "zero", _zero_eval, width=1,
            description="the single one-row matrix (0); counts worlds, not FO-definable",
        ),
    ]


# ------------------------------------------------------------ registry


def validate_permutation_invariance(a, *, samples=60, max_rows=6, seed=0):
    """Randomized check that ``a.evaluate`` ignores row order.

    Returns a counterexample ``(matrix, permutation)`` or None.
    """
    rng = np.random.default_rng(seed)
    widths = [n for n in range(1, 9) if a.admits(n)][:4]
    for n in widths:
        for _ in range(samples):
            rows = int(rng.integers(2, max_rows + 1))
            mat = rng.integers(0, 2, size=(rows, n), dtype=np.uint8)
            base = bool(a.evaluate(mat))
            for _ in range(3):
                perm = rng.permutation(rows)
                if bool(a.evaluate(mat[perm])) != base:
                    return mat, perm
    return None


class AtomRegistry(Mapping):
    def __init__(self, atoms=()):
        self._atoms = {}
        for a in atoms:
            self.register(a, validate=False)

    def __getitem__(self, name):
        return self._atoms[name]

    def __iter__(self):
        return iter(self._atoms)

    def __len__(self):
        return len(self._atoms)

    def register(self, a, validate=True):
        if a.name in self._atoms:
            raise AtomRegistrationError(f"atom {a.name!r} is already registered")
        if validate:
            bad = validate_permutation_invariance(a)
            if bad is not None:
                mat, perm = bad
                raise AtomRegistrationError(
                    f"atom {a.name!r} is not invariant under row permutation "
                    f"(matrix {mat.tolist()}, permutation {perm.tolist()})"
                )
        self._atoms[a.name] = a

    def copy(self):
        r = AtomRegistry()
        r._atoms = dict(self._atoms)
        return r


_DEFAULT = None


def default_registry():
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = AtomRegistry(builtin_atoms())
    return _DEFAULT


def register_atom(a, registry=None):
    (registry if registry is not None else default_registry()).register(a)
