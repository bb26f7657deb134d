"""Formula syntax for modal logic with dependence, independence and
generalized atoms.

Formulas are immutable trees in negation normal form. Negation only occurs
on propositions (``NegProp``); there is no general negation operator.

Concrete syntax::

    formula := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := '<>' unary | '[]' unary | '~' NAME | atom | '(' formula ')'
    atom    := NAME
             | 'dep' '(' [names] ';' NAME ')'
             | 'indep' '(' names ';' [names] ';' names ')'
             | 'inc' '(' names ';' names ')'
             | 'exc' '(' names ';' names ')'
             | 'D' '[' NAME ']' '(' [names] ')'
    names   := NAME (',' NAME)*

``&`` binds tighter than ``|``; both associate to the left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

__all__ = [
    "Prop", "NegProp", "And", "Or", "Diamond", "Box", "Dep", "Indep", "GenAtom",
    "Formula", "FormulaSyntaxError", "UnknownAtomError", "ArityError",
    "parse", "render", "modal_depth", "is_flat", "rewrite_dep_to_indep",
    "variables", "subformulas", "size", "conjunction", "conjuncts",
]

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


def _check_name(v):
    if not isinstance(v, str) or not NAME_RE.match(v):
        raise ValueError(f"invalid variable name: {v!r}")
    return v


def _names(vs):
    return tuple(_check_name(v) for v in vs)


@dataclass(frozen=True)
class Prop:
    name: str

    def __post_init__(self):
        _check_name(self.name)


@dataclass(frozen=True)
class NegProp:
    name: str

    def __post_init__(self):
        _check_name(self.name)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Diamond:
    body: "Formula"


@dataclass(frozen=True)
class Box:
    body: "Formula"


@dataclass(frozen=True)
class Dep:
    """``dep(determiners ; determined)``: the determined variable is a
    function of the determiners across the team."""

    determiners: tuple
    determined: str

    def __post_init__(self):
        object.__setattr__(self, "determiners", _names(self.determiners))
        _check_name(self.determined)


@dataclass(frozen=True)
class Indep:
    """``indep(left ; cond ; right)``; ``cond`` may be empty."""

    left: tuple
    cond: tuple
    right: tuple

    def __post_init__(self):
        for field in ("left", "cond", "right"):
            object.__setattr__(self, field, _names(getattr(self, field)))
        if not self.left or not self.right:
            raise ValueError("independence atom needs nonempty left and right lists")


@dataclass(frozen=True)
class GenAtom:
    """Application of a registered generalized atom to a variable list."""

    atom: str
    args: tuple

    def __post_init__(self):
        _check_name(self.atom)
        object.__setattr__(self, "args", _names(self.args))


Formula = Union[Prop, NegProp, And, Or, Diamond, Box, Dep, Indep, GenAtom]

ATOM_NODES = (Dep, Indep, GenAtom)


# ---------------------------------------------------------------- parsing


class FormulaSyntaxError(ValueError):
    def __init__(self, message, pos=None, text=None):
        self.pos = pos
        self.text = text
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)


class UnknownAtomError(FormulaSyntaxError):
    pass


class ArityError(FormulaSyntaxError):
    pass


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<sym><>|\[\]|[~&|();,\[\]])|(?P<name>[A-Za-z][A-Za-z0-9_]*))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start("sym") if m.group("sym") else m.start("name")
        if m.group("sym"):
            tokens.append(("sym", m.group("sym"), start))
        else:
            tokens.append(("name", m.group("name"), start))
        pos = m.end()
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, text, registry):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.registry = registry

    def peek(self, k=0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def error(self, msg, tok=None, cls=FormulaSyntaxError):
        tok = tok or self.peek()
        return cls(msg, tok[2], self.text)

    def take(self, value=None, kind=None):
        tok = self.peek()
        if value is not None and tok[1] != value:
            found = tok[1] or "end of input"
            raise self.error(f"expected {value!r}, found {found!r}")
        if kind is not None and tok[0] != kind:
            found = tok[1] or "end of input"
            raise self.error(f"expected {kind}, found {found!r}")
        self.i += 1
        return tok

    def at(self, value):
        tok = self.peek()
        return tok[0] == "sym" and tok[1] == value

    def parse(self):
        f = self.disj()
        if self.peek()[0] != "eof":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return f

    def disj(self):
        f = self.conj()
        while self.at("|"):
            self.take("|")
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.at("&"):
            self.take("&")
            f = And(f, self.unary())
        return f

    def unary(self):
        tok = self.peek()
        if tok[0] == "sym":
            if tok[1] == "<>":
                self.take()
                return Diamond(self.unary())
            if tok[1] == "[]":
                self.take()
                return Box(self.unary())
            if tok[1] == "~":
                self.take()
                nxt = self.peek()
                if nxt[0] != "name" or self.peek(1)[1] in ("(", "["):
                    raise self.error("'~' may only be applied to a proposition", nxt)
                self.take()
                return NegProp(nxt[1])
            if tok[1] == "(":
                self.take()
                f = self.disj()
                self.take(")")
                return f
            raise self.error(f"unexpected token {tok[1]!r}")
        if tok[0] == "eof":
            raise self.error("unexpected end of input")
        return self.atom()

    def names(self, stop, allow_empty):
        out = []
        if self.at(stop):
            if not allow_empty:
                raise self.error("expected a variable list")
            return out
        out.append(self.take(kind="name")[1])
        while self.at(","):
            self.take(",")
            out.append(self.take(kind="name")[1])
        return out

    def atom(self):
        tok = self.take(kind="name")
        name = tok[1]
        nxt = self.peek()
        if name in ("dep", "indep", "inc", "exc") and nxt[1] == "(":
            self.take("(")
            if name == "dep":
                dets = self.names(";", True)
                self.take(";")
                q = self.take(kind="name")[1]
                self.take(")")
                return Dep(tuple(dets), q)
            if name == "indep":
                left = self.names(";", False)
                self.take(";")
                cond = self.names(";", True)
                self.take(";")
                right = self.names(")", False)
                self.take(")")
                return Indep(tuple(left), tuple(cond), tuple(right))
            left = self.names(";", False)
            self.take(";")
            right = self.names(")", False)
            self.take(")")
            if len(left) != len(right):
                raise self.error(f"{name} needs lists of equal length", tok, ArityError)
            return self.gen(name, left + right, tok)
        if name == "D" and nxt[1] == "[":
            self.take("[")
            atom_name = self.take(kind="name")[1]
            self.take("]")
            self.take("(")
            args = self.names(")", True)
            self.take(")")
            return self.gen(atom_name, args, tok)
        return Prop(name)

    def gen(self, atom_name, args, tok):
        registry = self.registry
        if registry is None:
            from .atoms import default_registry

            registry = default_registry()
        if atom_name not in registry:
            raise self.error(f"unknown atom {atom_name!r}", tok, UnknownAtomError)
        atom = registry[atom_name]
        if not atom.admits(len(args)):
            raise self.error(
                f"atom {atom_name!r} does not admit width {len(args)}", tok, ArityError
            )
        return GenAtom(atom_name, tuple(args))


def parse(text, registry=None):
    """Parse concrete syntax into a :data:`Formula`.

    ``registry`` maps atom names to :class:`~milcheck.atoms.GeneralizedAtom`;
    the process-wide default registry is used when omitted.
    """
    return _Parser(text, registry).parse()


def _join(vs):
    return ", ".join(vs)


def render(f):
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, NegProp):
        return "~" + f.name
    if isinstance(f, And):
        return f"({render(f.left)} & {render(f.right)})"
    if isinstance(f, Or):
        return f"({render(f.left)} | {render(f.right)})"
    if isinstance(f, Diamond):
        return "<>" + render(f.body)
    if isinstance(f, Box):
        return "[]" + render(f.body)
    if isinstance(f, Dep):
        if f.determiners:
            return f"dep({_join(f.determiners)} ; {f.determined})"
        return f"dep(; {f.determined})"
    if isinstance(f, Indep):
        cond = f" {_join(f.cond)} " if f.cond else " "
        return f"indep({_join(f.left)} ;{cond}; {_join(f.right)})"
    if isinstance(f, GenAtom):
        if f.atom in ("inc", "exc") and f.args and len(f.args) % 2 == 0:
            h = len(f.args) // 2
            return f"{f.atom}({_join(f.args[:h])} ; {_join(f.args[h:])})"
        return f"D[{f.atom}]({_join(f.args)})"
    raise TypeError(f"not a formula: {f!r}")


# ------------------------------------------------------- structural utils


def subformulas(f) -> Iterator:
    """Pre-order traversal, including ``f`` itself."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, (And, Or)):
            stack.append(g.right)
            stack.append(g.left)
        elif isinstance(g, (Diamond, Box)):
            stack.append(g.body)


def modal_depth(f):
    if isinstance(f, (And, Or)):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, (Diamond, Box)):
        return 1 + modal_depth(f.body)
    return 0


def is_flat(f):
    """True iff ``f`` is a plain modal formula (no atoms beyond literals)."""
    return not any(isinstance(g, ATOM_NODES) for g in subformulas(f))


def variables(f):
    out = set()
    for g in subformulas(f):
        if isinstance(g, (Prop, NegProp)):
            out.add(g.name)
        elif isinstance(g, Dep):
            out.update(g.determiners)
            out.add(g.determined)
        elif isinstance(g, Indep):
            out.update(g.left, g.cond, g.right)
        elif isinstance(g, GenAtom):
            out.update(g.args)
    return frozenset(out)


def size(f):
    """Symbol count: one per node plus one per variable occurrence in atoms."""
    n = 0
    for g in subformulas(f):
        n += 1
        if isinstance(g, Dep):
            n += len(g.determiners) + 1
        elif isinstance(g, Indep):
            n += len(g.left) + len(g.cond) + len(g.right)
        elif isinstance(g, GenAtom):
            n += len(g.args)
    return n


def rewrite_dep_to_indep(f):
    """Replace every ``dep(d ; q)`` by ``indep(q ; d ; q)``."""
    if isinstance(f, Dep):
        return Indep((f.determined,), f.determiners, (f.determined,))
    if isinstance(f, And):
        return And(rewrite_dep_to_indep(f.left), rewrite_dep_to_indep(f.right))
    if isinstance(f, Or):
        return Or(rewrite_dep_to_indep(f.left), rewrite_dep_to_indep(f.right))
    if isinstance(f, Diamond):
        return Diamond(rewrite_dep_to_indep(f.body))
    if isinstance(f, Box):
        return Box(rewrite_dep_to_indep(f.body))
    return f


def conjunction(parts):
    """Left-nested conjunction of a nonempty sequence."""
    it = iter(parts)
    try:
        f = next(it)
    except StopIteration:
        raise ValueError("empty conjunction") from None
    for g in it:
        f = And(f, g)
    return f


def conjuncts(f):
    """Flatten nested ``And`` nodes into a list, left to right."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]
