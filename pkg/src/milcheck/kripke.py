"""Finite Kripke models and teams.

Teams are plain ``frozenset`` objects of world indices. Internally the
checker works on integer bitmasks (bit ``w`` set iff world ``w`` is in the
team); :func:`team_mask` and :func:`mask_team` convert between the two.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np

from .formula import NAME_RE

__all__ = [
    "KripkeModel", "ModelFormatError", "team_mask", "mask_team", "mask_members",
    "succ_team", "successor_teams", "agree", "load_model", "save_model",
    "model_to_dict", "model_from_dict",
]

MODEL_FORMAT = "milcheck-model"
MODEL_VERSION = 1


class ModelFormatError(ValueError):
    pass


def team_mask(team):
    m = 0
    for w in team:
        m |= 1 << w
    return m


def mask_members(mask):
    out = []
    w = 0
    while mask:
        if mask & 1:
            out.append(w)
        mask >>= 1
        w += 1
    return out


def mask_team(mask):
    return frozenset(mask_members(mask))


@dataclass(frozen=True)
class KripkeModel:
    """``n_worlds`` worlds ``0..n-1``, an edge set and one label set per world."""

    n_worlds: int
    edges: frozenset
    labels: tuple

    def __post_init__(self):
        if self.n_worlds < 1:
            raise ValueError("a Kripke model needs at least one world")
        edges = frozenset((int(a), int(b)) for a, b in self.edges)
        for a, b in edges:
            if not (0 <= a < self.n_worlds and 0 <= b < self.n_worlds):
                raise ValueError(f"edge ({a}, {b}) references a missing world")
        labels = tuple(frozenset(ls) for ls in self.labels)
        if len(labels) != self.n_worlds:
            raise ValueError("need exactly one label set per world")
        for ls in labels:
            for v in ls:
                if not isinstance(v, str) or not NAME_RE.match(v):
                    raise ValueError(f"invalid proposition name {v!r}")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def build(cls, n_worlds, edges=(), labels=None):
        if labels is None:
            labels = [()] * n_worlds
        elif isinstance(labels, dict):
            labels = [labels.get(w, ()) for w in range(n_worlds)]
        return cls(n_worlds, frozenset(edges), tuple(frozenset(ls) for ls in labels))

    @property
    def worlds(self):
        return range(self.n_worlds)

    @property
    def full_mask(self):
        return (1 << self.n_worlds) - 1

    @cached_property
    def succ_masks(self):
        out = [0] * self.n_worlds
        for a, b in self.edges:
            out[a] |= 1 << b
        return tuple(out)

    @cached_property
    def pred_masks(self):
        out = [0] * self.n_worlds
        for a, b in self.edges:
            out[b] |= 1 << a
        return tuple(out)

    def successors(self, w):
        return mask_members(self.succ_masks[w])

    def var_mask(self, v):
        cache = self.__dict__.setdefault("_var_masks", {})
        m = cache.get(v)
        if m is None:
            m = 0
            for w, ls in enumerate(self.labels):
                if v in ls:
                    m |= 1 << w
            cache[v] = m
        return m

    @cached_property
    def propositions(self):
        out = set()
        for ls in self.labels:
            out |= ls
        return frozenset(out)

    def label_matrix(self, vars):
        """``uint8`` array of shape ``(n_worlds, len(vars))``."""
        mat = np.zeros((self.n_worlds, len(vars)), dtype=np.uint8)
        for j, v in enumerate(vars):
            for w in range(self.n_worlds):
                if v in self.labels[w]:
                    mat[w, j] = 1
        return mat

    def adjacency(self):
        a = np.zeros((self.n_worlds, self.n_worlds), dtype=np.bool_)
        for x, y in self.edges:
            a[x, y] = True
        return a

    def restrict_labels(self, vars):
        vs = frozenset(vars)
        return KripkeModel(self.n_worlds, self.edges, tuple(ls & vs for ls in self.labels))

    def delete_worlds(self, dead):
        """Copy of the model without the worlds in ``dead``; returns the new
        model and the old-to-new index map."""
        dead = set(dead)
        keep = [w for w in range(self.n_worlds) if w not in dead]
        index = {w: i for i, w in enumerate(keep)}
        edges = {(index[a], index[b]) for a, b in self.edges if a in index and b in index}
        return KripkeModel(len(keep), frozenset(edges), tuple(self.labels[w] for w in keep)), index

    def check_team(self, team):
        for w in team:
            if not (0 <= w < self.n_worlds):
                raise ValueError(f"team member {w} is not a world of the model")
        return frozenset(team)


def _succ_mask(m, mask):
    out = 0
    sm = m.succ_masks
    w = 0
    while mask:
        if mask & 1:
            out |= sm[w]
        mask >>= 1
        w += 1
    return out


def succ_team(m, team):
    """All successors of members of ``team``."""
    return mask_team(_succ_mask(m, team_mask(m.check_team(team))))


def successor_masks(m, mask):
    """Legal successor teams of ``mask`` as bitmasks, smallest first.

    A legal successor team is a subset of the successor set that contains
    at least one successor of every team member.
    """
    members = mask_members(mask)
    sm = m.succ_masks
    if not members:
        yield 0
        return
    if any(sm[w] == 0 for w in members):
        return
    pool = mask_members(_succ_mask(m, mask))
    need = [sm[w] for w in members]
    for k in range(1, len(pool) + 1):
        for combo in combinations(pool, k):
            t = 0
            for w in combo:
                t |= 1 << w
            if all(t & s for s in need):
                yield t


def successor_teams(m, team):
    for t in successor_masks(m, team_mask(m.check_team(team))):
        yield mask_team(t)


def agree(m, w, w2, vars):
    vs = set(vars)
    return (m.labels[w] & vs) == (m.labels[w2] & vs)


# --------------------------------------------------------------- files


def model_to_dict(m, team=None):
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "worlds": [{"id": w, "props": sorted(m.labels[w])} for w in range(m.n_worlds)],
        "edges": [list(e) for e in sorted(m.edges)],
    }
    if team is not None:
        doc["team"] = sorted(team)
    return doc


def model_from_dict(doc):
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be an object")
    fmt = doc.get("format", MODEL_FORMAT)
    if fmt != MODEL_FORMAT:
        raise ModelFormatError(f"unsupported format {fmt!r}")
    if doc.get("version", MODEL_VERSION) != MODEL_VERSION:
        raise ModelFormatError(f"unsupported version {doc.get('version')!r}")
    worlds = doc.get("worlds")
    if not isinstance(worlds, list) or not worlds:
        raise ModelFormatError("'worlds' must be a nonempty list")
    n = len(worlds)
    labels = [None] * n
    for entry in worlds:
        if not isinstance(entry, dict) or "id" not in entry:
            raise ModelFormatError(f"malformed world entry {entry!r}")
        wid = entry["id"]
        if not isinstance(wid, int) or isinstance(wid, bool) or not 0 <= wid < n:
            raise ModelFormatError(f"world ids must be 0..{n - 1}, got {wid!r}")
        if labels[wid] is not None:
            raise ModelFormatError(f"duplicate world id {wid}")
        props = entry.get("props", [])
        if not isinstance(props, list) or not all(
            isinstance(p, str) and NAME_RE.match(p) for p in props
        ):
            raise ModelFormatError(f"bad props for world {wid}: {props!r}")
        labels[wid] = frozenset(props)
    edges = set()
    for e in doc.get("edges", []):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise ModelFormatError(f"malformed edge {e!r}")
        a, b = e
        if not (0 <= a < n and 0 <= b < n):
            raise ModelFormatError(f"edge {e!r} references an undeclared world")
        edges.add((a, b))
    team = None
    if "team" in doc and doc["team"] is not None:
        team = doc["team"]
        if not isinstance(team, list) or not all(
            isinstance(w, int) and 0 <= w < n for w in team
        ):
            raise ModelFormatError(f"team {team!r} references an undeclared world")
        team = frozenset(team)
    return KripkeModel(n, frozenset(edges), tuple(labels)), team


def load_model(path):
    """Read a model file; returns ``(model, team)`` where ``team`` may be None."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc})") from exc
    return model_from_dict(doc)


def save_model(m, team, path):
    Path(path).write_text(json.dumps(model_to_dict(m, team), indent=1) + "\n", encoding="utf-8")
