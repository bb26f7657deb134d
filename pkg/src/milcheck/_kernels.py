"""Hot loops behind the atom evaluators and bisimulation refinement.

Every kernel has a numba version and a pure-numpy version with identical
results. ``MILCHECK_BACKEND=numpy`` forces the numpy path; otherwise numba
is used when it can be imported.

Row data arrives as ``int64`` code arrays: one entry per team world, the
code packing that world's truth values on some variable list.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

__all__ = [
    "BACKEND", "row_codes", "dep_holds", "indep_holds", "inc_holds", "exc_holds",
    "refine_bisimulation", "NUMPY_KERNELS", "NUMBA_KERNELS",
]


def row_codes(mat, cols):
    """Pack the selected columns of a 0/1 matrix into one int64 per row."""
    mat = np.asarray(mat)
    out = np.zeros(mat.shape[0], dtype=np.int64)
    for bit, c in enumerate(cols):
        out |= mat[:, c].astype(np.int64) << bit
    return out


# ------------------------------------------------------------------ numpy


def _dep_np(x, y):
    if x.size == 0:
        return True
    pairs = np.unique(np.stack([x, y], axis=1), axis=0)
    return len(np.unique(pairs[:, 0])) == len(pairs)


def _indep_np(a, c, b):
    if a.size == 0:
        return True
    c_max = int(c.max()) + 1
    b_max = int(b.max()) + 1
    present = np.unique((a * c_max + c) * b_max + b)
    same = c[:, None] == c[None, :]
    wanted = (a[:, None] * c_max + c[:, None]) * b_max + b[None, :]
    wanted = wanted[same]
    return bool(np.isin(wanted, present).all())


def _inc_np(p, q):
    return bool(np.isin(p, q).all())


def _exc_np(p, q):
    return not bool(np.isin(p, q).any())


def _refine_np(z, a1, a2):
    z = z.copy()
    a1i = a1.astype(np.int64)
    a2t = a2.T.astype(np.int64)
    while True:
        zi = z.astype(np.int64)
        # fwd[u, w2]: some successor of w2 is related to u
        fwd = (zi @ a2t) > 0
        forward_bad = (a1i @ (~fwd).astype(np.int64)) > 0
        # bwd[w, u2]: some successor of w is related to u2
        bwd = (a1i @ zi) > 0
        backward_bad = ((~bwd).astype(np.int64) @ a2t) > 0
        nz = z & ~forward_bad & ~backward_bad
        if np.array_equal(nz, z):
            return nz
        z = nz


# ------------------------------------------------------------------ numba


def _dep_loop(x, y):
    n = x.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if x[i] == x[j] and y[i] != y[j]:
                return False
    return True


def _indep_loop(a, c, b):
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            if c[i] != c[j]:
                continue
            found = False
            for k in range(n):
                if c[k] == c[i] and a[k] == a[i] and b[k] == b[j]:
                    found = True
                    break
            if not found:
                return False
    return True


def _inc_loop(p, q):
    for i in range(p.shape[0]):
        hit = False
        for j in range(q.shape[0]):
            if p[i] == q[j]:
                hit = True
                break
        if not hit:
            return False
    return True


def _exc_loop(p, q):
    for i in range(p.shape[0]):
        for j in range(q.shape[0]):
            if p[i] == q[j]:
                return False
    return True


def _refine_loop(z, a1, a2):
    z = z.copy()
    n1, n2 = z.shape
    changed = True
    while changed:
        changed = False
        drop = np.zeros_like(z)
        for w in range(n1):
            for w2 in range(n2):
                if not z[w, w2]:
                    continue
                ok = True
                for u in range(n1):
                    if a1[w, u]:
                        hit = False
                        for u2 in range(n2):
                            if a2[w2, u2] and z[u, u2]:
                                hit = True
                                break
                        if not hit:
                            ok = False
                            break
                if ok:
                    for u2 in range(n2):
                        if a2[w2, u2]:
                            hit = False
                            for u in range(n1):
                                if a1[w, u] and z[u, u2]:
                                    hit = True
                                    break
                            if not hit:
                                ok = False
                                break
                if not ok:
                    drop[w, w2] = True
                    changed = True
        for w in range(n1):
            for w2 in range(n2):
                if drop[w, w2]:
                    z[w, w2] = False
    return z


NUMPY_KERNELS = {
    "dep": _dep_np,
    "indep": _indep_np,
    "inc": _inc_np,
    "exc": _exc_np,
    "refine": _refine_np,
}

if numba is not None:
    _jit = numba.njit(cache=True)
    NUMBA_KERNELS = {
        "dep": _jit(_dep_loop),
        "indep": _jit(_indep_loop),
        "inc": _jit(_inc_loop),
        "exc": _jit(_exc_loop),
        "refine": _jit(_refine_loop),
    }
else:  # pragma: no cover
    NUMBA_KERNELS = None

_requested = os.environ.get("MILCHECK_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ImportError(f"MILCHECK_BACKEND must be 'numba' or 'numpy', not {_requested!r}")
if _requested == "numpy" or NUMBA_KERNELS is None:
    BACKEND = "numpy"
    _K = NUMPY_KERNELS
else:
    BACKEND = "numba"
    _K = NUMBA_KERNELS


def _i64(x):
    return np.ascontiguousarray(x, dtype=np.int64)


def dep_holds(x, y):
    """For all rows i, j: equal ``x`` codes imply equal ``y`` codes."""
    return bool(_K["dep"](_i64(x), _i64(y)))


def indep_holds(a, c, b):
    """For all rows i, j with equal ``c`` codes some row k has
    ``c[k] == c[i]``, ``a[k] == a[i]`` and ``b[k] == b[j]``."""
    return bool(_K["indep"](_i64(a), _i64(c), _i64(b)))


def inc_holds(p, q):
    """Every ``p`` code occurs among the ``q`` codes."""
    return bool(_K["inc"](_i64(p), _i64(q)))


def exc_holds(p, q):
    """No ``p`` code occurs among the ``q`` codes."""
    return bool(_K["exc"](_i64(p), _i64(q)))


def refine_bisimulation(z, a1, a2):
    """Greatest relation inside ``z`` closed under the forward and backward
    conditions for adjacency matrices ``a1`` and ``a2``; rounds are
    synchronous."""
    z = np.ascontiguousarray(z, dtype=np.bool_)
    a1 = np.ascontiguousarray(a1, dtype=np.bool_)
    a2 = np.ascontiguousarray(a2, dtype=np.bool_)
    return _K["refine"](z, a1, a2)


def warmup():
    """Run every kernel once on tiny inputs so the first real call does not
    pay for compilation (or cache loading) under the numba backend."""
    x = np.zeros(2, dtype=np.int64)
    dep_holds(x, x)
    indep_holds(x, x, x)
    inc_holds(x, x)
    exc_holds(x, x)
    e = np.zeros((2, 2), dtype=np.bool_)
    refine_bisimulation(e, e, e)
