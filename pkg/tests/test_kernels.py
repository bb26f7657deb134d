import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from milcheck import _kernels as K

NP, NB = K.NUMPY_KERNELS, K.NUMBA_KERNELS

pytestmark = pytest.mark.skipif(NB is None, reason="numba not importable")

codes = st.integers(0, 12).flatmap(
    lambda n: arrays(np.int64, n, elements=st.integers(0, 3))
)


@given(st.integers(0, 12).flatmap(
    lambda n: st.tuples(*[arrays(np.int64, n, elements=st.integers(0, 3))] * 3)
))
def test_three_column_kernels_agree(cols):
    a, c, b = cols
    assert bool(NP["indep"](a, c, b)) == bool(NB["indep"](a, c, b))
    assert bool(NP["dep"](a, b)) == bool(NB["dep"](a, b))


@given(codes, codes)
def test_two_column_kernels_agree(p, q):
    n = min(len(p), len(q))
    p, q = p[:n], q[:n]
    assert bool(NP["inc"](p, q)) == bool(NB["inc"](p, q))
    assert bool(NP["exc"](p, q)) == bool(NB["exc"](p, q))


@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_refinement_agrees(n1, n2, data):
    z = data.draw(arrays(np.bool_, (n1, n2)))
    a1 = data.draw(arrays(np.bool_, (n1, n1)))
    a2 = data.draw(arrays(np.bool_, (n2, n2)))
    r1 = NP["refine"](z, a1, a2)
    r2 = NB["refine"](z, a1, a2)
    assert np.array_equal(r1, r2)
    assert not (r1 & ~z).any()


def test_row_codes():
    mat = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8)
    assert K.row_codes(mat, [0, 2]).tolist() == [3, 2]
    assert K.row_codes(mat, []).tolist() == [0, 0]


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_env_flag_selects_backend(backend):
    env = dict(os.environ, MILCHECK_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", "from milcheck import _kernels; print(_kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == backend


def test_bad_env_flag_is_rejected():
    env = dict(os.environ, MILCHECK_BACKEND="fortran")
    out = subprocess.run(
        [sys.executable, "-c", "import milcheck._kernels"], env=env, capture_output=True, text=True,
    )
    assert out.returncode != 0 and "MILCHECK_BACKEND" in out.stderr


def test_warmup_runs_on_active_backend():
    K.warmup()
