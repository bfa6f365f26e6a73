import os
import subprocess
import sys

import gmpy2
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from ddsim import kernels
from ddsim.kernels import _fallback


def mp_array(a, bits):
    with gmpy2.context(precision=bits):
        return np.array([[gmpy2.mpc(complex(v)) for v in row] for row in a], dtype=object)


def maxdiff(a, b):
    return max(float(abs(x - y)) for x, y in zip(a.flat, b.flat))


needs_compiled = pytest.mark.skipif(kernels.compiled is None, reason="compiled extension not built")


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


def test_env_forces_python_backend():
    code = "import ddsim.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, DDSIM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("bits", [64, 256])
def test_fallback_matmul_matches_numpy(bits):
    rng = np.random.default_rng(0)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    b = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    got = _fallback.matmul(mp_array(a, bits), mp_array(b, bits), bits)
    assert maxdiff(got, a @ b) <= 1e-13


@pytest.mark.parametrize("bits", [64, 256])
def test_fallback_eigh_reconstructs(bits):
    h = oracles.random_hermitian(np.random.default_rng(1), 6, 3.0)
    w, v = _fallback.eigh(mp_array(h, bits), bits)
    assert all(w[i] <= w[i + 1] for i in range(len(w) - 1))
    back = _fallback.vdv(v, list(w), bits)
    assert maxdiff(back, mp_array(h, bits)) <= 2.0 ** (-bits + 12)
    assert np.allclose([float(x) for x in w], np.linalg.eigvalsh(h), atol=1e-13)


@needs_compiled
@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10 ** 6), n=st.integers(1, 6), bits=st.sampled_from([64, 200, 512]))
def test_compiled_matches_fallback(seed, n, bits):
    rng = np.random.default_rng(seed)
    h = oracles.random_hermitian(rng, n, 2.0) if n > 1 else np.array([[0.7]])
    a = mp_array(h, bits)
    b = mp_array(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), bits)
    tol = 2.0 ** (-bits + 16)
    assert maxdiff(kernels.compiled.matmul(a, b, bits), _fallback.matmul(a, b, bits)) <= tol
    wc, vc = kernels.compiled.eigh(a, bits)
    wf, vf = _fallback.eigh(a, bits)
    assert max(float(abs(x - y)) for x, y in zip(wc, wf)) <= tol
    with gmpy2.context(precision=bits):
        d = [gmpy2.mpc(x) for x in wc]
    assert maxdiff(kernels.compiled.vdv(vc, d, bits), a) <= tol
    assert maxdiff(_fallback.vdv(vf, d, bits), a) <= tol


@needs_compiled
def test_compiled_results_carry_requested_precision():
    a = mp_array(np.eye(2), 300)
    out = kernels.compiled.matmul(a, a, 300)
    assert out[0, 0].precision == (300, 300)
