import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdesign import _kernels_py, kernels
from qdesign.designs import IncidenceStructure

needs_ext = pytest.mark.skipif(kernels.compiled is None, reason="extension not built")


def random_structure(rng, v, b, kmax):
    blocks = []
    for _ in range(b):
        k = int(rng.integers(2, kmax + 1))
        blocks.append(rng.choice(v, size=k, replace=False).tolist())
    return IncidenceStructure.from_blocks(v, blocks)


def pair_oracle(structure):
    v = structure.v
    out = np.zeros(v * (v - 1) // 2, dtype=np.int64)
    for blk in structure.blocks():
        for i, j in itertools.combinations(blk.members, 2):
            out[j * (j - 1) // 2 + i] += 1
    return out


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "numpy")
    assert kernels.get("numpy") is _kernels_py
    with pytest.raises(ValueError):
        kernels.get("fortran")


def test_default_threads(monkeypatch):
    monkeypatch.setenv("QDESIGN_THREADS", "3")
    assert kernels.default_threads() == 3
    monkeypatch.setenv("QDESIGN_THREADS", "0")
    with pytest.raises(ValueError):
        kernels.default_threads()


@pytest.mark.parametrize("name", ["numpy", pytest.param("cython", marks=needs_ext)])
def test_pair_coverage_oracle(name):
    rng = np.random.default_rng(5)
    st = random_structure(rng, 40, 300, 12)
    indptr, indices = st.csr()
    got = kernels.get(name).pair_coverage(indptr, indices, st.v, 2)
    assert got.dtype == np.int64
    assert (got == pair_oracle(st)).all()


@pytest.mark.parametrize("name", ["numpy", pytest.param("cython", marks=needs_ext)])
def test_subset_coverage_oracle(name):
    rng = np.random.default_rng(9)
    st = random_structure(rng, 30, 150, 10)
    blocks = [set(b) for b in st.blocks()]
    subsets = np.array(list(itertools.combinations(range(12), 3)), dtype=np.int64)
    got = kernels.get(name).subset_coverage(st.point_bits(), subsets, 1)
    expect = [sum(1 for b in blocks if set(s) <= b) for s in subsets.tolist()]
    assert got.tolist() == expect


@needs_ext
@settings(max_examples=40, deadline=None)
@given(st.integers(2, 70), st.integers(1, 200), st.integers(0, 2**32 - 1),
       st.integers(1, 4))
def test_backends_agree(v, b, seed, threads):
    rng = np.random.default_rng(seed)
    structure = random_structure(rng, v, b, min(v, 20))
    indptr, indices = structure.csr()
    a = kernels.get("numpy").pair_coverage(indptr, indices, v, threads)
    c = kernels.get("cython").pair_coverage(indptr, indices, v, threads)
    assert (a == c).all()
    subsets = np.sort(rng.integers(0, v, size=(50, 2)), axis=1)
    subsets = subsets[subsets[:, 0] != subsets[:, 1]]
    bits = structure.point_bits()
    assert (kernels.get("numpy").subset_coverage(bits, subsets, threads)
            == kernels.get("cython").subset_coverage(bits, subsets, threads)).all()


def test_empty_inputs():
    indptr = np.zeros(1, dtype=np.int64)
    indices = np.zeros(0, dtype=np.int32)
    for name in ["numpy"] + (["cython"] if kernels.compiled is not None else []):
        out = kernels.get(name).pair_coverage(indptr, indices, 5, 1)
        assert out.shape == (10,) and not out.any()


def test_pure_env_selects_fallback():
    import os
    import subprocess
    import sys
    env = dict(os.environ, QDESIGN_PURE="1")
    proc = subprocess.run([sys.executable, "-c",
                           "from qdesign import kernels; print(kernels.BACKEND)"],
                          capture_output=True, text=True, env=env)
    assert proc.stdout.strip() == "numpy"


def test_benchmark_smoke(capsys):
    import json
    import runpy
    from pathlib import Path
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    mod = runpy.run_path(str(path))
    assert mod["main"](["--small", "--samples", "1000"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["results"]) == 2
