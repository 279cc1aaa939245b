import os
import subprocess
import sys

import numpy as np
import pytest

from girth8 import _accel, kernels
from girth8.census import field_of_order
from girth8.graph import GraphSpec, adjacency_csr, gamma3
from girth8.poly import parse_poly

PAIRS = [("x*y", "x^2*y"), ("x^3*y", "x^2*y"), ("x*y", "2*x*y"), ("x^2*y", "x^2*y^2"),
         ("x*y", "x^2*y^3"), ("x*y^2", "x^2*y + x*y")]


def tables(q, f2, f3):
    F = field_of_order(q)
    G = GraphSpec(F, parse_poly(f2, F), parse_poly(f3, F))
    F2, F3 = G.tables
    return G, F2, F3, F.sub_table, F.add_table


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9])
@pytest.mark.parametrize("f2,f3", PAIRS)
def test_search_kernels_agree(q, f2, f3):
    _, F2, F3, sub, add = tables(q, f2, f3)
    for cap in (4, 6):
        assert np.array_equal(kernels.bfs_cycle_nb(F2, F3, sub, cap), kernels.bfs_cycle_np(F2, F3, sub, cap))
    assert np.array_equal(kernels.delta2_nb(F2, F3, sub), kernels.delta2_np(F2, F3, sub))
    assert np.array_equal(kernels.delta3_nb(F2, F3, sub, add), kernels.delta3_np(F2, F3, sub, add))


@pytest.mark.parametrize("q", [3, 4, 5])
@pytest.mark.parametrize("f2,f3", PAIRS[:3])
def test_delta4_and_full_bfs_agree(q, f2, f3):
    G, F2, F3, sub, add = tables(q, f2, f3)
    assert np.array_equal(kernels.delta4_nb(F2, F3, sub, add), kernels.delta4_np(F2, F3, sub, add))
    indptr, indices = adjacency_csr(G)
    for cap in (6, 8):
        assert kernels.full_bfs_girth_nb(indptr, indices, cap) == kernels.full_bfs_girth_np(indptr, indices, cap)


def test_backend_reports_numba_by_default():
    if os.environ.get("GIRTH8_DISABLE_NUMBA") == "1":
        pytest.skip("suite itself is running on the numpy fallback")
    assert _accel.backend() == ("numba" if _accel.HAVE_NUMBA else "numpy")


def test_env_flag_selects_numpy():
    code = ("from girth8 import _accel, graph, census;"
            "print(_accel.backend());"
            "print(graph.girth_leq(graph.gamma3(census.field_of_order(5)), 6))")
    env = {**os.environ, "GIRTH8_DISABLE_NUMBA": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "None"]


def test_dispatch_follows_flag(monkeypatch):
    _, F2, F3, sub, _ = tables(7, "x^3*y", "x^2*y")
    monkeypatch.setattr(_accel, "USE_NUMBA", False)
    a = kernels.bfs_cycle(F2, F3, sub, 6)
    monkeypatch.setattr(_accel, "USE_NUMBA", _accel.HAVE_NUMBA)
    b = kernels.bfs_cycle(F2, F3, sub, 6)
    assert np.array_equal(a, b) and a[0] == 6


def test_gamma3_no_seeds_either_backend():
    F = field_of_order(7)
    F2, F3 = gamma3(F).tables
    for fn in (kernels.delta3_nb, kernels.delta3_np):
        assert len(fn(F2, F3, F.sub_table, F.add_table)) == 0
