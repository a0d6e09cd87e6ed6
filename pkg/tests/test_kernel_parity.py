"""Compiled and pure kernels must be bit-identical: experiment outputs may
never depend on which backend loaded."""

import math

import numpy as np
import pytest

from swarm_bench.kernels import compiled_available, pure

if compiled_available():
    from swarm_bench.kernels import _core
else:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None,
                                    reason="compiled kernels not built")


def random_world(rng, n=50, density=0.2):
    block = (rng.random((n, n)) < density).astype(np.uint8)
    block[0, :] = block[-1, :] = 1
    block[:, 0] = block[:, -1] = 1
    return block


@needs_compiled
def test_trace_beam_parity():
    rng = np.random.default_rng(1)
    cell = 0.1
    for _ in range(400):
        block = random_world(rng, 40)
        x0, y0 = rng.uniform(0.3, 3.7, size=2)
        ang = math.radians(rng.uniform(0, 360))
        sdx, sdy = math.sin(ang) * 0.025, math.cos(ang) * 0.025
        o = [np.empty(161, np.int32) for _ in range(4)]
        rp = pure.trace_beam(block, 40, 40, 1 / cell, x0, y0, sdx, sdy, 160,
                             o[0], o[1])
        rc = _core.trace_beam(block, 40, 40, 1 / cell, x0, y0, sdx, sdy, 160,
                              o[2], o[3])
        assert rp == rc
        n = rp[0]
        assert np.array_equal(o[0][:n], o[2][:n])
        assert np.array_equal(o[1][:n], o[3][:n])


@needs_compiled
def test_scan_integrate_parity():
    rng = np.random.default_rng(2)
    cell = 0.2
    n = 35
    for trial in range(10):
        block = random_world(rng, n, density=0.15)
        free = np.argwhere(block == 0)
        i, j = free[rng.integers(len(free))]
        x0, y0 = (i + 0.5) * cell, (j + 0.5) * cell
        n_beams = 181
        ang = np.radians(np.arange(n_beams) - 90.0)
        ux, uy = np.sin(ang), np.cos(ang)
        step = cell * 0.25
        noise = 1.0 + rng.normal(0, 0.05, n_beams)

        outs = []
        for impl in (pure, _core):
            lo = np.zeros((n, n))
            touched = np.zeros((n, n), np.uint8)
            visited = np.zeros((n, n), np.uint8)
            dist = np.empty(n_beams)
            hit = np.zeros(n_beams, np.uint8)
            impl.scan_integrate(block, lo, touched, visited, x0, y0,
                                ux * step, uy * step, ux, uy, noise,
                                80, step, cell, 1 / cell, 4.0,
                                0.3, 0.2, 3.5, 0.5, 1.0 / (2 * 0.1 * 0.1),
                                0.85, -0.4, -5.0, 5.0, dist, hit)
            outs.append((lo, touched, visited, dist, hit))
        for a, b in zip(outs[0], outs[1]):
            assert np.array_equal(a, b)


@needs_compiled
def test_count_gain_parity():
    rng = np.random.default_rng(3)
    cell = 0.2
    n = 40
    for _ in range(10):
        block = random_world(rng, n, density=0.2)
        touched = (rng.random((n, n)) < 0.3).astype(np.uint8)
        free = np.argwhere(block == 0)
        picks = free[rng.integers(len(free), size=6)]
        xs = (picks[:, 0] + 0.5) * cell
        ys = (picks[:, 1] + 0.5) * cell
        head = rng.integers(0, 8, size=6).astype(np.int32)
        ang = np.radians(np.arange(181) - 90.0)
        step = cell * 0.25
        sdx = np.empty((8, 181))
        sdy = np.empty((8, 181))
        for h in range(8):
            a = ang + math.radians(45.0 * h)
            sdx[h] = np.sin(a) * step
            sdy[h] = np.cos(a) * step
        stamps = [np.zeros((n, n), np.int32), np.zeros((n, n), np.int32)]
        got = [impl.count_gain(block, touched, stamps[k], 1, xs, ys, head,
                               sdx, sdy, 80, 1 / cell)
               for k, impl in enumerate((pure, _core))]
        assert got[0] == got[1]
        assert np.array_equal(stamps[0], stamps[1])


@needs_compiled
def test_astar_parity_costs_and_paths():
    rng = np.random.default_rng(4)
    for _ in range(150):
        n = int(rng.integers(10, 45))
        occ = (rng.random((n, n)) < 0.3).astype(np.uint8)
        unk = (rng.random((n, n)) < 0.3).astype(np.uint8)
        free = np.argwhere(occ == 0)
        s = tuple(free[rng.integers(len(free))])
        g = tuple(free[rng.integers(len(free))])
        rp = pure.astar(occ, unk, *s, *g, 1.2)
        rc = _core.astar(occ, unk, *s, *g, 1.2)
        assert (rp[0] is None) == (rc[0] is None)
        if rp[0] is not None:
            assert rp[1] == rc[1]  # identical cost doubles
            assert [tuple(c) for c in rp[0]] == [tuple(c) for c in rc[0]]


@needs_compiled
def test_range_confidence_parity():
    for d in np.linspace(-0.5, 4.5, 101):
        assert (pure.range_confidence(d, 0.3, 0.2, 3.5, 0.5, 4.0)
                == _core.range_confidence(d, 0.3, 0.2, 3.5, 0.5, 4.0))


def test_backend_forced_pure(monkeypatch):
    # The selection logic honors SWARM_BENCH_PURE at import time; simulate
    # by re-executing the selection module body.
    import importlib
    import swarm_bench.kernels as K
    monkeypatch.setenv("SWARM_BENCH_PURE", "1")
    mod = importlib.reload(K)
    try:
        assert mod.BACKEND == "pure"
    finally:
        monkeypatch.delenv("SWARM_BENCH_PURE")
        importlib.reload(K)
