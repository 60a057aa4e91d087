"""Kernel backends: pure-numpy against the compiled extension.

Both backends must return bit-identical prices and violation counts (the
accumulation association is pinned) and rewards equal to a straight Python
loop within float noise. The compiled backend is optional; its tests skip
when the extension did not build.
"""

import numpy as np
import pytest

from filtra import _kernels
from filtra._kernels import pure

native = pytest.importorskip("filtra._kernels._native") \
    if _kernels.have_native() else None

BACKENDS = [pure] + ([native] if native is not None else [])


def _inputs(seed=0, n=2000, steps=12):
    rng = np.random.default_rng(seed)
    ups = (rng.random((n, steps)) < 0.5).astype(np.uint8)
    positions = (rng.random((n, steps)) < 0.4).astype(np.uint8)
    increments = rng.uniform(-1.5, 2.5, size=(n, steps))
    values = rng.uniform(0, 100, size=n)
    return ups, positions, increments, values


def loop_rewards(ups, positions, up_inc, down_inc, rho):
    n, steps = ups.shape
    out = np.zeros(n)
    for i in range(n):
        disc = 1.0
        for t in range(steps):
            inc = up_inc if ups[i, t] else -down_inc
            out[i] += disc * positions[i, t] * inc
            disc *= rho
    return out


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_path_rewards_against_loop(backend):
    ups, positions, _, _ = _inputs(n=300, steps=6)
    got = backend.path_rewards(ups, positions, 10.0, 5.0, 0.9)
    want = loop_rewards(ups, positions, 10.0, 5.0, 0.9)
    assert np.allclose(got, want, atol=1e-12, rtol=0)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_cone_violation_counting(backend):
    _, _, increments, _ = _inputs()
    clean = np.clip(increments, -1.5, 2.5)
    assert backend.walk_cone_violations(clean, 50.0, 1.5, 2.5) == 0
    dirty = clean.copy()
    dirty[3, 0] = 100.0  # leaves the band immediately and stays out a while
    assert backend.walk_cone_violations(dirty, 50.0, 1.5, 2.5) > 0


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_prices_at_zero_and_full(backend):
    _, _, increments, _ = _inputs()
    at0 = backend.walk_prices_at(increments, 7.0, 0)
    assert np.all(at0 == 7.0)
    full = backend.walk_prices_at(increments, 7.0, increments.shape[1])
    assert full.shape == (increments.shape[0],)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_count_on_exact_boundaries(backend):
    values = np.array([10.0, 20.0, 40.0, 60.0, 15.0])
    lows = np.array([10.0, 40.0])
    lows_closed = np.array([1, 0], dtype=np.uint8)
    highs = np.array([20.0, 60.0])
    highs_closed = np.array([0, 1], dtype=np.uint8)
    # [10, 20) takes 10.0 and 15.0 but not 20.0; (40, 60] takes 60.0 only
    assert backend.count_in_pieces(values, lows, lows_closed,
                                   highs, highs_closed) == 3


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_count_in_pieces_against_python(backend):
    _, _, _, values = _inputs()
    lows = np.array([10.0, 40.0])
    lows_closed = np.array([1, 0], dtype=np.uint8)
    highs = np.array([20.0, 60.0])
    highs_closed = np.array([0, 1], dtype=np.uint8)
    want = sum(1 for v in values
               if (10.0 <= v < 20.0) or (40.0 < v <= 60.0))
    assert backend.count_in_pieces(values, lows, lows_closed,
                                   highs, highs_closed) == want


@pytest.mark.skipif(native is None, reason="compiled kernels not built")
def test_backends_bit_identical():
    ups, positions, increments, values = _inputs(seed=5, n=5000, steps=40)
    for rho in (1.0, 0.999, 0.5):
        assert np.array_equal(
            pure.path_rewards(ups, positions, 3.0, 2.0, rho),
            native.path_rewards(ups, positions, 3.0, 2.0, rho))
    for t in (0, 1, 17, 40):
        assert np.array_equal(pure.walk_prices_at(increments, 100.0, t),
                              native.walk_prices_at(increments, 100.0, t))
    assert pure.walk_cone_violations(increments, 100.0, 1.5, 2.5) == \
        native.walk_cone_violations(increments, 100.0, 1.5, 2.5)
    lows = np.array([20.0]); lc = np.array([1], dtype=np.uint8)
    highs = np.array([80.0]); hc = np.array([0], dtype=np.uint8)
    assert pure.count_in_pieces(values, lows, lc, highs, hc) == \
        native.count_in_pieces(values, lows, lc, highs, hc)


def test_selected_backend_exposes_api():
    assert _kernels.BACKEND in ("pure", "native")
    for name in ("path_rewards", "walk_cone_violations", "walk_prices_at",
                 "count_in_pieces"):
        assert callable(getattr(_kernels, name))
