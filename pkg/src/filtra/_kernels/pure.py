"""Pure numpy implementations of the Monte Carlo hot loops.

Mirrors ``filtra._kernels._native`` exactly; keep both in sync. These are
the per-sample-per-step loops that dominate runtime once sample counts reach
1e5, everything else in the package is structural and cheap.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def path_rewards(ups: np.ndarray, positions: np.ndarray,
                 up_inc: float, down_inc: float, rho: float) -> np.ndarray:
    """Discounted reward per sampled path.

    ``ups`` and ``positions`` are (n, T) 0/1 arrays; step t contributes
    rho**t * position * (+up_inc on an up move, -down_inc on a down move).
    Accumulates column by column in step order, the same association the
    native loop uses, so both backends return bit-identical rewards.
    """
    n, n_steps = ups.shape
    out = np.zeros(n)
    disc = 1.0
    for t in range(n_steps):
        inc = np.where(ups[:, t] != 0, up_inc, -down_inc)
        out += disc * (positions[:, t] * inc)
        disc *= rho
    return out


def walk_cone_violations(increments: np.ndarray, s0: float,
                         down_bound: float, up_bound: float) -> int:
    """Count (path, t) pairs whose running price leaves the reachable band
    [s0 - t*down_bound, s0 + t*up_bound]."""
    n_steps = increments.shape[1]
    prices = s0 + np.cumsum(increments, axis=1)
    steps = np.arange(1, n_steps + 1, dtype=float)
    low = s0 - steps * down_bound
    high = s0 + steps * up_bound
    return int(np.count_nonzero((prices < low) | (prices > high)))


def walk_prices_at(increments: np.ndarray, s0: float, t: int) -> np.ndarray:
    """Price after the first ``t`` increments of each path."""
    if t == 0:
        return np.full(increments.shape[0], float(s0))
    # cumsum accumulates sequentially, matching the native loop order.
    return s0 + np.cumsum(increments[:, :t], axis=1)[:, t - 1]


def count_in_pieces(values: np.ndarray, lows: np.ndarray,
                    lows_closed: np.ndarray, highs: np.ndarray,
                    highs_closed: np.ndarray) -> int:
    """Count values inside a union of disjoint flagged intervals."""
    member = np.zeros(values.shape[0], dtype=bool)
    for lo, lo_c, hi, hi_c in zip(lows, lows_closed, highs, highs_closed):
        above = values >= lo if lo_c else values > lo
        below = values <= hi if hi_c else values < hi
        member |= above & below
    return int(np.count_nonzero(member))
