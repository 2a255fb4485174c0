"""Brute-force reference values, written with plain numpy and no library code."""

import numpy as np


def flip_enriched_b_min(k, n=200):
    """Largest ratio of the enriched Chatterjea sides for ``Tx = 1 - x`` over an n x n grid."""
    g = np.linspace(0, 1, n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    off = X != Y
    num = abs(k - 1) * abs(X - Y)
    den = abs((k + 1) * X - (k - 1) * Y - 1) + abs((k + 1) * Y - (k - 1) * X - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(den > 0, num / den, np.where(num > 0, np.inf, 0.0))
    return r[off].max()


def flip_enriched_closed_form(k):
    return abs(1 - k) / (2 * k)


def step_zamfirescu_holds(a, b, c, n=1001):
    g = np.linspace(0, 1, n)
    t = np.where(g < 1, 0.0, 0.5)
    X, Y = np.meshgrid(g, g, indexing="ij")
    TX, TY = np.meshgrid(t, t, indexing="ij")
    lhs = abs(TX - TY)
    ok = ((lhs <= a * abs(X - Y) + 1e-12) | (lhs <= b * (abs(X - TX) + abs(Y - TY)) + 1e-12)
          | (lhs <= c * (abs(X - TY) + abs(Y - TX)) + 1e-12))
    return bool(ok[X != Y].all())


def step_type_h_min(n=201):
    """Largest ``|Tx - Ty| / max(|x - Ty|, |y - Tx|)`` for the step map."""
    g = np.linspace(0, 1, n)
    t = np.where(g < 1, 0.0, 0.5)
    X, Y = np.meshgrid(g, g, indexing="ij")
    TX, TY = np.meshgrid(t, t, indexing="ij")
    num = abs(TX - TY)
    den = np.maximum(abs(X - TY), abs(Y - TX))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(den > 0, num / den, np.where(num > 0, np.inf, 0.0))
    return r[X != Y].max()


# frozen from the functions above (n=200 grid; 5/8 at k=4/9)
FLIP_B_MIN = {0.2: 2.0, 0.5: 0.5, 2 / 3: 0.25, 1.0: 0.0, 1.5: 1 / 6, 2.0: 0.25, 4 / 9: 0.625}
STEP_H_MIN = 0.5
