"""Batched real-root isolation for low-degree polynomials.

Coefficient arrays are stored lowest degree first (``numpy.polynomial``
convention) with one polynomial per row. Roots come from the eigenvalues of
companion matrices, grouped by effective degree so each group is a single
batched ``numpy.linalg.eigvals`` call, and are then polished by Newton steps.
"""

from __future__ import annotations

import logging
from typing import Tuple

import numpy as np

from config import CONFIG

log = logging.getLogger(__name__)


def batch_polymul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise product of polynomial batches ``(..., la)`` and ``(..., lb)``."""

    la, lb = a.shape[-1], b.shape[-1]
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (la + lb - 1,)
    out = np.zeros(shape)
    for i in range(la):
        out[..., i : i + lb] += a[..., i : i + 1] * b
    return out


def batch_polyadd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(a.shape[-1], b.shape[-1])
    pad = lambda x: np.concatenate([x, np.zeros(x.shape[:-1] + (n - x.shape[-1],))], axis=-1)
    return pad(a) + pad(b)


def horner(coeffs: np.ndarray, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Value and derivative of each row polynomial at the matching ``z``."""

    val = np.zeros_like(z)
    der = np.zeros_like(z)
    for c in coeffs.T[::-1]:
        der = der * z + val
        val = val * z + c
    return val, der


def effective_degree(coeffs: np.ndarray, rel_tol: float = 1e-13) -> np.ndarray:
    """Index of the highest coefficient that is not negligible, ``-1`` for zero rows."""

    scale = np.abs(coeffs).max(axis=1, keepdims=True)
    big = np.abs(coeffs) > rel_tol * np.where(scale > 0, scale, 1.0)
    big &= scale > 0
    deg = coeffs.shape[1] - 1 - np.argmax(big[:, ::-1], axis=1)
    deg[~big.any(axis=1)] = -1
    return deg


def companion_roots(coeffs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """All complex roots of each row polynomial.

    Returns
    -------
    tuple
        ``(rows, roots)``: flat arrays giving the owning row of every root.
    """

    coeffs = np.asarray(coeffs, dtype=float)
    deg = effective_degree(coeffs)
    rows, roots = [], []
    for d in np.unique(deg):
        if d < 1:
            continue
        sel = np.flatnonzero(deg == d)
        monic = coeffs[sel, :d] / coeffs[sel, d : d + 1]
        comp = np.zeros((len(sel), d, d))
        if d > 1:
            comp[:, np.arange(1, d), np.arange(d - 1)] = 1.0
        comp[:, :, -1] = -monic
        eig = np.linalg.eigvals(comp)
        rows.append(np.repeat(sel, d))
        roots.append(eig.ravel())
    if not rows:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=complex)
    return np.concatenate(rows), np.concatenate(roots)


def real_roots(
    coeffs: np.ndarray, lo: float, hi: float, polish_steps: int = 4
) -> Tuple[np.ndarray, np.ndarray]:
    """Real roots in ``[lo, hi]`` of each row polynomial, Newton-polished.

    Parameters
    ----------
    coeffs
        ``(n, k)`` coefficient rows, lowest degree first.
    lo, hi
        Interval of interest; roots slightly outside are clamped.

    Returns
    -------
    tuple
        ``(rows, roots)`` with one entry per accepted root.
    """

    tol = CONFIG.tolerances
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    rows, z = companion_roots(coeffs)
    if len(z) == 0:
        return rows, z.real
    span = max(1.0, abs(lo), abs(hi))
    keep = np.abs(z.imag) <= tol.root_imag * span
    rows, z = rows[keep], z[keep].real
    c = coeffs[rows]
    for _ in range(polish_steps):
        val, der = horner(c, z)
        step = np.where(np.abs(der) > 0, val / np.where(der != 0, der, 1.0), 0.0)
        z = z - step
    margin = 1e-9 * span
    keep = (z >= lo - margin) & (z <= hi + margin)
    rows, z = rows[keep], np.clip(z[keep], lo, hi)
    val, _ = horner(coeffs[rows], z)
    scale = np.abs(coeffs[rows]).max(axis=1)
    loose = np.abs(val) > tol.root_residual * scale
    if np.any(loose):
        log.debug("real_roots: %d roots above residual target (multiple roots)", int(loose.sum()))
    return rows, z
