"""Panel-based Gauss-Legendre quadrature helpers."""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = ["panel_rule", "geometric_edges", "refined_axis_edges"]


def panel_rule(edges: np.ndarray, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Gauss-Legendre over consecutive panels."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("panel edges must be strictly increasing")
    xg, wg = leggauss(order)
    a = edges[:-1][:, None]
    b = edges[1:][:, None]
    nodes = 0.5 * (b - a) * xg[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * np.broadcast_to(wg, nodes.shape)
    return nodes.ravel(), weights.ravel()


def geometric_edges(inner: float, outer: float, factor: float = 2.0, include_zero: bool = True):
    """Edges [0,] inner, inner*factor, ... up to outer."""
    if not 0 < inner < outer:
        raise ValueError("need 0 < inner < outer")
    edges = [inner]
    while edges[-1] < outer:
        edges.append(min(edges[-1] * factor, outer))
    if include_zero:
        edges.insert(0, 0.0)
    return np.asarray(edges)


def refined_axis_edges(centers, scales, lo: float, hi: float, start: float = 0.25) -> np.ndarray:
    """Panel edges on [lo, hi], geometrically refined toward each center.

    Around center i the first panel boundary sits at distance start/scales[i],
    then doubles outward.  Used to resolve features of very different widths
    on a single axis.
    """
    edges = {float(lo), float(hi)}
    for c, s in zip(centers, scales):
        if lo < c < hi:
            edges.add(float(c))
        off = start / s
        while off < (hi - lo):
            for e in (c - off, c + off):
                if lo < e < hi:
                    edges.add(float(e))
            off *= 2.0
    out = np.array(sorted(edges))
    # drop near-duplicate edges, which would create zero-width panels
    keep = np.concatenate([[True], np.diff(out) > 1e-13 * max(1.0, hi - lo)])
    return out[keep]
