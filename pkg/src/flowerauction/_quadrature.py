"""Composite-Simpson helpers on uniform grids (plain and cumulative)."""
import numpy as np


def odd_node_count(m: int) -> int:
    """Round up to an odd node count (Simpson needs an even panel count)."""
    m = int(m)
    return m if m % 2 == 1 else m + 1


def simpson_integrate(y: np.ndarray, dx: float) -> float:
    """Integral of samples y on a uniform grid with odd node count."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] % 2 == 0:
        raise ValueError("simpson_integrate needs an odd number of nodes")
    if y.shape[-1] == 1:
        return 0.0
    return float(dx / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def cumulative_simpson(y: np.ndarray, dx: float) -> np.ndarray:
    """Running integral from the first node to every node.

    Even indices accumulate full Simpson panels; odd indices add the half
    panel obtained by integrating the local quadratic through the three
    surrounding nodes, keeping the whole table fourth-order accurate.
    """
    y = np.asarray(y, dtype=float)
    m = y.shape[-1]
    if m % 2 == 0:
        raise ValueError("cumulative_simpson needs an odd number of nodes")
    out = np.zeros_like(y)
    if m == 1:
        return out
    panels = dx / 3.0 * (y[0:-2:2] + 4.0 * y[1:-1:2] + y[2::2])
    out[2::2] = np.cumsum(panels)
    half = dx / 12.0 * (5.0 * y[0:-2:2] + 8.0 * y[1:-1:2] - y[2::2])
    out[1::2] = out[0:-2:2] + half
    return out
