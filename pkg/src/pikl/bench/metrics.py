"""Error metrics on evaluation grids."""
import numpy as np


def l2_relative_error(pred, truth):
    """sqrt(sum |pred - truth|^2 / sum |truth|^2) over all grid entries."""
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape:
        raise ValueError(f"grid shapes differ: {pred.shape} vs {truth.shape}")
    den = np.sum(truth ** 2)
    if den == 0:
        raise ZeroDivisionError("reference grid is identically zero")
    return float(np.sqrt(np.sum((pred - truth) ** 2) / den))


def squared_l2_error(pred, truth):
    """Mean squared difference, a Riemann sum for the squared L2 distance."""
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape:
        raise ValueError(f"grid shapes differ: {pred.shape} vs {truth.shape}")
    return float(np.mean((pred - truth) ** 2))


def mean_std(values):
    """Mean and sample standard deviation (ddof=1; 0 for a single value)."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("no values")
    return float(v.mean()), float(v.std(ddof=1)) if v.size > 1 else 0.0


def loglog_slope(x, y):
    """Least-squares slope of log y against log x."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(lx, ly, 1)[0])
