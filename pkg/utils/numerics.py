"""
🧮 Shared numerical kernels
===========================

Central finite differences with one Richardson level, fixed-step RK4 with a
step-halving accuracy check, and the seeded random generator used by sweeps.
"""

from typing import Callable, Optional

import numpy as np

from utils.config import resolve
from utils.errors import StepSizeError


def central_diff(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, axis: int,
                 h: Optional[float] = None) -> np.ndarray:
    """
    Derivative of ``f`` at ``x`` along coordinate ``axis``.

    Two central quotients with steps h and h/2 are combined by Richardson
    extrapolation, leaving an O(h^4) truncation error.
    """
    h = resolve("fd_step", h)
    x = np.asarray(x, dtype=float)
    step = np.zeros_like(x)
    step[axis] = 1.0

    def quotient(k: float) -> np.ndarray:
        return (np.asarray(f(x + k * step)) - np.asarray(f(x - k * step))) / (2.0 * k)

    coarse = quotient(h)
    fine = quotient(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def gradient(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
             h: Optional[float] = None) -> np.ndarray:
    """Stack of partial derivatives, derivative index first"""
    x = np.asarray(x, dtype=float)
    return np.stack([central_diff(f, x, a, h) for a in range(x.size)])


def scalar_diff(f: Callable[[float], np.ndarray], t: float, h: Optional[float] = None) -> np.ndarray:
    """Central difference in a single real parameter, same scheme as ``central_diff``"""
    return central_diff(lambda s: f(float(s[0])), np.array([t]), 0, h)


def _rk4_fixed(f: Callable[[float, np.ndarray], np.ndarray], y0: np.ndarray,
               t0: float, t1: float, steps: int) -> np.ndarray:
    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float)
    h = (t1 - t0) / steps
    t = t0
    for _ in range(steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


def rk4(f: Callable[[float, np.ndarray], np.ndarray], y0: np.ndarray, t0: float, t1: float,
        h: Optional[float] = None, tol: float = 1e-9, check: bool = True) -> np.ndarray:
    """
    Integrate y' = f(t, y) from t0 to t1 with classical RK4.

    The step count is ceil(|t1 - t0| / h). With ``check`` the integration is
    repeated at half the step and a disagreement above ``tol`` (relative to
    the solution size) raises StepSizeError.
    """
    h = resolve("ode_step", h)
    if t1 == t0:
        return np.array(y0, copy=True)
    steps = max(1, int(np.ceil(abs(t1 - t0) / h - 1e-12)))
    y = _rk4_fixed(f, y0, t0, t1, steps)
    if check:
        y_half = _rk4_fixed(f, y0, t0, t1, 2 * steps)
        scale = max(1.0, float(np.linalg.norm(y_half)))
        err = float(np.linalg.norm(y_half - y))
        if err > tol * scale:
            raise StepSizeError(
                f"RK4 step-halving disagreement {err:.3e} exceeds {tol:.1e}",
                {"t0": t0, "t1": t1, "steps": steps, "error": err},
            )
        return y_half
    return y


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """PCG64 generator; the same seed gives the same stream on every platform"""
    return np.random.Generator(np.random.PCG64(resolve("seed", seed)))
