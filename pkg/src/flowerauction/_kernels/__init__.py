"""Kernel backend selection.

The hot numerical loops (bid-curve integration, exit-price roots, clock
playout) exist twice: a Cython extension (``_core``) and a pure-Python
mirror (``_reference``).  The compiled backend is picked at import when the
extension built; set FLOWERAUCTION_PURE_PYTHON=1 (or call ``set_backend``)
to force the fallback.  Custom value distributions always run on the Python
backend, which accepts cdf/pdf callables.
"""
import os

from . import _reference

DIST_UNIFORM = 0
DIST_CUSTOM = -1

_BACKENDS = {"python": _reference}
try:
    from . import _core  # compiled extension, optional

    _BACKENDS["compiled"] = _core
except ImportError:
    _core = None


def _default_name() -> str:
    if os.environ.get("FLOWERAUCTION_PURE_PYTHON"):
        return "python"
    return "compiled" if "compiled" in _BACKENDS else "python"


_active = _BACKENDS[_default_name()]


def set_backend(name: str) -> None:
    """Switch the active backend ('python' or 'compiled')."""
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {sorted(_BACKENDS)}")
    global _active
    _active = _BACKENDS[name]


def backend_name() -> str:
    for name, mod in _BACKENDS.items():
        if mod is _active:
            return name
    raise AssertionError("active backend not registered")


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def cost_value(cost_code: int, mu: float, t: float) -> float:
    """Scalar discount factor shared by both backends (trivial formula)."""
    return _reference._cost_value(cost_code, mu, t)


def dutch_curve(n, dist_code, cost_code, mu, s, v_max, steps, cdf=None, pdf=None):
    if dist_code == DIST_CUSTOM:
        return _reference.dutch_curve(n, dist_code, cost_code, mu, s, v_max,
                                      steps, cdf=cdf, pdf=pdf)
    return _active.dutch_curve(n, dist_code, cost_code, mu, s, v_max, steps)


def rk4_step(v0, b0, h, n, dist_code, cost_code, mu, s, cdf=None, pdf=None):
    if dist_code == DIST_CUSTOM:
        return _reference.rk4_step(v0, b0, h, n, dist_code, cost_code, mu, s,
                                   cdf=cdf, pdf=pdf)
    return _active.rk4_step(v0, b0, h, n, dist_code, cost_code, mu, s)


def english_exit_batch(v, s, cost_code, mu):
    return _active.english_exit_batch(v, s, cost_code, mu)


def play_auctions(values, bids, exits, p, s, tick, tie_u):
    return _active.play_auctions(values, bids, exits, p, s, tick, tie_u)
