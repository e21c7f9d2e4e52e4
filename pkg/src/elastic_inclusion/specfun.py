"""Bessel functions J0, J1, Y0, Y1 and Hankel functions H0, H1 of the first kind.

Real arguments only. The compiled backend is used when it was built; setting
``ELASTIC_INCLUSION_PURE=1`` forces the numpy fallback (same algorithm).
"""

import os

import numpy as np

from . import _specfun_py

BACKEND = "python"
_impl = _specfun_py
if not os.environ.get("ELASTIC_INCLUSION_PURE"):
    try:
        from . import _specfun_ext as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _specfun_py


def _positive(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError(f"{name} requires x > 0")
    return x


def _nonnegative(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 0)):
        raise ValueError(f"{name} requires x >= 0")
    return x


def bessel01(x):
    """``(J0, J1, Y0, Y1)`` evaluated together; ``x > 0``."""
    return _impl.bessel01(_positive(x, "bessel01"))


def bessel_j01(x):
    """``(J0, J1)`` for ``x >= 0``."""
    return _impl.bessel_j01(_nonnegative(x, "bessel_j01"))


def bessel_j0(x):
    return bessel_j01(x)[0]


def bessel_j1(x):
    return bessel_j01(x)[1]


def bessel_y0(x):
    return bessel01(_positive(x, "bessel_y0"))[2]


def bessel_y1(x):
    return bessel01(_positive(x, "bessel_y1"))[3]


def hankel01(x):
    """``(H0(x), H1(x))`` of the first kind for ``x > 0``."""
    j0, j1, y0, y1 = bessel01(x)
    return j0 + 1j * y0, j1 + 1j * y1


def hankel1(order, x):
    """Hankel function of the first kind, order 0 or 1."""
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are available")
    return hankel01(_positive(x, "hankel1"))[order]
