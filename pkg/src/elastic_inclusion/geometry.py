"""Periodic boundary parametrisations, frames and radial trigonometric curves."""

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .media import Q


class DegenerateCurveError(ValueError):
    pass


class NonPositiveRadiusError(ValueError):
    pass


class Frame(NamedTuple):
    z: np.ndarray
    dz: np.ndarray
    ddz: np.ndarray
    speed: np.ndarray
    normal: np.ndarray
    tangent: np.ndarray


class BoundaryCurve:
    """A 2pi-periodic C^2 curve with analytic first and second derivatives.

    Subclasses implement ``eval``, ``deriv1`` and ``deriv2``; each maps an
    array of parameters of shape ``(N,)`` to points of shape ``(N, 2)``.
    """

    name = "curve"

    def eval(self, t):
        raise NotImplementedError

    def deriv1(self, t):
        raise NotImplementedError

    def deriv2(self, t):
        raise NotImplementedError

    def frame(self, t):
        return frame(self, t)


def frame(curve, t):
    """Points, derivatives, speed ``|z'|``, unit normal ``Q tau`` and unit tangent."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    z = curve.eval(t)
    dz = curve.deriv1(t)
    ddz = curve.deriv2(t)
    speed = np.hypot(dz[:, 0], dz[:, 1])
    if np.any(speed <= 1e-14 * max(1.0, float(np.max(speed, initial=0.0)))):
        raise DegenerateCurveError("|z'(t)| vanishes")
    tangent = dz / speed[:, None]
    normal = tangent @ Q.T
    return Frame(z, dz, ddz, speed, normal, tangent)


@dataclass(frozen=True)
class ParametricCurve(BoundaryCurve):
    z: Callable
    dz: Callable
    ddz: Callable
    name: str = "parametric"

    def eval(self, t):
        return _stack(self.z(t))

    def deriv1(self, t):
        return _stack(self.dz(t))

    def deriv2(self, t):
        return _stack(self.ddz(t))


def _stack(pair):
    a, b = pair
    return np.stack(np.broadcast_arrays(a, b), axis=-1).astype(float)


class RadialCurve(BoundaryCurve):
    """``z(t) = r(t) (cos t, sin t)``; subclasses supply ``radius(t, order)``."""

    def radius(self, t, order=0):
        raise NotImplementedError

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        e = np.stack([np.cos(t), np.sin(t)], axis=-1)
        return self.radius(t)[..., None] * e

    def deriv1(self, t):
        t = np.asarray(t, dtype=float)
        e = np.stack([np.cos(t), np.sin(t)], axis=-1)
        ep = np.stack([-np.sin(t), np.cos(t)], axis=-1)
        return self.radius(t, 1)[..., None] * e + self.radius(t)[..., None] * ep

    def deriv2(self, t):
        t = np.asarray(t, dtype=float)
        e = np.stack([np.cos(t), np.sin(t)], axis=-1)
        ep = np.stack([-np.sin(t), np.cos(t)], axis=-1)
        r, r1, r2 = self.radius(t), self.radius(t, 1), self.radius(t, 2)
        return (r2 - r)[..., None] * e + 2.0 * r1[..., None] * ep


class FunctionRadialCurve(RadialCurve):
    def __init__(self, r, dr, ddr, name="radial"):
        self._r = (r, dr, ddr)
        self.name = name

    def radius(self, t, order=0):
        return np.asarray(self._r[order](np.asarray(t, dtype=float)), dtype=float)


class RadialTrigCurve(RadialCurve):
    """Radial function ``sum_k a_k cos kt + sum_k b_k sin kt`` with ``a_0..a_m``, ``b_1..b_m``."""

    def __init__(self, a, b=None, name="trig"):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        m = len(a) - 1
        b = np.zeros(m) if b is None else np.atleast_1d(np.asarray(b, dtype=float))
        if len(b) != m:
            raise ValueError(f"need {m} sine coefficients, got {len(b)}")
        self.a = a
        self.b = b
        self.name = name

    @property
    def m(self):
        return len(self.a) - 1

    @classmethod
    def constant(cls, value, m=0):
        a = np.zeros(m + 1)
        a[0] = value
        return cls(a)

    @classmethod
    def from_vector(cls, x):
        """Inverse of :meth:`vector`: ``(a_0..a_m, b_1..b_m)``."""
        x = np.asarray(x, dtype=float)
        m = (len(x) - 1) // 2
        return cls(x[: m + 1], x[m + 1:])

    def vector(self):
        return np.concatenate([self.a, self.b])

    def padded(self, m):
        if m < self.m:
            raise ValueError("cannot pad to a lower degree")
        a = np.zeros(m + 1)
        b = np.zeros(m)
        a[: self.m + 1] = self.a
        b[: self.m] = self.b
        return RadialTrigCurve(a, b, self.name)

    def radius(self, t, order=0):
        t = np.asarray(t, dtype=float)
        k = np.arange(self.m + 1)
        kt = t[..., None] * k
        # d^order/dt^order of cos(kt) and sin(kt)
        c = k.astype(float) ** order
        shift = order * np.pi / 2.0
        cos_part = (self.a * c * np.cos(kt + shift)).sum(-1)
        sin_part = (np.concatenate([[0.0], self.b]) * c * np.sin(kt + shift)).sum(-1)
        return cos_part + sin_part

    def __repr__(self):
        return f"RadialTrigCurve(a={self.a.tolist()}, b={self.b.tolist()})"


@dataclass(frozen=True)
class CollocationGrid:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")

    @property
    def size(self):
        return 2 * self.n

    @property
    def nodes(self):
        return np.arange(2 * self.n) * np.pi / self.n


def circle(radius=1.0):
    return RadialTrigCurve([radius], name="circle")


def peanut():
    def r(t):
        return np.sqrt(0.5 * np.cos(t) ** 2 + 0.15 * np.sin(t) ** 2)

    def dr(t):
        return -0.175 * np.sin(2 * t) / r(t)

    def ddr(t):
        s1 = -0.35 * np.sin(2 * t)
        s2 = -0.7 * np.cos(2 * t)
        rr = r(t)
        return s2 / (2 * rr) - s1**2 / (4 * rr**3)

    return FunctionRadialCurve(r, dr, ddr, name="peanut")


def apple():
    def num(t, order=0):
        return [
            0.45 + 0.3 * np.cos(t) - 0.1 * np.sin(2 * t),
            -0.3 * np.sin(t) - 0.2 * np.cos(2 * t),
            -0.3 * np.cos(t) + 0.4 * np.sin(2 * t),
        ][order]

    def den(t, order=0):
        return [1 + 0.7 * np.cos(t), -0.7 * np.sin(t), -0.7 * np.cos(t)][order]

    def r(t):
        return num(t) / den(t)

    def dr(t):
        return (num(t, 1) - r(t) * den(t, 1)) / den(t)

    def ddr(t):
        return (num(t, 2) - 2 * dr(t) * den(t, 1) - r(t) * den(t, 2)) / den(t)

    return FunctionRadialCurve(r, dr, ddr, name="apple")


def kite():
    return ParametricCurve(
        lambda t: (np.cos(t) + 0.7 * np.cos(2 * t), 1.2 * np.sin(t)),
        lambda t: (-np.sin(t) - 1.4 * np.sin(2 * t), 1.2 * np.cos(t)),
        lambda t: (-np.cos(t) - 2.8 * np.cos(2 * t), -1.2 * np.sin(t)),
        name="kite",
    )


SHAPES = {"peanut": peanut, "apple": apple, "kite": kite}


def shape(name):
    try:
        return SHAPES[name]()
    except KeyError:
        raise ValueError(f"unknown shape {name!r}; choose from {sorted(SHAPES)}") from None


def radial_update(r, q, nodes):
    """Coefficient-wise ``r + q``; raises if the result is not positive on ``nodes``."""
    m = max(r.m, q.m)
    r, q = r.padded(m), q.padded(m)
    out = RadialTrigCurve(r.a + q.a, r.b + q.b, r.name)
    if np.min(out.radius(np.asarray(nodes))) <= 0.0:
        raise NonPositiveRadiusError("updated radius is not positive on the grid")
    return out


def perturbation_field(q, t):
    """Return ``q(t)(cos t, sin t)``, its t-derivative and ``v = Q q'``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    e = np.stack([np.cos(t), np.sin(t)], axis=-1)
    ep = np.stack([-np.sin(t), np.cos(t)], axis=-1)
    qv = q.radius(t)[:, None] * e
    dqv = q.radius(t, 1)[:, None] * e + q.radius(t)[:, None] * ep
    return qv, dqv, dqv @ Q.T


def trig_basis(m, t, order=0):
    """Columns ``cos kt`` (k=0..m) then ``sin kt`` (k=1..m), differentiated ``order`` times."""
    t = np.asarray(t, dtype=float)
    cols = []
    for k in range(m + 1):
        cols.append(k**order * np.cos(k * t + order * np.pi / 2))
    for k in range(1, m + 1):
        cols.append(k**order * np.sin(k * t + order * np.pi / 2))
    return np.stack(cols, axis=-1)


def trig_fit(samples, m):
    """Coefficients of the degree-``m`` trigonometric interpolant of equispaced samples."""
    samples = np.asarray(samples, dtype=float)
    N = len(samples)
    if 2 * m >= N:
        raise ValueError("need 2m < number of samples")
    c = np.fft.rfft(samples) / N
    a = np.empty(m + 1)
    a[0] = c[0].real
    a[1:] = 2.0 * c[1: m + 1].real
    b = -2.0 * c[1: m + 1].imag
    return RadialTrigCurve(a, b)


def winding_number(curve, point, samples=4096):
    t = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    d = curve.eval(t) - np.asarray(point, dtype=float)
    ang = np.unwrap(np.arctan2(d[:, 1], d[:, 0]))
    total = ang[-1] - ang[0] + np.angle(
        complex(*d[0]) / complex(*d[-1])
    )
    return int(round(total / (2 * np.pi)))


def polar_radius(curve, theta, samples=4096):
    """Radius along the ray at angle ``theta`` for a curve starlike about the origin."""
    if isinstance(curve, RadialCurve):
        return curve.radius(theta)
    from scipy.optimize import brentq

    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    t = np.linspace(0.0, 2 * np.pi, samples + 1)
    z = curve.eval(t)
    ang = np.unwrap(np.arctan2(z[:, 1], z[:, 0]))
    if np.any(np.diff(ang) <= 0):
        raise ValueError(f"{curve.name} is not starlike about the origin")
    ang0 = ang[0]

    def polar_angle(s):
        p = curve.eval(np.array([s]))[0]
        a = np.arctan2(p[1], p[0])
        return a + 2 * np.pi * np.round((np.interp(s, t, ang) - a) / (2 * np.pi))

    out = np.empty_like(theta)
    for i, th in enumerate(theta):
        target = ang0 + np.mod(th - ang0, 2 * np.pi)
        j = int(np.searchsorted(ang, target))
        j = min(max(j, 1), samples)
        s = brentq(lambda s: polar_angle(s) - target, t[j - 1], t[j], xtol=1e-15)
        out[i] = np.hypot(*curve.eval(np.array([s]))[0])
    return out


def radial_l2_error(r_rec, target, samples=512):
    """``L^2(0, 2pi)`` distance between the reconstructed and the target radial functions."""
    theta = np.arange(samples) * 2 * np.pi / samples
    diff = r_rec.radius(theta) - polar_radius(target, theta)
    return float(np.sqrt(2 * np.pi / samples * np.sum(diff**2)))
