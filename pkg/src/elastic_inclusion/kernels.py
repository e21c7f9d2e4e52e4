"""Fundamental tensor of the Navier equation, its tractions and the far-field kernels.

All kernels are evaluated point-wise in Cartesian form on batches of point
pairs: ``x``, ``y`` and normals have shape ``(..., 2)`` and tensors come back
with shape ``(..., 2, 2)``.

The tensor is ``Phi = phi1(r) I + phi2(r) J(x - y)`` with ``J(d) = d d^T / |d|^2``.
Every radial function in use is handled as a *family* of six arrays (value and
two r-derivatives of ``phi1`` and ``phi2``).  Four families are available:

``full``     the dynamic tensor
``static``   the Kelvin tensor, ``a0 ln r I + b0 J``
``regular``  ``full - static``; bounded at ``r = 0``
``log``      the coefficient of ``ln r`` in ``full`` (an entire function)

Near ``r = 0`` the ``regular`` and ``log`` families are summed from their
power series so that no ``1/r^2`` cancellation takes place.
"""

from typing import NamedTuple

import numpy as np

from .media import Q, wavenumbers
from .specfun import bessel01, bessel_j01

EULER_GAMMA = 0.57721566490153286061
FAMILIES = ("full", "static", "regular", "log")

# series are used while k_s r stays below this value
SERIES_LIMIT = 3.0
SERIES_TERMS = 28


class RadialFamily(NamedTuple):
    p1: np.ndarray
    dp1: np.ndarray
    ddp1: np.ndarray
    p2: np.ndarray
    dp2: np.ndarray
    ddp2: np.ndarray

    def __add__(self, other):
        return RadialFamily(*(a + b for a, b in zip(self, other)))

    def __sub__(self, other):
        return RadialFamily(*(a - b for a, b in zip(self, other)))


class FarFieldCoeffs(NamedTuple):
    beta_p: complex
    beta_s: complex
    gamma_p: complex
    gamma_s: complex
    kp: float
    ks: float
    lam: float
    mu: float

    def beta(self, alpha):
        return self.beta_p if alpha == "p" else self.beta_s

    def gamma(self, alpha):
        return self.gamma_p if alpha == "p" else self.gamma_s

    def k(self, alpha):
        return self.kp if alpha == "p" else self.ks


def static_coefficients(medium):
    """``(a0, b0)`` of the Kelvin tensor ``a0 ln r I + b0 J``."""
    lam, mu = medium.lam, medium.mu
    den = 4.0 * np.pi * mu * (lam + 2.0 * mu)
    return -(lam + 3.0 * mu) / den, (lam + mu) / den


# ----------------------------------------------------------------------------
# radial families


def _cylinder_terms(k, r, z0, z1):
    """g, h and H0-type values with two derivatives for cylinder functions z0, z1 at kr."""
    g = k * z1 / r
    dg = k * k * z0 / r - 2.0 * k * z1 / r**2
    ddg = -(k**3) * z1 / r - 3.0 * k * k * z0 / r**2 + 6.0 * k * z1 / r**3
    h = 2.0 * g - k * k * z0
    dh = 2.0 * dg + k**3 * z1
    ddh = 2.0 * ddg + k**4 * z0 - k**3 * z1 / r
    f = z0
    df = -k * z1
    ddf = -k * k * z0 + k * z1 / r
    return (f, df, ddf), (g, dg, ddg), (h, dh, ddh)


def _combine(medium, parts_s, parts_p):
    (f_s, g_s, h_s), (_, g_p, h_p) = parts_s, parts_p
    a = 1j / (4.0 * medium.mu)
    b = 1j / (4.0 * medium.rho * medium.omega**2)
    p1 = [a * f_s[i] - b * (g_s[i] - g_p[i]) for i in range(3)]
    p2 = [b * (h_s[i] - h_p[i]) for i in range(3)]
    return RadialFamily(*p1, *p2)


def _direct(medium, r, log_part):
    kp, ks = wavenumbers(medium)
    parts = []
    for k in (ks, kp):
        if log_part:
            j0, j1 = bessel_j01(k * r)
            z0, z1 = (2j / np.pi) * j0, (2j / np.pi) * j1
        else:
            j0, j1, y0, y1 = bessel01(k * r)
            z0, z1 = j0 + 1j * y0, j1 + 1j * y1
        parts.append(_cylinder_terms(k, r, z0, z1))
    return _combine(medium, parts[0], parts[1])


def _series_coefficients(medium):
    """Coefficients ``P_m``, ``L_m`` with ``phi = sum r^2m (P_m + L_m ln r)`` for ``full``.

    The ``1/r^2`` poles of the two wave parts cancel and are left out.
    """
    kp, ks = wavenumbers(medium)
    M = SERIES_TERMS
    m = np.arange(M)
    fact = np.cumprod(np.concatenate([[1.0], np.arange(1.0, M)]))
    harm = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1.0, M))])
    a = (-0.25) ** m / fact**2
    bb = (-0.25) ** m / (fact * fact * (m + 1))
    cc = 2.0 * harm + 1.0 / (m + 1)

    def hankel0(k):
        lk = np.log(0.5 * k) + EULER_GAMMA
        km = k ** (2.0 * m)
        P = km * (a + (2j / np.pi) * (a * lk - harm * a))
        L = km * (2j / np.pi) * a
        return P, L

    def g(k):
        # k^2 H1(kr)/(kr) without the pole -2i/(pi r^2)
        lk = np.log(0.5 * k) + EULER_GAMMA
        km = k ** (2.0 * m + 2)
        P = km * (0.5 * bb + (1j / np.pi) * bb * lk - (0.5j / np.pi) * bb * cc)
        L = km * (1j / np.pi) * bb
        return P, L

    ca = 1j / (4.0 * medium.mu)
    cb = 1j / (4.0 * medium.rho * medium.omega**2)
    H0s, H0p = hankel0(ks), hankel0(kp)
    Gs, Gp = g(ks), g(kp)
    p1 = [ca * H0s[i] - cb * (Gs[i] - Gp[i]) for i in range(2)]
    p2 = [
        cb * ((2.0 * Gs[i] - ks * ks * H0s[i]) - (2.0 * Gp[i] - kp * kp * H0p[i]))
        for i in range(2)
    ]
    return p1, p2


def _series_eval(P, L, r, log_part):
    m = np.arange(len(P))[:, None]
    rr = r[None, :]
    lr = np.log(rr)
    if log_part:
        P, L = L, np.zeros_like(L)
    P = P[:, None]
    L = L[:, None]
    pw = rr ** (2 * m)
    v = (pw * (P + L * lr)).sum(0)
    # r^(2m-1) and r^(2m-2) factors; m = 0 terms carry only the log part
    pw1 = rr ** (2 * m - 1)
    d1 = (pw1 * (2 * m * P + L + 2 * m * L * lr)).sum(0)
    pw2 = rr ** (2 * m - 2)
    d2 = (pw2 * ((2 * m - 1) * (2 * m * P + L) + 2 * m * L + (2 * m - 1) * 2 * m * L * lr)).sum(0)
    return v, d1, d2


def _series(medium, r, log_part, subtract_static):
    (P1, L1), (P2, L2) = _series_coefficients(medium)
    if subtract_static:
        a0, b0 = static_coefficients(medium)
        L1 = L1.copy()
        P2 = P2.copy()
        L1[0] -= a0
        P2[0] -= b0
    return RadialFamily(*_series_eval(P1, L1, r, log_part), *_series_eval(P2, L2, r, log_part))


def _static(medium, r):
    a0, b0 = static_coefficients(medium)
    zero = np.zeros_like(r)
    return RadialFamily(
        a0 * np.log(r) + 0j, a0 / r + 0j, -a0 / r**2 + 0j, b0 + zero + 0j, zero + 0j, zero + 0j
    )


def radial_family(medium, r, family="full"):
    """Values of ``phi1, phi2`` and their first two r-derivatives at ``r > 0``."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise ValueError("radial functions require r > 0 (singular point)")
    shape = r.shape
    r = r.ravel()
    if family == "static":
        out = _static(medium, r)
        return RadialFamily(*(v.reshape(shape) for v in out))
    ks = wavenumbers(medium)[1]
    near = ks * r <= SERIES_LIMIT
    out = [np.empty(r.shape, dtype=complex) for _ in range(6)]
    if near.any():
        vals = _series(medium, r[near], family == "log", family != "log")
        if family == "full":
            vals = vals + _static(medium, r[near])
        for o, v in zip(out, vals):
            o[near] = v
    far = ~near
    if far.any():
        vals = _direct(medium, r[far], family == "log")
        if family == "regular":
            vals = vals - _static(medium, r[far])
        for o, v in zip(out, vals):
            o[far] = v
    return RadialFamily(*(o.reshape(shape) for o in out))


def regular_limit(medium):
    """Limits at ``r = 0`` of ``phi1 - a0 ln r`` and of ``phi2``."""
    (P1, _), (P2, _) = _series_coefficients(medium)
    return complex(P1[0]), complex(P2[0])


def phi12(medium, t):
    """``(Phi_1(t), Phi_2(t))`` of the dynamic tensor for ``t > 0``."""
    fam = radial_family(medium, t, "full")
    return fam.p1, fam.p2


# ----------------------------------------------------------------------------
# tensors and their derivatives


def jmat(d):
    d = np.asarray(d, dtype=float)
    r2 = (d * d).sum(-1)
    return d[..., :, None] * d[..., None, :] / r2[..., None, None]


def _separation(x, y):
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    r = np.hypot(d[..., 0], d[..., 1])
    if np.any(r == 0):
        raise ValueError("x and y coincide (singular point)")
    return d, r


_I2 = np.eye(2)


def tensor_derivatives(fam, d, r, order=1):
    """``Phi``, its x-gradient ``D1[..., i, c, k]`` and (order 2) Hessian ``D2[..., i, c, k, l]``."""
    u = d / r[..., None]
    uu = u[..., :, None] * u[..., None, :]
    rr = r[..., None, None]
    phi = fam.p1[..., None, None] * _I2 + fam.p2[..., None, None] * uu
    A = fam.dp1
    B = fam.dp2 - 2.0 * fam.p2 / r
    C = fam.p2 / r
    e = np.einsum
    D1 = (
        A[..., None, None, None] * e("...k,ic->...ick", u, _I2)
        + B[..., None, None, None] * e("...i,...c,...k->...ick", u, u, u)
        + C[..., None, None, None] * (e("ik,...c->...ick", _I2, u) + e("ck,...i->...ick", _I2, u))
    )
    if order < 2:
        return phi, D1, None
    dA = fam.ddp1
    dB = fam.ddp2 - 2.0 * fam.dp2 / r + 2.0 * fam.p2 / r**2
    dC = fam.dp2 / r - fam.p2 / r**2
    P = (_I2 - uu) / rr
    s = (..., None, None, None, None)
    D2 = (
        dA[s] * e("...l,...k,ic->...ickl", u, u, _I2)
        + A[s] * e("...kl,ic->...ickl", P, _I2)
        + dB[s] * e("...l,...i,...c,...k->...ickl", u, u, u, u)
        + B[s] * (
            e("...il,...c,...k->...ickl", P, u, u)
            + e("...i,...cl,...k->...ickl", u, P, u)
            + e("...i,...c,...kl->...ickl", u, u, P)
        )
        + dC[s] * e("...l,...ick->...ickl", u, e("ik,...c->...ick", _I2, u) + e("ck,...i->...ick", _I2, u))
        + C[s] * (e("ik,...cl->...ickl", _I2, P) + e("ck,...il->...ickl", _I2, P))
    )
    return phi, D1, D2


def traction_apply(medium, D, n):
    """Traction ``lam n div + mu (grad + grad^T) n`` of a matrix field given its gradient.

    ``D[..., a, b, k]`` is ``d M_ab / d x_k``; the traction acts on every column b.
    """
    lam, mu = medium.lam, medium.mu
    div = np.einsum("...kbk->...b", D)
    return (
        lam * n[..., :, None] * div[..., None, :]
        + mu * (np.einsum("...ibk,...k->...ib", D, n) + np.einsum("...kbi,...k->...ib", D, n))
    )


def fundamental_tensor(medium, x, y, family="full"):
    d, r = _separation(x, y)
    fam = radial_family(medium, r, family)
    return fam.p1[..., None, None] * _I2 + fam.p2[..., None, None] * jmat(d)


def static_fundamental(medium, x, y):
    return fundamental_tensor(medium, x, y, "static")


def _dl_from_d1(medium, D1, ny):
    # T_y acts with d/dy = -d/dx; the kernel is the transpose
    return -np.swapaxes(traction_apply(medium, D1, ny), -1, -2)


def double_layer_kernel(medium, x, y, ny, family="full"):
    """``[T_y Phi(x, y)]^T``, the kernel of K and D."""
    d, r = _separation(x, y)
    _, D1, _ = tensor_derivatives(radial_family(medium, r, family), d, r, 1)
    return _dl_from_d1(medium, D1, np.asarray(ny, dtype=float))


def single_traction_kernel(medium, x, nx, y, family="full"):
    """``T_x Phi(x, y)``, the kernel of L."""
    d, r = _separation(x, y)
    _, D1, _ = tensor_derivatives(radial_family(medium, r, family), d, r, 1)
    return traction_apply(medium, D1, np.asarray(nx, dtype=float))


def hyper_kernel(medium, x, nx, y, ny, family="full"):
    """``T_x [T_y Phi(x, y)]^T``, the kernel of N."""
    d, r = _separation(x, y)
    _, _, D2 = tensor_derivatives(radial_family(medium, r, family), d, r, 2)
    return _hyper_from_d2(medium, D2, np.asarray(nx, dtype=float), np.asarray(ny, dtype=float))


def _hyper_from_d2(medium, D2, nx, ny):
    lam, mu = medium.lam, medium.mu
    e = np.einsum
    # M_ab = (T_y Phi)_ba ; DM[a, b, l] = d M_ab / d x_l
    div = e("...kakl->...al", D2)
    DM = -(
        lam * e("...b,...al->...abl", ny, div)
        + mu * (e("...bakl,...k->...abl", D2, ny) + e("...kabl,...k->...abl", D2, ny))
    )
    return traction_apply(medium, DM, nx)


def combined_hyper_kernel(media_i, media_e, x, nx, y, ny, family="regular"):
    """``tau_i T_x[T_y(Phi_i - Phi_i0)]^T - tau_e T_x[T_y(Phi_e - Phi_e0)]^T``.

    ``family="log"`` gives the coefficient of ``ln |x - y|`` instead.
    """
    out = 0.0
    for sign, med in ((1.0, media_i), (-1.0, media_e)):
        out = out + sign * med.tau * hyper_kernel(med, x, nx, y, ny, family)
    return out


# ----------------------------------------------------------------------------
# far field


def farfield_coeffs(exterior):
    kp, ks = wavenumbers(exterior)
    lam, mu = exterior.lam, exterior.mu
    e_plus = np.exp(1j * np.pi / 4)
    e_minus = np.exp(-1j * np.pi / 4)
    return FarFieldCoeffs(
        beta_p=e_plus / ((lam + 2 * mu) * np.sqrt(8 * np.pi * kp)),
        beta_s=e_plus / (mu * np.sqrt(8 * np.pi * ks)),
        gamma_p=e_minus * np.sqrt(kp / (8 * np.pi)) / (lam + 2 * mu),
        gamma_s=e_minus * np.sqrt(ks / (8 * np.pi)) / mu,
        kp=kp,
        ks=ks,
        lam=lam,
        mu=mu,
    )


def projector(xhat, alpha):
    """``J_p = xhat xhat^T`` or ``J_s = I - J_p``."""
    jp = jmat(xhat)
    if alpha == "p":
        return jp
    if alpha == "s":
        return _I2 - jp
    raise ValueError(f"alpha must be 'p' or 's', got {alpha!r}")


def f_matrix(coeffs, xhat, n):
    """``lam xhat n^T + mu n xhat^T + mu (n . xhat) I``; linear in ``n``."""
    xhat = np.asarray(xhat, dtype=float)
    n = np.asarray(n)
    lam, mu = coeffs.lam, coeffs.mu
    return (
        lam * xhat[..., :, None] * n[..., None, :]
        + mu * n[..., :, None] * xhat[..., None, :]
        + mu * (n * xhat).sum(-1)[..., None, None] * _I2
    )


def _phase(coeffs, xhat, y, alpha):
    return np.exp(-1j * coeffs.k(alpha) * (np.asarray(xhat) * np.asarray(y)).sum(-1))


def farfield_single_kernel(coeffs, xhat, y, alpha):
    ph = _phase(coeffs, xhat, y, alpha)
    return coeffs.beta(alpha) * projector(xhat, alpha) * ph[..., None, None]


def farfield_double_kernel(coeffs, xhat, y, ny, alpha):
    ph = _phase(coeffs, xhat, y, alpha)
    JF = projector(xhat, alpha) @ f_matrix(coeffs, xhat, ny)
    return coeffs.gamma(alpha) * JF * ph[..., None, None]


def frechet_G(coeffs, xhat, z, dz, q, dq, alpha):
    """Derivative of ``F(xhat, z) |z'| e^{-ik xhat.z}`` along ``q`` (phase factor removed)."""
    xhat = np.asarray(xhat, dtype=float)
    v = np.asarray(dq) @ Q.T
    speed = np.hypot(dz[..., 0], dz[..., 1])
    n = np.asarray(dz) @ Q.T / speed[..., None]
    k = coeffs.k(alpha)
    xq = (xhat * q).sum(-1)
    scale = np.asarray(1j * k * xq * speed)
    return f_matrix(coeffs, xhat, v) - scale[..., None, None] * f_matrix(coeffs, xhat, n)


def frechet_g(coeffs, xhat, z, dz, q, dq, alpha):
    """Derivative of ``|z'| e^{-ik xhat.z}`` along ``q`` (phase factor removed)."""
    k = coeffs.k(alpha)
    speed = np.hypot(dz[..., 0], dz[..., 1])
    xq = (np.asarray(xhat) * q).sum(-1)
    return -1j * k * xq * speed + (dz * dq).sum(-1) / speed
