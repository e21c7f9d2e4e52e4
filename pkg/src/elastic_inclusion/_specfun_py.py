"""Pure numpy evaluation of J0, J1, Y0, Y1 for real positive arguments.

Three regimes, chosen per element:

* ``x <= 2``: ascending power series.
* ``2 < x <= 25``: Miller backward recurrence for the J_k family, normalised
  by ``J0 + 2 sum J_2k = 1``; Y0 and Y1 follow from the Neumann series in the
  recurrence values.
* ``x > 25``: Hankel asymptotic expansion summed to its smallest term.

The compiled extension implements the same scheme element by element.
"""

import numpy as np

EULER_GAMMA = 0.57721566490153286061
SERIES_MAX = 2.0
ASYMPTOTIC_MIN = 25.0


def _series(x):
    q = 0.25 * x * x
    lg = np.log(0.5 * x) + EULER_GAMMA
    j0 = np.zeros_like(x)
    j1 = np.zeros_like(x)
    s0 = np.zeros_like(x)  # sum (-1)^(k+1) H_k q^k / (k!)^2
    s1 = np.zeros_like(x)  # sum (2 H_k + 1/(k+1)) (-q)^k / (k! (k+1)!)
    t0 = np.ones_like(x)   # (-q)^k / (k!)^2
    t1 = np.ones_like(x)   # (-q)^k / (k! (k+1)!)
    hk = 0.0
    for k in range(30):
        if k > 0:
            t0 = t0 * (-q) / (k * k)
            t1 = t1 * (-q) / (k * (k + 1))
            hk += 1.0 / k
        j0 += t0
        j1 += t1
        s0 -= hk * t0
        s1 += (2.0 * hk + 1.0 / (k + 1)) * t1
    j1 *= 0.5 * x
    y0 = (2.0 / np.pi) * (lg * j0 + s0)
    # psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma; the gamma part joins lg
    y1 = -2.0 / (np.pi * x) + (2.0 / np.pi) * lg * j1 - (0.5 * x / np.pi) * s1
    return j0, j1, y0, y1


def _start_order(xmax):
    n = int(xmax + 9.0 * xmax ** (1.0 / 3.0) + 30.0)
    return n + (n % 2)


def _miller(x):
    n = _start_order(float(x.max()))
    jp1 = np.zeros_like(x)
    jk = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    ysum0 = np.zeros_like(x)  # sum_{k>=1} (-1)^k J_2k / k
    ysum1 = np.zeros_like(x)  # sum_{k>=1} (-1)^k (J_{2k-1} - J_{2k+1}) / k
    j_odd_above = np.zeros_like(x)
    two_over_x = 2.0 / x
    j1 = None
    for k in range(n, 0, -1):
        jm1 = k * two_over_x * jk - jp1
        # jk is J_k (unnormalised); jm1 is J_(k-1)
        if k % 2 == 0:
            m = k // 2
            sgn = -1.0 if m % 2 else 1.0
            norm += 2.0 * jk
            ysum0 += sgn * jk / m
            # J_{2m-1} = jm1, J_{2m+1} = j_odd_above
            ysum1 += sgn * (jm1 - j_odd_above) / m
        else:
            j_odd_above = jk
        if k == 1:
            j1 = jk
        jp1, jk = jk, jm1
        big = np.abs(jk) > 1e250
        if big.any():
            s = np.where(big, 1e-250, 1.0)
            jp1 = jp1 * s
            jk = jk * s
            norm = norm * s
            ysum0 = ysum0 * s
            ysum1 = ysum1 * s
            j_odd_above = j_odd_above * s
            if j1 is not None:
                j1 = j1 * s
    j0 = jk
    norm += j0
    j0 = j0 / norm
    j1 = j1 / norm
    ysum0 = ysum0 / norm
    ysum1 = ysum1 / norm
    lg = np.log(0.5 * x) + EULER_GAMMA
    y0 = (2.0 / np.pi) * (lg * j0 - 2.0 * ysum0)
    y1 = (2.0 / np.pi) * (-j0 / x + lg * j1 + ysum1)
    return j0, j1, y0, y1


def _asymptotic(x):
    out = []
    for nu in (0, 1):
        mu = 4.0 * nu * nu
        s = np.ones(x.shape, dtype=complex)
        term = np.ones(x.shape, dtype=complex)
        prev = np.full(x.shape, np.inf)
        active = np.ones(x.shape, dtype=bool)
        for k in range(1, 60):
            term = term * 1j * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
            mag = np.abs(term)
            active &= mag < prev
            s = s + np.where(active, term, 0.0)
            prev = mag
            if not active.any() or (mag[active] < 1e-17).all():
                break
        phase = x - (0.5 * nu + 0.25) * np.pi
        h = np.sqrt(2.0 / (np.pi * x)) * np.exp(1j * phase) * s
        out.append(h)
    h0, h1 = out
    return h0.real, h1.real, h0.imag, h1.imag


def bessel01(x):
    """Return ``(J0, J1, Y0, Y1)`` at ``x`` (array, all entries > 0)."""
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.ravel()
    res = [np.empty_like(x) for _ in range(4)]
    lo = x <= SERIES_MAX
    hi = x > ASYMPTOTIC_MIN
    mid = ~(lo | hi)
    for mask, fn in ((lo, _series), (mid, _miller), (hi, _asymptotic)):
        if mask.any():
            for r, v in zip(res, fn(x[mask])):
                r[mask] = v
    return tuple(r.reshape(shape) for r in res)


def bessel_j01(x):
    """Return ``(J0, J1)``; valid for ``x >= 0``."""
    x = np.asarray(x, dtype=float)
    j0 = np.ones_like(x)
    j1 = np.zeros_like(x)
    pos = x > 0
    if pos.any():
        a, b, _, _ = bessel01(x[pos])
        j0[pos] = a
        j1[pos] = b
    return j0, j1
