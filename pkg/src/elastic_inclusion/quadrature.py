"""Nystrom discretisation of periodic boundary integral operators.

Densities are 2-vector fields at the ``2n`` nodes ``t_j = j pi / n`` stored
interleaved, ``(f_0x, f_0y, f_1x, ...)``, so an operator is a ``4n x 4n``
matrix whose ``(k, j)`` 2x2 block couples node ``j`` to node ``k``.

A parametrised kernel ``K(t, tau)`` is split as

    K = M_L ln(4 sin^2((t - tau)/2)) + M_C cot((tau - t)/2) + M_S

with smooth ``M_L``, ``M_C`` and ``M_S``.  The log part is integrated with the
trigonometric interpolation weights ``R``, the Cauchy part with the
conjugate-function weights and ``M_S`` with the trapezoidal rule.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels as kn
from .geometry import CollocationGrid, frame
from .media import Q


class SingularityMismatchError(ValueError):
    pass


class LogWeights(NamedTuple):
    n: int
    R: np.ndarray


def _offsets(n):
    t = np.arange(2 * n) * np.pi / n
    return t[:, None] - t[None, :]


def log_weights(n):
    """Weights ``R_kj`` for ``int ln(4 sin^2((t_k - tau)/2)) f(tau) dtau``."""
    if n < 2:
        raise ValueError("need n >= 2")
    th = _offsets(n)
    m = np.arange(1, n)
    R = -(2 * np.pi / n) * (np.cos(th[..., None] * m) / m).sum(-1) - (np.pi / n**2) * np.cos(n * th)
    return LogWeights(n, R)


def cauchy_weights(n):
    """Weights for ``(1/2pi) p.v. int cot((tau - t_k)/2) f(tau) dtau``."""
    th = _offsets(n)
    m = np.arange(1, n)
    return -(1.0 / n) * np.sin(th[..., None] * m).sum(-1)


def diff_matrix(n):
    """Derivative of the trigonometric interpolant at the nodes."""
    th = _offsets(n)
    m = np.arange(1, n)
    return -(1.0 / n) * (m * np.sin(th[..., None] * m)).sum(-1)


def log_kernel(n):
    """``ln(4 sin^2((t_k - t_j)/2))`` off the diagonal, 0 on it."""
    th = _offsets(n)
    with np.errstate(divide="ignore"):
        out = np.log(4.0 * np.sin(0.5 * th) ** 2)
    np.fill_diagonal(out, 0.0)
    return out


def cot_kernel(n):
    """``cot((t_j - t_k)/2)`` off the diagonal, 0 on it."""
    th = _offsets(n)
    out = np.zeros_like(th)
    off = ~np.eye(2 * n, dtype=bool)
    out[off] = 1.0 / np.tan(-0.5 * th[off])
    return out


def blocks_to_matrix(blocks):
    """``(M, N, 2, 2)`` kernel blocks to the interleaved ``(2M, 2N)`` matrix."""
    M, N = blocks.shape[:2]
    return blocks.transpose(0, 2, 1, 3).reshape(2 * M, 2 * N)


def matrix_to_blocks(mat):
    M, N = mat.shape[0] // 2, mat.shape[1] // 2
    return mat.reshape(M, 2, N, 2).transpose(0, 2, 1, 3)


def expand(scalar_matrix):
    """Scalar node-to-node matrix acting componentwise on interleaved densities."""
    return np.kron(scalar_matrix, np.eye(2))


@dataclass(frozen=True)
class DiscreteOperator:
    matrix: np.ndarray
    grid: CollocationGrid
    label: str = ""

    def __post_init__(self):
        if self.matrix.shape != (2 * self.grid.size, 2 * self.grid.size):
            raise ValueError("matrix does not match the grid")

    def apply(self, density):
        return apply(self, density)

    @classmethod
    def identity(cls, grid, scale=1.0):
        return cls(scale * np.eye(2 * grid.size, dtype=complex), grid, "I")


def apply(op, density):
    """Matrix-vector product; ``density`` is ``(2n, 2)`` or interleaved ``(4n,)``."""
    density = np.asarray(density)
    if density.shape == (op.grid.size, 2):
        return (op.matrix @ density.reshape(-1)).reshape(-1, 2)
    if density.shape == (2 * op.grid.size,):
        return op.matrix @ density
    raise ValueError(f"density of shape {density.shape} does not match the grid (n={op.grid.n})")


# ----------------------------------------------------------------------------
# assembly


def assemble_split(n, full, speed_factor=None, log=None, cauchy=None, diagonal=None):
    """Quadrature matrix from the split of a parametrised kernel.

    ``full``: ``(2n, 2n, 2, 2)`` kernel values, diagonal ignored.
    ``log``, ``cauchy``: coefficient blocks ``M_L``, ``M_C`` of the same shape.
    ``diagonal``: ``(2n, 2, 2)`` limits of ``M_S`` at ``t = tau``.
    """
    N = 2 * n
    off = ~np.eye(N, dtype=bool)
    MS = np.array(full, dtype=complex, copy=True)
    out = np.zeros_like(MS)
    if log is not None:
        MS -= log * log_kernel(n)[..., None, None]
        out += log * log_weights(n).R[..., None, None]
    if cauchy is not None:
        MS -= cauchy * cot_kernel(n)[..., None, None]
        out += 2 * np.pi * cauchy * cauchy_weights(n)[..., None, None]
    if diagonal is None:
        if log is not None or cauchy is not None:
            raise ValueError("a singular kernel needs its diagonal limit")
    else:
        MS[~off] = diagonal
    out += (np.pi / n) * MS
    return blocks_to_matrix(out)


def _pairs(curve, t, tau):
    """Frames at ``t`` and ``tau`` broadcast to pairs."""
    fx = frame(curve, t)
    fy = frame(curve, tau)
    return fx, fy


def _eval_param(kernel, curve, t, tau):
    """``kernel(z(t), n(t), z(tau), n(tau)) |z'(tau)|`` for 1-d arrays ``t``, ``tau``."""
    fx, fy = _pairs(curve, t, tau)
    val = kernel(fx.z, fx.normal, fy.z, fy.normal)
    return val * fy.speed[:, None, None]


def _grid_values(kernel, curve, n):
    t = CollocationGrid(n).nodes
    N = len(t)
    k, j = np.nonzero(~np.eye(N, dtype=bool))
    out = np.zeros((N, N, 2, 2), dtype=complex)
    out[k, j] = _eval_param(kernel, curve, t[k], t[j])
    return out


def _log_factor(t, tau):
    return np.log(4.0 * np.sin(0.5 * (t - tau)) ** 2)


def _cot_factor(t, tau):
    return 1.0 / np.tan(0.5 * (tau - t))


def _smooth_part(kernel, curve, t, tau, log_kernel_fn, cauchy_coef):
    val = _eval_param(kernel, curve, t, tau)
    if log_kernel_fn is not None:
        val = val - 0.5 * _eval_param(log_kernel_fn, curve, t, tau) * _log_factor(t, tau)[:, None, None]
    if cauchy_coef is not None:
        val = val - cauchy_coef * _cot_factor(t, tau)[:, None, None]
    return val


def richardson_diagonal(kernel, curve, t, log_kernel_fn=None, cauchy_coef=None, h0=0.05, levels=6):
    """Limit of the smooth part ``M_S(t, t)`` from symmetric offsets ``t +- h0 / 2^k``.

    The symmetric mean is even in ``h``, so the tableau eliminates powers of ``h^2``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    rows = []
    for lev in range(levels):
        h = h0 / 2**lev
        plus = _smooth_part(kernel, curve, t, t + h, log_kernel_fn, cauchy_coef)
        minus = _smooth_part(kernel, curve, t, t - h, log_kernel_fn, cauchy_coef)
        rows.append(0.5 * (plus + minus))
    table = [rows]
    for col in range(1, levels):
        prev = table[-1]
        fac = 4.0**col
        table.append([(fac * prev[i + 1] - prev[i]) / (fac - 1.0) for i in range(len(prev) - 1)])
    return table[-1][0]


def check_singularity(kernel, curve, singularity, log_kernel_fn=None, cauchy_coef=None, t0=0.3, tol=1e-2):
    """Raise if the near-diagonal behaviour contradicts the declared class."""
    t = np.array([t0, t0])
    h = np.array([1e-4, -1e-4])
    a = _smooth_part(kernel, curve, t, t + h, log_kernel_fn, cauchy_coef)
    b = _smooth_part(kernel, curve, t, t + h * 1e-2, log_kernel_fn, cauchy_coef)
    scale = max(1.0, float(np.abs(a).max()))
    jump = float(np.abs(a - b).max())
    if jump > tol * scale:
        raise SingularityMismatchError(
            f"kernel declared {singularity!r} but its remainder changes by {jump:.3g} "
            f"between offsets 1e-4 and 1e-6"
        )


def split_and_assemble(kernel, curve, grid, singularity="smooth", log_kernel=None, cauchy=None,
                       diagonal=None, check=True, label=""):
    """Assemble a Nystrom matrix for a Cartesian kernel ``kernel(x, nx, y, ny)``.

    singularity:
        ``smooth``      trapezoidal rule; the kernel is evaluated on the diagonal
                        by ``diagonal(t)`` if given, else by extrapolation
        ``log``         ``log_kernel`` is the coefficient of ``ln |x - y|``
        ``log-matched`` as ``log`` plus a Cauchy term with constant coefficient
                        ``cauchy`` (2x2) multiplying ``cot((tau - t)/2)``
    ``diagonal`` may be a callable ``t -> (len(t), 2, 2)`` for ``M_S(t, t)``;
    when omitted it is obtained by Richardson extrapolation.
    """
    n = grid.n
    t = grid.nodes
    if singularity not in ("smooth", "log", "log-matched"):
        raise ValueError(f"unknown singularity class {singularity!r}")
    if singularity == "smooth":
        log_kernel, cauchy = None, None
    elif log_kernel is None:
        raise ValueError("log and log-matched kernels need their log coefficient kernel")
    if singularity != "log-matched":
        cauchy = None
    if check:
        check_singularity(kernel, curve, singularity, log_kernel, cauchy)
    full = _grid_values(kernel, curve, n)
    if diagonal is None:
        diag = richardson_diagonal(kernel, curve, t, log_kernel, cauchy)
    else:
        diag = diagonal(t)
    logc = None
    if log_kernel is not None:
        logc = 0.5 * _grid_values(log_kernel, curve, n)
        # the log coefficient kernel is entire; fill its diagonal
        fr = frame(curve, t)
        logc[np.arange(len(t)), np.arange(len(t))] = 0.5 * _diag_value(log_kernel, fr)
    cc = None
    if cauchy is not None:
        cc = np.broadcast_to(np.asarray(cauchy, dtype=complex), full.shape)
    mat = assemble_split(n, full, log=logc, cauchy=cc, diagonal=diag)
    return DiscreteOperator(mat, grid, label)


def _diag_value(log_kernel, fr):
    """Value at ``x = y`` of an entire kernel: mean of two tiny symmetric offsets."""
    h = 1e-7 * np.maximum(1.0, np.abs(fr.z).max())
    tang = fr.tangent
    a = log_kernel(fr.z, fr.normal, fr.z + h * tang, fr.normal)
    b = log_kernel(fr.z, fr.normal, fr.z - h * tang, fr.normal)
    return 0.5 * (a + b) * fr.speed[:, None, None]


# ----------------------------------------------------------------------------
# boundary operators of one medium


def _static_c1(medium):
    return medium.mu / (2 * np.pi * (medium.lam + 2 * medium.mu))


def _static_c2(medium):
    return (medium.lam + medium.mu) / (np.pi * (medium.lam + 2 * medium.mu))


def _curvature_terms(fr):
    dz, ddz, speed = fr.dz, fr.ddz, fr.speed
    qdz = dz @ Q.T
    sigma = (ddz * qdz).sum(-1) / (2 * speed**2)
    rho = -(dz * ddz).sum(-1) / (2 * speed**2)
    tt = fr.tangent[:, :, None] * fr.tangent[:, None, :]
    return sigma, rho, tt


def single_layer(medium, curve, grid, check=False):
    """``S`` with kernel ``Phi(x, y)``."""

    def diag(t):
        fr = frame(curve, t)
        a0, _ = kn.static_coefficients(medium)
        p1, p2 = kn.regular_limit(medium)
        tt = fr.tangent[:, :, None] * fr.tangent[:, None, :]
        val = (p1 + a0 * np.log(fr.speed))[:, None, None] * np.eye(2) + p2 * tt
        return val * fr.speed[:, None, None]

    return split_and_assemble(
        lambda x, nx, y, ny: kn.fundamental_tensor(medium, x, y),
        curve, grid, "log",
        log_kernel=lambda x, nx, y, ny: kn.fundamental_tensor(medium, x, y, "log"),
        diagonal=diag, check=check, label="S",
    )


def double_layer(medium, curve, grid, check=False):
    """``K`` with kernel ``[T_y Phi(x, y)]^T``."""
    c1, c2 = _static_c1(medium), _static_c2(medium)

    def diag(t):
        sigma, rho, tt = _curvature_terms(frame(curve, t))
        return (c1 * sigma)[:, None, None] * np.eye(2) + (c2 * sigma)[:, None, None] * tt + (c1 * rho)[:, None, None] * Q

    return split_and_assemble(
        lambda x, nx, y, ny: kn.double_layer_kernel(medium, x, y, ny),
        curve, grid, "log-matched",
        log_kernel=lambda x, nx, y, ny: kn.double_layer_kernel(medium, x, y, ny, "log"),
        cauchy=-0.5 * c1 * Q, diagonal=diag, check=check, label="K",
    )


def single_traction(medium, curve, grid, check=False):
    """``L`` with kernel ``T_x Phi(x, y)``."""
    c1, c2 = _static_c1(medium), _static_c2(medium)

    def diag(t):
        sigma, rho, tt = _curvature_terms(frame(curve, t))
        # same diagonal limit as K
        return (c1 * sigma)[:, None, None] * np.eye(2) + (c2 * sigma)[:, None, None] * tt + (c1 * rho)[:, None, None] * Q

    return split_and_assemble(
        lambda x, nx, y, ny: kn.single_traction_kernel(medium, x, nx, y),
        curve, grid, "log-matched",
        log_kernel=lambda x, nx, y, ny: kn.single_traction_kernel(medium, x, nx, y, "log"),
        cauchy=-0.5 * c1 * Q, diagonal=diag, check=check, label="L",
    )


def combined_hyper(media_i, media_e, curve, grid, check=False):
    """``tau_i N_i - tau_e N_e``; weakly singular, diagonal by extrapolation."""
    return split_and_assemble(
        lambda x, nx, y, ny: kn.combined_hyper_kernel(media_i, media_e, x, nx, y, ny),
        curve, grid, "log",
        log_kernel=lambda x, nx, y, ny: kn.combined_hyper_kernel(media_i, media_e, x, nx, y, ny, "log"),
        check=check, label="tauN",
    )


def static_hyper_geometric(curve, grid):
    """``W`` with ``N0_j = c_j W`` (``c_j = 1/tau_j``) for the static traction-traction kernel.

    Uses ``W = d/ds_x d/ds_y G`` with ``G = (ln r I - J) / pi``, integrated by
    parts: ``W xi = -(1/|z'(t)|) d/dt int G(t, tau) xi'(tau) dtau``.
    """
    n = grid.n

    def g_kernel(x, nx, y, ny):
        d = np.asarray(x) - np.asarray(y)
        r = np.hypot(d[..., 0], d[..., 1])
        return (np.log(r)[..., None, None] * np.eye(2) - kn.jmat(d)) / np.pi

    def g_log(x, nx, y, ny):
        shape = np.broadcast_shapes(np.shape(x), np.shape(y))[:-1]
        return np.broadcast_to(np.eye(2) / np.pi, shape + (2, 2))

    def g_diag(t):
        fr = frame(curve, t)
        tt = fr.tangent[:, :, None] * fr.tangent[:, None, :]
        return (np.log(fr.speed)[:, None, None] * np.eye(2) - tt) / np.pi

    # integrate against xi' (no |z'(tau)| weight): divide it back out
    fr = frame(curve, grid.nodes)
    SG = split_and_assemble(
        g_kernel, curve, grid, "log", log_kernel=g_log,
        diagonal=lambda t: g_diag(t) * frame(curve, t).speed[:, None, None], check=False,
    ).matrix
    SG = SG / np.repeat(fr.speed, 2)[None, :]
    D = expand(diff_matrix(n))
    return -(np.repeat(1.0 / fr.speed, 2)[:, None]) * (D @ SG @ D)


def hypersingular(medium, curve, grid, W=None):
    """Bare ``N`` = static part (integrated by parts) + dynamic-minus-static part."""
    if W is None:
        W = static_hyper_geometric(curve, grid)
    reg = split_and_assemble(
        lambda x, nx, y, ny: kn.hyper_kernel(medium, x, nx, y, ny, "regular"),
        curve, grid, "log",
        log_kernel=lambda x, nx, y, ny: kn.hyper_kernel(medium, x, nx, y, ny, "log"),
        check=False,
    ).matrix
    return DiscreteOperator(W / medium.tau + reg, grid, "N")


def trapezoid_weights(curve, grid):
    return (np.pi / grid.n) * frame(curve, grid.nodes).speed
