import numpy as np
import pytest
import scipy.special as sp

from elastic_inclusion import geometry as g
from elastic_inclusion import kernels as kn
from elastic_inclusion import quadrature as qd
from elastic_inclusion.media import Q, ElasticMedium

ME = ElasticMedium(1.0, 1.0, 1.0, 8.0)
MI = ElasticMedium(2.0, 2.0, 1.0, 8.0)


@pytest.mark.parametrize("n", [2, 8, 33])
def test_log_weights_integrate_constants_to_zero(n):
    R = qd.log_weights(n).R
    assert np.abs(R.sum(1)).max() < 1e-12


@pytest.mark.parametrize("m", [1, 2, 5])
def test_log_weights_exact_on_cosines(m):
    # ln(4 sin^2(s/2)) = -2 sum cos(ks)/k, so the integral against cos(m tau) is -2 pi cos(m t) / m
    n = 16
    t = g.CollocationGrid(n).nodes
    got = qd.log_weights(n).R @ np.cos(m * t)
    assert np.abs(got + 2 * np.pi * np.cos(m * t) / m).max() < 1e-12


def test_log_weights_super_algebraic_on_exp_cos():
    # e^{cos tau} = I0(1) + 2 sum I_m(1) cos(m tau)
    def exact(t):
        m = np.arange(1, 40)
        return -4 * np.pi * (sp.iv(m, 1.0) / m * np.cos(np.outer(t, m))).sum(-1)

    errs = []
    for n in (4, 8, 16):
        t = g.CollocationGrid(n).nodes
        errs.append(np.abs(qd.log_weights(n).R @ np.exp(np.cos(t)) - exact(t)).max())
    assert errs[2] < 1e-13
    assert errs[0] / errs[1] > 1e3


def test_log_weights_reject_small_n():
    with pytest.raises(ValueError):
        qd.log_weights(1)


def test_cauchy_and_differentiation_weights():
    n = 16
    t = g.CollocationGrid(n).nodes
    assert np.allclose(qd.cauchy_weights(n) @ np.cos(3 * t), -np.sin(3 * t), atol=1e-13)
    assert np.allclose(qd.cauchy_weights(n) @ np.sin(2 * t), np.cos(2 * t), atol=1e-13)
    assert np.allclose(qd.diff_matrix(n) @ np.sin(2 * t), 2 * np.cos(2 * t), atol=1e-12)


def test_block_layout_round_trip(rng):
    blocks = rng.normal(size=(3, 5, 2, 2))
    mat = qd.blocks_to_matrix(blocks)
    assert mat.shape == (6, 10)
    assert mat[2 * 1 + 0, 2 * 4 + 1] == blocks[1, 4, 0, 1]
    assert np.array_equal(qd.matrix_to_blocks(mat), blocks)


def test_smooth_kernel_on_unit_circle():
    # on the unit circle cos(t - tau) = x . y
    grid = g.CollocationGrid(16)
    kernel = lambda x, nx, y, ny: np.exp((x * y).sum(-1))[..., None, None] * np.eye(2)
    op = qd.split_and_assemble(kernel, g.circle(), grid, "smooth", diagonal=lambda t: np.e * np.ones((len(t), 1, 1)) * np.eye(2))
    out = op.apply(np.ones((grid.size, 2)))
    assert np.abs(out - 2 * np.pi * sp.iv(0, 1.0)).max() < 1e-13


def test_zero_kernel_gives_zero_matrix():
    grid = g.CollocationGrid(8)
    zero = lambda x, nx, y, ny: np.zeros(np.broadcast_shapes(x.shape, y.shape)[:-1] + (2, 2))
    op = qd.split_and_assemble(zero, g.peanut(), grid, "smooth")
    assert not np.any(op.matrix)


def test_apply_contract(rng):
    grid = g.CollocationGrid(8)
    op = qd.single_layer(ME, g.peanut(), grid)
    x = rng.normal(size=(grid.size, 2)) + 1j * rng.normal(size=(grid.size, 2))
    y = rng.normal(size=(grid.size, 2))
    assert np.array_equal(qd.DiscreteOperator.identity(grid).apply(x), x)
    assert np.allclose(op.apply(2 * x - 3j * y), 2 * op.apply(x) - 3j * op.apply(y))
    assert np.allclose(op.apply(x.reshape(-1)), op.apply(x).reshape(-1))
    lhs = (op.apply(x).reshape(-1) * y.reshape(-1)).sum()
    rhs = (x.reshape(-1) * (op.matrix.T @ y.reshape(-1))).sum()
    assert lhs == pytest.approx(rhs)
    with pytest.raises(ValueError):
        op.apply(np.ones((5, 2)))


def test_mismatched_singularity_is_detected():
    grid = g.CollocationGrid(8)
    with pytest.raises(qd.SingularityMismatchError):
        qd.split_and_assemble(lambda x, nx, y, ny: kn.fundamental_tensor(ME, x, y), g.peanut(), grid, "smooth")
    with pytest.raises(ValueError):
        qd.split_and_assemble(lambda x, nx, y, ny: 0, g.peanut(), grid, "weird")


@pytest.mark.parametrize("name", ["S", "K", "L"])
@pytest.mark.parametrize("shape", ["peanut", "kite"])
def test_closed_form_diagonals_match_extrapolation(name, shape):
    curve, grid = g.shape(shape), g.CollocationGrid(8)
    c1 = qd._static_c1(ME)
    cases = {
        "S": (lambda x, nx, y, ny: kn.fundamental_tensor(ME, x, y),
              lambda x, nx, y, ny: kn.fundamental_tensor(ME, x, y, "log"), None, qd.single_layer),
        "K": (lambda x, nx, y, ny: kn.double_layer_kernel(ME, x, y, ny),
              lambda x, nx, y, ny: kn.double_layer_kernel(ME, x, y, ny, "log"), -0.5 * c1 * Q, qd.double_layer),
        "L": (lambda x, nx, y, ny: kn.single_traction_kernel(ME, x, nx, y),
              lambda x, nx, y, ny: kn.single_traction_kernel(ME, x, nx, y, "log"), -0.5 * c1 * Q, qd.single_traction),
    }
    ker, logk, cc, build = cases[name]
    closed = build(ME, curve, grid, check=True).matrix
    extrap = qd.split_and_assemble(ker, curve, grid, "log-matched" if cc is not None else "log",
                                   log_kernel=logk, cauchy=cc).matrix
    assert np.abs(closed - extrap).max() < 1e-8 * np.abs(closed).max()


def test_combined_operator_equals_difference_of_bare_operators():
    curve, grid = g.peanut(), g.CollocationGrid(16)
    Ni = qd.hypersingular(MI, curve, grid).matrix
    Ne = qd.hypersingular(ME, curve, grid).matrix
    Nc = qd.combined_hyper(MI, ME, curve, grid, check=True).matrix
    assert np.abs(MI.tau * Ni - ME.tau * Ne - Nc).max() < 1e-8 * np.abs(Nc).max()


def _density(t):
    return np.stack([np.exp(np.cos(t)), np.sin(t) + 0.5 * np.cos(2 * t)], -1)


BUILDERS = {
    "S": lambda c, gr: qd.single_layer(ME, c, gr),
    "K": lambda c, gr: qd.double_layer(ME, c, gr),
    "L": lambda c, gr: qd.single_traction(MI, c, gr),
    "tauN": lambda c, gr: qd.combined_hyper(MI, ME, c, gr),
    "N": lambda c, gr: qd.hypersingular(ME, c, gr),
}


@pytest.mark.parametrize("name", BUILDERS)
def test_spectral_self_convergence(name):
    curve = g.peanut()
    ref_grid = g.CollocationGrid(128)
    ref = BUILDERS[name](curve, ref_grid).apply(_density(ref_grid.nodes))
    errs = {}
    for n in (32, 64):
        grid = g.CollocationGrid(n)
        out = BUILDERS[name](curve, grid).apply(_density(grid.nodes))
        errs[n] = np.abs(out - ref[:: 128 // n]).max() / np.abs(ref).max()
    assert errs[32] / max(errs[64], 1e-16) >= 1e2 or errs[64] < 1e-10


def _near_boundary_potentials(curve, phi_fn, targets_t, eps, N=60000):
    """Single-layer traction and double-layer trace at ``z(t) +- eps n(t)`` by a very fine trapezoid rule."""
    s = np.arange(N) * 2 * np.pi / N
    fy = g.frame(curve, s)
    phi = phi_fn(s)
    w = fy.speed * 2 * np.pi / N
    fx = g.frame(curve, targets_t)
    out = {}
    for side, sign in (("exterior", 1.0), ("interior", -1.0)):
        sl, dl = [], []
        for z, n in zip(fx.z, fx.normal):
            x = z + sign * eps * n
            L = kn.single_traction_kernel(ME, x[None], n[None], fy.z)
            K = kn.double_layer_kernel(ME, x[None], fy.z, fy.normal)
            sl.append(np.einsum("jab,jb,j->a", L, phi, w))
            dl.append(np.einsum("jab,jb,j->a", K, phi, w))
        out[side] = (np.array(sl), np.array(dl))
    return out


def test_jump_relations_on_circle():
    curve = g.circle()
    grid = g.CollocationGrid(64)
    phi_fn = lambda t: np.stack([np.cos(t) + 0.3 * np.sin(2 * t), 0.5 - np.sin(3 * t)], -1)
    phi = phi_fn(grid.nodes)
    L = qd.single_traction(ME, curve, grid).apply(phi)
    K = qd.double_layer(ME, curve, grid).apply(phi)
    idx = np.arange(0, grid.size, 16)
    errs = {}
    for eps in (1e-2, 1e-3):
        pots = _near_boundary_potentials(curve, phi_fn, grid.nodes[idx], eps)
        ext_sl, ext_dl = pots["exterior"]
        int_sl, int_dl = pots["interior"]
        scale = np.abs(phi).max()
        errs[eps] = max(
            np.abs(ext_sl - (-0.5 * phi + L)[idx]).max(),
            np.abs(int_sl - (0.5 * phi + L)[idx]).max(),
            np.abs(ext_dl - (0.5 * phi + K)[idx]).max(),
            np.abs(int_dl - (-0.5 * phi + K)[idx]).max(),
        ) / scale
    assert errs[1e-3] < 1e-2
    assert errs[1e-3] < errs[1e-2]


def test_trapezoid_weights():
    w = qd.trapezoid_weights(g.circle(2.0), g.CollocationGrid(8))
    assert w.sum() == pytest.approx(2 * np.pi * 2.0)
