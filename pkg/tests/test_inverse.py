import numpy as np
import pytest

from elastic_inclusion import forward as fw
from elastic_inclusion import geometry as g
from elastic_inclusion import inverse as inv
from elastic_inclusion.media import ElasticMedium

MI = ElasticMedium(2.0, 3.0, 1.0, 8.0)
ME = ElasticMedium(1.0, 1.0, 1.0, 8.0)


def _fitted_peanut(m):
    t = np.arange(256) * 2 * np.pi / 256
    return g.trig_fit(g.peanut().radius(t), m)


def _linear_setup(n=16, m=4):
    r = _fitted_peanut(m)
    p = fw.ScatteringProblem.create(MI, ME, r, n)
    wave = inv.plane_wave_illuminations(1)[0]
    dens = inv.solve_density_subsystem(p, wave)
    F0 = fw.far_field(p, dens, fw.farfield_angles(n))
    return r, p, dens, F0


def test_consistent_data_give_zero_residual_and_zero_step():
    r, p, dens, F0 = _linear_setup()
    A, b = inv.assemble_farfield_rows(p, dens, F0)
    assert np.abs(b).max() == 0
    T = inv.trig_matrix(4, p.grid.nodes)
    x = inv.tikhonov_step(inv.LinearizedSystem(A, T, b), inv.sobolev_penalty(4, 1.0), 0.5)
    assert not np.any(x)
    assert not np.any(A @ np.zeros(A.shape[1]))


def test_frechet_rows_match_fixed_density_differences(rng):
    m = 4
    r, p, dens, F0 = _linear_setup(n=32, m=m)
    A, _ = inv.assemble_farfield_rows(p, dens, F0)
    T = inv.trig_matrix(m, p.grid.nodes)
    frozen = fw.DensitySolution(dens.phi, dens.psi, "DirectMethod")
    x = 0.1 * rng.normal(size=2 * m + 1)
    lin = A @ T @ x
    errs = []
    for h in (1e-3, 1e-4):
        moved = g.radial_update(r, g.RadialTrigCurve.from_vector(h * x), p.grid.nodes)
        ph = fw.ScatteringProblem.create(MI, ME, moved, 32)
        fd = (fw.far_field(ph, frozen, F0.angles).vector() - F0.vector()) / h
        errs.append(np.linalg.norm(fd - lin) / np.linalg.norm(lin))
    assert errs[1] < 1e-2
    # first order: the error shrinks with h
    assert 5 < errs[0] / errs[1] < 20


def test_trig_matrix_maps_to_samples_and_derivatives(rng):
    nodes = g.CollocationGrid(8).nodes
    x = rng.normal(size=7)
    q = g.RadialTrigCurve.from_vector(x)
    T = inv.trig_matrix(3, nodes)
    assert np.allclose(T @ x, np.concatenate([q.radius(nodes), q.radius(nodes, 1)]))


def test_sobolev_penalty_is_the_hp_gram_matrix():
    m, p = 3, 1.5
    I_p = inv.sobolev_penalty(m, p)
    t = np.linspace(0, 2 * np.pi, 4001)
    B = g.trig_basis(m, t)
    k = np.concatenate([[0], np.arange(1, m + 1), np.arange(1, m + 1)])
    gram = (B.T * (1 + k[:, None] ** 2) ** p) @ B * (t[1] - t[0])
    gram -= 0.5 * (t[1] - t[0]) * (np.outer(B[0], B[0]) + np.outer(B[-1], B[-1])) * (1 + k[:, None] ** 2) ** p
    assert np.allclose(I_p, gram, atol=1e-10)
    with pytest.raises(ValueError):
        inv.sobolev_penalty(2, -1)


def test_conjugate_gradient_against_direct_solve(rng):
    B = rng.normal(size=(12, 12))
    M = B @ B.T + 0.1 * np.eye(12)
    rhs = rng.normal(size=12)
    assert np.allclose(inv.conjugate_gradient(M, rhs), np.linalg.solve(M, rhs), rtol=1e-8)
    assert not np.any(inv.conjugate_gradient(M, np.zeros(12)))
    with pytest.raises(inv.CGError):
        inv.conjugate_gradient(M, rhs, maxiter=1)


def test_tikhonov_step_matches_normal_equations(rng):
    A = rng.normal(size=(20, 10)) + 1j * rng.normal(size=(20, 10))
    T = rng.normal(size=(10, 5))
    b = rng.normal(size=20) + 1j * rng.normal(size=20)
    I_p = inv.sobolev_penalty(2, 1.0)
    x = inv.tikhonov_step(inv.LinearizedSystem(A, T, b), I_p, 0.3)
    AT = A @ T
    ref = np.linalg.solve((AT.conj().T @ AT).real + 0.3 * I_p, (AT.conj().T @ b).real)
    assert np.allclose(x, ref, rtol=1e-8)
    with pytest.raises(ValueError):
        inv.tikhonov_step(inv.LinearizedSystem(A, T, b), I_p, 0.0)


def test_lambda_schedule():
    assert inv.update_lambda(0.8, 2 / 3, 1) == 0.8
    assert inv.update_lambda(0.8, 2 / 3, 4) == pytest.approx(0.8 * (2 / 3) ** 3)
    with pytest.raises(ValueError):
        inv.update_lambda(0.8, 0.5, 0)


def test_noise_has_exact_relative_level():
    U = fw.FarFieldPattern.from_vector(np.arange(1, 17) * (1 + 0.5j), fw.farfield_angles(2))
    for delta in (0.01, 0.05):
        Ud = inv.add_noise(U, delta, 3)
        assert np.linalg.norm(Ud.vector() - U.vector()) == pytest.approx(delta * U.norm(), rel=1e-12)
    assert np.array_equal(inv.add_noise(U, 0.05, 3).vector(), inv.add_noise(U, 0.05, 3).vector())
    assert not np.array_equal(inv.add_noise(U, 0.05, 3).vector(), inv.add_noise(U, 0.05, 4).vector())
    assert np.array_equal(inv.add_noise(U, 0.0, 3).vector(), U.vector())
    with pytest.raises(ValueError):
        inv.add_noise(U, -0.1, 3)


def test_illumination_directions():
    waves = inv.plane_wave_illuminations(4)
    d = np.array([w.direction for w in waves])
    assert np.allclose(d, [[0, 1], [-1, 0], [0, -1], [1, 0]], atol=1e-15)


@pytest.mark.parametrize(
    "kwargs",
    [dict(lambda0=0), dict(decay=1.0), dict(m=40), dict(r0=-1), dict(p=-1), dict(max_iter=0),
     dict(illuminations=()), dict(noise_delta=-0.1)],
)
def test_config_validation(kwargs):
    base = dict(m=3, n=16, illuminations=inv.plane_wave_illuminations(1))
    base.update(kwargs)
    with pytest.raises(ValueError):
        inv.ReconstructionConfig(**base)


def test_exact_circle_is_a_fixed_point():
    n, m = 16, 2
    waves = inv.plane_wave_illuminations(2)
    cfg = inv.ReconstructionConfig(m=m, n=n, r0=0.5, illuminations=waves, max_iter=2)
    data = inv.synthetic_data(MI, ME, g.circle(0.5), n, waves, fw.farfield_angles(n))
    state = inv.reconstruct(cfg, data, MI, ME)
    assert state.residual_history[0] < 1e-5 * max(d.norm() for d in data)
    assert np.abs(state.r.vector() - [0.5, 0, 0, 0, 0]).max() < 1e-5
    assert state.stop_reason == "update below 1e-8" or state.iter == 2


def test_reconstruction_reduces_residual_and_is_deterministic():
    waves = inv.plane_wave_illuminations(2)
    cfg = inv.ReconstructionConfig(m=3, n=16, r0=0.5, illuminations=waves, max_iter=6, early_stop=False)
    s1, e1 = inv.run_reconstruction(cfg, MI, ME, g.peanut())
    s2, e2 = inv.run_reconstruction(cfg, MI, ME, g.peanut())
    assert np.array_equal(s1.r.vector(), s2.r.vector()) and e1 == e2
    assert s1.final_residual < 0.5 * s1.residual_history[0]
    assert e1 < g.radial_l2_error(g.circle(0.5), g.peanut())
    assert len(s1.trajectory) == 7 and s1.stop_reason == "max_iter"


def test_threads_do_not_change_the_result():
    waves = inv.plane_wave_illuminations(3)
    base = dict(m=2, n=12, r0=0.5, illuminations=waves, max_iter=3, early_stop=False)
    a, _ = inv.run_reconstruction(inv.ReconstructionConfig(**base, threads=1), MI, ME, g.peanut())
    b, _ = inv.run_reconstruction(inv.ReconstructionConfig(**base, threads=3), MI, ME, g.peanut())
    assert np.array_equal(a.r.vector(), b.r.vector())


def test_data_must_match_illuminations_and_angles():
    waves = inv.plane_wave_illuminations(2)
    cfg = inv.ReconstructionConfig(m=2, n=12, illuminations=waves)
    data = inv.synthetic_data(MI, ME, g.peanut(), 12, waves, fw.farfield_angles(12))
    with pytest.raises(ValueError):
        inv.reconstruct(cfg, data[:1], MI, ME)
    wrong = inv.synthetic_data(MI, ME, g.peanut(), 12, waves, fw.farfield_angles(8))
    with pytest.raises(ValueError):
        inv.reconstruct(cfg, wrong, MI, ME)
