"""Two-step boundary reconstruction from far-field data.

Each iteration solves the well-posed density system on the current boundary
for every illumination, then linearises the far-field equation in the radial
update ``q`` with the densities held fixed and takes a Tikhonov step.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from . import kernels as kn
from .forward import (
    DensitySolution,
    FarFieldPattern,
    ScatteringProblem,
    SingularSystemError,
    farfield_angles,
    far_field,
    incident_data,
    solve_direct_single,
)
from .geometry import (
    NonPositiveRadiusError,
    RadialTrigCurve,
    radial_l2_error,
    radial_update,
    trig_basis,
)
from .media import IncidentWave


class ReconstructionError(RuntimeError):
    """Raised when a run cannot continue; ``state`` holds the last accepted iterate, if any."""

    def __init__(self, msg, state=None):
        super().__init__(msg)
        self.state = state


class CGError(ReconstructionError):
    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


@dataclass(frozen=True)
class ReconstructionConfig:
    m: int
    n: int
    lambda0: float = 0.8
    decay: float = 2.0 / 3.0
    p: float = 1.0
    max_iter: int = 40
    r0: float = 0.5
    illuminations: tuple = ()
    noise_delta: float = 0.0
    rng_seed: int = 0
    early_stop: bool = True
    threads: int = 1

    def __post_init__(self):
        problems = []
        if not self.lambda0 > 0:
            problems.append("lambda0 must be positive")
        if not 0 < self.decay < 1:
            problems.append("decay must lie in (0, 1)")
        if not 0 <= self.m < self.n:
            problems.append("need 0 <= m < n")
        if not self.r0 > 0:
            problems.append("r0 must be positive")
        if not self.p >= 0:
            problems.append("p must be non-negative")
        if self.max_iter < 1:
            problems.append("max_iter must be at least 1")
        if not self.illuminations:
            problems.append("at least one illumination is required")
        if self.noise_delta < 0:
            problems.append("noise_delta must be non-negative")
        if problems:
            raise ValueError("; ".join(problems))


def plane_wave_illuminations(L, kind="P"):
    """``L`` waves with directions ``(cos 2 pi l / L, sin 2 pi l / L)``, ``l = 1..L``."""
    return tuple(IncidentWave.at_angle(kind, 2 * np.pi * l / L) for l in range(1, L + 1))


@dataclass
class ReconstructionState:
    r: RadialTrigCurve
    densities: list
    lam: float
    iter: int = 0
    residual_history: list = field(default_factory=list)
    trajectory: list = field(default_factory=list)
    stop_reason: str = ""
    final_residual: float = float("nan")


class LinearizedSystem(NamedTuple):
    A: np.ndarray
    T: np.ndarray
    b: np.ndarray


# ----------------------------------------------------------------------------
# step i: densities


class SubsystemSolver:
    """LU factorisation of the density system on one boundary, reused across illuminations."""

    def __init__(self, problem):
        self.problem = problem
        ops = problem.operators
        ti, te = problem.interior.tau, problem.exterior.tau
        I = np.eye(ops.S_i.shape[0])
        self.matrix = np.block([
            [I + ops.K_i - ops.K_e, ops.S_e - ops.S_i],
            [ops.tauN, 0.5 * (ti + te) * I + te * ops.L_e - ti * ops.L_i],
        ])
        try:
            self.lu = sla.lu_factor(self.matrix)
        except (ValueError, sla.LinAlgError) as exc:
            raise SingularSystemError(str(exc)) from exc
        if np.any(np.abs(np.diag(self.lu[0])) == 0):
            raise SingularSystemError("density system is singular")

    def _rhs(self, wave):
        rhs = incident_data(self.problem, wave)
        te = self.problem.exterior.tau
        return np.concatenate([rhs.trace.reshape(-1), te * rhs.traction.reshape(-1)])

    def solve_many(self, waves):
        """One multi-column back substitution for all illuminations."""
        B = np.stack([self._rhs(w) for w in waves], axis=1)
        X = sla.lu_solve(self.lu, B)
        m = X.shape[0] // 2
        return [
            DensitySolution(x[:m].reshape(-1, 2), x[m:].reshape(-1, 2), "DirectMethod", self.problem)
            for x in X.T
        ]

    def solve(self, wave):
        return self.solve_many([wave])[0]


def solve_density_subsystem(problem, wave):
    """``(xi, zeta)``: total displacement and exterior traction traces on the boundary."""
    return SubsystemSolver(problem).solve(wave)


# ----------------------------------------------------------------------------
# step ii: linearisation


def trig_matrix(m, nodes):
    """``T``: trig coefficients to samples ``(q(t_j), q'(t_j))``."""
    return np.vstack([trig_basis(m, nodes, 0), trig_basis(m, nodes, 1)])


def assemble_farfield_rows(problem, densities, measured):
    """Rows ``A`` (acting on ``(q(t_j), q'(t_j))``) and residual ``b`` for one illumination."""
    angles = measured.angles
    co = kn.farfield_coeffs(problem.exterior)
    fr = problem.frame
    t = problem.grid.nodes
    N = len(t)
    xi, zeta = densities.phi, densities.psi
    b = measured.vector() - far_field(problem, densities, angles).vector()

    e = np.stack([np.cos(t), np.sin(t)], axis=-1)
    ep = np.stack([-np.sin(t), np.cos(t)], axis=-1)
    xh = np.stack([np.cos(angles), np.sin(angles)], axis=-1)[:, None, :]
    w = np.pi / problem.grid.n
    blocks = []
    for a in ("p", "s"):
        ph = np.exp(-1j * co.k(a) * (xh * fr.z[None]).sum(-1))  # (M, N)
        Ja = kn.projector(xh[:, 0], a)  # (M, 2, 2)
        cols = []
        # unit q at node j: q = e, q' = e_perp ; unit q' at node j: q = 0, q' = e
        for qv, dqv in ((e, ep), (np.zeros_like(e), e)):
            G = kn.frechet_G(co, xh, fr.z[None], fr.dz[None], qv[None], dqv[None], a)
            g = kn.frechet_g(co, xh, fr.z[None], fr.dz[None], qv[None], dqv[None], a)
            Gxi = np.einsum("mjab,jb->mja", G, xi)
            term_d = co.gamma(a) * np.einsum("mab,mjb->mja", Ja, Gxi)
            term_s = co.beta(a) * g[..., None] * np.einsum("mab,jb->mja", Ja, zeta)
            cols.append(w * (term_d - term_s) * ph[..., None])  # (M, N, 2)
        # rows: angle-major, component-minor; columns: q samples then q' samples
        blk = np.concatenate(cols, axis=1)  # (M, 2N, 2)
        blocks.append(blk.transpose(0, 2, 1).reshape(2 * len(angles), 2 * N))
    A = np.vstack(blocks)
    return A, b


def sobolev_penalty(m, p):
    if p < 0:
        raise ValueError("p must be non-negative")
    k = np.arange(1, m + 1)
    w = np.pi * (1.0 + k**2) ** p
    return np.diag(np.concatenate([[2 * np.pi], w, w]))


def conjugate_gradient(M, rhs, tol=1e-10, maxiter=None):
    """Plain CG for a symmetric positive definite ``M``."""
    maxiter = maxiter if maxiter is not None else 10 * len(rhs)
    x = np.zeros_like(rhs)
    r = rhs - M @ x
    p = r.copy()
    rr = r @ r
    nb = np.linalg.norm(rhs)
    if nb == 0:
        return x
    for _ in range(maxiter):
        if np.sqrt(rr) <= tol * nb:
            return x
        Mp = M @ p
        alpha = rr / (p @ Mp)
        x = x + alpha * p
        r = r - alpha * Mp
        rr_new = r @ r
        p = r + (rr_new / rr) * p
        rr = rr_new
    res = np.sqrt(rr) / nb
    if res > tol:
        raise CGError(f"CG stalled at relative residual {res:.3e}", res)
    return x


def tikhonov_step(system, I_p, lam):
    """Solve ``(T^T Re(A^H A) T + lam I_p) x = T^T Re(A^H b)`` by CG."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    AT = system.A @ system.T
    M = AT.real.T @ AT.real + AT.imag.T @ AT.imag + lam * I_p
    rhs = AT.real.T @ system.b.real + AT.imag.T @ system.b.imag
    return conjugate_gradient(M, rhs, tol=1e-10, maxiter=10 * len(rhs))


def update_lambda(lambda0, decay, k):
    if k < 1:
        raise ValueError("k must be >= 1")
    return lambda0 * decay ** (k - 1)


def add_noise(data, delta, rng_seed):
    """``U + delta |U| / |V| V`` with complex Gaussian ``V`` from a seeded generator."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if delta == 0:
        return FarFieldPattern(data.up.copy(), data.us.copy(), data.angles.copy())
    U = data.vector()
    rng = np.random.default_rng(rng_seed)
    V = rng.standard_normal(U.shape) + 1j * rng.standard_normal(U.shape)
    Ud = U + delta * np.linalg.norm(U) / np.linalg.norm(V) * V
    return FarFieldPattern.from_vector(Ud, data.angles)


# ----------------------------------------------------------------------------
# data and driver


def synthetic_data(interior, exterior, curve, n, waves, angles):
    """Far fields from the single-layer representation on a ``2n`` node grid."""
    prob = ScatteringProblem.create(interior, exterior, curve, 2 * n)
    out = []
    for wave in waves:
        sol = solve_direct_single(prob, incident_data(prob, wave))
        out.append(far_field(prob, sol, angles))
    return out


def _h1_norm(x, m):
    return float(np.sqrt(x @ sobolev_penalty(m, 1.0) @ x))


def _linearize(problem, waves, data, threads):
    # the back substitution stays on this thread; only the numpy row assembly is parallel
    dens = SubsystemSolver(problem).solve_many(waves)
    items = list(zip(dens, data))
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda it: assemble_farfield_rows(problem, *it), items))
    else:
        rows = [assemble_farfield_rows(problem, *it) for it in items]
    A = np.vstack([r[0] for r in rows])
    b = np.concatenate([r[1] for r in rows])
    return dens, A, b


def reconstruct(config, data, interior, exterior, callback=None):
    """Run the iteration; ``data`` holds one far-field pattern per illumination."""
    if len(data) != len(config.illuminations):
        raise ValueError("need one far-field pattern per illumination")
    angles = farfield_angles(config.n)
    for d in data:
        if len(d.angles) != len(angles) or not np.allclose(d.angles, angles):
            raise ValueError("data must be sampled on the 2n far-field angles")
    m = config.m
    r = RadialTrigCurve.constant(config.r0, m)
    I_p = sobolev_penalty(m, config.p)
    state = ReconstructionState(r, [], config.lambda0)
    state.trajectory.append(r.vector())
    rising = 0
    for k in range(1, config.max_iter + 1):
        lam = update_lambda(config.lambda0, config.decay, k)
        problem = ScatteringProblem.create(interior, exterior, r, config.n)
        T = trig_matrix(m, problem.grid.nodes)
        try:
            dens, A, b = _linearize(problem, config.illuminations, data, config.threads)
        except SingularSystemError as exc:
            raise ReconstructionError(f"iteration {k}: {exc}; r = {r!r}", state) from exc
        res = float(np.linalg.norm(b))
        if state.residual_history and res > state.residual_history[-1]:
            rising += 1
        else:
            rising = 0
        state.residual_history.append(res)
        x = tikhonov_step(LinearizedSystem(A, T, b), I_p, lam)
        q = RadialTrigCurve.from_vector(x)
        for _ in range(11):
            try:
                r = radial_update(r, q, problem.grid.nodes)
                break
            except NonPositiveRadiusError:
                q = RadialTrigCurve.from_vector(0.5 * q.vector())
        else:
            raise ReconstructionError(
                f"iteration {k}: radius stays non-positive after 10 halvings; r = {r!r}", state
            )
        state.r, state.densities, state.lam, state.iter = r, dens, lam, k
        state.trajectory.append(r.vector())
        if callback is not None:
            callback(state)
        if config.early_stop:
            if _h1_norm(q.vector(), m) < 1e-8:
                state.stop_reason = "update below 1e-8"
                break
            if rising >= 3:
                state.stop_reason = "residual increased three times in a row"
                break
    else:
        state.stop_reason = "max_iter"
    problem = ScatteringProblem.create(interior, exterior, state.r, config.n)
    _, _, b = _linearize(problem, config.illuminations, data, config.threads)
    state.final_residual = float(np.linalg.norm(b))
    return state


def run_reconstruction(config, interior, exterior, target):
    """Synthetic data for ``target``, optional noise, then :func:`reconstruct`."""
    angles = farfield_angles(config.n)
    data = synthetic_data(interior, exterior, target, config.n, config.illuminations, angles)
    if config.noise_delta > 0:
        data = [add_noise(d, config.noise_delta, config.rng_seed + i) for i, d in enumerate(data)]
    state = reconstruct(config, data, interior, exterior)
    return state, radial_l2_error(state.r, target)
