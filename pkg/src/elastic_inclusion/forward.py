"""Direct transmission problem: three boundary integral representations and far fields."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from . import kernels as kn
from . import quadrature as qd
from .geometry import CollocationGrid, frame, winding_number
from .media import ElasticMedium, incident_field, incident_traction

REPRESENTATIONS = ("Combined", "SingleLayer", "DoubleLayer", "DirectMethod")


class SingularSystemError(RuntimeError):
    pass


class BoundaryData(NamedTuple):
    """Jumps of displacement and traction across the boundary at the nodes, ``(2n, 2)`` each."""

    trace: np.ndarray
    traction: np.ndarray


@dataclass(frozen=True)
class ScatteringProblem:
    interior: ElasticMedium
    exterior: ElasticMedium
    curve: object
    grid: CollocationGrid

    def __post_init__(self):
        if self.interior.omega != self.exterior.omega:
            raise ValueError("interior and exterior media must share omega")

    @classmethod
    def create(cls, interior, exterior, curve, n):
        return cls(interior, exterior, curve, CollocationGrid(n))

    def with_n(self, n):
        return ScatteringProblem(self.interior, self.exterior, self.curve, CollocationGrid(n))

    @cached_property
    def frame(self):
        return frame(self.curve, self.grid.nodes)

    @cached_property
    def operators(self):
        return OperatorSet(self)


class OperatorSet:
    """Lazily assembled boundary operator matrices of one problem."""

    def __init__(self, problem):
        self.problem = problem

    def _args(self):
        return self.problem.curve, self.problem.grid

    @cached_property
    def S_i(self):
        return qd.single_layer(self.problem.interior, *self._args()).matrix

    @cached_property
    def S_e(self):
        return qd.single_layer(self.problem.exterior, *self._args()).matrix

    @cached_property
    def K_i(self):
        return qd.double_layer(self.problem.interior, *self._args()).matrix

    @cached_property
    def K_e(self):
        return qd.double_layer(self.problem.exterior, *self._args()).matrix

    @cached_property
    def L_i(self):
        return qd.single_traction(self.problem.interior, *self._args()).matrix

    @cached_property
    def L_e(self):
        return qd.single_traction(self.problem.exterior, *self._args()).matrix

    @cached_property
    def tauN(self):
        p = self.problem
        return qd.combined_hyper(p.interior, p.exterior, *self._args()).matrix

    @cached_property
    def W(self):
        return qd.static_hyper_geometric(*self._args())

    @cached_property
    def N_i(self):
        return qd.hypersingular(self.problem.interior, *self._args(), W=self.W).matrix

    @cached_property
    def N_e(self):
        return qd.hypersingular(self.problem.exterior, *self._args(), W=self.W).matrix


@dataclass
class DensitySolution:
    phi: np.ndarray
    psi: np.ndarray
    representation: str
    problem: ScatteringProblem = field(repr=False, default=None)

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")


@dataclass
class FarFieldPattern:
    up: np.ndarray
    us: np.ndarray
    angles: np.ndarray

    def vector(self):
        """Stacked ``(u_p, u_s)`` samples, components interleaved per angle."""
        return np.concatenate([self.up.reshape(-1), self.us.reshape(-1)])

    @classmethod
    def from_vector(cls, v, angles):
        M = len(angles)
        return cls(v[: 2 * M].reshape(M, 2), v[2 * M:].reshape(M, 2), np.asarray(angles))

    def sup_error(self, other):
        return float(np.abs(self.vector() - other.vector()).max())

    def norm(self):
        return float(np.linalg.norm(self.vector()))


def farfield_angles(n):
    return CollocationGrid(n).nodes


def _directions(angles):
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


# ----------------------------------------------------------------------------
# right-hand sides


def incident_data(problem, wave):
    """Jumps for a plane incident wave in the exterior medium."""
    fr = problem.frame
    return BoundaryData(
        incident_field(wave, problem.exterior, fr.z),
        incident_traction(wave, problem.exterior, fr.z, fr.normal),
    )


def check_sides(curve, z_i, z_e):
    if winding_number(curve, z_i) == 0:
        raise ValueError(f"z_i = {tuple(z_i)} is not inside the boundary")
    if winding_number(curve, z_e) != 0:
        raise ValueError(f"z_e = {tuple(z_e)} is not outside the boundary")


def analytic_boundary_data(problem, z_i, z_e):
    """Jumps of ``u_i = [Phi_i(., z_e)]_1`` and ``u_e = [Phi_e(., z_i)]_1``."""
    z_i = np.asarray(z_i, dtype=float)
    z_e = np.asarray(z_e, dtype=float)
    check_sides(problem.curve, z_i, z_e)
    fr = problem.frame
    mi, me = problem.interior, problem.exterior
    f = kn.fundamental_tensor(mi, fr.z, z_e)[..., 0] - kn.fundamental_tensor(me, fr.z, z_i)[..., 0]
    g = (
        kn.single_traction_kernel(mi, fr.z, fr.normal, z_e)[..., 0]
        - kn.single_traction_kernel(me, fr.z, fr.normal, z_i)[..., 0]
    )
    return BoundaryData(f, g)


def analytic_far_field(exterior, z_i, angles):
    """Far field of the exterior point source ``[Phi_e(x, z_i)]_1``."""
    co = kn.farfield_coeffs(exterior)
    xh = _directions(np.asarray(angles, dtype=float))
    out = {}
    for a in ("p", "s"):
        out[a] = kn.farfield_single_kernel(co, xh, np.asarray(z_i, dtype=float), a)[..., 0]
    return FarFieldPattern(out["p"], out["s"], np.asarray(angles, dtype=float))


# ----------------------------------------------------------------------------
# solvers


def _solve(matrix, rhs):
    try:
        lu = sla.lu_factor(matrix, check_finite=True)
    except (ValueError, sla.LinAlgError) as exc:
        raise SingularSystemError(str(exc)) from exc
    if np.any(np.abs(np.diag(lu[0])) == 0):
        raise SingularSystemError("singular discrete system")
    return sla.lu_solve(lu, rhs)


def _flat(v):
    return np.asarray(v, dtype=complex).reshape(-1)


def combined_matrix(problem):
    ops = problem.operators
    ti, te = problem.interior.tau, problem.exterior.tau
    I = np.eye(ops.S_i.shape[0])
    return np.block([
        [I + ops.L_i - ops.L_e, ops.tauN],
        [ops.S_i - ops.S_e, -0.5 * (ti + te) * I + ti * ops.K_i - te * ops.K_e],
    ])


def solve_direct_combined(problem, rhs):
    """Densities ``(phi, psi)`` of ``u_j = tau_j D_j phi + S_j psi``."""
    x = _solve(combined_matrix(problem), np.concatenate([_flat(rhs.traction), _flat(rhs.trace)]))
    m = x.size // 2
    return DensitySolution(x[m:].reshape(-1, 2), x[:m].reshape(-1, 2), "Combined", problem)


def solve_direct_single(problem, rhs):
    """Densities ``(psi_i, psi_e)`` of ``u_j = S_j psi_j``; stored as ``phi``, ``psi``."""
    ops = problem.operators
    I = np.eye(ops.S_i.shape[0])
    A = np.block([[ops.S_i, -ops.S_e], [0.5 * I + ops.L_i, 0.5 * I - ops.L_e]])
    x = _solve(A, np.concatenate([_flat(rhs.trace), _flat(rhs.traction)]))
    m = x.size // 2
    return DensitySolution(x[:m].reshape(-1, 2), x[m:].reshape(-1, 2), "SingleLayer", problem)


def solve_direct_double(problem, rhs):
    """Densities ``(psi_i, psi_e)`` of ``u_j = D_j psi_j``; stored as ``phi``, ``psi``."""
    ops = problem.operators
    I = np.eye(ops.S_i.shape[0])
    A = np.block([[-0.5 * I + ops.K_i, -0.5 * I - ops.K_e], [ops.N_i, -ops.N_e]])
    x = _solve(A, np.concatenate([_flat(rhs.trace), _flat(rhs.traction)]))
    m = x.size // 2
    return DensitySolution(x[:m].reshape(-1, 2), x[m:].reshape(-1, 2), "DoubleLayer", problem)


SOLVERS = {
    "Combined": solve_direct_combined,
    "SingleLayer": solve_direct_single,
    "DoubleLayer": solve_direct_double,
}


def solve(problem, rhs, representation="Combined"):
    try:
        solver = SOLVERS[representation]
    except KeyError:
        raise ValueError(f"unknown representation {representation!r}") from None
    return solver(problem, rhs)


# ----------------------------------------------------------------------------
# far field


def farfield_operators(exterior, curve, grid, angles):
    """Trapezoidal matrices of ``S^inf_alpha`` and ``D^inf_alpha``.

    Returns a dict ``{("S", "p"): M, ...}`` with ``M`` of shape ``(2 len(angles), 4n)``.
    """
    co = kn.farfield_coeffs(exterior)
    fr = frame(curve, grid.nodes)
    xh = _directions(np.asarray(angles, dtype=float))[:, None, :]
    w = (np.pi / grid.n) * fr.speed[None, :, None, None]
    out = {}
    for a in ("p", "s"):
        S = kn.farfield_single_kernel(co, xh, fr.z[None], a) * w
        D = kn.farfield_double_kernel(co, xh, fr.z[None], fr.normal[None], a) * w
        out[("S", a)] = qd.blocks_to_matrix(S)
        out[("D", a)] = qd.blocks_to_matrix(D)
    return out


def far_field(problem, densities, angles=None):
    if densities.problem is not None and densities.problem.grid != problem.grid:
        raise ValueError("densities were computed on a different grid")
    if angles is None:
        angles = farfield_angles(problem.grid.n)
    ops = farfield_operators(problem.exterior, problem.curve, problem.grid, angles)
    rep = densities.representation
    phi, psi = _flat(densities.phi), _flat(densities.psi)
    res = {}
    for a in ("p", "s"):
        if rep == "Combined":
            v = problem.exterior.tau * ops[("D", a)] @ phi + ops[("S", a)] @ psi
        elif rep == "SingleLayer":
            v = ops[("S", a)] @ psi
        elif rep in ("DoubleLayer",):
            v = ops[("D", a)] @ psi
        else:  # DirectMethod: u_e = D_e xi - S_e zeta in the exterior
            v = ops[("D", a)] @ phi - ops[("S", a)] @ psi
        res[a] = v.reshape(-1, 2)
    return FarFieldPattern(res["p"], res["s"], np.asarray(angles, dtype=float))


def field_at(problem, densities, x, side="interior"):
    """Displacement at points ``x`` away from the boundary (trapezoidal rule)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    med = problem.interior if side == "interior" else problem.exterior
    fr = problem.frame
    w = (np.pi / problem.grid.n) * fr.speed
    X = x[:, None, :]
    Y = fr.z[None]
    S = kn.fundamental_tensor(med, X, Y) * w[None, :, None, None]
    D = kn.double_layer_kernel(med, X, Y, fr.normal[None]) * w[None, :, None, None]
    rep = densities.representation
    phi, psi = densities.phi, densities.psi
    if rep == "Combined":
        return med.tau * np.einsum("mjab,jb->ma", D, phi) + np.einsum("mjab,jb->ma", S, psi)
    dens = phi if side == "interior" else psi
    if rep == "SingleLayer":
        return np.einsum("mjab,jb->ma", S, dens)
    if rep == "DoubleLayer":
        return np.einsum("mjab,jb->ma", D, dens)
    raise ValueError(f"field evaluation not available for {rep}")


# ----------------------------------------------------------------------------
# convergence


class ConvergenceRow(NamedTuple):
    n: int
    error: float
    up0: complex
    us0: complex


def convergence_study(problem, z_i, z_e, n_list, representation="Combined"):
    """Sup-node far-field error against the point-source oracle for each ``n``."""
    n_list = list(n_list)
    if n_list != sorted(n_list):
        raise ValueError("n_list must be ascending")
    rows = []
    for n in n_list:
        p = problem.with_n(n)
        sol = solve(p, analytic_boundary_data(p, z_i, z_e), representation)
        ff = far_field(p, sol)
        exact = analytic_far_field(p.exterior, z_i, ff.angles)
        rows.append(ConvergenceRow(n, ff.sup_error(exact), complex(ff.up[0, 0]), complex(ff.us[0, 1])))
    return rows
