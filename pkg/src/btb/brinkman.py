"""Discrete velocity solution operators for the regularized Darcy law.

Each velocity component solves A v = g with A = I - eps*Lap_D + eta*Lap_D^2,
where Lap_D is the Dirichlet Laplacian (zero boundary face values). The
eps = eta = 0 case degenerates to the identity and the solve is bypassed,
returning the Darcy velocity -grad p exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .grid import Grid, dirichlet_laplacian, integrate
from .pressure import ModelParams, clip_nonnegative, pressure

# Direct factorization up to this many unknowns, conjugate gradient above.
_DIRECT_LIMIT = 64 * 64
_CG_TOL = 1e-12
_RESIDUAL_TOL = 1e-10


class SolverError(RuntimeError):
    """Linear solve failed to reach the required residual."""


@dataclass
class EllipticOperator:
    """Assembled SPD operator with a reusable solver handle.

    Immutable after assembly; solves are re-entrant.
    """

    grid: Grid
    eps: float
    eta: float
    order_m: int
    matrix: sp.csr_matrix
    is_identity: bool
    _solver: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def solve_scalar(self, rhs: np.ndarray) -> np.ndarray:
        """Solve A x = rhs for one cell-centered component."""
        if self.is_identity:
            return rhs.copy()
        x = self._solver(rhs.ravel())
        res = self.matrix @ x - rhs.ravel()
        rhs_norm = np.linalg.norm(rhs)
        if rhs_norm > 0 and np.linalg.norm(res) / rhs_norm > _RESIDUAL_TOL:
            raise SolverError(
                f"elliptic solve residual {np.linalg.norm(res)/rhs_norm:.3e} "
                f"exceeds {_RESIDUAL_TOL:g}")
        return x.reshape(rhs.shape)


@dataclass
class SqrtDiagnostic:
    """Dense square-root check of the solution operator (small grids)."""

    operator_dense: np.ndarray
    sqrt_dense: np.ndarray
    residual: float


def assemble(grid: Grid, eps: float, eta: float) -> EllipticOperator:
    """Assemble A = I - eps*Lap_D + eta*Lap_D^2 with a solver handle."""
    if eps < 0 or eta < 0:
        raise ValueError("eps and eta must be nonnegative")
    n = grid.ncells
    if eps == 0.0 and eta == 0.0:
        A = sp.identity(n, format="csr")
        return EllipticOperator(grid=grid, eps=eps, eta=eta, order_m=2,
                                matrix=A, is_identity=True,
                                _solver=lambda b: b)
    lap = dirichlet_laplacian(grid)
    A = (sp.identity(n) - eps * lap).tocsr()
    if eta > 0.0:
        A = (A + eta * (lap @ lap)).tocsr()
    if n <= _DIRECT_LIMIT:
        lu = spla.splu(A.tocsc())
        solver = lu.solve
    else:
        def solver(b, _A=A):
            x, info = spla.cg(_A, b, rtol=_CG_TOL, maxiter=10 * n)
            if info != 0:
                res = np.linalg.norm(_A @ x - b) / max(np.linalg.norm(b), 1e-300)
                raise SolverError(f"CG did not converge (info={info}, "
                                  f"relative residual {res:.3e})")
            return x
    return EllipticOperator(grid=grid, eps=eps, eta=eta, order_m=2,
                            matrix=A, is_identity=False, _solver=solver)


def solve(op: EllipticOperator, rhs: np.ndarray) -> np.ndarray:
    """Componentwise solve for a vector field of shape (d,) + grid.shape."""
    return np.stack([op.solve_scalar(rhs[k]) for k in range(rhs.shape[0])])


def cell_gradient(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Cell-centered gradient: central interior, one-sided at boundary cells."""
    if grid.dimension == 1:
        return np.gradient(f, grid.spacing[0])[np.newaxis]
    return np.stack(np.gradient(f, *grid.spacing))


def velocity_from_pressure(grid: Grid, u: list[np.ndarray],
                           params: ModelParams,
                           op: EllipticOperator) -> list[np.ndarray]:
    """Velocities v_i = A^{-1}(-grad p_i(u)); Darcy bypass when A = I."""
    for ui in u:
        clip_nonnegative(ui)
    velocities = []
    for i in range(params.n):
        g = -cell_gradient(grid, pressure(u, i, params))
        velocities.append(g if op.is_identity else solve(op, g))
    return velocities


def quadratic_form(op: EllipticOperator, g: np.ndarray) -> float:
    """<A^{-1} g, g> summed over components, weighted by cell volume."""
    total = 0.0
    for k in range(g.shape[0]):
        total += float(np.vdot(op.solve_scalar(g[k]), g[k]))
    return total * op.grid.cell_volume


def cross_quadratic_form(op: EllipticOperator, g: np.ndarray,
                         gsolved: np.ndarray) -> float:
    """<gsolved, g> over components (gsolved = A^{-1} g', precomputed)."""
    total = 0.0
    for k in range(g.shape[0]):
        total += float(np.vdot(gsolved[k], g[k]))
    return total * op.grid.cell_volume


def dirichlet_gradient_energy(grid: Grid, v: np.ndarray) -> float:
    """Discrete ||grad v||^2 for a Dirichlet component field.

    Interior faces carry the two-point difference over a full cell volume;
    boundary faces see the zero face value at distance h/2, hence the half
    volume. By construction this equals -<Lap_D v, v> * cell_volume.
    """
    total = 0.0
    vol = grid.cell_volume
    for k in range(grid.dimension):
        h = grid.spacing[k]
        total += float(np.sum((np.diff(v, axis=k) / h) ** 2)) * vol
        lo = [slice(None)] * grid.dimension
        hi = [slice(None)] * grid.dimension
        lo[k] = 0
        hi[k] = -1
        for edge in (tuple(lo), tuple(hi)):
            total += float(np.sum((2.0 * v[edge] / h) ** 2)) * (vol / 2.0)
    return total


def sqrt_check(grid: Grid, eps: float, eta: float) -> SqrtDiagnostic:
    """Dense square root of A^{-1} via symmetric eigendecomposition."""
    if grid.ncells > 600:
        raise ValueError("dense square-root check limited to ~600 unknowns")
    op = assemble(grid, eps, eta)
    A = op.matrix.toarray()
    M = np.linalg.inv(A)
    M = 0.5 * (M + M.T)
    w, V = np.linalg.eigh(M)
    K = (V * np.sqrt(w)) @ V.T
    residual = np.linalg.norm(K @ K - M) / np.linalg.norm(M)
    return SqrtDiagnostic(operator_dense=M, sqrt_dense=K,
                          residual=float(residual))
