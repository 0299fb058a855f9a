"""Uniform cell-centered finite-volume grids on rectangles (1D and 2D).

Densities carry no-flux boundary conditions, velocities carry homogeneous
Dirichlet conditions. All calculus here is conservative: fluxes live on
faces, and any flux field with zero boundary faces integrates its
divergence to zero exactly (telescoping sum).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class GridSpec:
    """Description of a uniform tensor-product cell grid on a rectangle."""

    dimension: int
    origin: tuple[float, ...]
    extent: tuple[float, ...]
    cells_per_axis: tuple[int, ...]


@dataclass(frozen=True)
class Grid:
    """Realized grid with precomputed spacings and cell volume.

    Scalar fields are ndarrays of shape ``grid.shape``; vector fields are
    ndarrays of shape ``(d,) + grid.shape`` (one component per axis).
    """

    spec: GridSpec
    spacing: tuple[float, ...]
    cell_volume: float
    shape: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    @property
    def ncells(self) -> int:
        return int(np.prod(self.shape))

    def axis_centers(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        o = self.spec.origin[axis]
        h = self.spacing[axis]
        return o + h * (np.arange(self.shape[axis]) + 0.5)

    def cell_centers(self) -> list[np.ndarray]:
        """Coordinate arrays of shape ``grid.shape``, one per axis."""
        axes = [self.axis_centers(k) for k in range(self.dimension)]
        return list(np.meshgrid(*axes, indexing="ij"))


@dataclass
class FaceFluxes:
    """Per-axis face values; axis ``k`` has ``shape[k]+1`` faces along ``k``.

    Boundary faces are zero when assembled by the no-flux flux routines.
    """

    grid: Grid
    components: list[np.ndarray]


def make_grid(spec: GridSpec) -> Grid:
    """Validate a grid spec and precompute spacings and cell volume."""
    if spec.dimension not in (1, 2):
        raise ValueError(f"dimension must be 1 or 2, got {spec.dimension}")
    for name, vec in (("origin", spec.origin), ("extent", spec.extent),
                      ("cells_per_axis", spec.cells_per_axis)):
        if len(vec) != spec.dimension:
            raise ValueError(f"{name} must have length {spec.dimension}")
    if any(e <= 0 for e in spec.extent):
        raise ValueError("extents must be positive")
    if any(c <= 0 for c in spec.cells_per_axis):
        raise ValueError("cell counts must be positive")
    spacing = tuple(e / c for e, c in zip(spec.extent, spec.cells_per_axis))
    cell_volume = float(np.prod(spacing))
    return Grid(spec=spec, spacing=spacing, cell_volume=cell_volume,
                shape=tuple(spec.cells_per_axis))


def integrate(grid: Grid, f: np.ndarray) -> float:
    """Discrete integral over the domain: cell-volume-weighted sum."""
    return float(np.sum(f) * grid.cell_volume)


def zero_face_fluxes(grid: Grid) -> FaceFluxes:
    comps = []
    for k in range(grid.dimension):
        shape = list(grid.shape)
        shape[k] += 1
        comps.append(np.zeros(shape))
    return FaceFluxes(grid=grid, components=comps)


def gradient_at_faces(grid: Grid, f: np.ndarray) -> FaceFluxes:
    """Two-point differences at interior faces; boundary faces are zero.

    This is the gradient appropriate for no-flux quantities: the zero on
    boundary faces encodes the homogeneous Neumann condition.
    """
    out = zero_face_fluxes(grid)
    for k in range(grid.dimension):
        h = grid.spacing[k]
        interior = np.diff(f, axis=k) / h
        sl = [slice(None)] * grid.dimension
        sl[k] = slice(1, -1)
        out.components[k][tuple(sl)] = interior
    return out


def divergence_of_fluxes(F: FaceFluxes) -> np.ndarray:
    """Conservative divergence: per-axis face difference over spacing."""
    grid = F.grid
    div = np.zeros(grid.shape)
    for k in range(grid.dimension):
        div += np.diff(F.components[k], axis=k) / grid.spacing[k]
    return div


def _laplacian_1d(n: int, h: float, bc: str) -> sp.csr_matrix:
    # Cell-centered second difference. No-flux: reflecting ghost (row sums
    # zero). Dirichlet: zero face value via antisymmetric ghost, which adds
    # one extra 1/h^2 to the diagonal of each end cell.
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    if bc == "neumann":
        main[0] = -1.0
        main[-1] = -1.0
    elif bc == "dirichlet":
        main[0] = -3.0
        main[-1] = -3.0
    else:
        raise ValueError(f"unknown boundary closure {bc!r}")
    A = sp.diags([off, main, off], offsets=[-1, 0, 1], format="csr")
    return (A / h**2).tocsr()


def _assemble_laplacian(grid: Grid, bc: str) -> sp.csr_matrix:
    ops = [_laplacian_1d(grid.shape[k], grid.spacing[k], bc)
           for k in range(grid.dimension)]
    if grid.dimension == 1:
        return ops[0]
    nx, ny = grid.shape
    # C-order flattening of (nx, ny): axis 0 varies slowest.
    return (sp.kron(ops[0], sp.identity(ny)) +
            sp.kron(sp.identity(nx), ops[1])).tocsr()


def neumann_laplacian(grid: Grid) -> sp.csr_matrix:
    """Zero-flux Laplacian: symmetric negative semidefinite, constant kernel."""
    return _assemble_laplacian(grid, "neumann")


def dirichlet_laplacian(grid: Grid) -> sp.csr_matrix:
    """Laplacian with zero value on boundary faces: symmetric negative definite."""
    return _assemble_laplacian(grid, "dirichlet")
