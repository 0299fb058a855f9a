"""Power-law pressure and the piecewise-linear-growth cutoff calculus.

The pressure of species i is p_i(u) = sum_j a_ij u_j^beta. For beta >= 2
the scheme caps the power growth beyond a level N with C^1 truncations:
``s_trunc`` replaces z^gamma and ``r_trunc`` replaces z^beta, linked by the
chain rule r_trunc' = beta * s_trunc(., beta-1, N).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_NEG_TOL = 1e-12


@dataclass
class ModelParams:
    """All model coefficients for one simulation.

    ``eps = 0`` selects the local Darcy velocity law. ``trunc_N = None``
    disables the cutoff calculus (the default for beta < 2).
    """

    n: int
    beta: float
    sigma: tuple[float, ...]
    a: np.ndarray
    eps: float = 0.0
    eta: float = 0.0
    trunc_N: float | None = None
    alpha: float = field(init=False)

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        if self.n < 1:
            raise ValueError("species count must be >= 1")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if len(self.sigma) != self.n or any(s <= 0 for s in self.sigma):
            raise ValueError("sigma must hold n positive diffusivities")
        if self.a.shape != (self.n, self.n):
            raise ValueError(f"coefficient matrix must be {self.n}x{self.n}")
        if self.eps < 0 or self.eta < 0:
            raise ValueError("eps and eta must be nonnegative")
        if self.trunc_N is not None and self.trunc_N <= 0:
            raise ValueError("truncation level must be positive")
        sym = 0.5 * (self.a + self.a.T)
        self.alpha = float(np.linalg.eigvalsh(sym)[0])
        if self.alpha <= 0:
            raise ValueError(
                "coefficient matrix must be positive definite "
                f"(smallest symmetric-part eigenvalue {self.alpha:.3g})")


def clip_nonnegative(u: np.ndarray) -> np.ndarray:
    """Round tiny negative values to zero; large negatives signal a bug."""
    if np.min(u) < -_NEG_TOL:
        raise ValueError(f"density has negative values below -{_NEG_TOL:g} "
                         f"(min {np.min(u):.3g})")
    return np.maximum(u, 0.0)


def power_field(u: np.ndarray, gamma: float) -> np.ndarray:
    """Pointwise power of a nonnegative field."""
    return clip_nonnegative(u) ** gamma


def pressure(u: list[np.ndarray], i: int, params: ModelParams) -> np.ndarray:
    """Pressure of species i: sum_j a_ij u_j^beta (truncated if active)."""
    p = np.zeros_like(u[0])
    for j in range(params.n):
        if params.trunc_N is not None:
            pj = s_trunc(clip_nonnegative(u[j]), params.beta, params.trunc_N)
        else:
            pj = power_field(u[j], params.beta)
        p += params.a[i, j] * pj
    return p


def clipped_plus(z, N: float):
    """max(0, min(N, z)), elementwise."""
    return np.clip(z, 0.0, N)


def s_trunc(z, gamma: float, N: float):
    """C^1 cutoff of z^gamma: exact on [0, N], linear beyond N, zero below 0."""
    z = np.asarray(z, dtype=float)
    mid = np.clip(z, 0.0, N) ** gamma
    lin = np.where(z > N, gamma * N ** (gamma - 1.0) * (z - N), 0.0)
    return mid + lin


def r_trunc(z, beta: float, N: float):
    """C^1 convex cutoff of z^beta with derivative beta*s_trunc(z, beta-1, N)."""
    z = np.asarray(z, dtype=float)
    mid = np.clip(z, 0.0, N) ** beta
    excess = np.where(z > N, z - N, 0.0)
    tail = (beta * N ** (beta - 1.0) * excess
            + 0.5 * beta * (beta - 1.0) * N ** (beta - 2.0) * excess**2)
    return mid + tail
