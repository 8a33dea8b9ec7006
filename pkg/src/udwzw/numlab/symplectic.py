"""Assembly of the symplectic form on a truncated tangent basis and its inverse.

The tangent basis is complex: ``(T^a e^{i n sigma}, 0)`` and ``(0, T^a e^{i n sigma})``
for every basis label ``a`` and ``|n| <= N_t``.  Everything is the
complex-bilinear extension of the real form, so inverting ``Omega`` on this
conjugation-closed space gives the complex-bilinear extension of the bivector.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TruncationError
from ..liealg import LieAlgebraData
from ..loops import sigma_grid, spectral_derivative
from .lattice import PhasePoint, TangentVector, cartan_matrices, comm

COND_LIMIT = 1e10

# Pi = PI_SIGN * Omega^{-1}; fixed once by the u=0 Cartan-Cartan calibration
PI_SIGN = 1.0


def _swap(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2)


def pairing_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``G[i, j] = (A_i | B_j)`` for stacks of lattice loops."""
    D1, D2, M = A.shape[0], B.shape[0], A.shape[1]
    return A.reshape(D1, -1) @ _swap(B).reshape(D2, -1).T / M


def mode_basis(data: LieAlgebraData, M: int, N_t: int) -> tuple[list, np.ndarray]:
    """Labels ``(label, n)`` and lattice loops ``T^a e^{i n sigma}``."""
    sig = sigma_grid(M)
    mats = data.matrices.numeric_basis
    labels, loops = [], []
    for n in range(-N_t, N_t + 1):
        ph = np.exp(1j * n * sig)[:, None, None]
        for a, lab in enumerate(data.basis):
            labels.append((lab, n))
            loops.append(ph * mats[a][None])
    return labels, np.array(loops)


@dataclass
class SymplecticData:
    """Differentials of the currents on the basis plus ``Omega`` and ``Pi``."""
    point: PhasePoint
    U: np.ndarray
    k: float
    N_t: int
    labels: list
    W: np.ndarray          # (B, M, n, n) mode loops
    dJL: np.ndarray        # (D, M, n, n)
    dJR: np.ndarray
    r: np.ndarray
    l: np.ndarray
    omega: np.ndarray = field(repr=False, default=None)
    pi: np.ndarray = field(repr=False, default=None)
    cond: float = 0.0

    @property
    def dim(self) -> int:
        return self.dJL.shape[0]

    def tangent(self, i: int) -> TangentVector:
        B = len(self.labels)
        z = np.zeros_like(self.W[0])
        return TangentVector(self.W[i], z) if i < B else TangentVector(z, self.W[i - B])

    # ---- covectors -----------------------------------------------------------
    def _mode_loop(self, label: tuple, n: int) -> np.ndarray:
        M = self.point.M
        ph = np.exp(1j * n * sigma_grid(M))[:, None, None]
        return ph * self.point.data.matrices.numeric(label)[None]

    def covector_current(self, chirality: int, label: tuple, n: int) -> np.ndarray:
        """``d J^{a,n}`` evaluated on every basis vector (chirality 0 = L, 1 = R)."""
        src = self.dJL if chirality == 0 else self.dJR
        return pairing_matrix(src, self._mode_loop(label, n)[None])[:, 0]

    def covector_g_harmonic(self, A: np.ndarray, n: int) -> np.ndarray:
        """Differential of ``(1/2pi) int tr(A g) e^{i n sigma}``."""
        M = self.point.M
        ph = np.exp(1j * n * sigma_grid(M))
        # dg = xi g, so tr(A xi g) = tr(xi g A)
        gA = self.point.g @ A[None]
        return np.einsum("dsij,sji,s->d", self.r, gA, ph) / M

    def covector(self, fn) -> np.ndarray:
        """Generic covector of a linear functional on tangent vectors."""
        return np.array([fn(self.tangent(i)) for i in range(self.dim)])

    def bracket(self, df: np.ndarray, dh: np.ndarray) -> complex:
        return complex(df @ self.pi @ dh)

    def vector_field(self, dh: np.ndarray) -> np.ndarray:
        """Coefficients of the Hamiltonian vector field ``X_h`` (``X_h f = {f, h}``)."""
        return self.pi @ dh

    def combine(self, coeffs: np.ndarray) -> TangentVector:
        B = len(self.labels)
        dchi = np.einsum("d,dsij->sij", coeffs[:B], self.W)
        xi = np.einsum("d,dsij->sij", coeffs[B:], self.W)
        return TangentVector(dchi, xi)


def assemble(p: PhasePoint, U: np.ndarray, k: float, N_t: int,
             invert: bool = True, cond_limit: float = COND_LIMIT) -> SymplecticData:
    d = p.data
    labels, W = mode_basis(d, p.M, N_t)
    ginv = np.linalg.inv(p.g)
    zero = np.zeros_like(W)
    Ad = ginv[None] @ W @ p.g[None]
    inner_xi = -comm(p.chi[None], W) + k * spectral_derivative(np.moveaxis(W, 0, 1)).swapaxes(0, 1)
    dJL = np.concatenate([W, zero])
    dJR = np.concatenate([-Ad, ginv[None] @ inner_xi @ p.g[None]])
    r = np.concatenate([zero, W])
    l = np.concatenate([zero, Ad])
    sd = SymplecticData(p, np.asarray(U, float), float(k), N_t, labels, W, dJL, dJR, r, l)
    sd.omega = omega_matrix(sd)
    if invert:
        sd.cond = float(np.linalg.cond(sd.omega))
        if not np.isfinite(sd.cond) or sd.cond > cond_limit:
            raise TruncationError(f"Omega is ill-conditioned (cond {sd.cond:.2e}); "
                                  "increase N_t or choose another base point")
        sd.pi = PI_SIGN * np.linalg.inv(sd.omega)
    return sd


def omega_matrix(sd: SymplecticData) -> np.ndarray:
    """``Omega[i, j] = omega_u(e_i, e_j)``."""
    d = sd.point.data
    H = cartan_matrices(d)

    def wedge(A, B):
        G = pairing_matrix(A, B)
        return G - G.T

    om = 0.5 * wedge(sd.dJL, sd.r) - 0.5 * wedge(sd.dJR, sd.l)
    for dJ in (sd.dJL, sd.dJR):
        C = pairing_matrix(dJ, np.broadcast_to(H[:, None], (d.rank,) + dJ.shape[1:]))
        G = C @ sd.U.T @ C.T      # (u(dJ_i) | dJ_j)
        om += 0.5 * (G - G.T)
    return om
