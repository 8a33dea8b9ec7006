"""Lattice discretization of the phase space ``P = LK_alg x LK``.

A point is ``(chi, g)`` sampled at ``M`` equispaced sigma in ``[-pi, pi)``.
Tangent vectors are right-trivialized: ``v = (delta_chi, xi)`` with
``delta g = xi g``, so ``dg g^-1 (v) = xi`` and ``g^-1 dg (v) = g^-1 xi g``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm_frechet

from ..errors import DomainError, ResolutionError
from ..liealg import LieAlgebraData
from ..loops import is_power_of_two, pair, sigma_grid, spectral_derivative, spectral_tail

UNITARY_TOL = 1e-12
HERMITIAN_TOL = 1e-12
SMOOTHNESS_TOL = 1e-8


def comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


@lru_cache(maxsize=None)
def real_basis(data: LieAlgebraData) -> np.ndarray:
    """Orthonormal basis of the compact real form under ``-tr(XY)``.

    Order: ``i H^mu``, then for each positive root ``(E - E^dag)/sqrt(2 f)``
    and ``i (E + E^dag)/sqrt(2 f)`` with ``f = (E^a, E^-a)``.
    """
    mats = data.matrices
    out = [1j * mats.numeric(("H", mu)) for mu in range(data.rank)]
    for a in range(data.n_pos):
        e = mats.numeric(("E", a))
        f = float(data.form(("E", a), ("E", data.neg(a))))
        out.append((e - dagger(e)) / np.sqrt(2 * f))
        out.append(1j * (e + dagger(e)) / np.sqrt(2 * f))
    return np.array(out)


def cartan_matrices(data: LieAlgebraData) -> np.ndarray:
    return data.matrices.numeric_basis[: data.rank]


def cartan_zero_mode(data: LieAlgebraData, X: np.ndarray) -> np.ndarray:
    """``(X | H^mu)`` for each mu (complex for complexified loops)."""
    H = cartan_matrices(data)
    return np.einsum("sij,mji->m", X, H) / X.shape[0]


def u_of(data: LieAlgebraData, U: np.ndarray, X: np.ndarray) -> np.ndarray:
    """``u(X) = U(P X)`` as a constant ``n x n`` matrix."""
    c = cartan_zero_mode(data, X)
    return np.einsum("m,mij->ij", U @ c, cartan_matrices(data))


def expm_diag_cartan(u: np.ndarray, sign: float = 1.0) -> np.ndarray:
    """Exponential of a diagonal (Cartan) matrix."""
    return np.diag(np.exp(sign * np.diag(u)))


def expm_antihermitian(X: np.ndarray) -> np.ndarray:
    """Batched exponential of anti-Hermitean matrices via ``eigh``."""
    H = -1j * X
    H = 0.5 * (H + dagger(H))
    w, V = np.linalg.eigh(H)
    return (V * np.exp(1j * w)[..., None, :]) @ dagger(V)


def random_loop(data: LieAlgebraData, M: int, rng: np.random.Generator,
                amplitude: float = 0.1, band: int = 3, decay: float = 4.0,
                constant: bool = True) -> np.ndarray:
    """Smooth anti-Hermitean loop with Gaussian Fourier data decaying like ``|n|^-decay``."""
    basis = real_basis(data)
    sig = sigma_grid(M)
    out = np.zeros((M,) + basis.shape[1:], dtype=complex)
    for n in range(0 if constant else 1, band + 1):
        s = amplitude * max(1, n) ** (-decay)
        a = rng.normal(0, s, len(basis))
        b = rng.normal(0, s, len(basis)) if n else np.zeros(len(basis))
        coeff = np.outer(np.cos(n * sig), a) + np.outer(np.sin(n * sig), b)
        out += np.einsum("sa,aij->sij", coeff, basis)
    return out


@dataclass
class PhasePoint:
    data: LieAlgebraData
    chi: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        self.chi = np.asarray(self.chi, dtype=complex)
        self.g = np.asarray(self.g, dtype=complex)
        if self.chi.shape != self.g.shape or self.chi.ndim != 3:
            raise DomainError("chi and g must both have shape (M, n, n)")
        if not is_power_of_two(self.M):
            raise DomainError(f"lattice size M={self.M} is not a power of two")

    @property
    def M(self) -> int:
        return self.chi.shape[0]

    @property
    def sigma(self) -> np.ndarray:
        return sigma_grid(self.M)

    def validate(self, strict_group: bool = True) -> None:
        n = self.chi.shape[1]
        eye = np.eye(n)
        if strict_group:
            uerr = np.max(np.abs(dagger(self.g) @ self.g - eye))
            derr = np.max(np.abs(np.linalg.det(self.g) - 1))
            if uerr > UNITARY_TOL or derr > UNITARY_TOL:
                raise DomainError(f"g is not special unitary (err {max(uerr, derr):.2e})")
        herr = np.max(np.abs(self.chi + dagger(self.chi)))
        if herr > HERMITIAN_TOL:
            raise DomainError(f"chi is not anti-Hermitean (err {herr:.2e})")
        for name, arr in (("chi", self.chi), ("g", self.g)):
            tail = spectral_tail(arr)
            if tail > SMOOTHNESS_TOL:
                raise ResolutionError(f"{name} has spectral tail {tail:.2e} above M/4; "
                                      "increase M or smooth the input")

    def copy(self) -> "PhasePoint":
        return PhasePoint(self.data, self.chi.copy(), self.g.copy())


@dataclass
class TangentVector:
    delta_chi: np.ndarray
    xi: np.ndarray

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.delta_chi + other.delta_chi, self.xi + other.xi)

    def __mul__(self, s) -> "TangentVector":
        return TangentVector(self.delta_chi * s, self.xi * s)

    __rmul__ = __mul__


def identity_point(data: LieAlgebraData, M: int) -> PhasePoint:
    n = data.rank + 1
    return PhasePoint(data, np.zeros((M, n, n), complex), np.broadcast_to(np.eye(n), (M, n, n)).copy())


def random_point(data: LieAlgebraData, M: int, rng: np.random.Generator,
                 amplitude: float = 0.1, band: int = 3,
                 g_offset: np.ndarray | None = None) -> PhasePoint:
    """Seeded random smooth point near ``(0, identity)``.

    ``g_offset`` (a constant group element) multiplies ``g`` from the left.
    """
    chi = random_loop(data, M, rng, amplitude, band)
    g = expm_antihermitian(random_loop(data, M, rng, amplitude, band))
    if g_offset is not None:
        g = g_offset[None] @ g
    return PhasePoint(data, chi, g)


def flow_point(p: PhasePoint, v: TangentVector, t: float) -> PhasePoint:
    """``(chi + t delta_chi, exp(t xi) g)`` for anti-Hermitean ``xi``."""
    return PhasePoint(p.data, p.chi + t * v.delta_chi, expm_antihermitian(t * v.xi) @ p.g)


# ---- currents -------------------------------------------------------------


def currents(p: PhasePoint, k: float, check: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """``J_L = chi`` and ``J_R = -g^-1 chi g + k g^-1 dg/dsigma``."""
    if check:
        p.validate()
    ginv = np.linalg.inv(p.g)
    J_R = -ginv @ p.chi @ p.g + k * ginv @ spectral_derivative(p.g)
    return p.chi, J_R


def d_currents(p: PhasePoint, v: TangentVector, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Differentials: ``dJ_L = delta_chi``, ``dJ_R = Ad_{g^-1}(-delta_chi - [chi, xi] + k xi')``."""
    ginv = np.linalg.inv(p.g)
    inner = -v.delta_chi - comm(p.chi, v.xi) + k * spectral_derivative(v.xi)
    return v.delta_chi, ginv @ inner @ p.g


@dataclass
class ConvergenceFit:
    steps: np.ndarray
    errors: np.ndarray
    slope: float


def derivative_convergence(p: PhasePoint, v: TangentVector, k: float,
                           steps=(1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6)) -> ConvergenceFit:
    """Central differences of the currents along ``flow_point`` against ``d_currents``.

    Errors are relative to ``max |dJ|`` over both chiralities; the slope is a
    least-squares fit of ``log error`` against ``log step``. The fit only sees
    the truncation term if it dominates round-off at the smallest step, which
    for double precision needs ``|v|`` of order ten.
    """
    exact = np.concatenate(d_currents(p, v, k))
    scale = float(np.max(np.abs(exact)))
    steps = np.asarray(steps, dtype=float)
    errors = np.empty_like(steps)
    for i, h in enumerate(steps):
        fwd = np.concatenate(currents(flow_point(p, v, h), k))
        bwd = np.concatenate(currents(flow_point(p, v, -h), k))
        errors[i] = np.max(np.abs((fwd - bwd) / (2 * h) - exact)) / scale
    slope = float(np.polyfit(np.log(steps), np.log(errors), 1)[0])
    return ConvergenceFit(steps, errors, slope)


def hamiltonian_value(p: PhasePoint, k: float) -> float:
    J_L, J_R = currents(p, k)
    return float(np.real(-(pair(J_L, J_L) + pair(J_R, J_R)) / (2 * k)))


def omega_u(p: PhasePoint, v: TangentVector, w: TangentVector, U: np.ndarray, k: float) -> complex:
    """Symplectic form evaluated with the trapezoid pairing.

    ``1/2 (dJ_L ^| r) - 1/2 (dJ_R ^| l) + 1/2 (u(dJ_L) ^| dJ_L) + 1/2 (u(dJ_R) ^| dJ_R)``
    with ``(A ^| B)(v, w) = (A(v)|B(w)) - (A(w)|B(v))``.
    """
    d = p.data
    ginv = np.linalg.inv(p.g)
    dLv, dRv = d_currents(p, v, k)
    dLw, dRw = d_currents(p, w, k)
    rv, rw = v.xi, w.xi
    lv, lw = ginv @ v.xi @ p.g, ginv @ w.xi @ p.g

    def wedge(Av, Bw, Aw, Bv):
        return pair(Av, Bw) - pair(Aw, Bv)

    def u(X):
        return np.broadcast_to(u_of(d, U, X), X.shape)

    total = 0.5 * wedge(dLv, rw, dLw, rv) - 0.5 * wedge(dRv, lw, dRw, lv)
    total += 0.5 * wedge(u(dLv), dLw, u(dLw), dLv) + 0.5 * wedge(u(dRv), dRw, u(dRw), dRv)
    return complex(total)


# ---- closedness ------------------------------------------------------------


def _chart_point(p: PhasePoint, a: np.ndarray, b: np.ndarray) -> PhasePoint:
    return PhasePoint(p.data, p.chi + a, expm_antihermitian(b) @ p.g)


def _chart_tangent(b: np.ndarray, direction: TangentVector) -> TangentVector:
    """Right-trivialized image of the coordinate vector ``direction`` at ``exp(b) g``."""
    xi = np.empty_like(b)
    for j in range(b.shape[0]):
        e, de = expm_frechet(b[j], direction.xi[j])
        xi[j] = de @ np.linalg.inv(e)
    return TangentVector(direction.delta_chi, xi)


def closedness_residual(p: PhasePoint, X: TangentVector, Y: TangentVector, Z: TangentVector,
                        U: np.ndarray, k: float, step: float = 1e-3, form2=None) -> float:
    """``|d omega_u (X, Y, Z)|`` for coordinate vector fields of the chart
    ``(a, b) -> (chi + a, exp(b) g)``.

    The coordinate fields commute, so the exterior derivative is the cyclic sum
    of directional derivatives, taken by a fourth-order central difference.
    ``form2`` defaults to ``omega_u``; any callable with its signature works.
    """
    form2 = omega_u if form2 is None else form2

    def form(t, D, V, W):
        a, b = t * D.delta_chi, t * D.xi
        q = _chart_point(p, a, b)
        return form2(q, _chart_tangent(b, V), _chart_tangent(b, W), U, k)

    total = 0j
    for D, V, W in ((X, Y, Z), (Y, Z, X), (Z, X, Y)):
        f = [form(s * step, D, V, W) for s in (-2, -1, 1, 2)]
        total += (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * step)
    return abs(total)
