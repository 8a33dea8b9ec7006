"""Hamiltonian flow of the truncated bivector and energy conservation."""
from __future__ import annotations

import numpy as np

from ..currentalg import Session
from ..errors import CutoffError
from ..liealg import UOperator
from ..report import VerificationReport
from .lattice import PhasePoint, TangentVector, currents, dagger, hamiltonian_value
from .relations import current_values
from .symplectic import PI_SIGN, assemble, pairing_matrix


def hamiltonian_covector(sd) -> np.ndarray:
    """``dH = -(1/k) [(J_L | dJ_L) + (J_R | dJ_R)]`` on the basis."""
    J_L, J_R = currents(sd.point, sd.k)
    return -(pairing_matrix(sd.dJL, J_L[None])[:, 0] + pairing_matrix(sd.dJR, J_R[None])[:, 0]) / sd.k


def hamiltonian_vector(p: PhasePoint, U: np.ndarray, k: float, N_t: int) -> TangentVector:
    """``X_H`` with ``X_H f = {f, H}``; returned as a real tangent vector."""
    sd = assemble(p, U, k, N_t, invert=False)
    v = sd.combine(PI_SIGN * np.linalg.solve(sd.omega, hamiltonian_covector(sd)))
    # drop round-off imaginary parts: project back onto anti-Hermitean loops
    return TangentVector(0.5 * (v.delta_chi - dagger(v.delta_chi)), 0.5 * (v.xi - dagger(v.xi)))


def rk4_step(p: PhasePoint, U: np.ndarray, k: float, N_t: int, dt: float) -> PhasePoint:
    """One classical RK4 step for ``(chi, g)`` in ambient matrix space."""
    def rhs(chi, g):
        v = hamiltonian_vector(PhasePoint(p.data, chi, g), U, k, N_t)
        return v.delta_chi, v.xi @ g

    c, g = p.chi, p.g
    k1 = rhs(c, g)
    k2 = rhs(c + 0.5 * dt * k1[0], g + 0.5 * dt * k1[1])
    k3 = rhs(c + 0.5 * dt * k2[0], g + 0.5 * dt * k2[1])
    k4 = rhs(c + dt * k3[0], g + dt * k3[1])
    c = c + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    g = g + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return PhasePoint(p.data, c, g)


def integrate(p: PhasePoint, U: np.ndarray, k: float, N_t: int, T: float, dt: float):
    """Yield ``(t, point)`` along the RK4 trajectory, starting with ``t = 0``."""
    steps = int(round(T / dt))
    yield 0.0, p
    for s in range(1, steps + 1):
        p = rk4_step(p, U, k, N_t, dt)
        yield s * dt, p


def flow_check(p: PhasePoint, U: UOperator, k: int, N_t: int, T: float = 1.0,
               dt: float = 1e-3, drift_tol: float = 1e-8, deriv_tol: float = 1e-5,
               n_cut: int | None = None, margin: int = 1) -> VerificationReport:
    """Energy drift over ``[0, T]`` and ``dJ/dt = {J, H_trunc}`` at ``t = 0``."""
    d = p.data
    Unum = U.numeric()
    rep = VerificationReport(f"flow[{d.name}, N_t={N_t}]")
    m_max = N_t // 2 - margin
    if m_max < 0:
        raise CutoffError(f"N_t={N_t} leaves no modes after margin {margin}")

    # time derivative of current components at t = 0
    sd = assemble(p, Unum, k, N_t)
    dH = hamiltonian_covector(sd)
    n_cut = N_t if n_cut is None else n_cut
    session = Session(d, U, int(k), n_alg=n_cut + m_max)
    H = session.hamiltonian(n_cut)
    vals = current_values(p, k, session.n_alg)
    worst = 0.0
    detail = ""
    for g in session.generators(m_max):
        num = sd.bracket(sd.covector_current(g.chirality, g.label(), g.mode), dH)
        sym = -session.bracket(H, g).evaluate(vals, k=k)    # {J, H} = -{H, J}
        err = abs(num - sym) / max(1.0, abs(sym))
        if err >= worst:
            worst = err
            detail = f"{g}: numeric={num:.6g} symbolic={sym:.6g}"
    rep.add("symbolic_time_derivative", worst, deriv_tol, [detail])

    H0 = hamiltonian_value(p, k)
    drift = 0.0
    for t, q in integrate(p, Unum, k, N_t, T, dt):
        drift = max(drift, abs(hamiltonian_value(q, k) - H0))
    scale = abs(H0) if H0 != 0 else 1.0
    rep.add("energy_drift", drift / scale, drift_tol, [f"H(0)={H0:.12g}"])
    return rep
