"""Gauge orbits on the constraint locus: tangency and the kernel of the
restricted symplectic form."""
from __future__ import annotations

import numpy as np

from ..liealg import UOperator
from ..reduction import (GaugeSubalgebraSpec, dconstraint, gauge_action, locus_tangent,
                         project_S, s_basis, sample_locus)
from ..report import FAIL, PASS, VerificationReport
from .lattice import PhasePoint, TangentVector, expm_antihermitian, omega_u, real_basis

NONDEGENERACY_FLOOR = 1e-3


def mode_profiles(sigma: np.ndarray, n_max: int) -> list[np.ndarray]:
    """``1, cos(n s), sin(n s)`` for ``1 <= n <= n_max``."""
    out = [np.ones_like(sigma)]
    for n in range(1, n_max + 1):
        out += [np.cos(n * sigma), np.sin(n * sigma)]
    return out


def orbit_vector(spec: GaugeSubalgebraSpec, U, k: float, p: PhasePoint, zeta: np.ndarray,
                 step: float = 1e-3, kappa: float | None = None) -> TangentVector:
    """Generator of ``t -> exp(t zeta) |>_u p`` by a fourth-order central difference."""
    pts = {t: gauge_action(spec, U, k, expm_antihermitian(t * step * zeta), p, kappa=kappa)
           for t in (-2, -1, 1, 2)}

    def der(get):
        return (get(pts[-2]) - 8 * get(pts[-1]) + 8 * get(pts[1]) - get(pts[2])) / (12 * step)

    dchi = der(lambda q: q.chi)
    dg = der(lambda q: q.g)
    return TangentVector(dchi, dg @ np.linalg.inv(p.g))


def perp_basis(spec: GaugeSubalgebraSpec) -> np.ndarray:
    """Spanning set of the compact form of ``S^perp``."""
    rb = real_basis(spec.data)
    proj = rb - project_S(s_basis(spec), rb)
    keep = [x for x in proj if np.max(np.abs(x)) > 1e-12]
    return np.array(keep)


def verify_orbit_kernel(spec: GaugeSubalgebraSpec, U: UOperator, k: float, M: int = 64,
                        seed: int = 0, n_orbit: int = 2, n_tangent: int = 2,
                        tangency_tol: float = 1e-7, kernel_tol: float = 1e-6,
                        allow_incompatible: bool = False, kappa: float | None = None,
                        sample=None) -> VerificationReport:
    """Gauge-orbit vectors are tangent to the locus and ``omega_u``-orthogonal to it."""
    d = spec.data
    Unum = U.numeric()
    if sample is None:
        sample = sample_locus(spec, U, k, M, seed, check_compatible=not allow_incompatible)
    p = sample.point
    profiles = mode_profiles(p.sigma, max(n_orbit, n_tangent))
    orbit = []
    for prof in profiles[: 2 * n_orbit + 1]:
        for z in s_basis(spec):
            orbit.append(orbit_vector(spec, Unum, k, p, prof[:, None, None] * z[None], kappa=kappa))
    tangents = []
    zero = np.zeros_like(p.chi)
    for prof in profiles[: 2 * n_tangent + 1]:
        for x in real_basis(d):
            tangents.append(locus_tangent(spec, Unum, k, p, prof[:, None, None] * x[None], zero))
        for x in perp_basis(spec):
            tangents.append(locus_tangent(spec, Unum, k, p, zero, prof[:, None, None] * x[None]))

    rep = VerificationReport(f"orbit_kernel[{spec.describe()}]")
    rep.add("locus_residual", sample.residual, 1e-10, [f"newton iterations {sample.iterations}"])
    tang = max(float(np.max(np.abs(dconstraint(spec, Unum, k, p, v)))) for v in orbit)
    rep.add("orbit_tangency", tang, tangency_tol)
    tres = max(float(np.max(np.abs(dconstraint(spec, Unum, k, p, w)))) for w in tangents)
    rep.add("tangent_basis_residual", tres, 1e-9, [f"{len(tangents)} locus tangent vectors"])
    ker = 0.0
    for v in orbit:
        for w in tangents:
            ker = max(ker, abs(omega_u(p, v, w, Unum, k)))
    rep.add("orbit_kernel", ker, kernel_tol, [f"{len(orbit)} orbit vectors"])
    # the restricted form must not vanish identically, or the kernel test is empty
    pairing = max(abs(omega_u(p, tangents[i], tangents[j], Unum, k))
                  for i in range(0, len(tangents), 7) for j in range(1, len(tangents), 5))
    rep.add("restricted_form_nonzero", pairing, NONDEGENERACY_FLOOR,
            ["largest pairing among sampled locus tangents"],
            status=PASS if pairing >= NONDEGENERACY_FLOOR else FAIL)
    return rep
