"""Vectorial gauging: gauged subalgebra, constraints, first-class checks.

The gauged subalgebra ``S`` is fixed by a set ``upsilon`` of positive roots;
its complexification is spanned by ``E^{+-g}`` (``g`` in ``upsilon``) and the
coroots ``g^vee``.  The constraints are the ``S``-components of the B-product
``J_L . J_R``::

    phi^{g,n} = J_L^{g,n} + exp(-<g, U(H^nu)> J_L^{nu,0}) J_R^{g,n}
    phi^{h,n} = sum_mu h_mu (J_L^{mu,n} + J_R^{mu,n})     (h in H_S)
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import logm

from .currentalg import CARTAN, L, R, ROOT, CurrentPolynomial, JE, JH, Session, gen
from .errors import DomainError, SamplingError
from .liealg import LieAlgebraData, UOperator, coroot
from .loops import spectral_derivative
from .numlab.lattice import (PhasePoint, TangentVector, comm, currents, d_currents,
                             expm_antihermitian, random_loop, real_basis, u_of)
from .report import VerificationReport
from .scalars import ONE, ZERO, Coeff


# ---------------------------------------------------------------------------
# gauged subalgebra


def _rational_gram(data: LieAlgebraData, a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    """Trace-form inner product of two vectors given in simple-coroot coordinates."""
    A = data.cartan_matrix
    r = data.rank
    # (a_i^vee, a_j^vee) = 2 A_ij / |a_j|^2
    return sum((a[i] * b[j] * Fraction(2 * A[i][j]) / data.norm2(j)
                for i in range(r) for j in range(r)), Fraction(0))


def _simple_coroot_coords(data: LieAlgebraData, root_index: int) -> list[Fraction]:
    """Expansion of ``g^vee`` over simple coroots (A-series: same as the root)."""
    root = data.root(root_index)
    return [Fraction(root[i]) * data.norm2(i) / data.norm2(root_index) for i in range(data.rank)]


def _gram_schmidt(data: LieAlgebraData, vecs: list[list[Fraction]]) -> list[list[Fraction]]:
    out: list[list[Fraction]] = []
    for v in vecs:
        w = list(v)
        for u in out:
            c = _rational_gram(data, w, u) / _rational_gram(data, u, u)
            w = [wi - c * ui for wi, ui in zip(w, u)]
        if any(w):
            out.append(w)
    return out


def _rational_nullspace(rows: list[list[Fraction]], n: int) -> list[list[Fraction]]:
    """Basis of ``{x : rows @ x = 0}`` by exact Gauss-Jordan elimination."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        x = [Fraction(0)] * n
        x[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = -m[i][fc]
        basis.append(x)
    return basis


def _to_cartan_coords(data: LieAlgebraData, v: list[Fraction]) -> list[Coeff]:
    """Normalize a simple-coroot-coordinate vector and express it over ``H^mu``."""
    norm2 = _rational_gram(data, v, v)
    scale = Coeff.sqrt(1 / norm2)
    out = [ZERO] * data.rank
    for i, c in enumerate(v):
        if c == 0:
            continue
        cv = coroot(data, i)
        out = [o + scale * c * x for o, x in zip(out, cv)]
    return out


@dataclass(frozen=True, eq=False)
class GaugeSubalgebraSpec:
    data: LieAlgebraData
    upsilon: tuple
    cartan_S: tuple = field(init=False)
    cartan_S_perp: tuple = field(init=False)

    def __post_init__(self):
        d = self.data
        ups = tuple(sorted(set(int(i) for i in self.upsilon)))
        if not ups:
            raise DomainError("upsilon must be non-empty")
        for i in ups:
            if not 0 <= i < d.n_pos:
                raise DomainError(f"upsilon index {i} is not a positive root of {d.name}")
        object.__setattr__(self, "upsilon", ups)
        span = _gram_schmidt(d, [_simple_coroot_coords(d, g) for g in ups])
        # orthogonal complement: x with (x, s) = 0 for every s in span
        rows = [[_rational_gram(d, s, [Fraction(int(i == j)) for j in range(d.rank)])
                 for i in range(d.rank)] for s in span]
        perp = _gram_schmidt(d, _rational_nullspace(rows, d.rank))
        object.__setattr__(self, "cartan_S", tuple(tuple(_to_cartan_coords(d, v)) for v in span))
        object.__setattr__(self, "cartan_S_perp", tuple(tuple(_to_cartan_coords(d, v)) for v in perp))

    @property
    def roots_pm(self) -> tuple:
        """Indices of ``+-upsilon``."""
        return self.upsilon + tuple(self.data.neg(g) for g in self.upsilon)

    def projector_S(self) -> np.ndarray:
        """Orthogonal projector onto ``H_S`` in ``H^mu`` coordinates."""
        B = np.array([[x.evaluate().real for x in h] for h in self.cartan_S]).reshape(-1, self.data.rank)
        return B.T @ B

    def describe(self) -> str:
        return f"{self.data.name} upsilon={[self.data.root(g) for g in self.upsilon]}"


def block_upsilon(data: LieAlgebraData, size: int) -> tuple:
    """Positive roots of the upper-left ``sl(size)`` block."""
    return tuple(i for i, r in enumerate(data.positive_roots)
                 if all(c == 0 for c in r[size - 1:]))


def check_subalgebra(spec: GaugeSubalgebraSpec) -> VerificationReport:
    d = spec.data
    pm = set(spec.roots_pm)
    bad = []
    for a, b in itertools.combinations_with_replacement(sorted(pm), 2):
        s = d.add(a, b)
        if s is not None and s not in pm:
            bad.append(f"{d.root(a)} + {d.root(b)} = {d.root(s)} not in +-upsilon")
    rep = VerificationReport(f"subalgebra[{spec.describe()}]")
    rep.add_exact("closure", bad)
    return rep


def compatibility_residuals(spec: GaugeSubalgebraSpec, U: UOperator) -> list[tuple[int, int, Coeff]]:
    """``(g, j, <g, U(h_j)>)`` for ``g`` in upsilon and ``h_j`` in ``H_S^perp``."""
    d = spec.data
    out = []
    for g in spec.upsilon:
        for j, h in enumerate(spec.cartan_S_perp):
            val = sum((h[mu] * U.alpha_U_H(d, g, mu) for mu in range(d.rank)), ZERO)
            out.append((g, j, val))
    return out


def check_u_compatibility(spec: GaugeSubalgebraSpec, U: UOperator) -> VerificationReport:
    rep = VerificationReport(f"compatibility[{spec.describe()}]")
    fails = [f"<{spec.data.root(g)}, U(h_perp[{j}])> = {v}"
             for g, j, v in compatibility_residuals(spec, U) if not v.is_zero()]
    rep.add_exact("u_compatibility", fails)
    return rep


# ---------------------------------------------------------------------------
# constraints


class ConstraintId(NamedTuple):
    kind: int     # ROOT or CARTAN
    index: int    # root index, or index into cartan_S
    mode: int


@dataclass
class ConstraintSet:
    spec: GaugeSubalgebraSpec
    U: UOperator
    N: int
    u_zero: bool
    constraints: dict   # ConstraintId -> CurrentPolynomial

    def __len__(self) -> int:
        return len(self.constraints)

    def phi_root(self, g: int, n: int) -> CurrentPolynomial:
        return phi_root(self.spec.data, self.U, g, n)

    def phi_cartan(self, h: Sequence[Coeff], n: int) -> CurrentPolynomial:
        return phi_cartan(h, n)


def phi_root(data: LieAlgebraData, U: UOperator, g: int, n: int) -> CurrentPolynomial:
    expo = {JH(L, nu, 0): -U.alpha_U_H(data, g, nu) for nu in range(data.rank)}
    return gen(JE(L, g, n)) + CurrentPolynomial.exponential(expo) * gen(JE(R, g, n))


def phi_cartan(h: Sequence[Coeff], n: int) -> CurrentPolynomial:
    out = CurrentPolynomial.const(0)
    for mu, c in enumerate(h):
        if not c.is_zero():
            out = out + gen(JH(L, mu, n)) * c + gen(JH(R, mu, n)) * c
    return out


def make_constraints(spec: GaugeSubalgebraSpec, U: UOperator, N: int,
                     allow_incompatible: bool = False) -> ConstraintSet:
    """Constraints for ``|n| <= N``; refuses an incompatible ``U`` unless told otherwise."""
    if N < 0:
        raise DomainError("N must be non-negative")
    if U.rank != spec.data.rank:
        raise DomainError("U rank does not match the algebra")
    if not U.is_zero and not allow_incompatible:
        bad = [(g, j, v) for g, j, v in compatibility_residuals(spec, U) if not v.is_zero()]
        if bad:
            lines = "; ".join(f"gamma={spec.data.root(g)}, h_perp[{j}]: {v}" for g, j, v in bad)
            raise DomainError(f"U is not compatible with the gauged subalgebra: {lines}")
    cons = {}
    for n in range(-N, N + 1):
        for g in spec.roots_pm:
            cons[ConstraintId(ROOT, g, n)] = phi_root(spec.data, U, g, n)
        for s, h in enumerate(spec.cartan_S):
            cons[ConstraintId(CARTAN, s, n)] = phi_cartan(h, n)
    return ConstraintSet(spec, U, N, U.is_zero, cons)


def expected_bracket(cs: ConstraintSet, a: ConstraintId, b: ConstraintId) -> CurrentPolynomial:
    """Closed-form constraint bracket table."""
    d, U = cs.spec.data, cs.U
    m, n = a.mode, b.mode
    if a.kind == CARTAN and b.kind == CARTAN:
        return CurrentPolynomial.const(0)
    if a.kind == CARTAN:
        h = cs.spec.cartan_S[a.index]
        c = sum((h[mu] * d.coord(b.index, mu) for mu in range(d.rank)), ZERO)
        return phi_root(d, U, b.index, m + n) * c
    if b.kind == CARTAN:
        return -expected_bracket(cs, b, a)
    al, be = a.index, b.index
    if be == d.neg(al):
        return phi_cartan(coroot(d, al), m + n)
    out = CurrentPolynomial.const(0)
    s = d.add(al, be)
    if s is not None:
        out = out + phi_root(d, U, s, m + n) * Coeff.const(d.structure_constants[(al, be)])
    w = U.u_pairing(d, al, be)
    if not w.is_zero():
        out = out - phi_root(d, U, al, m) * phi_root(d, U, be, n) * w
    return out


def locus_substitution(spec: GaugeSubalgebraSpec, U: UOperator, n_alg: int) -> dict:
    """Solve the constraints for ``J_R`` components.

    ``J_R^{g,n} -> -exp(+<g, U(H^nu)> J_L^{nu,0}) J_L^{g,n}`` for ``g`` in ``+-upsilon``
    and ``J_R -> J_R - P_S(J_R + J_L)`` on the Cartan part, which reads
    ``J_R^{h,n} -> -J_L^{h,n}`` for ``h`` in ``H_S`` in an adapted basis.
    """
    d = spec.data
    sub = {}
    for n in range(-n_alg, n_alg + 1):
        for g in spec.roots_pm:
            expo = {JH(L, nu, 0): U.alpha_U_H(d, g, nu) for nu in range(d.rank)}
            sub[JE(R, g, n)] = -(CurrentPolynomial.exponential(expo) * gen(JE(L, g, n)))
        for mu in range(d.rank):
            p = gen(JH(R, mu, n))
            for h in spec.cartan_S:
                if h[mu].is_zero():
                    continue
                proj = phi_cartan(h, n)
                p = p - proj * h[mu]
            sub[JH(R, mu, n)] = p
    return sub


def first_class_check(cs: ConstraintSet, session: Session | None = None,
                      pairs: Sequence | None = None) -> VerificationReport:
    """Closed-form table comparison and on-locus vanishing of every bracket."""
    d = cs.spec.data
    if session is None:
        session = Session(d, cs.U, None, n_alg=2 * cs.N)
    keys = sorted(cs.constraints)
    if pairs is None:
        pairs = list(itertools.combinations_with_replacement(keys, 2))
    sub = locus_substitution(cs.spec, cs.U, session.n_alg)
    table_fail, locus_fail = [], []
    for a, b in pairs:
        got = session.bracket(cs.constraints[a], cs.constraints[b])
        if not (got - expected_bracket(cs, a, b)).is_zero():
            table_fail.append(f"{tuple(a)} x {tuple(b)}")
        if not got.substitute(sub).is_zero():
            locus_fail.append(f"{tuple(a)} x {tuple(b)}")
    rep = VerificationReport(f"first_class[{cs.spec.describe()}]")
    rep.add_exact("closed_form_table", table_fail)
    rep.add_exact("on_locus_vanishing", locus_fail)
    for c in cs.constraints.values():
        if not c.substitute(sub).is_zero():
            rep.add_exact("constraints_vanish_on_locus", ["substitution does not solve a constraint"])
            break
    else:
        rep.add_exact("constraints_vanish_on_locus", [])
    return rep


# ---------------------------------------------------------------------------
# lattice side: constraint loop, locus sampling, gauge action


@lru_cache(maxsize=None)
def s_basis(spec: GaugeSubalgebraSpec) -> np.ndarray:
    """Orthonormal basis of the compact form of ``S`` under ``-tr(XY)``."""
    d = spec.data
    mats = d.matrices
    H = mats.numeric_basis[: d.rank]
    out = [1j * np.einsum("m,mij->ij", [x.evaluate().real for x in h], H) for h in spec.cartan_S]
    for g in spec.upsilon:
        e = mats.numeric(("E", g))
        f = float(d.form(("E", g), ("E", d.neg(g))))
        out.append((e - e.conj().T) / np.sqrt(2 * f))
        out.append(1j * (e + e.conj().T) / np.sqrt(2 * f))
    return np.array(out)


def s_coefficients(basis: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Coefficients of the orthogonal projection onto ``S^C``: ``-tr(X S_a)``."""
    return -np.einsum("...ij,aji->...a", X, basis)


def project_S(basis: np.ndarray, X: np.ndarray) -> np.ndarray:
    return np.einsum("...a,aij->...ij", s_coefficients(basis, X), basis)


def _numeric_U(U) -> np.ndarray:
    return U.numeric() if isinstance(U, UOperator) else np.asarray(U, float)


def _torus(data: LieAlgebraData, U: np.ndarray, chi: np.ndarray) -> np.ndarray:
    """Diagonal of ``u(chi)`` (the Cartan matrices are diagonal)."""
    return np.diag(u_of(data, U, chi))


def constraint_loop(spec: GaugeSubalgebraSpec, U, k: float, p) -> np.ndarray:
    """Pointwise ``S``-coefficients of ``J_L . J_R = J_L + e^{u(J_L)} J_R e^{-u(J_L)}``."""
    U = _numeric_U(U)
    J_L, J_R = currents(p, k)
    t = np.exp(_torus(spec.data, U, J_L))
    X = J_L + t[:, None] * J_R / t[None, :]
    return s_coefficients(s_basis(spec), X)


def locus_residual(spec: GaugeSubalgebraSpec, U, k: float, p) -> float:
    return float(np.max(np.abs(constraint_loop(spec, U, k, p))))


def dconstraint(spec: GaugeSubalgebraSpec, U, k: float, p, v) -> np.ndarray:
    """Linearization of :func:`constraint_loop` along a tangent vector."""
    d = spec.data
    U = _numeric_U(U)
    J_L, J_R = currents(p, k)
    dJ_L, dJ_R = d_currents(p, v, k)
    t = np.exp(_torus(d, U, J_L))
    conj_R = t[:, None] * J_R / t[None, :]
    du = u_of(d, U, dJ_L)
    X = dJ_L + t[:, None] * dJ_R / t[None, :] + du @ conj_R - conj_R @ du
    return s_coefficients(s_basis(spec), X)


def _perp_part(basis: np.ndarray, X: np.ndarray) -> np.ndarray:
    return X - project_S(basis, X)


def _pointwise_operator(basis: np.ndarray, g: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``A[s, a, b]``: S-coefficient ``a`` of ``S_b - e^u g^-1 S_b g e^-u``."""
    ginv = np.linalg.inv(g)
    img = t[:, None] * (ginv[:, None] @ basis[None] @ g[:, None]) / t[None, :]
    return s_coefficients(basis, basis[None] - img).swapaxes(1, 2)


def _pointwise_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``A x = -b`` at every lattice point; fails where ``1 - Ad_g`` is singular on S."""
    try:
        x = np.linalg.solve(A, -b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        x = None
    if x is None or not np.all(np.isfinite(x)) or np.max(np.linalg.cond(A)) > 1e12:
        raise DomainError("the S-part cannot be solved pointwise here: g^-1 (.) g fixes a "
                          "direction of S (e.g. g near the identity)")
    return x


def _solve_S(spec, U, k, g, chi_perp, z):
    """Pointwise solve for ``chi_S`` given the H_S zero modes ``z`` that fix ``u``.

    Returns the S-coefficients of ``chi_S``.
    """
    d = spec.data
    basis = s_basis(spec)
    r = len(spec.cartan_S)
    zloop = np.broadcast_to(np.einsum("s,sij->ij", z, basis[:r]), chi_perp.shape)
    t = np.exp(_torus(d, U, chi_perp + zloop))
    ginv = np.linalg.inv(g)
    rhs_loop = chi_perp + t[:, None] * (-ginv @ chi_perp @ g + k * ginv @ spectral_derivative(g)) / t[None, :]
    A = _pointwise_operator(basis, g, t)
    b = s_coefficients(basis, rhs_loop)
    return _pointwise_solve(A, b)


@dataclass
class LocusSample:
    point: object
    chi_perp: np.ndarray
    iterations: int
    residual: float
    history: list


def sample_locus(spec: GaugeSubalgebraSpec, U: UOperator, k: float, M: int, seed: int,
                 newton_tol: float = 1e-10, max_iter: int = 50, amplitude: float = 0.1,
                 check_compatible: bool = True) -> LocusSample:
    """Random point on the constraint locus.

    ``g = g0 exp(X)`` with a random constant ``g0`` (so that ``1 - Ad_g`` is
    invertible on S) and a small smooth loop ``X``; the S^perp part of ``chi``
    is random and the S part solves the constraints pointwise.  The only
    nonlinearity is through the H_S zero modes of ``chi``, found by damped
    Newton iteration.
    """
    d = spec.data
    if check_compatible:
        bad = [(g, j) for g, j, v in compatibility_residuals(spec, U) if not v.is_zero()]
        if bad:
            raise DomainError(f"U is not compatible with the gauged subalgebra at {bad}")
    U = U.numeric()
    rng = np.random.default_rng(seed)
    basis = s_basis(spec)
    rb = real_basis(d)
    g0 = expm_antihermitian(np.einsum("a,aij->ij", rng.normal(0, 1.0, len(rb)), rb))
    g = g0[None] @ expm_antihermitian(random_loop(d, M, rng, amplitude))
    chi_perp = _perp_part(basis, random_loop(d, M, rng, amplitude))
    r = len(spec.cartan_S)

    def chi_of(z):
        x = _solve_S(spec, U, k, g, chi_perp, z)
        return chi_perp + np.einsum("sa,aij->sij", x.astype(complex), basis), x

    def F(z):
        _, x = chi_of(z)
        return x[:, :r].real.mean(axis=0) - z

    z = np.zeros(r)
    history = []
    for it in range(max_iter + 1):
        chi, _ = chi_of(z)
        p = PhasePoint(d, chi, g)
        res = locus_residual(spec, U, k, p)
        history.append(res)
        if res <= newton_tol:
            return LocusSample(p, chi_perp, it, res, history)
        if r == 0:
            break
        f0 = F(z)
        h = 1e-7
        J = np.column_stack([(F(z + h * e) - f0) / h for e in np.eye(r)])
        step = np.linalg.solve(J, -f0)
        lam = 1.0
        while lam > 1e-4 and np.linalg.norm(F(z + lam * step)) > np.linalg.norm(f0):
            lam *= 0.5
        z = z + lam * step
    raise SamplingError(f"locus Newton iteration did not converge in {max_iter} iterations "
                        f"(seed {seed}, residual history {history[-5:]})")


def locus_tangent(spec: GaugeSubalgebraSpec, U, k: float, p, xi: np.ndarray,
                  dchi_perp: np.ndarray):
    """Tangent vector ``(dchi_perp + dchi_S, xi)`` with vanishing constraint derivative."""
    d = spec.data
    U = _numeric_U(U)
    basis = s_basis(spec)
    r = len(spec.cartan_S)
    g = p.g
    ginv = np.linalg.inv(g)
    J_L, J_R = currents(p, k)
    t = np.exp(_torus(d, U, J_L))
    conj_R = t[:, None] * J_R / t[None, :]
    A = _pointwise_operator(basis, g, t)

    def solve(z):
        zloop = np.einsum("s,sij->ij", z, basis[:r])
        du = u_of(d, U, dchi_perp + zloop[None])
        known = dchi_perp + t[:, None] * (ginv @ (-dchi_perp - comm(p.chi, xi) + k * spectral_derivative(xi)) @ g) / t[None, :]
        known = known + du @ conj_R - conj_R @ du
        b = s_coefficients(basis, known)
        return _pointwise_solve(A, b)

    def F(z):
        return solve(z)[:, :r].mean(axis=0) - z

    f0 = F(np.zeros(r, complex))
    J = np.column_stack([F(e.astype(complex)) - f0 for e in np.eye(r)]) if r else np.zeros((0, 0))
    z = np.linalg.solve(J, -f0) if r else np.zeros(0)
    x = solve(z)
    return TangentVector(dchi_perp + np.einsum("sa,aij->sij", x, basis), xi)


def gauge_action(spec: GaugeSubalgebraSpec, U, k: float, s: np.ndarray, p,
                 kappa: float | None = None, tol: float = 1e-9):
    """``s |>_u (chi, g) = (s chi s^-1 + k s' s^-1, s g s_L^-1)``.

    ``s_L = e^{-u(s chi s^-1 + kappa s' s^-1)} s e^{u(chi)}``; ``kappa`` defaults to ``k``.
    """
    d = spec.data
    U = _numeric_U(U)
    basis = s_basis(spec)
    worst = 0.0
    for sj in s:
        X = logm(sj)
        worst = max(worst, float(np.max(np.abs(_perp_part(basis, X)))))
    if worst > tol:
        raise DomainError(f"gauge parameter is not in S (projection residual {worst:.2e})")
    kappa = k if kappa is None else kappa
    sinv = np.linalg.inv(s)
    ds = spectral_derivative(s)
    conj = s @ p.chi @ sinv
    chi_new = conj + k * ds @ sinv
    chi_kappa = conj + kappa * ds @ sinv
    t_old = np.exp(_torus(d, U, p.chi))
    t_new = np.exp(_torus(d, U, chi_kappa))
    # s_L^-1 = e^{-u(chi)} s^-1 e^{u(chi_kappa)}
    sL_inv = (sinv / t_old[:, None]) * t_new[None, :]
    return PhasePoint(d, chi_new, s @ p.g @ sL_inv)
