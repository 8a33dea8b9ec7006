"""Numerical brackets compared against the symbolic current algebra and the
symmetry relations of the loop-group actions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..currentalg import CARTAN, L, R, ROOT, GeneratorId, Session
from ..errors import CutoffError
from ..liealg import UOperator
from ..loops import components, sigma_grid, spectral_derivative
from ..report import FAIL, PASS, VerificationReport
from .lattice import PhasePoint, TangentVector, comm, currents, expm_antihermitian
from .symplectic import SymplecticData, assemble

DETECTION_THRESHOLD = 1e-3


# ---- observables ------------------------------------------------------------


@dataclass(frozen=True)
class CurrentObservable:
    """``J_{L,R}^{a,n} = (J | T^a e^{i n sigma})``."""
    chirality: int
    label: tuple
    mode: int

    def value(self, p: PhasePoint, k: float, J=None) -> complex:
        J = (currents(p, k) if J is None else J)[self.chirality]
        ph = np.exp(1j * self.mode * p.sigma)
        T = p.data.matrices.numeric(self.label)
        return complex(np.einsum("sij,ji,s->", J, T, ph) / p.M)

    def covector(self, sd: SymplecticData) -> np.ndarray:
        return sd.covector_current(self.chirality, self.label, self.mode)

    def name(self) -> str:
        return f"J{'LR'[self.chirality]}[{self.label[0]}{self.label[1]},{self.mode}]"


@dataclass(frozen=True, eq=False)
class GHarmonic:
    """Loop-group-only observable ``(1/2pi) int tr(A g) e^{i n sigma}``."""
    A: np.ndarray
    mode: int
    tag: str = "A"

    def value(self, p: PhasePoint, k: float, J=None) -> complex:
        ph = np.exp(1j * self.mode * p.sigma)
        return complex(np.einsum("ij,sji,s->", self.A, p.g, ph) / p.M)

    def covector(self, sd: SymplecticData) -> np.ndarray:
        return sd.covector_g_harmonic(self.A, self.mode)

    def name(self) -> str:
        return f"tr({self.tag} g)[{self.mode}]"


def observable_values(p: PhasePoint, k: float, observables) -> np.ndarray:
    J = currents(p, k)
    return np.array([o.value(p, k, J) for o in observables])


def current_values(p: PhasePoint, k: float, n_max: int) -> dict:
    """``{GeneratorId: value}`` for both chiralities and ``|n| <= n_max``."""
    JL, JR = currents(p, k)
    out = {}
    for ch, J in ((L, JL), (R, JR)):
        for (lab, n), v in components(p.data, J, n_max).items():
            out[GeneratorId(ch, CARTAN if lab[0] == "H" else ROOT, lab[1], n)] = v
    return out


# ---- loop-group actions -----------------------------------------------------


def act_left(p: PhasePoint, h: np.ndarray, k: float) -> PhasePoint:
    """``h |>_L (chi, g) = (k h' h^-1 + h chi h^-1, h g)``."""
    hinv = np.linalg.inv(h)
    return PhasePoint(p.data, k * spectral_derivative(h) @ hinv + h @ p.chi @ hinv, h @ p.g)


def act_right(p: PhasePoint, h: np.ndarray, k: float) -> PhasePoint:
    """``h |>_R (chi, g) = (chi, g h^-1)``."""
    return PhasePoint(p.data, p.chi.copy(), p.g @ np.linalg.inv(h))


def action_tangent(p: PhasePoint, xi: np.ndarray, k: float, side: int) -> TangentVector:
    """Generator of ``exp(t xi) |>`` (complex-linear in ``xi``)."""
    if side == L:
        return TangentVector(k * spectral_derivative(xi) + comm(xi, p.chi), xi)
    return TangentVector(np.zeros_like(xi), -p.g @ xi @ np.linalg.inv(p.g))


def split_real(Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``Z = X + i Y`` with ``X, Y`` anti-Hermitean."""
    Zd = np.conj(np.swapaxes(Z, -1, -2))
    return (Z - Zd) / 2, (Z + Zd) / 2j


def action_derivative_fd(p: PhasePoint, Z: np.ndarray, k: float, side: int, f,
                         step: float = 1e-4):
    """``Z_side f`` by a fourth-order central difference along real flows.

    ``f`` may return a scalar or an array (several observables at once).
    """
    act = act_left if side == L else act_right
    out = 0j
    for X, w in zip(split_real(Z), (1.0, 1j)):
        if not np.any(X):
            continue
        vals = {t: f(act(p, expm_antihermitian(t * step * X), k)) for t in (-2, -1, 1, 2)}
        der = (vals[-2] - 8 * vals[-1] + 8 * vals[1] - vals[2]) / (12 * step)
        out += w * der
    return out


def mode_loop(p: PhasePoint, label: tuple, n: int) -> np.ndarray:
    ph = np.exp(1j * n * p.sigma)[:, None, None]
    return ph * p.data.matrices.numeric(label)[None]


def _rel(a: complex, b: complex, floor: float = 1.0) -> float:
    return abs(a - b) / max(abs(b), floor)


# ---- current brackets -------------------------------------------------------


def default_pairs(session: Session, n_max: int) -> list[tuple]:
    gens = session.generators(n_max)
    return [(a, b) for i, a in enumerate(gens) for b in gens[i:]]


def verify_current_brackets(p: PhasePoint, U: UOperator, k: int, N_t: int,
                            pairs=None, n_max: int = 2, tol: float = 1e-6,
                            sd: SymplecticData | None = None) -> VerificationReport:
    """Numerical ``{J, J}`` against the symbolic bracket at the point's currents.

    Residuals are relative with unit floor: ``|num - sym| / max(|sym|, 1)``.
    """
    d = p.data
    session = Session(d, U, int(k), n_alg=max(2 * n_max, 1))
    pairs = default_pairs(session, n_max) if pairs is None else list(pairs)
    for a, b in pairs:
        need = max(abs(a.mode), abs(b.mode)) + abs(a.mode + b.mode)
        if need > N_t:
            raise CutoffError(f"pair modes ({a.mode},{b.mode}) leave no margin below N_t={N_t}")
    if sd is None:
        sd = assemble(p, U.numeric(), k, N_t)
    vals = current_values(p, k, session.n_alg)
    cov = {}
    rep = VerificationReport(f"current_brackets[{d.name}, N_t={N_t}]")
    worst = {"LL": 0.0, "RR": 0.0, "LR": 0.0}
    where = {}
    for a, b in pairs:
        for g in (a, b):
            if g not in cov:
                cov[g] = sd.covector_current(g.chirality, g.label(), g.mode)
        num = sd.bracket(cov[a], cov[b])
        sym = session.gen_bracket(a, b).evaluate(vals, k=k)
        key = "LR" if a.chirality != b.chirality else "LL" if a.chirality == L else "RR"
        err = _rel(num, sym)
        if err >= worst[key]:
            worst[key] = err
            where[key] = f"{a} x {b}: num={num:.6g} sym={sym:.6g}"
    for key in ("LL", "RR", "LR"):
        rep.add(f"brackets_{key}", worst[key], tol, [where.get(key, "")])
    rep.add("omega_antisymmetry", float(np.max(np.abs(sd.omega + sd.omega.T))), 1e-10)
    eye = np.eye(sd.dim)
    rep.add("pi_omega_identity", float(np.max(np.abs(sd.pi @ sd.omega - eye))), 1e-8,
            [f"cond={sd.cond:.3e}"])
    return rep


# ---- symmetry relations -----------------------------------------------------


def default_observables(p: PhasePoint, rng: np.random.Generator | None = None) -> list:
    d = p.data
    n = d.rank + 1
    rng = np.random.default_rng(7) if rng is None else rng
    obs = []
    for ch in (L, R):
        for lab in (("H", 0), ("E", 0), ("E", d.n_pos - 1), ("E", d.neg(0))):
            for m in (0, 1):
                obs.append(CurrentObservable(ch, lab, m))
    for j, m in enumerate((0, 1)):
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        obs.append(GHarmonic(A, m, tag=f"A{j}"))
    return obs


def verify_symmetry_relations(p: PhasePoint, U: UOperator, k: float, N_t: int,
                              observables=None, direction_modes: int | None = None,
                              tol: float = 1e-5, fd_step: float = 1e-4,
                              sd: SymplecticData | None = None) -> VerificationReport:
    """Action vector fields versus the bracket relations for both chiralities.

    ``H^{mu,m} f = {f, J^{mu,m}}`` and
    ``E^{a,n} f = {f, J^{a,n}} + <a, U(H^mu)> J^{a,n} {f, J^{mu,0}}``, with the
    vector fields computed by finite differences of the group actions.
    """
    d = p.data
    Unum = U.numeric()
    if sd is None:
        sd = assemble(p, Unum, k, N_t)
    observables = default_observables(p) if observables is None else observables
    direction_modes = N_t // 2 if direction_modes is None else direction_modes
    vals = current_values(p, k, direction_modes)
    covs = [o.covector(sd) for o in observables]
    aUH = np.array([[U.alpha_U_H(d, a, mu).evaluate().real for mu in range(d.rank)]
                    for a in range(d.n_roots)])
    rep = VerificationReport(f"symmetry_relations[{d.name}]")
    for side, tag in ((L, "left"), (R, "right")):
        zero_cov = [sd.covector_current(side, ("H", mu), 0) for mu in range(d.rank)]
        res = {"cartan": 0.0, "root": 0.0}
        naive_root = 0.0
        for n in range(-direction_modes, direction_modes + 1):
            for lab in d.basis:
                Z = mode_loop(p, lab, n)
                jcov = sd.covector_current(side, lab, n)
                lhs_all = action_derivative_fd(
                    p, Z, k, side, lambda q: observable_values(q, k, observables), fd_step)
                for lhs, c in zip(lhs_all, covs):
                    base = sd.bracket(c, jcov)
                    rhs = base
                    if lab[0] == "E":
                        J = vals[GeneratorId(side, ROOT, lab[1], n)]
                        for mu in range(d.rank):
                            rhs += aUH[lab[1], mu] * J * sd.bracket(c, zero_cov[mu])
                        naive_root = max(naive_root, abs(lhs - base))
                    kind = "cartan" if lab[0] == "H" else "root"
                    res[kind] = max(res[kind], abs(lhs - rhs) / max(1.0, abs(lhs)))
        rep.add(f"{tag}_cartan", res["cartan"], tol)
        rep.add(f"{tag}_root", res["root"], tol)
        if U.is_zero:
            rep.add(f"{tag}_hamiltonian_at_u0", naive_root, tol)
        else:
            # positive detection: the plain Hamiltonian relation must fail visibly
            status = PASS if naive_root >= DETECTION_THRESHOLD else FAIL
            rep.add(f"{tag}_non_hamiltonian_detected", naive_root, DETECTION_THRESHOLD,
                    [f"naive residual {naive_root:.3e} (must be >= threshold)"], status=status)
    return rep


# ---- loop-group-only brackets ------------------------------------------------


def loop_bracket_sides(p: PhasePoint, U: UOperator, k: float, phi: GHarmonic, psi: GHarmonic,
               sd: SymplecticData, fd_step: float = 1e-4) -> tuple[complex, complex, complex]:
    """``({phi, psi}, L-term, R-term)``.

    ``L-term = U(H^{mu,0})_L phi * H_L^{mu,0} psi`` and
    ``R-term = H_R^{mu,0} phi * U(H^{mu,0})_R psi``.
    """
    d = p.data
    Unum = U.numeric()
    lhs = sd.bracket(phi.covector(sd), psi.covector(sd))
    H = d.matrices.numeric_basis[: d.rank]
    lt = rt = 0j
    for mu in range(d.rank):
        UH = np.einsum("n,nij->ij", Unum[:, mu], H)
        UHl = np.broadcast_to(UH, p.chi.shape).copy()
        Hl = np.broadcast_to(H[mu], p.chi.shape).copy()

        def der(Z, side, obs):
            return action_derivative_fd(p, Z, k, side, lambda q: obs.value(q, k), fd_step)

        lt += der(UHl, L, phi) * der(Hl, L, psi)
        rt += der(Hl, R, phi) * der(UHl, R, psi)
    return lhs, lt, rt


def verify_loop_group_bracket(p: PhasePoint, U: UOperator, k: float, N_t: int, pairs=None,
                tol: float = 1e-5, sd: SymplecticData | None = None,
                rng: np.random.Generator | None = None) -> VerificationReport:
    """``{phi, psi} = U(H^{mu,0})_L phi H_L^{mu,0} psi - H_R^{mu,0} phi U(H^{mu,0})_R psi``.

    Also reports the same relation with the right side negated.
    """
    d = p.data
    n = d.rank + 1
    if sd is None:
        sd = assemble(p, U.numeric(), k, N_t)
    if pairs is None:
        rng = np.random.default_rng(11) if rng is None else rng
        mats = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(3)]
        obs = [GHarmonic(A, m, f"A{i}") for i, A in enumerate(mats) for m in (-1, 0, 1)]
        pairs = [(a, b) for i, a in enumerate(obs) for b in obs[i + 1:]]
    lit = rev = 0.0
    detail = ""
    for a, b in pairs:
        lhs, lt, rt = loop_bracket_sides(p, U, k, a, b, sd)
        rhs = lt - rt
        e = abs(lhs - rhs) / max(1.0, abs(rhs))
        if e >= lit:
            lit = e
            detail = f"{a.name()} x {b.name()}: bracket={lhs:.6g} rhs={rhs:.6g}"
        rev = max(rev, abs(lhs + rhs) / max(1.0, abs(rhs)))
    rep = VerificationReport(f"loop_group_bracket[{d.name}]")
    rep.add("loop_group_bracket", lit, tol, [detail])
    rep.add("loop_group_bracket_negated_rhs", rev, tol)
    return rep
