"""Symbolic Poisson algebra of current modes with the deformed bracket.

Generators are the mode components ``J_{L,R}^{mu,n} = (J | H^mu e^{in s})``
and ``J_{L,R}^{a,n} = (J | E^a e^{in s})``.  Elements of the algebra are
:class:`CurrentPolynomial`: sums of ``coeff * monomial * exp(sum c_j J_j)``
where the exponent is a linear form in Cartan zero modes.  Exponentials are
never expanded; the bracket differentiates them by the chain rule.

Generator brackets (``s = +1`` for L, ``-1`` for R)::

    {J^{mu,m}, J^{nu,n}} = s k delta^{mu nu} i n delta_{m+n,0}
    {J^{mu,m}, J^{a,n}}  = <a, H^mu> J^{a,m+n}
    {J^{a,m}, J^{-a,n}}  = (2/|a|^2) (<a, H^mu> J^{mu,m+n} + s i k n delta_{m+n,0})
    {J^{a,m}, J^{b,n}}   = c^{ab} J^{a+b,m+n} - omega_U(a, b) J^{a,m} J^{b,n}
    {J_L, J_R}           = 0
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import CutoffError, DomainError
from .liealg import LieAlgebraData, UOperator
from .report import VerificationReport
from .scalars import I, K, ONE, ZERO, Coeff

L, R = 0, 1
CARTAN, ROOT = 0, 1
_CHIR_NAME = ("L", "R")


class GeneratorId(NamedTuple):
    chirality: int   # L or R
    kind: int        # CARTAN or ROOT
    index: int       # Cartan index mu or root index
    mode: int

    def with_mode(self, mode: int) -> "GeneratorId":
        return GeneratorId(self.chirality, self.kind, self.index, mode)

    def label(self) -> tuple:
        return ("H", self.index) if self.kind == CARTAN else ("E", self.index)


def JH(chirality: int, mu: int, mode: int) -> GeneratorId:
    return GeneratorId(chirality, CARTAN, mu, mode)


def JE(chirality: int, root: int, mode: int) -> GeneratorId:
    return GeneratorId(chirality, ROOT, root, mode)


def _merge_mono(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


def _merge_exp(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for g, c in b:
        v = d.get(g)
        if v is None:
            d[g] = c
        else:
            v = v + c
            if v.is_zero():
                del d[g]
            else:
                d[g] = v
    return tuple(sorted(d.items(), key=lambda it: it[0]))


def _add_into(target: dict, key, c: Coeff) -> None:
    v = target.get(key)
    if v is None:
        target[key] = c
    else:
        v = v + c
        if v.is_zero():
            del target[key]
        else:
            target[key] = v


class CurrentPolynomial:
    """Immutable element ``sum coeff * prod(generators) * exp(linear form)``.

    Terms are keyed by ``(monomial, exponent)``; the monomial is a sorted
    tuple of :class:`GeneratorId` (repeated for powers) and the exponent a
    sorted tuple of ``(GeneratorId, Coeff)`` pairs over Cartan zero modes.
    """

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping | None = None):
        t: dict = {}
        for key, c in (terms or {}).items():
            if not isinstance(c, Coeff):
                c = Coeff.const(c)
            if not c.is_zero():
                _add_into(t, key, c)
        self._t = t

    @classmethod
    def _raw(cls, t: dict) -> "CurrentPolynomial":
        obj = cls.__new__(cls)
        obj._t = t
        return obj

    @classmethod
    def const(cls, c) -> "CurrentPolynomial":
        c = c if isinstance(c, Coeff) else Coeff.const(c)
        return cls._raw({((), ()): c} if not c.is_zero() else {})

    @classmethod
    def generator(cls, g: GeneratorId, coeff=ONE) -> "CurrentPolynomial":
        return cls({((g,), ()): coeff})

    @classmethod
    def exponential(cls, exponent: Mapping[GeneratorId, Coeff]) -> "CurrentPolynomial":
        """``exp(sum_j c_j J_j)`` with ``J_j`` Cartan zero modes."""
        items = []
        for g, c in exponent.items():
            if g.kind != CARTAN or g.mode != 0:
                raise DomainError("exponentials only accept Cartan zero modes")
            c = c if isinstance(c, Coeff) else Coeff.const(c)
            if not c.is_zero():
                items.append((g, c))
        return cls._raw({((), tuple(sorted(items, key=lambda it: it[0]))): ONE})

    # ---- inspection ------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def __len__(self) -> int:
        return len(self._t)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Coeff)):
            other = CurrentPolynomial.const(other)
        if not isinstance(other, CurrentPolynomial):
            return NotImplemented
        return self._t == other._t

    __hash__ = None

    def generators(self) -> set:
        out = set()
        for mono, exp in self._t:
            out.update(mono)
            out.update(g for g, _ in exp)
        return out

    def degree(self) -> int:
        return max((len(m) for m, _ in self._t), default=0)

    def exponents(self) -> set:
        return {exp for _, exp in self._t}

    # ---- ring operations -------------------------------------------------
    def __add__(self, other) -> "CurrentPolynomial":
        other = _coerce(other)
        t = dict(self._t)
        for key, c in other._t.items():
            _add_into(t, key, c)
        return CurrentPolynomial._raw(t)

    __radd__ = __add__

    def __neg__(self) -> "CurrentPolynomial":
        return CurrentPolynomial._raw({key: -c for key, c in self._t.items()})

    def __sub__(self, other) -> "CurrentPolynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "CurrentPolynomial":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "CurrentPolynomial":
        if isinstance(other, (int, Fraction, Coeff)):
            if isinstance(other, Coeff) or other:
                return CurrentPolynomial._raw(
                    {k: v for k, v in ((key, c * other) for key, c in self._t.items())
                     if not v.is_zero()})
            return CurrentPolynomial._raw({})
        other = _coerce(other)
        t: dict = {}
        for (m1, e1), c1 in self._t.items():
            for (m2, e2), c2 in other._t.items():
                c = c1 * c2
                if not c.is_zero():
                    _add_into(t, (_merge_mono(m1, m2), _merge_exp(e1, e2)), c)
        return CurrentPolynomial._raw(t)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CurrentPolynomial":
        out = CurrentPolynomial.const(1)
        for _ in range(n):
            out = out * self
        return out

    def partial(self, g: GeneratorId) -> "CurrentPolynomial":
        """Derivative with respect to generator ``g`` (chain rule on exps)."""
        t: dict = {}
        for (mono, exp), c in self._t.items():
            p = mono.count(g)
            if p:
                i = mono.index(g)
                _add_into(t, (mono[:i] + mono[i + 1:], exp), c * p)
            for h, a in exp:
                if h == g:
                    _add_into(t, (mono, exp), c * a)
        return CurrentPolynomial._raw(t)

    def map_coefficients(self, fn) -> "CurrentPolynomial":
        t: dict = {}
        for (mono, exp), c in self._t.items():
            new_exp = tuple((g, fn(a)) for g, a in exp)
            new_exp = tuple((g, a) for g, a in new_exp if not a.is_zero())
            v = fn(c)
            if not v.is_zero():
                _add_into(t, (mono, new_exp), v)
        return CurrentPolynomial._raw(t)

    def substitute_params(self, k=None, params: Mapping | None = None) -> "CurrentPolynomial":
        """Exact substitution for the level and/or symbolic ``U`` entries."""
        return self.map_coefficients(lambda c: c.substitute(k=k, params=params))

    def substitute(self, mapping: Mapping[GeneratorId, "CurrentPolynomial"]) -> "CurrentPolynomial":
        """Replace generators by polynomials.

        A Cartan zero mode that appears inside an exponent must be mapped to
        a homogeneous linear polynomial free of exponentials.
        """
        out = CurrentPolynomial._raw({})
        cache: dict = {}
        for (mono, exp), c in self._t.items():
            term = CurrentPolynomial._raw({((), ()): c})
            for g in mono:
                term = term * (mapping[g] if g in mapping else CurrentPolynomial.generator(g))
            new_exp: dict = {}
            for g, a in exp:
                if g in mapping:
                    lin = cache.get(g)
                    if lin is None:
                        lin = _linear_form(mapping[g])
                        cache[g] = lin
                    for h, b in lin.items():
                        new_exp[h] = new_exp.get(h, ZERO) + a * b
                else:
                    new_exp[g] = new_exp.get(g, ZERO) + a
            term = term * CurrentPolynomial.exponential(
                {g: a for g, a in new_exp.items() if not a.is_zero()})
            out = out + term
        return out

    # ---- evaluation & text -----------------------------------------------
    def evaluate(self, values: Mapping[GeneratorId, complex], k=None,
                 params: Sequence | None = None) -> complex:
        import cmath
        total = 0j
        for (mono, exp), c in self._t.items():
            v = c.evaluate(k=k, params=params)
            for g in mono:
                v *= values[g]
            if exp:
                v *= cmath.exp(sum(a.evaluate(k=k, params=params) * values[g] for g, a in exp))
            total += v
        return total

    def to_text(self, data: LieAlgebraData | None = None) -> str:
        if not self._t:
            return "0"
        lines = []
        for (mono, exp), c in sorted(self._t.items(), key=lambda kv: _term_sort_key(kv[0])):
            factors = [f"({c})"]
            factors += [gen_name(g, data) for g in mono]
            if exp:
                inner = " + ".join(f"({a})*{gen_name(g, data)}" for g, a in exp)
                factors.append(f"exp[{inner}]")
            lines.append(" * ".join(factors))
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"CurrentPolynomial<{len(self._t)} terms>"

    def __str__(self) -> str:
        return self.to_text().replace("\n", " + ")


def _term_sort_key(key):
    mono, exp = key
    return (len(mono), mono, tuple((g, a.key()) for g, a in exp))


def gen_name(g: GeneratorId, data: LieAlgebraData | None = None) -> str:
    chir = _CHIR_NAME[g.chirality]
    if g.kind == CARTAN:
        lab = f"H{g.index + 1}"
    elif data is not None:
        lab = "(" + ",".join(str(x) for x in data.root(g.index)) + ")"
    else:
        lab = f"E{g.index}"
    return f"J{chir}[{lab};{g.mode}]"


def _coerce(x) -> CurrentPolynomial:
    if isinstance(x, CurrentPolynomial):
        return x
    return CurrentPolynomial.const(x)


def _linear_form(p: CurrentPolynomial) -> dict:
    out = {}
    for (mono, exp), c in p._t.items():
        if exp or len(mono) != 1:
            raise DomainError("generators inside exponents must map to linear forms")
        out[mono[0]] = out.get(mono[0], ZERO) + c
    return out


def gen(g: GeneratorId) -> CurrentPolynomial:
    return CurrentPolynomial.generator(g)


# ---------------------------------------------------------------------------


@dataclass
class Session:
    """Bracket engine for one algebra, deformation operator and level.

    ``k=None`` keeps the level as the formal symbol ``k``.
    """
    data: LieAlgebraData
    U: UOperator
    k: int | None = None
    n_alg: int = 6
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.U.rank != self.data.rank:
            raise DomainError("U rank does not match the algebra")
        if self.k is not None and (not isinstance(self.k, int) or self.k <= 0):
            raise DomainError("numeric level k must be a positive integer")
        self.k_coeff = K if self.k is None else Coeff.const(self.k)
        self.inv_k = Coeff.k_power(-1) if self.k is None else Coeff.const(Fraction(1, self.k))
        r = self.data.rank
        n = self.data.n_roots
        self._omega = [[self.U.u_pairing(self.data, a, b) for b in range(n)] for a in range(n)]
        self._aUH = [[self.U.alpha_U_H(self.data, a, mu) for mu in range(r)] for a in range(n)]

    # ---- generators --------------------------------------------------------
    def generators(self, n_max: int | None = None, chiralities=(L, R)) -> list[GeneratorId]:
        n_max = self.n_alg if n_max is None else n_max
        self._check_mode(n_max)
        out = []
        for ch in chiralities:
            for m in range(-n_max, n_max + 1):
                out += [JH(ch, mu, m) for mu in range(self.data.rank)]
                out += [JE(ch, a, m) for a in range(self.data.n_roots)]
        return sorted(out)

    def _check_mode(self, m: int) -> None:
        if abs(m) > self.n_alg:
            raise CutoffError(f"mode {m} exceeds the cutoff N_alg={self.n_alg}")

    def omega_U(self, a: int, b: int) -> Coeff:
        return self._omega[a][b]

    def alpha_U_H(self, a: int, mu: int) -> Coeff:
        return self._aUH[a][mu]

    # ---- brackets ----------------------------------------------------------
    def gen_bracket(self, x: GeneratorId, y: GeneratorId) -> CurrentPolynomial:
        key = (x, y)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._gen_bracket(x, y)
            self._cache[key] = hit
        return hit

    def _gen_bracket(self, x: GeneratorId, y: GeneratorId) -> CurrentPolynomial:
        self._check_mode(x.mode)
        self._check_mode(y.mode)
        if x.chirality != y.chirality:
            return CurrentPolynomial._raw({})
        ch, m, n = x.chirality, x.mode, y.mode
        sign = 1 if ch == L else -1
        d = self.data
        t: dict = {}
        if x.kind == CARTAN and y.kind == CARTAN:
            if x.index == y.index and m + n == 0 and n != 0:
                t[((), ())] = self.k_coeff * I * (sign * n)
            return CurrentPolynomial._raw(t)
        if x.kind == CARTAN:
            c = d.coord(y.index, x.index)
            if not c.is_zero():
                self._check_mode(m + n)
                t[((JE(ch, y.index, m + n),), ())] = c
            return CurrentPolynomial._raw(t)
        if y.kind == CARTAN:
            return -self._gen_bracket(y, x)
        a, b = x.index, y.index
        if b == d.neg(a):
            f = 2 / d.norm2(a)
            self._check_mode(m + n)
            for mu in range(d.rank):
                c = d.coord(a, mu)
                if not c.is_zero():
                    t[((JH(ch, mu, m + n),), ())] = c * f
            if m + n == 0 and n != 0:
                t[((), ())] = self.k_coeff * I * (sign * n) * f
            return CurrentPolynomial._raw(t)
        s = d.add(a, b)
        if s is not None:
            self._check_mode(m + n)
            t[((JE(ch, s, m + n),), ())] = Coeff.const(d.structure_constants[(a, b)])
        w = self._omega[a][b]
        if not w.is_zero():
            t[(tuple(sorted((x, y))), ())] = -w
        return CurrentPolynomial._raw(t)

    def bracket(self, P: CurrentPolynomial, Q: CurrentPolynomial) -> CurrentPolynomial:
        """Leibniz-extended bracket of two polynomials."""
        if isinstance(P, GeneratorId):
            P = gen(P)
        if isinstance(Q, GeneratorId):
            Q = gen(Q)
        if (len(P) == 1 and len(Q) == 1):
            (kp, cp), = P._t.items()
            (kq, cq), = Q._t.items()
            if kp[0] and len(kp[0]) == 1 and not kp[1] and len(kq[0]) == 1 and not kq[1]:
                return self.gen_bracket(kp[0][0], kq[0][0]) * (cp * cq)
        dP = {g: P.partial(g) for g in P.generators()}
        dQ = {g: Q.partial(g) for g in Q.generators()}
        t: dict = {}
        out = CurrentPolynomial._raw(t)
        for g1, p1 in dP.items():
            if p1.is_zero():
                continue
            for g2, p2 in dQ.items():
                if p2.is_zero() or g1.chirality != g2.chirality:
                    continue
                gb = self.gen_bracket(g1, g2)
                if gb.is_zero():
                    continue
                out = out + p1 * gb * p2
        return out

    # ---- derived checks ----------------------------------------------------
    def jacobi(self, x, y, z) -> CurrentPolynomial:
        """Cyclic sum ``{{x,y},z} + {{y,z},x} + {{z,x},y}``."""
        x, y, z = (gen(v) if isinstance(v, GeneratorId) else v for v in (x, y, z))
        b = self.bracket
        return b(b(x, y), z) + b(b(y, z), x) + b(b(z, x), y)

    def hamiltonian(self, n_cut: int) -> CurrentPolynomial:
        """``-(1/2k) [(J_L|J_L) + (J_R|J_R)]`` truncated to ``|n| <= n_cut``."""
        if n_cut > self.n_alg:
            raise CutoffError(f"N_cut={n_cut} exceeds N_alg={self.n_alg}")
        d = self.data
        t: dict = {}
        pref = self.inv_k * Fraction(-1, 2)
        for ch in (L, R):
            for n in range(-n_cut, n_cut + 1):
                for mu in range(d.rank):
                    _add_into(t, (tuple(sorted((JH(ch, mu, n), JH(ch, mu, -n)))), ()), pref)
                for a in range(d.n_roots):
                    w = pref * (d.norm2(a) / 2)
                    _add_into(t, (tuple(sorted((JE(ch, a, n), JE(ch, d.neg(a), -n)))), ()), w)
        return CurrentPolynomial._raw(t)


def bracket(session: Session, P, Q) -> CurrentPolynomial:
    return session.bracket(P, Q)


def check_jacobi(session: Session, triple: Sequence) -> CurrentPolynomial:
    return session.jacobi(*triple)


def hamiltonian(session: Session, n_cut: int) -> CurrentPolynomial:
    return session.hamiltonian(n_cut)


def check_antisymmetry(session: Session, gens: Iterable[GeneratorId] | None = None) -> VerificationReport:
    gens = list(session.generators() if gens is None else gens)
    rep = VerificationReport(f"antisymmetry[{session.data.name}]")
    fails = []
    for i, x in enumerate(gens):
        for y in gens[i:]:
            res = session.gen_bracket(x, y) + session.gen_bracket(y, x)
            if not res.is_zero():
                fails.append(f"{gen_name(x, session.data)},{gen_name(y, session.data)}: {res}")
    rep.add_exact("antisymmetry", fails)
    return rep


def jacobi_report(session: Session, triples: Iterable[Sequence], name: str = "jacobi") -> VerificationReport:
    rep = VerificationReport(f"{name}[{session.data.name}]")
    fails = []
    count = 0
    for tr in triples:
        count += 1
        res = session.jacobi(*tr)
        if not res.is_zero():
            fails.append(", ".join(gen_name(g, session.data) for g in tr) + f" -> {res}")
    r = rep.add_exact(name, fails)
    r.details.insert(0, f"{count} triples")
    return rep


def all_triples(gens: Sequence[GeneratorId]) -> Iterable[tuple]:
    """Unordered triples with repetition; mixed-chirality triples included."""
    return itertools.combinations_with_replacement(gens, 3)


# ---------------------------------------------------------------------------
# independent reference for the undeformed algebra


def affine_reference_bracket(data: LieAlgebraData, x: GeneratorId, y: GeneratorId,
                             k_coeff: Coeff = K) -> CurrentPolynomial:
    """Standard current algebra from matrix commutators of the realization.

    ``{J^{X,m}, J^{Y,n}} = J^{[X,Y], m+n} + s k i n (X, Y) delta_{m+n,0}``.
    """
    if x.chirality != y.chirality:
        return CurrentPolynomial._raw({})
    mats = data.matrices
    sign = 1 if x.chirality == L else -1
    lx, ly = x.label(), y.label()
    comm = mats.decompose(mats.commutator(lx, ly))
    t: dict = {}
    for lab, c in comm.items():
        kind = CARTAN if lab[0] == "H" else ROOT
        _add_into(t, ((GeneratorId(x.chirality, kind, lab[1], x.mode + y.mode),), ()), c)
    if x.mode + y.mode == 0:
        f = mats.pairing(mats.exact[lx], mats.exact[ly])
        c = k_coeff * I * f * (sign * y.mode)
        if not c.is_zero():
            _add_into(t, ((), ()), c)
    return CurrentPolynomial._raw(t)


def undeformed_limit_report(data: LieAlgebraData, n_max: int) -> VerificationReport:
    """Symbolic ``U`` set to zero vs. the commutator-built affine table."""
    rank = data.rank
    sym = Session(data, UOperator.symbolic(rank) if rank > 1 else UOperator.zero(rank), n_alg=2 * n_max)
    zero = {j: 0 for j in range(sym.U.n_params)}
    gens = sym.generators(n_max)
    rep = VerificationReport(f"undeformed_limit[{data.name}]")
    fails = []
    for x in gens:
        for y in gens:
            lhs = sym.gen_bracket(x, y).substitute_params(params=zero)
            diff = lhs - affine_reference_bracket(data, x, y)
            if not diff.is_zero():
                fails.append(f"{gen_name(x, data)},{gen_name(y, data)}")
    rep.add_exact("undeformed_table_diff", fails)
    fails = []
    for x in gens:
        for y in gens:
            if x.chirality != y.chirality and not sym.gen_bracket(x, y).is_zero():
                fails.append(f"{gen_name(x, data)},{gen_name(y, data)}")
    rep.add_exact("chirality_decoupling", fails)
    # L and R tables differ only by the sign of k
    fails = []
    for x in gens:
        if x.chirality != L:
            continue
        for y in gens:
            if y.chirality != L:
                continue
            xr, yr = x._replace(chirality=R), y._replace(chirality=R)
            left = sym.gen_bracket(x, y)
            right = sym.gen_bracket(xr, yr)
            mirrored = CurrentPolynomial._raw({
                (tuple(g._replace(chirality=R) for g in mono), exp): c
                for (mono, exp), c in left._t.items()})
            mirrored_k = mirrored.substitute_params(k=Coeff.const(-1) * K) if mirrored else mirrored
            if not (mirrored_k - right).is_zero():
                fails.append(f"{gen_name(x, data)},{gen_name(y, data)}")
    rep.add_exact("left_right_sign_of_k", fails)
    return rep
