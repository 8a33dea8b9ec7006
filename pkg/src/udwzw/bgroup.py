"""The cosymmetry group B: loop-algebra elements with a twisted product.

``chi . chit = chi + e^{u(chi)} chit e^{-u(chi)}`` and
``chi^{-1} = -e^{-u(chi)} chi e^{u(chi)}`` where ``u(chi) = U(P chi)``
depends only on the Cartan zero modes of ``chi``.

Elements are stored by their pairing components
``chi^{a,n} = (chi | T^a e^{i n sigma})`` -- the same components the
current modes ``J^{a,n}`` use.  Since pairing with ``E^a`` extracts the
``E^-a`` part of the loop, torus conjugation acts on stored components as::

    (e^{u} chit e^{-u})^{a,n} = e^{-<a, u>} chit^{a,n}

With this convention ``(J_L . J_R | E^{g,n})`` reproduces the constraint
``J_L^{g,n} + exp(-<g, U(H^nu)> J_L^{nu,0}) J_R^{g,n}`` literally.

Exponentials are formal: root components are :class:`ExpSum` values, sums
of ``c * e^{x}`` with exact ``c`` and ``x``, so the group axioms are exact
identities.  Reality of ``chi`` (anti-Hermitean loops) reads
``conj(chi^{a,n}) = -chi^{-a,-n}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import mpmath
import numpy as np
from scipy.linalg import expm

from .errors import DomainError
from .liealg import LieAlgebraData, UOperator
from .loops import synthesize
from .numlab.lattice import u_of
from .report import VerificationReport
from .scalars import I as _I, ZERO, Coeff


class ExpSum:
    """Finite sum ``sum_j c_j exp(x_j)`` with exact coefficients and exponents."""

    __slots__ = ("_c", "_x")

    def __init__(self, terms: Mapping | None = None):
        self._c: dict = {}
        self._x: dict = {}
        for x, c in (terms or {}).items():
            self._acc(x, c)

    def _acc(self, x: Coeff, c: Coeff) -> None:
        if c.is_zero():
            return
        key = x.key()
        v = self._c.get(key)
        if v is None:
            self._c[key] = c
            self._x[key] = x
        else:
            v = v + c
            if v.is_zero():
                del self._c[key]
                del self._x[key]
            else:
                self._c[key] = v

    @classmethod
    def scalar(cls, c) -> "ExpSum":
        c = c if isinstance(c, Coeff) else Coeff.const(c)
        return cls({ZERO: c})

    def items(self):
        for key, c in self._c.items():
            yield self._x[key], c

    def is_zero(self) -> bool:
        return not self._c

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpSum):
            return NotImplemented
        return self._c == other._c

    __hash__ = None

    def __add__(self, other: "ExpSum") -> "ExpSum":
        out = ExpSum()
        for x, c in self.items():
            out._acc(x, c)
        for x, c in other.items():
            out._acc(x, c)
        return out

    def __neg__(self) -> "ExpSum":
        return ExpSum({x: -c for x, c in self.items()})

    def __sub__(self, other: "ExpSum") -> "ExpSum":
        return self + (-other)

    def times_exp(self, y: Coeff, c: Coeff | int = 1) -> "ExpSum":
        """``c * e^{y} * self``."""
        c = c if isinstance(c, Coeff) else Coeff.const(c)
        out = ExpSum()
        for x, a in self.items():
            out._acc(x + y, a * c)
        return out

    def conjugate(self) -> "ExpSum":
        return ExpSum({x.conjugate(): c.conjugate() for x, c in self.items()})

    def evaluate(self, prec: int = 128, params=None):
        with mpmath.workprec(prec):
            total = mpmath.mpc(0)
            for x, c in self.items():
                total += c.evaluate_mp(prec, params=params) * mpmath.exp(x.evaluate_mp(prec, params=params))
            return +total

    def __repr__(self) -> str:
        if not self._c:
            return "0"
        return " + ".join(f"({c})*e^({x})" if not x.is_zero() else f"({c})"
                          for x, c in sorted(self.items(), key=lambda it: it[0].key()))


@dataclass(frozen=True, eq=False)
class BElement:
    data: LieAlgebraData
    N: int
    cartan_modes: dict    # (mu, n) -> Coeff
    root_modes: dict      # (root index, n) -> ExpSum

    def __post_init__(self):
        for (mu, n) in self.cartan_modes:
            if abs(n) > self.N or not 0 <= mu < self.data.rank:
                raise DomainError(f"Cartan mode ({mu},{n}) outside truncation N={self.N}")
        for (a, n) in self.root_modes:
            if abs(n) > self.N or not 0 <= a < self.data.n_roots:
                raise DomainError(f"root mode ({a},{n}) outside truncation N={self.N}")

    @classmethod
    def zero(cls, data: LieAlgebraData, N: int) -> "BElement":
        return cls(data, N, {}, {})

    def cartan(self, mu: int, n: int) -> Coeff:
        return self.cartan_modes.get((mu, n), ZERO)

    def root(self, a: int, n: int) -> ExpSum:
        return self.root_modes.get((a, n), ExpSum())

    def zero_mode_cartan(self) -> list[Coeff]:
        return [self.cartan(mu, 0) for mu in range(self.data.rank)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BElement):
            return NotImplemented
        return (self.data is other.data and self.N == other.N
                and _clean(self.cartan_modes) == _clean(other.cartan_modes)
                and {k: v._c for k, v in self.root_modes.items() if not v.is_zero()}
                == {k: v._c for k, v in other.root_modes.items() if not v.is_zero()})

    __hash__ = None

    def is_real(self) -> bool:
        d = self.data
        for mu in range(d.rank):
            for n in range(-self.N, self.N + 1):
                if self.cartan(mu, n).conjugate() != -self.cartan(mu, -n):
                    return False
        for a in range(d.n_roots):
            for n in range(-self.N, self.N + 1):
                if self.root(a, n).conjugate() != -self.root(d.neg(a), -n):
                    return False
        return True

    def numeric_components(self, prec: int = 128, params=None) -> dict:
        """``{(label, n): complex}`` evaluated at ``prec`` bits."""
        out = {}
        for (mu, n), v in self.cartan_modes.items():
            out[(("H", mu), n)] = complex(v.evaluate_mp(prec, params=params))
        for (a, n), v in self.root_modes.items():
            out[(("E", a), n)] = complex(v.evaluate(prec, params=params))
        return out

    def to_lattice(self, M: int, prec: int = 128) -> np.ndarray:
        return synthesize(self.data, self.numeric_components(prec), M)

    def to_json(self, prec: int = 128) -> str:
        rows = []
        d = self.data
        for (mu, n), v in sorted(self.cartan_modes.items()):
            if not v.is_zero():
                z = complex(v.evaluate_mp(prec))
                rows.append({"label": f"H{mu + 1}", "mode": n, "exact": str(v),
                             "value": [z.real, z.imag]})
        for (a, n), v in sorted(self.root_modes.items()):
            if not v.is_zero():
                z = complex(v.evaluate(prec))
                rows.append({"label": "(" + ",".join(map(str, d.root(a))) + ")", "mode": n,
                             "exact": repr(v), "value": [z.real, z.imag]})
        return json.dumps({"algebra": d.name, "N": self.N, "modes": rows}, indent=1)


def _clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if not v.is_zero()}


def _check_compatible(x: BElement, y: BElement) -> None:
    if x.data is not y.data:
        if x.data.name != y.data.name:
            raise DomainError(f"algebra mismatch: {x.data.name} vs {y.data.name}")
    if x.N != y.N:
        raise DomainError(f"truncation mismatch: N={x.N} vs N={y.N}")


def torus_exponent(U: UOperator, data: LieAlgebraData, chi: BElement, a: int) -> Coeff:
    """``<a, u(chi)> = sum_nu chi^{nu,0} <a, U(H^nu)>``."""
    return sum((chi.cartan(nu, 0) * U.alpha_U_H(data, a, nu) for nu in range(data.rank)), ZERO)


def b_mul(chi: BElement, chit: BElement, U: UOperator) -> BElement:
    _check_compatible(chi, chit)
    d = chi.data
    cart = dict(chi.cartan_modes)
    for key, v in chit.cartan_modes.items():
        cart[key] = cart.get(key, ZERO) + v
    roots = {}
    shifts = [torus_exponent(U, d, chi, a) for a in range(d.n_roots)]
    for (a, n) in set(chi.root_modes) | set(chit.root_modes):
        roots[(a, n)] = chi.root(a, n) + chit.root(a, n).times_exp(-shifts[a])
    return BElement(d, chi.N, _clean(cart), {k: v for k, v in roots.items() if not v.is_zero()})


def b_inv(chi: BElement, U: UOperator) -> BElement:
    d = chi.data
    cart = {k: -v for k, v in chi.cartan_modes.items()}
    roots = {}
    for (a, n), v in chi.root_modes.items():
        roots[(a, n)] = v.times_exp(torus_exponent(U, d, chi, a), -1)
    return BElement(d, chi.N, cart, roots)


def b_from_currents(J_L: BElement, J_R: BElement, U: UOperator) -> BElement:
    """B-product of the two currents; gauged components give the constraints."""
    return b_mul(J_L, J_R, U)


def random_element(data: LieAlgebraData, N: int, rng: np.random.Generator,
                   real: bool = True, density: float = 1.0) -> BElement:
    """Random element with small Gaussian-rational components."""
    def q():
        return Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4)))

    def z():
        return Coeff.const(q()) + Coeff.const(q()) * _I

    cart, roots = {}, {}
    for mu in range(data.rank):
        for n in range(0, N + 1):
            if rng.random() > density:
                continue
            if real:
                if n == 0:
                    cart[(mu, 0)] = _I * q()
                else:
                    v = z()
                    cart[(mu, n)] = v
                    cart[(mu, -n)] = -v.conjugate()
            else:
                cart[(mu, n)] = z()
                if n:
                    cart[(mu, -n)] = z()
    for a in range(data.n_pos):
        for n in range(-N, N + 1):
            if rng.random() > density:
                continue
            v = z()
            roots[(a, n)] = ExpSum.scalar(v)
            roots[(data.neg(a), -n)] = ExpSum.scalar(-v.conjugate() if real else z())
    return BElement(data, N, _clean(cart), roots)



def check_group_axioms(data: LieAlgebraData, U: UOperator, N: int, samples: int,
                       seed: int = 0) -> VerificationReport:
    """Exact associativity, identity, and inverse laws on random elements."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport(f"bgroup[{data.name}]")
    e = BElement.zero(data, N)
    assoc, ident, inv, real = [], [], [], []
    for s in range(samples):
        a, b, c = (random_element(data, N, rng) for _ in range(3))
        if b_mul(b_mul(a, b, U), c, U) != b_mul(a, b_mul(b, c, U), U):
            assoc.append(f"sample {s}")
        if b_mul(e, a, U) != a or b_mul(a, e, U) != a:
            ident.append(f"sample {s}")
        ai = b_inv(a, U)
        if b_mul(a, ai, U) != e or b_mul(ai, a, U) != e:
            inv.append(f"sample {s}")
        if not b_mul(a, b, U).is_real() or not ai.is_real():
            real.append(f"sample {s}")
    rep.add_exact("associativity", assoc)
    rep.add_exact("identity", ident)
    rep.add_exact("inverse", inv)
    rep.add_exact("reality_preserved", real)
    return rep


def check_lattice_product(data: LieAlgebraData, U: UOperator, N: int, samples: int,
                          seed: int = 0, M: int = 32, prec: int = 128,
                          tol: float = 1e-12) -> VerificationReport:
    """Exact product against ``chi + e^{u} chit e^{-u}`` on sampled matrix loops."""
    rng = np.random.default_rng(seed)
    Unum = U.numeric()
    rep = VerificationReport(f"bgroup_lattice[{data.name}]")
    worst = 0.0
    for _ in range(samples):
        a, b = random_element(data, N, rng), random_element(data, N, rng)
        A, B = a.to_lattice(M, prec), b.to_lattice(M, prec)
        u = u_of(data, Unum, A)
        ref = A + expm(u) @ B @ expm(-u)
        got = b_mul(a, b, U).to_lattice(M, prec)
        worst = max(worst, float(np.max(np.abs(got - ref))) / max(1.0, float(np.max(np.abs(ref)))))
    rep.add("lattice_product", worst, tol, [f"{samples} samples at M={M}, {prec} bits"])
    return rep
