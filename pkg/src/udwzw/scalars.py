"""Exact scalars for the symbolic side.

Numbers live in Q(i, sqrt 2, sqrt 3, ...): every element is a finite sum
``q * i**f * sqrt(s)`` with ``q`` rational, ``f`` in {0, 1} and ``s`` a
squarefree positive integer.  Distinct ``(f, s)`` pairs are linearly
independent over Q, so a normalized element is zero iff it has no terms.

:class:`Coeff` extends these numbers to Laurent polynomials in the level
symbol ``k`` and polynomials in the free entries of a symbolic deformation
operator (``u0, u1, ...``).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from numbers import Rational
from typing import Iterable, Mapping

import mpmath

# term key: (k power, ((param, power), ...), imaginary flag, squarefree radicand)
_ONE_KEY = (0, (), 0, 1)


@lru_cache(maxsize=None)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(f, s)`` with ``n == f*f*s`` and ``s`` squarefree (n > 0)."""
    if n <= 0:
        raise ValueError("squarefree_split needs a positive integer")
    f, s, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            f *= p
        if n % p == 0:
            n //= p
            s *= p
        p += 1
    return f, s * n


@lru_cache(maxsize=None)
def _rad_mul(s1: int, s2: int) -> tuple[int, int]:
    g = gcd(s1, s2)
    return g, (s1 // g) * (s2 // g)


def _primes_of(s: int) -> list[int]:
    out, p = [], 2
    while p * p <= s:
        if s % p == 0:
            out.append(p)
            s //= p
        p += 1
    if s > 1:
        out.append(s)
    return out


def _merge_pows(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for i, p in b:
        d[i] = d.get(i, 0) + p
    return tuple(sorted(d.items()))


class Coeff:
    """Immutable sparse polynomial over Q(i, radicals) in ``k`` and ``u_j``."""

    __slots__ = ("_t", "_key")

    def __init__(self, terms: Mapping | None = None):
        t = {}
        if terms:
            for key, q in terms.items():
                if q:
                    t[key] = Fraction(q)
        self._t = t
        self._key = None

    @classmethod
    def _raw(cls, t: dict) -> "Coeff":
        obj = cls.__new__(cls)
        obj._t = t
        obj._key = None
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, q) -> "Coeff":
        if isinstance(q, Coeff):
            return q
        q = Fraction(q)
        return cls._raw({_ONE_KEY: q} if q else {})

    @classmethod
    def sqrt(cls, q) -> "Coeff":
        """Exact square root of a rational (imaginary for negative input)."""
        q = Fraction(q)
        if q == 0:
            return cls._raw({})
        ifl = 1 if q < 0 else 0
        q = abs(q)
        f, s = squarefree_split(q.numerator * q.denominator)
        return cls._raw({(0, (), ifl, s): Fraction(f, q.denominator)})

    @classmethod
    def k_power(cls, n: int = 1) -> "Coeff":
        return cls._raw({(n, (), 0, 1): Fraction(1)})

    @classmethod
    def param(cls, j: int) -> "Coeff":
        return cls._raw({(0, ((j, 1),), 0, 1): Fraction(1)})

    # inspection -------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_scalar(self) -> bool:
        """True when free of ``k`` and of deformation parameters."""
        return all(k[0] == 0 and not k[1] for k in self._t)

    def is_rational(self) -> bool:
        return all(k == _ONE_KEY for k in self._t)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._t.get(_ONE_KEY, Fraction(0))

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self._t.items()))
        return self._key

    def __hash__(self) -> int:
        return hash(self.key())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Coeff):
            if isinstance(other, (int, Rational)):
                other = Coeff.const(other)
            else:
                return NotImplemented
        return self._t == other._t

    # arithmetic -------------------------------------------------------
    def __add__(self, other) -> "Coeff":
        other = _coerce(other)
        if not other._t:
            return self
        if not self._t:
            return other
        t = dict(self._t)
        for key, q in other._t.items():
            v = t.get(key)
            if v is None:
                t[key] = q
            else:
                v += q
                if v:
                    t[key] = v
                else:
                    del t[key]
        return Coeff._raw(t)

    __radd__ = __add__

    def __neg__(self) -> "Coeff":
        return Coeff._raw({key: -q for key, q in self._t.items()})

    def __sub__(self, other) -> "Coeff":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Coeff":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Coeff":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Coeff._raw({})
            return Coeff._raw({key: q * other for key, q in self._t.items()})
        other = _coerce(other)
        t: dict = {}
        for (k1, p1, f1, s1), q1 in self._t.items():
            for (k2, p2, f2, s2), q2 in other._t.items():
                q = q1 * q2
                g, s = _rad_mul(s1, s2) if (s1 != 1 and s2 != 1) else (1, s1 * s2)
                if g != 1:
                    q *= g
                f = f1 + f2
                if f == 2:
                    q = -q
                    f = 0
                key = (k1 + k2, _merge_pows(p1, p2), f, s)
                v = t.get(key)
                if v is None:
                    t[key] = q
                else:
                    v += q
                    if v:
                        t[key] = v
                    else:
                        del t[key]
        return Coeff._raw(t)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Coeff":
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        other = _coerce(other)
        if other.is_rational():
            return self * (1 / other.as_fraction())
        return self * other.inverse()

    def __pow__(self, n: int) -> "Coeff":
        if n < 0:
            return self.inverse() ** (-n)
        out = Coeff.const(1)
        for _ in range(n):
            out = out * self
        return out

    def conjugate_radical(self, p: int) -> "Coeff":
        """Galois conjugate flipping sqrt(p); ``p == -1`` flips ``i``."""
        t = {}
        for key, q in self._t.items():
            flip = key[2] == 1 if p == -1 else key[3] % p == 0
            t[key] = -q if flip else q
        return Coeff._raw(t)

    def conjugate(self) -> "Coeff":
        """Complex conjugate, treating ``k`` and ``u_j`` as real."""
        return self.conjugate_radical(-1)

    def inverse(self) -> "Coeff":
        if not self._t:
            raise ZeroDivisionError("inverse of zero")
        if not self.is_scalar():
            raise ValueError("only symbol-free elements can be inverted")
        if len(self._t) == 1:
            (key, q), = self._t.items()
            _, _, f, s = key
            # 1/(q i^f sqrt s) = (-i)^f sqrt s / (q s)
            return Coeff._raw({key: Fraction(-1 if f else 1) / (q * s)})
        primes = set()
        has_i = False
        for _, _, f, s in self._t:
            primes.update(_primes_of(s))
            has_i = has_i or f == 1
        num, den = Coeff.const(1), self
        for p in sorted(primes) + ([-1] if has_i else []):
            c = den.conjugate_radical(p)
            num, den = num * c, den * c
        return num * (1 / den.as_fraction())

    # evaluation -------------------------------------------------------
    def evaluate(self, k=None, params: Iterable | None = None) -> complex:
        """Float value; ``k`` and ``params`` substitute the symbols."""
        params = list(params) if params is not None else []
        total = 0j
        for (kp, pw, f, s), q in self._t.items():
            v = float(q) * (s ** 0.5 if s != 1 else 1.0)
            if f:
                v = v * 1j
            if kp:
                if k is None:
                    raise ValueError("level k needed for evaluation")
                v = v * float(k) ** kp
            for j, p in pw:
                v = v * complex(params[j]) ** p
            total += v
        return complex(total)

    def evaluate_mp(self, prec: int = 128, k=None, params: Iterable | None = None):
        """High-precision value as an ``mpmath.mpc``."""
        params = list(params) if params is not None else []
        with mpmath.workprec(prec):
            total = mpmath.mpc(0)
            for (kp, pw, f, s), q in self._t.items():
                v = mpmath.mpf(q.numerator) / q.denominator * mpmath.sqrt(s)
                if f:
                    v = v * 1j
                if kp:
                    v = v * mpmath.mpf(k) ** kp
                for j, p in pw:
                    v = v * mpmath.mpmathify(params[j]) ** p
                total += v
            return +total

    def substitute(self, k=None, params: Mapping | None = None) -> "Coeff":
        """Exact substitution of rational/exact values for symbols."""
        out = Coeff.const(0)
        params = params or {}
        for (kp, pw, f, s), q in self._t.items():
            term = Coeff._raw({(0, (), f, s): q})
            rest = []
            if kp:
                if k is None:
                    rest.append((-1, kp))
                else:
                    term = term * _coerce(k) ** kp
            for j, p in pw:
                if j in params:
                    term = term * _coerce(params[j]) ** p
                else:
                    rest.append((j, p))
            if rest:
                kk = sum(p for j, p in rest if j == -1)
                pp = tuple((j, p) for j, p in rest if j != -1)
                term = term * Coeff._raw({(kk, pp, 0, 1): Fraction(1)})
            out = out + term
        return out

    # text -------------------------------------------------------------
    def __str__(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for (kp, pw, f, s), q in sorted(self._t.items()):
            factors = []
            if q != 1 or (s == 1 and not f and not kp and not pw):
                factors.append(str(q) if q.denominator == 1 else f"({q})")
            if f:
                factors.append("i")
            if s != 1:
                factors.append(f"sqrt({s})")
            if kp:
                factors.append("k" if kp == 1 else f"k^{kp}")
            for j, p in pw:
                factors.append(f"u{j}" if p == 1 else f"u{j}^{p}")
            parts.append("*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Coeff({self})"


def _coerce(x) -> Coeff:
    if isinstance(x, Coeff):
        return x
    if isinstance(x, (int, Rational)):
        return Coeff.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


ZERO = Coeff.const(0)
ONE = Coeff.const(1)
I = Coeff._raw({(0, (), 1, 1): Fraction(1)})
K = Coeff.k_power(1)


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, an int, or a decimal string into a Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted; write rationals as 'p/q'")
    return Fraction(str(text).strip())


def is_perfect_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n
