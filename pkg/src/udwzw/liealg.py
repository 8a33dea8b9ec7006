"""Cartan-Weyl data for simple compact Lie algebras.

Conventions (used throughout the package):

* ``H^mu`` orthonormal Cartan generators, ``(H^mu, H^nu) = delta``;
* ``[H^mu, E^a] = <a, H^mu> E^a``, ``[E^a, E^-a] = a_vee``,
  ``[E^a, E^b] = c^{ab} E^{a+b}``;
* ``(E^a, E^-a) = 2/|a|^2`` with long roots of length squared 2;
* ``(E^a)^dagger = E^-a``.

Structure constants come from the Chevalley construction with all
extraspecial signs set to ``+1``.  The defining matrix realization is built
afterwards and its commutators serve as an independent check of the table.

Roots are stored as integer tuples in the simple-root basis.  Positive
roots are indexed ``0..P-1`` ordered by height and then by decreasing
simple-root coordinates (so ``a1`` precedes ``a2``); the negative of root
``i`` has index ``i + P``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DomainError, UnsupportedAlgebraError
from .report import VerificationReport
from .scalars import ONE, ZERO, Coeff

SUPPORTED_SERIES = ("A",)


def cartan_matrix(series: str, rank: int) -> list[list[int]]:
    if series not in SUPPORTED_SERIES:
        raise UnsupportedAlgebraError(f"series {series!r} is not supported "
                                      f"(supported: {', '.join(SUPPORTED_SERIES)})")
    if not isinstance(rank, int) or rank < 1:
        raise UnsupportedAlgebraError(f"rank must be a positive integer, got {rank!r}")
    a = [[0] * rank for _ in range(rank)]
    for i in range(rank):
        a[i][i] = 2
        if i + 1 < rank:
            a[i][i + 1] = a[i + 1][i] = -1
    return a


def _symmetrizer(a: list[list[int]]) -> list[Fraction]:
    """Squared lengths of simple roots, normalized so the longest is 2."""
    n = len(a)
    d: list[Fraction | None] = [None] * n
    d[0] = Fraction(1)
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j != i and a[i][j] != 0 and d[j] is None:
                # d_i a_ij = d_j a_ji
                d[j] = d[i] * a[i][j] / a[j][i]
                stack.append(j)
    scale = 2 / max(d)
    return [x * scale for x in d]


def _positive_roots(a: list[list[int]]) -> list[tuple[int, ...]]:
    n = len(a)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(n):
                # a_i-string through beta: q = p - <beta, a_i^vee>
                p = 0
                probe = list(beta)
                while True:
                    probe[i] -= 1
                    if tuple(probe) in roots:
                        p += 1
                    else:
                        break
                pairing = sum(beta[j] * a[j][i] for j in range(n))
                if p - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in roots:
                        roots.add(up)
                        nxt.append(up)
        layer = nxt
    return sorted(roots, key=lambda r: (sum(r), tuple(-c for c in r)))


def _a_series_cartan_diagonals(rank: int) -> list[list[Coeff]]:
    """Diagonal entries of the orthonormal ``H^mu`` in the defining rep of sl(rank+1).

    ``H^mu = diag(1, ..., 1, -mu, 0, ..., 0) / sqrt(mu (mu + 1))`` with ``mu`` ones.
    """
    out = []
    for mu in range(1, rank + 1):
        norm = Coeff.sqrt(Fraction(1, mu * (mu + 1)))
        diag = []
        for i in range(rank + 1):
            if i < mu:
                diag.append(norm)
            elif i == mu:
                diag.append(norm * (-mu))
            else:
                diag.append(ZERO)
        out.append(diag)
    return out


@dataclass(frozen=True, eq=False)
class LieAlgebraData:
    series: str
    rank: int
    cartan_matrix: tuple
    positive_roots: tuple
    simple_norms: tuple
    root_coords: tuple          # per root index: tuple of Coeff <a, H^mu>
    structure_constants: dict   # (i, j) -> Fraction, only where a_i + a_j is a root
    _index: dict = field(repr=False, compare=False)

    # ---- root bookkeeping --------------------------------------------------
    @property
    def n_pos(self) -> int:
        return len(self.positive_roots)

    @property
    def n_roots(self) -> int:
        return 2 * self.n_pos

    @property
    def dim(self) -> int:
        return self.rank + self.n_roots

    def root(self, i: int) -> tuple[int, ...]:
        if i < self.n_pos:
            return self.positive_roots[i]
        return tuple(-c for c in self.positive_roots[i - self.n_pos])

    def roots(self) -> list[tuple[int, ...]]:
        return [self.root(i) for i in range(self.n_roots)]

    def index(self, root: Sequence[int]) -> int:
        try:
            return self._index[tuple(root)]
        except KeyError:
            raise DomainError(f"{tuple(root)} is not a root of {self.name}") from None

    def find(self, root: Sequence[int]) -> int | None:
        return self._index.get(tuple(root))

    def neg(self, i: int) -> int:
        return i + self.n_pos if i < self.n_pos else i - self.n_pos

    def is_positive(self, i: int) -> bool:
        return i < self.n_pos

    def add(self, i: int, j: int) -> int | None:
        """Index of ``a_i + a_j`` if it is a root, else None."""
        ri, rj = self.root(i), self.root(j)
        return self._index.get(tuple(x + y for x, y in zip(ri, rj)))

    @property
    def name(self) -> str:
        return f"{self.series}{self.rank}"

    # ---- metric data -----------------------------------------------------
    def inner(self, r1: Sequence[int], r2: Sequence[int]) -> Fraction:
        """Root pairing from the Cartan matrix (simple-root coordinates)."""
        a, d = self.cartan_matrix, self.simple_norms
        total = Fraction(0)
        for i, x in enumerate(r1):
            if not x:
                continue
            for j, y in enumerate(r2):
                if y:
                    total += x * y * d[i] * a[i][j] / 2
        return total

    def norm2(self, i: int) -> Fraction:
        r = self.root(i)
        return self.inner(r, r)

    def c(self, i: int, j: int) -> Fraction:
        """``c^{ab}``; raises if ``a + b`` is not a root."""
        try:
            return self.structure_constants[(i, j)]
        except KeyError:
            raise DomainError(f"c undefined: {self.root(i)} + {self.root(j)} "
                              "is not a root") from None

    def coord(self, i: int, mu: int) -> Coeff:
        return self.root_coords[i][mu]

    # ---- basis of the complexified algebra ---------------------------------
    @cached_property
    def basis(self) -> tuple:
        """Labels ``('H', mu)`` then ``('E', root index)`` for all roots."""
        return tuple([("H", mu) for mu in range(self.rank)]
                     + [("E", i) for i in range(self.n_roots)])

    def dual_label(self, label: tuple) -> tuple:
        kind, i = label
        return label if kind == "H" else ("E", self.neg(i))

    def form(self, x: tuple, y: tuple) -> Fraction:
        """Normalized invariant form on basis labels."""
        if x[0] == "H" and y[0] == "H":
            return Fraction(int(x[1] == y[1]))
        if x[0] == "E" and y[0] == "E" and y[1] == self.neg(x[1]):
            return 2 / self.norm2(x[1])
        return Fraction(0)

    def bracket_basis(self, x: tuple, y: tuple) -> dict[tuple, Coeff]:
        """``[x, y]`` for basis labels, from the abstract table."""
        if x[0] == "H" and y[0] == "H":
            return {}
        if x[0] == "H":
            return {y: self.coord(y[1], x[1])}
        if y[0] == "H":
            return {x: -self.coord(x[1], y[1])}
        i, j = x[1], y[1]
        if j == self.neg(i):
            return {k: v for k, v in self.coroot_basis(i).items() if v}
        s = self.add(i, j)
        if s is None:
            return {}
        return {("E", s): Coeff.const(self.structure_constants[(i, j)])}

    def coroot_basis(self, i: int) -> dict[tuple, Coeff]:
        vec = coroot(self, i)
        return {("H", mu): vec[mu] for mu in range(self.rank)}

    @cached_property
    def matrices(self) -> "MatrixRealization":
        return MatrixRealization.build(self)


def _carter_constants(data_roots: list[tuple], pos: list[tuple],
                      inner) -> dict[tuple, Fraction]:
    """Structure constants N_{a,b} on root tuples, extraspecial signs +1."""
    pos_set = set(pos)
    all_set = pos_set | {tuple(-c for c in r) for r in pos}
    order = {r: n for n, r in enumerate(pos)}
    memo: dict = {}

    def is_root(r):
        return r in all_set

    def plus(a, b):
        return tuple(x + y for x, y in zip(a, b))

    def minus(a):
        return tuple(-x for x in a)

    def n2(r):
        return inner(r, r)

    def extraspecial(g):
        for xi in pos:
            z = tuple(x - y for x, y in zip(g, xi))
            if z in pos_set:
                return xi, z
        raise AssertionError("simple roots have no extraspecial pair")

    def p_string(xi, zeta):
        p = 0
        probe = zeta
        while True:
            probe = tuple(x - y for x, y in zip(probe, xi))
            if is_root(probe):
                p += 1
            else:
                return p

    def N(a, b):
        key = (a, b)
        if key in memo:
            return memo[key]
        s = plus(a, b)
        if not is_root(s):
            val = Fraction(0)
        else:
            pa, pb = a in pos_set, b in pos_set
            if pa and pb:
                if order[a] > order[b]:
                    val = -N(b, a)
                else:
                    xi, zeta = extraspecial(s)
                    if (a, b) == (xi, zeta):
                        val = Fraction(p_string(xi, zeta) + 1)
                    else:
                        t2 = Fraction(0)
                        bx = plus(b, minus(xi))
                        if is_root(bx):
                            t2 = N(b, minus(xi)) * N(a, minus(zeta)) / n2(bx)
                        t3 = Fraction(0)
                        ax = plus(a, minus(xi))
                        if is_root(ax):
                            t3 = N(minus(xi), a) * N(b, minus(zeta)) / n2(ax)
                        val = n2(s) / N(xi, zeta) * (t2 + t3)
            elif not pa and not pb:
                val = -N(minus(a), minus(b))
            elif not pa:
                val = -N(b, a)
            else:
                c = minus(s)
                if c in pos_set:
                    val = n2(c) * N(c, a) / n2(b)
                else:
                    val = n2(c) * N(b, c) / n2(a)
        memo[key] = val
        return val

    out = {}
    for a in data_roots:
        for b in data_roots:
            if is_root(plus(a, b)):
                out[(a, b)] = N(a, b)
    return out


def build_algebra(series: str, rank: int) -> LieAlgebraData:
    a = cartan_matrix(series, rank)
    d = _symmetrizer(a)
    pos = _positive_roots(a)
    all_roots = pos + [tuple(-c for c in r) for r in pos]
    index = {r: i for i, r in enumerate(all_roots)}

    def inner(r1, r2):
        return sum((Fraction(x * y) * d[i] * a[i][j] / 2
                    for i, x in enumerate(r1) if x for j, y in enumerate(r2) if y),
                   Fraction(0))

    n_const = _carter_constants(all_roots, pos, inner)
    consts = {(index[r1], index[r2]): v for (r1, r2), v in n_const.items()}

    # orthonormal Cartan coordinates; A-series: a = e_i - e_j
    diags = _a_series_cartan_diagonals(rank)
    coords = []
    for r in all_roots:
        sign = 1 if r in pos else -1
        rr = r if sign == 1 else tuple(-c for c in r)
        i = rr.index(1)
        j = i + sum(rr)
        coords.append(tuple((diags[mu][i] - diags[mu][j]) * sign for mu in range(rank)))

    return LieAlgebraData(series, rank, tuple(tuple(row) for row in a), tuple(pos),
                          tuple(d), tuple(coords), consts, index)


def coroot(data: LieAlgebraData, i: int) -> list[Coeff]:
    """Coefficients of ``a_vee = (2/|a|^2) <a, H^mu> H^mu``."""
    if not isinstance(i, int) or not 0 <= i < data.n_roots:
        raise DomainError(f"root index {i!r} out of range for {data.name}")
    f = 2 / data.norm2(i)
    return [data.coord(i, mu) * f for mu in range(data.rank)]


def root_of(data: LieAlgebraData, root) -> int:
    """Accept either a root index or a simple-root coordinate tuple."""
    if isinstance(root, int):
        if not 0 <= root < data.n_roots:
            raise DomainError(f"root index {root} out of range for {data.name}")
        return root
    return data.index(root)


# ---------------------------------------------------------------------------
# skew deformation operator


class UOperator:
    """Skew operator on the Cartan subalgebra, ``U(H^nu) = sum_mu U[mu][nu] H^mu``.

    Entries are :class:`Coeff`; :meth:`symbolic` keeps the independent
    entries ``U[mu][nu]`` (``mu < nu``) as free parameters ``u0, u1, ...``.
    """

    def __init__(self, matrix: Sequence[Sequence], *, check: bool = True):
        m = [[x if isinstance(x, Coeff) else Coeff.const(x) for x in row] for row in matrix]
        r = len(m)
        if any(len(row) != r for row in m):
            raise DomainError("U must be square")
        if check:
            bad = [(i, j) for i in range(r) for j in range(r) if not (m[i][j] + m[j][i]).is_zero()]
            if bad:
                raise DomainError("U is not skew-symmetric at entries "
                                  + ", ".join(f"({i},{j})" for i, j in bad))
        self.matrix = tuple(tuple(row) for row in m)
        self.rank = r

    @classmethod
    def zero(cls, rank: int) -> "UOperator":
        return cls([[0] * rank for _ in range(rank)])

    @classmethod
    def symbolic(cls, rank: int) -> "UOperator":
        m = [[ZERO] * rank for _ in range(rank)]
        j = 0
        for a in range(rank):
            for b in range(a + 1, rank):
                m[a][b] = Coeff.param(j)
                m[b][a] = -Coeff.param(j)
                j += 1
        return cls(m)

    @classmethod
    def rotation(cls, rank: int, theta, plane: tuple[int, int] = (0, 1)) -> "UOperator":
        """``theta`` times the 90-degree rotation in the ``(H^a, H^b)`` plane."""
        a, b = plane
        m = [[Fraction(0)] * rank for _ in range(rank)]
        t = Fraction(theta) if not isinstance(theta, Coeff) else theta
        m[a][b] = -t
        m[b][a] = t
        return cls(m)

    @property
    def n_params(self) -> int:
        return self.rank * (self.rank - 1) // 2

    @property
    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.matrix for x in row)

    @property
    def is_symbolic(self) -> bool:
        return not all(x.is_scalar() for row in self.matrix for x in row)

    def substitute(self, values: Sequence) -> "UOperator":
        params = {j: v for j, v in enumerate(values)}
        return UOperator([[x.substitute(params=params) for x in row] for row in self.matrix])

    def apply(self, vec: Sequence[Coeff]) -> list[Coeff]:
        return [sum((self.matrix[mu][nu] * vec[nu] for nu in range(self.rank)), ZERO)
                for mu in range(self.rank)]

    def alpha_U_H(self, data: LieAlgebraData, i: int, mu: int) -> Coeff:
        """``<a_i, U(H^mu)> = sum_nu U[nu][mu] <a_i, H^nu>``."""
        return sum((self.matrix[nu][mu] * data.coord(i, nu) for nu in range(self.rank)), ZERO)

    def u_pairing(self, data: LieAlgebraData, i: int, j: int) -> Coeff:
        """``omega_U(a_i, a_j) = sum_mu <a_i, U(H^mu)> <a_j, H^mu>``."""
        return sum((self.alpha_U_H(data, i, mu) * data.coord(j, mu)
                    for mu in range(self.rank)), ZERO)

    def numeric(self, params: Sequence | None = None) -> np.ndarray:
        return np.array([[x.evaluate(params=params).real for x in row]
                         for row in self.matrix])

    def __repr__(self) -> str:
        rows = "; ".join(", ".join(str(x) for x in row) for row in self.matrix)
        return f"UOperator([{rows}])"


# ---------------------------------------------------------------------------
# matrix realization


def _mat_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i, j), x in a.items():
        for (j2, l), y in b.items():
            if j == j2:
                v = out.get((i, l), ZERO) + x * y
                if v.is_zero():
                    out.pop((i, l), None)
                else:
                    out[(i, l)] = v
    return out


def _mat_comm(a: dict, b: dict) -> dict:
    ab, ba = _mat_mul(a, b), _mat_mul(b, a)
    out = dict(ab)
    for key, v in ba.items():
        w = out.get(key, ZERO) - v
        if w.is_zero():
            out.pop(key, None)
        else:
            out[key] = w
    return out


def _mat_trace_prod(a: dict, b: dict) -> Coeff:
    total = ZERO
    for (i, j), x in a.items():
        y = b.get((j, i))
        if y is not None:
            total = total + x * y
    return total


@dataclass
class MatrixRealization:
    """Defining representation with exact sparse entries.

    ``trace_scale`` converts the matrix trace form to the normalized form:
    ``(X, Y) = trace_scale * tr(X Y)``.
    """
    data: LieAlgebraData
    exact: dict          # label -> {(row, col): Coeff}
    signs: dict          # positive root index -> +-1
    trace_scale: Fraction

    @classmethod
    def build(cls, data: LieAlgebraData) -> "MatrixRealization":
        if data.series != "A":
            raise UnsupportedAlgebraError("matrix realization is implemented for the A series")
        n = data.rank + 1
        diags = _a_series_cartan_diagonals(data.rank)
        exact: dict = {}
        for mu in range(data.rank):
            exact[("H", mu)] = {(i, i): diags[mu][i] for i in range(n) if not diags[mu][i].is_zero()}

        def ends(r):
            i = r.index(1)
            return i, i + sum(r)

        signs: dict[int, int] = {}
        for idx, r in enumerate(data.positive_roots):
            if sum(r) == 1:
                signs[idx] = 1
                continue
            for xi_idx in range(data.n_pos):
                z = data.find(tuple(x - y for x, y in zip(r, data.positive_roots[xi_idx])))
                if z is not None and z < data.n_pos:
                    break
            xi, zeta = data.positive_roots[xi_idx], data.positive_roots[z]
            (a1, b1), (a2, b2) = ends(xi), ends(zeta)
            # [E_{a1 b1}, E_{a2 b2}] = +E_{a1 b2} if b1 == a2, -E_{a2 b1} if b2 == a1
            eps = 1 if b1 == a2 else -1
            n_xz = data.structure_constants[(xi_idx, z)]
            signs[idx] = int(signs[xi_idx] * signs[z] * eps / n_xz)
        for idx, r in enumerate(data.positive_roots):
            i, j = ends(r)
            exact[("E", idx)] = {(i, j): Coeff.const(signs[idx])}
            exact[("E", data.neg(idx))] = {(j, i): Coeff.const(signs[idx])}
        return cls(data, exact, signs, Fraction(1))

    def pairing(self, x: dict, y: dict) -> Coeff:
        return _mat_trace_prod(x, y) * self.trace_scale

    def commutator(self, x: tuple, y: tuple) -> dict:
        return _mat_comm(self.exact[x], self.exact[y])

    def decompose(self, m: dict) -> dict[tuple, Coeff]:
        """Expand a matrix in the Cartan-Weyl basis using the trace pairing."""
        out = {}
        for label in self.data.basis:
            dual = self.data.dual_label(label)
            c = self.pairing(m, self.exact[dual])
            if not c.is_zero():
                out[label] = c / self.data.form(label, dual)
        return out

    def numeric(self, label: tuple) -> np.ndarray:
        n = self.data.rank + 1
        out = np.zeros((n, n), dtype=complex)
        for (i, j), v in self.exact[label].items():
            out[i, j] = v.evaluate()
        return out

    @cached_property
    def numeric_basis(self) -> np.ndarray:
        """Array ``(dim, n, n)`` in the order of ``data.basis``."""
        return np.array([self.numeric(b) for b in self.data.basis])


# ---------------------------------------------------------------------------
# verification


def check_cartan_weyl(data: LieAlgebraData) -> VerificationReport:
    """Exact checks of the bracket table, the form, and the realization."""
    rep = VerificationReport(f"cartan_weyl[{data.name}]")
    basis = data.basis
    mats = data.matrices

    # root pairing vs orthonormal coordinates
    fails = []
    for i in range(data.n_roots):
        for j in range(data.n_roots):
            dot = sum((data.coord(i, mu) * data.coord(j, mu) for mu in range(data.rank)), ZERO)
            if dot != Coeff.const(data.inner(data.root(i), data.root(j))):
                fails.append(f"pairing {data.root(i)},{data.root(j)}")
    rep.add_exact("root_pairing", fails)

    fails = []
    for (i, j), v in data.structure_constants.items():
        if data.structure_constants[(j, i)] != -v:
            fails.append(f"c antisymmetry {i},{j}")
        if data.structure_constants[(data.neg(i), data.neg(j))] != -v:
            fails.append(f"c sign {i},{j}")
    rep.add_exact("structure_constant_symmetry", fails)

    # abstract table vs matrix commutators
    fails = []
    for x in basis:
        for y in basis:
            table = data.bracket_basis(x, y)
            realized = mats.decompose(mats.commutator(x, y))
            keys = set(table) | set(realized)
            if any(table.get(key, ZERO) != realized.get(key, ZERO) for key in keys):
                fails.append(f"[{x},{y}]")
    rep.add_exact("commutator_table", fails)

    # form normalization and hermiticity in the realization
    fails = []
    for x in basis:
        for y in basis:
            if mats.pairing(mats.exact[x], mats.exact[y]) != Coeff.const(data.form(x, y)):
                fails.append(f"form {x},{y}")
        dag = {(j, i): v.conjugate() for (i, j), v in mats.exact[x].items()}
        if dag != mats.exact[data.dual_label(x)]:
            fails.append(f"dagger {x}")
    rep.add_exact("form_and_dagger", fails)

    fails = []
    for a, x in enumerate(basis):
        for b, y in enumerate(basis[a:], a):
            for z in basis[b:]:
                if not _jacobi_zero(data, x, y, z):
                    fails.append(f"jacobi {x},{y},{z}")
    rep.add_exact("jacobi", fails)

    fails = []
    for x in basis:
        for y in basis:
            for z in basis:
                total = ZERO
                for w, c in data.bracket_basis(x, y).items():
                    total = total + c * data.form(w, z)
                for w, c in data.bracket_basis(x, z).items():
                    total = total + c * data.form(y, w)
                if not total.is_zero():
                    fails.append(f"invariance {x},{y},{z}")
    rep.add_exact("form_invariance", fails)
    return rep


def _bracket_vec(data: LieAlgebraData, vec: dict, z: tuple) -> dict:
    out: dict = {}
    for w, c in vec.items():
        for v, d in data.bracket_basis(w, z).items():
            out[v] = out.get(v, ZERO) + c * d
    return out


def _jacobi_zero(data: LieAlgebraData, x, y, z) -> bool:
    total: dict = {}
    for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
        for v, d in _bracket_vec(data, data.bracket_basis(a, b), c).items():
            total[v] = total.get(v, ZERO) + d
    return all(v.is_zero() for v in total.values())
