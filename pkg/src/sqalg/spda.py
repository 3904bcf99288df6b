"""Presented unstable algebras over the Steenrod algebra and Poincaré duality.

An algebra is F2[generators]/(relations), computed degree by degree up to a
truncation degree: in each degree the monomials are reduced modulo the span
of all monomial multiples of relations, and the monomials that are not
eliminated form the basis.  Squares on generators are given; the action on
every basis element follows from the Cartan formula and is stored as a
table, which is what all later computations read.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import gradmod
from .errors import AlgebraError, ParseError
from .expr import Poly, format_mono, format_poly, mono_degree, mono_key, parse_poly, poly_mul
from .f2linalg import F2Matrix, F2Vector, apply_rows, bits_of, popcount, rank_rows, rref_rows, solve
from .steenrod import SteenrodElement, Sq, adem_relation, antipode, coproduct, multiply


class Problem(NamedTuple):
    kind: str
    degree: int
    witness: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.kind}] degree {self.degree}, {self.witness}: {self.detail}"


@dataclass
class Report:
    name: str
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, msg) -> None:
        self.failures.append(msg)

    def __str__(self) -> str:
        head = f"{self.name}: {'pass' if self.ok else 'FAIL'}"
        return "\n".join([head] + [f"  {f}" for f in self.failures])


@dataclass(frozen=True)
class AlgElement:
    degree: int
    bits: int
    algebra: PresentedAlgebra = field(compare=False, repr=False, hash=False)

    def is_zero(self) -> bool:
        return self.bits == 0

    def __add__(self, other: AlgElement) -> AlgElement:
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError("sum of elements of different degrees")
        return AlgElement(self.degree, self.bits ^ other.bits, self.algebra)

    def __mul__(self, other: AlgElement) -> AlgElement:
        return self.algebra.mul(self, other)

    def __pow__(self, n: int) -> AlgElement:
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgElement):
            return NotImplemented
        if self.bits == 0 and other.bits == 0:
            return True
        return self.degree == other.degree and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self.degree, self.bits)) if self.bits else 0

    def __str__(self) -> str:
        return self.algebra.format(self)


@dataclass(frozen=True)
class DualElement:
    """Element of the dual: a functional on the basis of P^n, in degree -n."""

    degree: int
    bits: int


class PresentedAlgebra:
    def __init__(
        self,
        generators: Sequence[tuple[str, int]],
        relations: Sequence[Poly],
        sq: Mapping[str, Mapping[int, Poly]],
        dimension: int | None,
        max_degree: int | None = None,
    ):
        self.gen_names = tuple(g[0] for g in generators)
        self.gen_degrees = tuple(int(g[1]) for g in generators)
        if any(d <= 0 for d in self.gen_degrees):
            raise AlgebraError([Problem("generator", 0, ",".join(self.gen_names), "generators need positive degree")])
        if len(set(self.gen_names)) != len(self.gen_names):
            raise AlgebraError([Problem("generator", 0, ",".join(self.gen_names), "duplicate generator names")])
        self.relations = tuple(frozenset(r) for r in relations)
        self.dimension = dimension
        if max_degree is None:
            if dimension is None:
                raise ValueError("a truncation degree is needed when no PD dimension is given")
            max_degree = dimension + max(self.gen_degrees)
        self.max_degree = max_degree
        self.gen_sq = {g: {int(k): frozenset(v) for k, v in sq.get(g, {}).items()} for g in self.gen_names}
        self._override: dict[tuple[int, int], tuple[int, ...]] = {}
        self._input_problems: list[Problem] = []
        self._one = (0,) * len(self.gen_names)
        self._check_input()
        self._build_bases()

    # -- construction ---------------------------------------------------

    def _deg(self, e) -> int:
        return mono_degree(e, self.gen_degrees)

    def _poly_degree(self, p: Poly) -> int | None:
        degs = {self._deg(e) for e in p}
        if len(degs) > 1:
            return -1
        return degs.pop() if degs else None

    def _check_input(self) -> None:
        for r in self.relations:
            d = self._poly_degree(r)
            if d == -1:
                self._input_problems.append(Problem("relation", 0, self.format_free(r), "relation is not homogeneous"))
            elif d == 0:
                self._input_problems.append(Problem("relation", 0, self.format_free(r), "relation has degree 0"))
        for g, dg in zip(self.gen_names, self.gen_degrees):
            table = self.gen_sq[g]
            for k, v in table.items():
                if k < 0:
                    self._input_problems.append(Problem("sq", dg, g, f"Sq{k} is not defined"))
                    continue
                if k > dg and v:
                    self._input_problems.append(Problem("unstable", dg, g, f"Sq{k}{g} must vanish above the degree"))
                d = self._poly_degree(v)
                if d not in (None, dg + k):
                    self._input_problems.append(Problem("sq", dg, g, f"Sq{k}{g} = {self.format_free(v)} has the wrong degree"))

    def _build_bases(self) -> None:
        self._monos: dict[int, list[tuple[int, ...]]] = {}
        self._mono_index: dict[int, dict] = {}
        self._rel_rows: dict[int, tuple[list[int], list[int]]] = {}
        self._basis: dict[int, list[tuple[int, ...]]] = {}
        self._basis_slot: dict[int, dict[int, int]] = {}  # column -> basis index
        for n in range(self.max_degree + 1):
            monos = sorted(_monomials(n, self.gen_degrees), key=mono_key)
            index = {e: i for i, e in enumerate(monos)}
            rows = []
            for r in self.relations:
                dr = self._poly_degree(r)
                if dr is None or dr <= 0 or dr > n:
                    continue
                for m in _monomials(n - dr, self.gen_degrees):
                    v = 0
                    for e in poly_mul(frozenset((m,)), r):
                        v ^= 1 << index[e]
                    rows.append(v)
            red, piv = rref_rows(rows, len(monos))
            pivset = set(piv)
            basis = [e for i, e in enumerate(monos) if i not in pivset]
            self._monos[n] = monos
            self._mono_index[n] = index
            self._rel_rows[n] = (red, piv)
            self._basis[n] = basis
            self._basis_slot[n] = {index[e]: j for j, e in enumerate(basis)}

    # -- elements ------------------------------------------------------

    def dim(self, n: int) -> int:
        if n < 0 or n > self.max_degree:
            return 0
        return len(self._basis[n])

    def dims(self, upto: int | None = None) -> list[int]:
        upto = self.max_degree if upto is None else upto
        return [self.dim(n) for n in range(upto + 1)]

    def basis(self, n: int) -> list[AlgElement]:
        return [AlgElement(n, 1 << j, self) for j in range(self.dim(n))]

    def basis_monomials(self, n: int) -> list[tuple[int, ...]]:
        return list(self._basis.get(n, []))

    def zero(self, n: int = 0) -> AlgElement:
        return AlgElement(n, 0, self)

    def one(self) -> AlgElement:
        return AlgElement(0, 1, self)

    def gen(self, name: str) -> AlgElement:
        e = [0] * len(self.gen_names)
        e[self.gen_names.index(name)] = 1
        return self.from_poly(frozenset((tuple(e),)))

    def normal_form(self, p: Poly, n: int | None = None) -> AlgElement:
        """Reduce a homogeneous free-ring polynomial to the quotient basis."""
        if n is None:
            n = self._poly_degree(p)
            if n == -1:
                raise ValueError("polynomial is not homogeneous")
            if n is None:
                return self.zero(0)
        if n > self.max_degree:
            return self.zero(n)
        index = self._mono_index[n]
        v = 0
        for e in p:
            v ^= 1 << index[e]
        red, piv = self._rel_rows[n]
        for r, c in zip(red, piv):
            if v >> c & 1:
                v ^= r
        slots = self._basis_slot[n]
        out = 0
        for c in bits_of(v):
            out |= 1 << slots[c]
        return AlgElement(n, out, self)

    from_poly = normal_form

    def to_poly(self, x: AlgElement) -> Poly:
        basis = self._basis.get(x.degree, [])
        return frozenset(basis[j] for j in bits_of(x.bits))

    def parse(self, text: str, degree: int | None = None) -> AlgElement:
        p = parse_poly(text, self.gen_names)
        n = self._poly_degree(p)
        if n == -1:
            raise ParseError(f"{text!r} is not homogeneous")
        if n is None:
            return self.zero(degree or 0)
        if degree is not None and n != degree:
            raise ParseError(f"{text!r} has degree {n}, expected {degree}")
        return self.normal_form(p, n)

    def format_free(self, p: Poly) -> str:
        return format_poly(p, self.gen_names)

    def format(self, x: AlgElement) -> str:
        return format_poly(self.to_poly(x), self.gen_names)

    def format_monomial(self, e) -> str:
        return format_mono(e, self.gen_names)

    # -- products ------------------------------------------------------

    @cached_property
    def _mul_cache(self) -> dict:
        return {}

    def _mul_basis(self, n1: int, i: int, n2: int, j: int) -> int:
        key = (n1, i, n2, j) if (n1, i) <= (n2, j) else (n2, j, n1, i)
        hit = self._mul_cache.get(key)
        if hit is None:
            a = self._basis[n1][i]
            b = self._basis[n2][j]
            e = tuple(x + y for x, y in zip(a, b))
            hit = self.normal_form(frozenset((e,)), n1 + n2).bits
            self._mul_cache[key] = hit
        return hit

    def mul(self, x: AlgElement, y: AlgElement) -> AlgElement:
        n = x.degree + y.degree
        if n > self.max_degree or x.is_zero() or y.is_zero():
            return self.zero(n)
        out = 0
        for i in bits_of(x.bits):
            for j in bits_of(y.bits):
                out ^= self._mul_basis(x.degree, i, y.degree, j)
        return AlgElement(n, out, self)

    # -- inhomogeneous elements ------------------------------------------

    def total(self, parts: Iterable[AlgElement]) -> dict[int, AlgElement]:
        out: dict[int, AlgElement] = {}
        for p in parts:
            if p.is_zero():
                continue
            out[p.degree] = out[p.degree] + p if p.degree in out else p
        return {d: v for d, v in sorted(out.items()) if not v.is_zero()}

    def parse_total(self, text: str) -> dict[int, AlgElement]:
        p = parse_poly(text, self.gen_names)
        by_deg: dict[int, set] = {}
        for e in p:
            by_deg.setdefault(self._deg(e), set()).add(e)
        return self.total(self.normal_form(frozenset(s), d) for d, s in by_deg.items())

    def total_mul(self, a: Mapping[int, AlgElement], b: Mapping[int, AlgElement]) -> dict[int, AlgElement]:
        return self.total(x * y for x in a.values() for y in b.values())

    def format_total(self, a: Mapping[int, AlgElement]) -> str:
        parts = [self.format(v) for _, v in sorted(a.items()) if not v.is_zero()]
        return " + ".join(parts) if parts else "0"

    # -- Steenrod action -----------------------------------------------

    def _gen_total_square(self, g: int) -> dict[int, AlgElement]:
        name, dg = self.gen_names[g], self.gen_degrees[g]
        e = [0] * len(self.gen_names)
        e[g] = 1
        x = self.normal_form(frozenset((tuple(e),)), dg)
        table = self.gen_sq[name]
        parts = [x]
        for k in range(1, dg + 1):
            if k in table:
                parts.append(self.normal_form(table[k], dg + k))
            elif k == dg:
                parts.append(x * x)
        return self.total(parts)

    @cached_property
    def _cartan_table(self) -> dict[tuple[int, int], tuple[int, ...]]:
        gts = [self._gen_total_square(g) for g in range(len(self.gen_names))]
        one = {0: self.one()}
        table: dict[tuple[int, int], list[int]] = {}
        for n in range(self.max_degree + 1):
            for j, e in enumerate(self._basis[n]):
                tot = one
                for g, x in enumerate(e):
                    for _ in range(x):
                        tot = self.total_mul(tot, gts[g])
                for d, v in tot.items():
                    k = d - n
                    row = table.setdefault((k, n), [0] * len(self._basis[n]))
                    row[j] = v.bits
        return {key: tuple(v) for key, v in table.items()}

    def sq_images(self, k: int, n: int) -> tuple[int, ...]:
        """Images of the degree-n basis under Sq^k, as bitmasks over degree n + k."""
        if (k, n) in self._override:
            return self._override[(k, n)]
        if k == 0:
            return tuple(1 << j for j in range(self.dim(n)))
        if n + k > self.max_degree:
            return (0,) * self.dim(n)
        return self._cartan_table.get((k, n), (0,) * self.dim(n))

    def sq(self, k: int, x: AlgElement) -> AlgElement:
        if k < 0:
            raise ValueError("negative square")
        n = x.degree
        return AlgElement(n + k, apply_rows(self.sq_images(k, n), x.bits) if x.bits else 0, self)

    steenrod_on = sq

    def act(self, theta: SteenrodElement, x: AlgElement) -> AlgElement:
        """Action of a Steenrod algebra element, rightmost square first."""
        out = self.zero(x.degree + (theta.degree or 0))
        for mono in theta.terms:
            y = x
            for r in reversed(mono):
                y = self.sq(r, y)
                if y.is_zero():
                    break
            out = out + y
        return out

    def total_square(self, x: AlgElement) -> dict[int, AlgElement]:
        return self.total(self.sq(k, x) for k in range(self.max_degree - x.degree + 1))

    def with_action(self, k: int, n: int, images: Sequence[int]) -> PresentedAlgebra:
        """Copy with the Sq^k table on degree n replaced (for mutation tests)."""
        other = object.__new__(PresentedAlgebra)
        other.__dict__.update({key: val for key, val in self.__dict__.items() if key != "_mul_cache"})
        other._override = dict(self._override)
        other._override[(k, n)] = tuple(images)
        return other

    # -- consistency checks --------------------------------------------

    def _free_total_square(self, e) -> dict[int, frozenset]:
        # total square of a free-ring monomial, truncated at max_degree
        acc = {0: frozenset((self._one,))}
        for g, x in enumerate(e):
            dg = self.gen_degrees[g]
            ge = [0] * len(self.gen_names)
            ge[g] = 1
            gt = {dg: frozenset((tuple(ge),))}
            for k, v in self.gen_sq[self.gen_names[g]].items():
                if 0 < k <= dg:
                    gt[dg + k] = frozenset(v)
            if dg not in self.gen_sq[self.gen_names[g]] and 2 * dg not in gt:
                gt[2 * dg] = frozenset((tuple(2 * y for y in ge),))
            for _ in range(x):
                new: dict[int, set] = {}
                for d1, p1 in acc.items():
                    for d2, p2 in gt.items():
                        if d1 + d2 <= self.max_degree:
                            new.setdefault(d1 + d2, set()).symmetric_difference_update(poly_mul(p1, p2))
                acc = {d: frozenset(s) for d, s in new.items()}
        return acc

    def problems(self) -> list[Problem]:
        """Everything that keeps this from being an unstable algebra over A."""
        out = list(self._input_problems)
        if out:
            return out
        # declared squares on generators obey Sq^{|g|} g = g^2
        for g, (name, dg) in enumerate(zip(self.gen_names, self.gen_degrees)):
            if dg in self.gen_sq[name]:
                x = self.gen(name)
                if self.normal_form(self.gen_sq[name][dg], 2 * dg) != x * x:
                    out.append(Problem("unstable", dg, name, f"Sq{dg}{name} differs from {name}^2"))
        # relation ideal is closed under the squares
        for r in self.relations:
            dr = self._poly_degree(r)
            tot: dict[int, set] = {}
            for e in r:
                for d, p in self._free_total_square(e).items():
                    tot.setdefault(d, set()).symmetric_difference_update(p)
            for d, p in sorted(tot.items()):
                if d > dr and not self.normal_form(frozenset(p), d).is_zero():
                    out.append(Problem("ideal", d, self.format_free(r), f"Sq{d - dr} of the relation is {self.format(self.normal_form(frozenset(p), d))}, not in the ideal"))
        out.extend(self.table_problems())
        if self.dimension is not None:
            out.extend(self._pd_shape_problems())
        return out

    def table_problems(self) -> list[Problem]:
        """Unstable, Cartan and Adem conditions on the stored action table."""
        out = []
        top = self.max_degree
        for n in range(top + 1):
            for j, x in enumerate(self.basis(n)):
                label = self.format(x)
                for k in range(1, top - n + 1):
                    y = self.sq(k, x)
                    if k > n and not y.is_zero():
                        out.append(Problem("unstable", n, label, f"Sq{k} is {self.format(y)}, expected 0"))
                    if k == n and y != x * x:
                        out.append(Problem("unstable", n, label, f"Sq{k} is {self.format(y)}, expected the square"))
        # Cartan formula on products of basis elements
        for n1 in range(1, top + 1):
            for n2 in range(n1, top - n1 + 1):
                for a in self.basis(n1):
                    for b in self.basis(n2):
                        ab = a * b
                        for k in range(1, top - n1 - n2 + 1):
                            lhs = self.sq(k, ab)
                            rhs = self.zero(n1 + n2 + k)
                            for i in range(k + 1):
                                rhs = rhs + self.sq(i, a) * self.sq(k - i, b)
                            if lhs != rhs:
                                out.append(Problem("cartan", n1 + n2, f"{self.format(a)} * {self.format(b)}", f"Sq{k} of the product is {self.format(lhs)}, Cartan gives {self.format(rhs)}"))
        # Adem relations
        for n in range(top + 1):
            for x in self.basis(n):
                for b in range(1, top - n + 1):
                    sbx = self.sq(b, x)
                    for a in range(1, min(2 * b, top - n - b + 1)):
                        lhs = self.sq(a, sbx)
                        rhs = self.act(SteenrodElement(frozenset(adem_relation(a, b))), x)
                        if lhs != rhs:
                            out.append(Problem("adem", n, self.format(x), f"Sq{a}Sq{b} gives {self.format(lhs)}, Adem relation gives {self.format(rhs)}"))
        return out

    def _pd_shape_problems(self) -> list[Problem]:
        out = []
        d = self.dimension
        if self.dim(d) != 1:
            out.append(Problem("pd", d, "top", f"top degree {d} has dimension {self.dim(d)}, expected 1"))
        for n in range(d + 1, self.max_degree + 1):
            if self.dim(n):
                out.append(Problem("pd", n, self.format(self.basis(n)[0]), f"nonzero above the top degree {d}"))
        return out

    # -- duals and cap products ----------------------------------------

    def evaluate(self, f: DualElement, x: AlgElement) -> int:
        if x.is_zero():
            return 0
        if f.degree != -x.degree:
            return 0
        return popcount(f.bits & x.bits) & 1

    def fundamental_class(self) -> DualElement:
        d = self.dimension
        if d is None or self.dim(d) != 1:
            raise ValueError("no fundamental class: top degree is not one-dimensional")
        return DualElement(-d, 1)

    def dual_basis(self, n: int) -> list[DualElement]:
        return [DualElement(-n, 1 << j) for j in range(self.dim(n))]

    def format_dual(self, f: DualElement) -> str:
        if not f.bits:
            return "0"
        n = -f.degree
        return " + ".join(f"({self.format_monomial(self._basis[n][j])})*" for j in bits_of(f.bits))

    def functional(self, n: int, fn) -> DualElement:
        """Dual element in degree -n with the given values on the basis of P^n."""
        bits = 0
        for j, y in enumerate(self.basis(n)):
            if fn(y):
                bits |= 1 << j
        return DualElement(-n, bits)

    def cap(self, f: DualElement, a: AlgElement) -> DualElement:
        """(f cap a)(b) = f(a b)."""
        n = -f.degree - a.degree
        return self.functional(n, lambda y: self.evaluate(f, a * y))

    def dual_act(self, theta: SteenrodElement, f: DualElement) -> DualElement:
        """Left action on the dual: (theta f)(y) = f(chi(theta) y)."""
        ct = antipode(theta)
        n = -f.degree - (theta.degree or 0)
        return self.functional(n, lambda y: self.evaluate(f, self.act(ct, y)))

    def right_act(self, f: DualElement, theta: SteenrodElement) -> DualElement:
        """Right action on the dual: (f theta)(y) = f(theta y)."""
        n = -f.degree - (theta.degree or 0)
        return self.functional(n, lambda y: self.evaluate(f, self.act(theta, y)))

    def pairing_matrix(self, k: int) -> F2Matrix:
        """Rows: basis of P^k; columns: basis of P^(d-k); entry [P](x y)."""
        P = self.fundamental_class()
        d = self.dimension
        rows = []
        for x in self.basis(k):
            r = 0
            for j, y in enumerate(self.basis(d - k)):
                if self.evaluate(P, x * y):
                    r |= 1 << j
            rows.append(r)
        return F2Matrix(len(rows), self.dim(d - k), tuple(rows))

    def represent(self, f: DualElement) -> AlgElement | None:
        """The v in P^k with [P] cap v = f, for f in degree -(d-k); None if none exists."""
        d = self.dimension
        k = d + f.degree
        M = self.pairing_matrix(k).transpose()  # equations indexed by P^(d-k)
        sol = solve(M, F2Vector(M.nrows, f.bits))
        if sol is None:
            return None
        return AlgElement(k, sol.bits, self)

    # -- module views --------------------------------------------------

    def as_module(self, tag: str = "A", reduced: bool = False, upto: int | None = None) -> gradmod.GradedModule:
        """The underlying left A-module (or its restriction to A(1))."""
        upto = self.dimension if upto is None else upto
        names, degrees, slots = [], [], {}
        for n in range(1 if reduced else 0, upto + 1):
            for j, e in enumerate(self._basis[n]):
                slots[(n, j)] = len(names)
                names.append(self.format_monomial(e))
                degrees.append(n)
        span = (max(degrees) - min(degrees)) if degrees else 0
        gens = (1, 2) if tag == "A(1)" else gradmod.generators("A", span)
        acts = {}
        for k in gens:
            images = []
            for (n, j) in slots:
                img = self.sq_images(k, n)[j] if n + k <= upto else 0
                v = 0
                for t in bits_of(img):
                    v |= 1 << slots[(n + k, t)]
                images.append(v)
            acts[k] = images
        return gradmod.GradedModule(tag, tuple(names), tuple(degrees), acts)

    # -- serialisation -------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, PresentedAlgebra):
            return NotImplemented
        return (
            self.gen_names == other.gen_names
            and self.gen_degrees == other.gen_degrees
            and self.relations == other.relations
            and self.gen_sq == other.gen_sq
            and self.dimension == other.dimension
            and self.max_degree == other.max_degree
            and self._override == other._override
        )

    def __repr__(self) -> str:
        gens = ", ".join(f"{n}:{d}" for n, d in zip(self.gen_names, self.gen_degrees))
        return f"PresentedAlgebra([{gens}], dims={self.dims()})"


def _monomials(n: int, degrees: Sequence[int]) -> list[tuple[int, ...]]:
    if not degrees:
        return [()] if n == 0 else []
    out = []
    d0 = degrees[0]
    for x in range(n // d0 + 1):
        for rest in _monomials(n - x * d0, degrees[1:]):
            out.append((x,) + rest)
    return out


# ------------------------------------------------------------------ builders


def build_algebra(
    generators: Sequence[tuple[str, int]],
    relations: Sequence[str | Poly],
    sq: Mapping[str, Mapping[int, str | Poly]],
    dimension: int | None,
    max_degree: int | None = None,
    check: bool = True,
) -> PresentedAlgebra:
    """Build a presented algebra; raises AlgebraError listing problems when ``check``."""
    names = [g[0] for g in generators]
    rels = [parse_poly(r, names) if isinstance(r, str) else frozenset(r) for r in relations]
    table = {}
    for g, entries in sq.items():
        if g not in names:
            raise ParseError(f"squares given for unknown generator {g!r}")
        table[g] = {int(k): parse_poly(v, names) if isinstance(v, str) else frozenset(v) for k, v in entries.items()}
    P = PresentedAlgebra(generators, rels, table, dimension, max_degree)
    if check:
        probs = P.problems()
        if probs:
            raise AlgebraError(probs)
    return P


def to_json(P: PresentedAlgebra) -> str:
    """Canonical text form of the algebra file format."""
    dump = lambda x: json.dumps(x, ensure_ascii=False)
    gens = ",\n".join(f'    {{"name": {dump(n)}, "degree": {d}}}' for n, d in zip(P.gen_names, P.gen_degrees))
    rels = ",\n".join(f"    {dump(P.format_free(r))}" for r in P.relations)
    sq_blocks = []
    for g in P.gen_names:
        entries = ", ".join(f"{dump(str(k))}: {dump(P.format_free(v))}" for k, v in sorted(P.gen_sq[g].items()))
        sq_blocks.append(f"    {dump(g)}: {{{entries}}}")
    lines = [
        "{",
        '  "generators": [',
        gens,
        "  ],",
        '  "relations": [' + ("\n" + rels + "\n  ]," if rels else "],"),
        '  "sq": {',
        ",\n".join(sq_blocks),
        "  },",
    ]
    default_max = None if P.dimension is None else P.dimension + max(P.gen_degrees)
    if P.max_degree != default_max:
        lines.append(f'  "max_degree": {P.max_degree},')
    lines.append(f'  "dimension": {dump(P.dimension)}')
    lines.append("}")
    return "\n".join(line for line in lines if line != "") + "\n"


def from_json(text: str, check: bool = True) -> PresentedAlgebra:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("algebra file must hold a JSON object")
    for key in ("generators", "relations", "sq", "dimension"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    try:
        gens = [(str(g["name"]), int(g["degree"])) for g in doc["generators"]]
    except (KeyError, TypeError, ValueError):
        raise ParseError("generators must be a list of {name, degree}") from None
    names = [g[0] for g in gens]

    def parse_at(expr: str):
        try:
            return parse_poly(expr, names)
        except ParseError as e:
            line, col = gradmod._position(text, json.dumps(expr))
            raise ParseError(e.message, line, col + e.column) from None

    rels = [parse_at(r) for r in doc["relations"]]
    sq = {g: {int(k): parse_at(v) for k, v in entries.items()} for g, entries in doc["sq"].items()}
    return build_algebra(gens, rels, sq, doc["dimension"], doc.get("max_degree"), check=check)


# --------------------------------------------------------------- PD checks


def verify_pd(P: PresentedAlgebra, d: int | None = None) -> Report:
    """Top degree one-dimensional, nothing above it, perfect pairings below it."""
    d = P.dimension if d is None else d
    rep = Report(f"Poincaré duality (d = {d})")
    if d is None:
        rep.fail("no top degree given")
        return rep
    if P.dim(d) != 1:
        rep.fail(f"top degree {d} has dimension {P.dim(d)}")
        return rep
    for n in range(d + 1, P.max_degree + 1):
        if P.dim(n):
            rep.fail(f"degree {n} > {d} is nonzero")
    if P.dimension != d:
        rep.fail(f"algebra was presented with top degree {P.dimension}")
        return rep
    for k in range(d + 1):
        M = P.pairing_matrix(k)
        if P.dim(k) != P.dim(d - k) or M.rank() != P.dim(k):
            rep.fail(f"pairing P^{k} x P^{d - k} is degenerate (rank {M.rank()}, dims {P.dim(k)}, {P.dim(d - k)})")
    return rep


@dataclass
class CharacteristicClassTable:
    wu: list
    sw: list = field(default_factory=list)
    dual_sw: list = field(default_factory=list)

    def rows(self) -> list[tuple[str, AlgElement]]:
        out = []
        for label, seq in (("v", self.wu), ("w", self.sw), ("wbar", self.dual_sw)):
            for k, x in enumerate(seq):
                out.append((f"{label}{k}", x))
        return out

    def format(self) -> str:
        return "\n".join(f"{name} = {x}" for name, x in self.rows())


def wu_classes(P: PresentedAlgebra) -> CharacteristicClassTable:
    """v_k with [P](v_k y) = [P](Sq^k y) for all y of degree d - k."""
    d = P.dimension
    F = P.fundamental_class()
    wu = []
    for k in range(d + 1):
        f = P.right_act(F, Sq(k))
        v = P.represent(f)
        if v is None:
            raise AlgebraError([Problem("wu", k, f"v{k}", "defining system has no solution")])
        wu.append(v)
    return CharacteristicClassTable(wu=wu)


def wu_classes_via_antipode(P: PresentedAlgebra) -> list[AlgElement]:
    """v_k from the left action (chi Sq^k)·[P] on the dual."""
    d = P.dimension
    F = P.fundamental_class()
    out = []
    for k in range(d + 1):
        v = P.represent(P.dual_act(antipode(Sq(k)), F))
        if v is None:
            raise AlgebraError([Problem("wu", k, f"v{k}", "defining system has no solution")])
        out.append(v)
    return out


def sw_classes(P: PresentedAlgebra, table: CharacteristicClassTable) -> CharacteristicClassTable:
    """w_k = sum_i Sq^i v_(k-i)."""
    sw = []
    for k in range(len(table.wu)):
        w = P.zero(k)
        for i in range(k + 1):
            w = w + P.sq(i, table.wu[k - i])
        sw.append(w)
    return CharacteristicClassTable(wu=table.wu, sw=sw, dual_sw=table.dual_sw)


def dual_sw_classes(P: PresentedAlgebra, table: CharacteristicClassTable | None = None) -> CharacteristicClassTable:
    """wbar_k with [P](wbar_k y) = [P](chi(Sq^k) y), i.e. Sq^k·[P] = [P] cap wbar_k."""
    d = P.dimension
    F = P.fundamental_class()
    out = []
    for k in range(d + 1):
        v = P.represent(P.dual_act(Sq(k), F))
        if v is None:
            raise AlgebraError([Problem("dual_sw", k, f"wbar{k}", "defining system has no solution")])
        out.append(v)
    if table is None:
        return CharacteristicClassTable(wu=[], dual_sw=out)
    return CharacteristicClassTable(wu=table.wu, sw=table.sw, dual_sw=out)


def dual_sw_by_recurrence(P: PresentedAlgebra, sw: Sequence[AlgElement]) -> list[AlgElement]:
    """wbar_k = sum_{i >= 1} w_i wbar_(k-i), starting from wbar_0 = 1."""
    out = [P.one()]
    for k in range(1, len(sw)):
        acc = P.zero(k)
        for i in range(1, k + 1):
            acc = acc + sw[i] * out[k - i]
        out.append(acc)
    return out


def characteristic_classes(P: PresentedAlgebra) -> CharacteristicClassTable:
    table = sw_classes(P, wu_classes(P))
    return dual_sw_classes(P, table)


def verify_char_identities(table: CharacteristicClassTable, d: int) -> Report:
    rep = Report("characteristic class identities")
    for k in range(d // 2 + 1, d + 1):
        if k < len(table.wu) and not table.wu[k].is_zero():
            rep.fail(f"(a) v{k} = {table.wu[k]} should vanish for k > {d // 2}")
    if d % 2 == 0:
        half = table.wu[d // 2]
        if table.sw[d] != half * half:
            rep.fail(f"(b) w{d} = {table.sw[d]} differs from v{d // 2}^2 = {half * half}")
    for k in range(1, d + 1):
        acc = None
        for i in range(k + 1):
            term = table.sw[i] * table.dual_sw[k - i]
            acc = term if acc is None else acc + term
        if not acc.is_zero():
            rep.fail(f"(c) sum of w_i wbar_(k-i) is {acc} at k = {k}")
    return rep


def verify_sharp_pd(P: PresentedAlgebra, d: int | None = None) -> Report:
    """Cap with [P] is compatible with the P#A action on P and its dual.

    Checks that P is an unstable A-algebra (table axioms), that every Wu and
    dual Stiefel-Whitney system is solvable, and that for every k and basis
    element x, Sq^k·([P] cap x) = [P] cap (sum_i Sq^i(x) wbar_(k-i)): the
    cross-product rewriting of Sq^k·x·[P].
    """
    d = P.dimension if d is None else d
    rep = Report(f"P#A-duality (d = {d})")
    pd = verify_pd(P, d)
    if not pd.ok:
        rep.failures.extend(pd.failures)
        return rep
    for prob in P.problems():
        rep.fail(str(prob))
    try:
        wu = wu_classes(P)
        dual = dual_sw_classes(P)
    except AlgebraError as e:
        rep.failures.extend(str(p) for p in e.problems)
        return rep
    F = P.fundamental_class()
    wbar = dual.dual_sw
    for n in range(d + 1):
        for x in P.basis(n):
            fx = P.cap(F, x)
            for k in range(1, d - n + 1):
                lhs = P.dual_act(Sq(k), fx)
                z = P.zero(n + k)
                for i in range(k + 1):
                    z = z + P.sq(i, x) * wbar[k - i]
                rhs = P.cap(F, z)
                if lhs != rhs:
                    rep.fail(f"Sq{k}·([P] cap {x}) differs from [P] cap ({z})")
    return rep


# ------------------------------------------------------------ homomorphisms


@dataclass
class InjectivityReport:
    precondition_failures: list = field(default_factory=list)
    kernel: dict = field(default_factory=dict)  # degree -> kernel dimension

    @property
    def injective(self) -> bool | None:
        if self.precondition_failures:
            return None
        return not any(self.kernel.values())


def hom_images(P: PresentedAlgebra, Q: PresentedAlgebra, images: Mapping[str, AlgElement | str]) -> dict[str, AlgElement]:
    out = {}
    for g, dg in zip(P.gen_names, P.gen_degrees):
        v = images[g]
        out[g] = Q.parse(v, dg) if isinstance(v, str) else v
    return out


def apply_hom(P: PresentedAlgebra, Q: PresentedAlgebra, images: Mapping[str, AlgElement], x: AlgElement) -> AlgElement:
    out = Q.zero(x.degree)
    for e in P.to_poly(x):
        y = Q.one()
        for g, k in zip(P.gen_names, e):
            for _ in range(k):
                y = y * images[g]
        out = out + y
    return out


def _hom_problems(P: PresentedAlgebra, Q: PresentedAlgebra, images: Mapping[str, AlgElement]) -> list[str]:
    out = []
    for g, dg in zip(P.gen_names, P.gen_degrees):
        if not images[g].is_zero() and images[g].degree != dg:
            out.append(f"image of {g} has degree {images[g].degree}, expected {dg}")
    if out:
        return out
    for r in P.relations:
        # evaluate the relation on the images in Q
        val = None
        for e in r:
            y = Q.one()
            for g, k in zip(P.gen_names, e):
                for _ in range(k):
                    y = y * images[g]
            val = y if val is None else val + y
        if val is not None and not val.is_zero():
            out.append(f"relation {P.format_free(r)} maps to {val}")
    return out


def injectivity_check(P: PresentedAlgebra, Q: PresentedAlgebra, images: Mapping[str, AlgElement | str], d: int | None = None) -> InjectivityReport:
    """Kernel of an algebra map P -> Q that is an isomorphism in the top degree."""
    d = P.dimension if d is None else d
    rep = InjectivityReport()
    imgs = hom_images(P, Q, images)
    rep.precondition_failures.extend(_hom_problems(P, Q, imgs))
    for A, label in ((P, "source"), (Q, "target")):
        pd = verify_pd(A, d)
        if not pd.ok:
            rep.precondition_failures.append(f"{label} is not a PD algebra of degree {d}: {pd.failures[0]}")
    if rep.precondition_failures:
        return rep
    top = apply_hom(P, Q, imgs, P.basis(d)[0])
    if top.is_zero():
        rep.precondition_failures.append(f"map is not an isomorphism in degree {d}")
        return rep
    for n in range(d + 1):
        rows = [apply_hom(P, Q, imgs, x).bits for x in P.basis(n)]
        rep.kernel[n] = len(rows) - rank_rows(rows)
    return rep


def algebra_isomorphisms(P: PresentedAlgebra, Q: PresentedAlgebra, limit: int | None = 1) -> list[dict[str, AlgElement]]:
    """Exhaustive search for isomorphisms of algebras commuting with the squares."""
    if P.dims() != Q.dims():
        return []
    choices = [Q.basis(dg) for dg in P.gen_degrees]
    options = []
    for basis in choices:
        opts = []
        for mask in range(1 << len(basis)):
            x = None
            for j in bits_of(mask):
                x = basis[j] if x is None else x + basis[j]
            opts.append(x)
        options.append(opts)
    found = []
    for combo in product(*options):
        imgs = {}
        for g, dg, x in zip(P.gen_names, P.gen_degrees, combo):
            imgs[g] = Q.zero(dg) if x is None else x
        if _hom_problems(P, Q, imgs):
            continue
        ok = True
        for n in range(P.max_degree + 1):
            rows = [apply_hom(P, Q, imgs, x).bits for x in P.basis(n)]
            if rank_rows(rows) != P.dim(n):
                ok = False
                break
        if not ok:
            continue
        for g in P.gen_names:
            x = P.gen(g)
            for k in range(1, x.degree + 1):
                if apply_hom(P, Q, imgs, P.sq(k, x)) != Q.sq(k, imgs[g]):
                    ok = False
        if ok:
            found.append(imgs)
            if limit is not None and len(found) >= limit:
                break
    return found


# -------------------------------------------------------- cross product P#A


@dataclass(frozen=True)
class SharpElement:
    """Sum of basic tensors a·alpha, keyed by (degree, basis index of P, admissible monomial)."""

    terms: frozenset = frozenset()

    def __add__(self, other: SharpElement) -> SharpElement:
        return SharpElement(self.terms ^ other.terms)


def sharp(a: AlgElement, alpha: SteenrodElement) -> SharpElement:
    out: set = set()
    for j in bits_of(a.bits):
        for m in alpha.terms:
            out ^= {(a.degree, j, m)}
    return SharpElement(frozenset(out))


def sharp_multiply(P: PresentedAlgebra, s: SharpElement, t: SharpElement) -> SharpElement:
    """(a alpha)(b beta) = sum_i a (alpha'_i b) alpha''_i beta."""
    out: set = set()
    for (n1, i, alpha) in s.terms:
        a = AlgElement(n1, 1 << i, P)
        psi = coproduct(SteenrodElement(frozenset((alpha,))))
        for (n2, j, beta) in t.terms:
            b = AlgElement(n2, 1 << j, P)
            for (a1, a2) in psi.terms:
                coeff = a * P.act(SteenrodElement(frozenset((a1,))), b)
                if coeff.is_zero():
                    continue
                right = multiply(SteenrodElement(frozenset((a2,))), SteenrodElement(frozenset((beta,))))
                out ^= sharp(coeff, right).terms
    return SharpElement(frozenset(out))


def sharp_reverse(P: PresentedAlgebra, a: AlgElement, alpha: SteenrodElement) -> SharpElement:
    """sum_i (1 alpha'_i)((chi alpha''_i) a), which equals a·alpha."""
    out = SharpElement()
    for (a1, a2) in coproduct(alpha).terms:
        left = sharp(P.one(), SteenrodElement(frozenset((a1,))))
        moved = P.act(antipode(SteenrodElement(frozenset((a2,)))), a)
        out = out + sharp_multiply(P, left, sharp(moved, SteenrodElement.unit()))
    return out


def sharp_act(P: PresentedAlgebra, s: SharpElement, x: AlgElement) -> AlgElement:
    """(a alpha)·x = a alpha(x)."""
    out = None
    for (n, i, alpha) in s.terms:
        y = AlgElement(n, 1 << i, P) * P.act(SteenrodElement(frozenset((alpha,))), x)
        out = y if out is None else out + y
    return out if out is not None else P.zero(x.degree)


def format_sharp(P: PresentedAlgebra, s: SharpElement) -> str:
    if not s.terms:
        return "0"
    from .steenrod import format_mono as fm

    parts = []
    for (n, i, m) in sorted(s.terms, key=lambda t: (t[0], t[1], t[2])):
        parts.append(f"({P.format(AlgElement(n, 1 << i, P))})·({fm(m)})")
    return " + ".join(parts)


# ---------------------------------------------------------------- Thom module


def thom_module(P: PresentedAlgebra, dual_sw: Sequence[AlgElement], tag: str = "A", thom: str = "u") -> gradmod.GradedModule:
    """Free rank-one P-module on u with Sq^r(x u) = sum_i Sq^i(x) wbar_(r-i) u."""
    d = P.dimension
    names, degrees, slots = [], [], {}
    for n in range(d + 1):
        for j, e in enumerate(P.basis_monomials(n)):
            slots[(n, j)] = len(names)
            mono = P.format_monomial(e)
            names.append(thom if mono == "1" else f"{mono}*{thom}")
            degrees.append(n)
    gens = (1, 2) if tag == "A(1)" else gradmod.generators("A", d)
    acts = {}
    for r in gens:
        images = []
        for (n, j) in slots:
            x = AlgElement(n, 1 << j, P)
            z = P.zero(n + r)
            for i in range(r + 1):
                if r - i < len(dual_sw):
                    z = z + P.sq(i, x) * dual_sw[r - i]
            v = 0
            if n + r <= d:
                for t in bits_of(z.bits):
                    v |= 1 << slots[(n + r, t)]
            images.append(v)
        acts[r] = images
    return gradmod.GradedModule(tag, tuple(names), tuple(degrees), acts)


def total_class_product(P: PresentedAlgebra, a, b) -> dict[int, AlgElement]:
    """Product of inhomogeneous elements (dicts degree -> element, or text)."""
    if isinstance(a, str):
        a = P.parse_total(a)
    if isinstance(b, str):
        b = P.parse_total(b)
    return P.total_mul(a, b)
