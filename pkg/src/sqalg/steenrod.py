"""The mod 2 Steenrod algebra in the admissible basis.

A monomial is a tuple ``(r1, ..., rk)`` standing for Sq^r1 ... Sq^rk; the
empty tuple is the unit.  An element is a frozenset of monomials (coefficient
one on each member), so addition is symmetric difference.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .config import DEFAULT
from .errors import ParseError
from .f2linalg import Echelon, rref_rows

Mono = tuple[int, ...]

DEGREE_BOUND = DEFAULT.degree_bound


def binom2(n: int, k: int) -> int:
    """Binomial coefficient C(n, k) reduced mod 2 (Lucas)."""
    if k < 0 or n < 0 or k > n:
        return 0
    return 1 if (k & ~n) == 0 else 0


def is_admissible(mono: Sequence[int]) -> bool:
    return all(mono[i] >= 2 * mono[i + 1] for i in range(len(mono) - 1))


def excess(mono: Mono) -> int:
    if not mono:
        return 0
    return mono[0] - sum(mono[1:])


@lru_cache(maxsize=None)
def _adem_pair(a: int, b: int) -> tuple[Mono, ...]:
    # Sq^a Sq^b = sum_j C(b-1-j, a-2j) Sq^(a+b-j) Sq^j   for 0 < a < 2b
    out = []
    for j in range(a // 2 + 1):
        if binom2(b - 1 - j, a - 2 * j):
            out.append((a + b - j, j) if j else (a + b - j,))
    return tuple(out)


def adem_relation(a: int, b: int) -> tuple[Mono, ...]:
    """Admissible terms of Sq^a Sq^b for an inadmissible pair a < 2b."""
    if not (0 < a < 2 * b):
        raise ValueError(f"(Sq{a}, Sq{b}) is already admissible")
    return _adem_pair(a, b)


@lru_cache(maxsize=None)
def _reduce_left(word: Mono) -> frozenset:
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a < 2 * b:
            out: set = set()
            for t in _adem_pair(a, b):
                out ^= _reduce_left(word[:i] + t + word[i + 2:])
            return frozenset(out)
    return frozenset((word,))


@lru_cache(maxsize=None)
def _reduce_right(word: Mono) -> frozenset:
    for i in range(len(word) - 2, -1, -1):
        a, b = word[i], word[i + 1]
        if a < 2 * b:
            out: set = set()
            for t in _adem_pair(a, b):
                out ^= _reduce_right(word[:i] + t + word[i + 2:])
            return frozenset(out)
    return frozenset((word,))


@dataclass(frozen=True)
class SteenrodElement:
    terms: frozenset = frozenset()

    @classmethod
    def unit(cls) -> SteenrodElement:
        return cls(frozenset(((),)))

    @classmethod
    def zero(cls) -> SteenrodElement:
        return cls(frozenset())

    @classmethod
    def parse(cls, text: str) -> SteenrodElement:
        return parse_element(text)

    @property
    def degree(self) -> int | None:
        """Common degree of the terms; None for the zero element."""
        for m in self.terms:
            return sum(m)
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: SteenrodElement) -> SteenrodElement:
        if self.terms and other.terms and self.degree != other.degree:
            raise ValueError("sum of elements of different degrees")
        return SteenrodElement(self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: SteenrodElement) -> SteenrodElement:
        return multiply(self, other)

    def __iter__(self) -> Iterator[Mono]:
        return iter(sorted(self.terms, reverse=True))

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"SteenrodElement({format_element(self)!r})"


def adem_reduce(word: Iterable[int], order: str = "left") -> SteenrodElement:
    """Admissible expansion of the product Sq^r1 ... Sq^rk.

    ``order`` picks which inadmissible adjacent pair gets rewritten first:
    the leftmost or the rightmost.  Both give the same answer.
    """
    w = []
    for r in word:
        if r < 0:
            raise ValueError(f"negative square Sq{r}")
        if r:
            w.append(r)
    if order == "left":
        return SteenrodElement(_reduce_left(tuple(w)))
    if order == "right":
        return SteenrodElement(_reduce_right(tuple(w)))
    raise ValueError(f"unknown reduction order {order!r}")


def Sq(*rs: int) -> SteenrodElement:
    """The product Sq^r1 ... Sq^rk in admissible form."""
    return adem_reduce(rs)


def element(monos: Iterable[Mono]) -> SteenrodElement:
    out: set = set()
    for m in monos:
        out ^= _reduce_left(tuple(r for r in m if r))
    return SteenrodElement(frozenset(out))


def multiply(a: SteenrodElement, b: SteenrodElement) -> SteenrodElement:
    out: set = set()
    for x in a.terms:
        for y in b.terms:
            out ^= _reduce_left(x + y)
    return SteenrodElement(frozenset(out))


@lru_cache(maxsize=None)
def _admissible(n: int, cap: int) -> tuple[Mono, ...]:
    # admissible sequences of degree n whose first entry is at most cap
    if n == 0:
        return ((),)
    out = []
    for r in range(min(n, cap), 0, -1):
        for rest in _admissible(n - r, r // 2):
            out.append((r,) + rest)
    return tuple(out)


def admissible_basis(n: int, bound: int = DEGREE_BOUND) -> list[Mono]:
    """Admissible monomials of degree ``n``, largest first."""
    if n < 0:
        return []
    if n > bound:
        raise ValueError(f"degree {n} exceeds the degree bound {bound}")
    return list(_admissible(n, n))


# ---------------------------------------------------------------- coproduct


@dataclass(frozen=True)
class TensorElement:
    terms: frozenset = frozenset()

    def __add__(self, other: TensorElement) -> TensorElement:
        return TensorElement(self.terms ^ other.terms)

    def __mul__(self, other: TensorElement) -> TensorElement:
        out: set = set()
        for (a, b) in self.terms:
            for (c, d) in other.terms:
                left = _reduce_left(a + c)
                right = _reduce_left(b + d)
                for x in left:
                    for y in right:
                        out ^= {(x, y)}
        return TensorElement(frozenset(out))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{format_mono(a)} ⊗ {format_mono(b)}" for a, b in sorted(self.terms, reverse=True))


@lru_cache(maxsize=None)
def _coproduct_mono(mono: Mono) -> frozenset:
    if not mono:
        return frozenset((((), ()),))
    k = mono[0]
    gen = TensorElement(frozenset(((i,) if i else (), (k - i,) if k - i else ()) for i in range(k + 1)))
    return (gen * TensorElement(_coproduct_mono(mono[1:]))).terms


def coproduct(a: SteenrodElement) -> TensorElement:
    out: set = set()
    for m in a.terms:
        out ^= _coproduct_mono(m)
    return TensorElement(frozenset(out))


def tensor_multiply(x: TensorElement, y: TensorElement) -> TensorElement:
    return x * y


def counit(a: SteenrodElement) -> int:
    return 1 if () in a.terms else 0


# ----------------------------------------------------------------- antipode


@lru_cache(maxsize=None)
def _chi_sq(k: int) -> frozenset:
    # sum_{0<=r<=k} Sq^(k-r) chi(Sq^r) = 0 for k >= 1
    if k == 0:
        return frozenset(((),))
    out: set = set()
    for r in range(k):
        for m in _chi_sq(r):
            out ^= _reduce_left((k - r,) + m)
    return frozenset(out)


@lru_cache(maxsize=None)
def _chi_mono(mono: Mono) -> frozenset:
    acc = SteenrodElement.unit()
    for r in reversed(mono):
        acc = multiply(acc, SteenrodElement(_chi_sq(r)))
    return acc.terms


def antipode(a: SteenrodElement) -> SteenrodElement:
    out: set = set()
    for m in a.terms:
        out ^= _chi_mono(m)
    return SteenrodElement(frozenset(out))


chi = antipode


# --------------------------------------------------------------------- A(1)


@lru_cache(maxsize=None)
def _a1_build() -> tuple[tuple[SteenrodElement, Mono], ...]:
    # span closure of 1 under left multiplication by Sq1, Sq2, degree by
    # degree; candidates are taken greedily in a fixed order
    gens = (1, 2)
    by_degree: dict[int, list] = {0: [(SteenrodElement.unit(), ())]}
    n = 0
    while True:
        n += 1
        index = {m: i for i, m in enumerate(admissible_basis(n))}
        ech = Echelon()
        chosen = []
        for g in gens:
            for b, word in by_degree.get(n - g, []):
                c = multiply(Sq(g), b)
                if ech.add(_as_bits(c, index)):
                    chosen.append((c, (g,) + word))
        if not chosen:
            break
        by_degree[n] = chosen
    return tuple(e for d in sorted(by_degree) for e in by_degree[d])


def _a1_basis() -> tuple[SteenrodElement, ...]:
    return tuple(e for e, _ in _a1_build())


def a1_words() -> list[Mono]:
    """A word in Sq1, Sq2 for each element of ``a1_basis()``."""
    return [w for _, w in _a1_build()]


def _as_bits(a: SteenrodElement, index: dict) -> int:
    v = 0
    for m in a.terms:
        v ^= 1 << index[m]
    return v


def a1_basis() -> list[SteenrodElement]:
    """Basis of the subalgebra generated by Sq1 and Sq2, ordered by degree."""
    return list(_a1_basis())


def a1_top() -> SteenrodElement:
    """The nonzero element of A(1) in degree 6."""
    return _a1_basis()[-1]


def a1_coordinates(a: SteenrodElement) -> int | None:
    """Mask over ``a1_basis()`` expressing ``a``, or None if ``a`` is not in A(1)."""
    if a.is_zero():
        return 0
    n = a.degree
    basis = _a1_basis()
    idx = [i for i, b in enumerate(basis) if b.degree == n]
    if not idx:
        return None
    adm = {m: i for i, m in enumerate(admissible_basis(n))}
    ech = Echelon(track=True)
    for i in idx:
        ech.add(_as_bits(basis[i], adm))
    tag = ech.coordinates(_as_bits(a, adm))
    if tag is None:
        return None
    out = 0
    for j, i in enumerate(idx):
        if tag >> j & 1:
            out |= 1 << i
    return out


def a1_contains(a: SteenrodElement) -> bool:
    return a1_coordinates(a) is not None


# ------------------------------------------------ generator words for modules


def generators(tag: str, span: int) -> tuple[int, ...]:
    """Degrees of the algebra generators acting on a module spanning ``span`` degrees."""
    if tag == "A(1)":
        return (1, 2)
    if tag == "A":
        out = []
        k = 1
        while k <= max(span, 1):
            out.append(k)
            k *= 2
        return tuple(out)
    raise ValueError(f"unknown algebra tag {tag!r}")


@lru_cache(maxsize=None)
def generator_words(n: int, gens: tuple[int, ...]) -> tuple[Mono, ...]:
    """All words in the given generator degrees with total degree ``n``."""
    if n == 0:
        return ((),)
    out = []
    for g in gens:
        if g <= n:
            for w in generator_words(n - g, gens):
                out.append((g,) + w)
    return tuple(out)


@lru_cache(maxsize=None)
def _word_system(n: int, gens: tuple[int, ...]):
    words = generator_words(n, gens)
    adm = {m: i for i, m in enumerate(admissible_basis(n))}
    ech = Echelon(track=True)
    for w in words:
        ech.add(_as_bits(adm_reduce_word(w), adm))
    return words, adm, ech


def adm_reduce_word(w: Mono) -> SteenrodElement:
    return SteenrodElement(_reduce_left(w))


def in_generators(a: SteenrodElement, gens: tuple[int, ...]) -> list[Mono] | None:
    """Words over ``gens`` whose sum equals ``a``; None when ``a`` is not generated."""
    if a.is_zero():
        return []
    words, adm, ech = _word_system(a.degree, gens)
    tag = ech.coordinates(_as_bits(a, adm))
    if tag is None:
        return None
    return [words[i] for i in range(len(words)) if tag >> i & 1]


@lru_cache(maxsize=None)
def generator_relations(n: int, gens: tuple[int, ...]) -> tuple[tuple[Mono, ...], ...]:
    """A basis of the sums of generator words of degree ``n`` that vanish in A.

    Returned in reduced echelon order so the first relations named are the
    shortest ones, e.g. ``((1, 1),)`` in degree 2.
    """
    words = generator_words(n, gens)
    adm = {m: i for i, m in enumerate(admissible_basis(n))}
    m = len(adm)
    # columns: admissible coordinates then one bit per word; kernel rows are
    # combinations whose admissible part vanishes
    rows = [_as_bits(adm_reduce_word(w), adm) | (1 << (m + i)) for i, w in enumerate(words)]
    reduced, pivots = rref_rows(rows, m + len(words))
    rels = []
    for r, p in zip(reduced, pivots):
        if p >= m:
            combo = r >> m
            rels.append(tuple(words[i] for i in range(len(words)) if combo >> i & 1))
    # prefer relations whose shortest word sits early: sort by (len of words, words)
    rels.sort(key=lambda rel: (len(rel), rel))
    return tuple(rels)


# ------------------------------------------------------------ text syntax


def format_mono(m: Mono) -> str:
    if not m:
        return "1"
    return " ".join(f"Sq{r}" for r in m)


def format_element(a: SteenrodElement) -> str:
    if a.is_zero():
        return "0"
    return " + ".join(format_mono(m) for m in sorted(a.terms, reverse=True))


_TOKEN = re.compile(r"\s*(?:(Sq\^?(\d+)\b)|(\+)|(1\b)|(0\b)|(\S+))")


def parse_element(text: str) -> SteenrodElement:
    """Parse ``Sq3 Sq1 + Sq4`` style text; words need not be admissible."""
    pos = 0
    words: list[list[int]] = [[]]
    seen_term = [False]
    zero_terms = [False]
    expect_term = True
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        col = m.start() + len(m.group(0)) - len(m.group(0).lstrip()) + 1
        pos = m.end()
        if m.group(1):
            words[-1].append(int(m.group(2)))
            seen_term[-1] = True
            expect_term = False
        elif m.group(3):
            if expect_term:
                raise ParseError("expected a term before '+'", 1, col)
            words.append([])
            seen_term.append(False)
            zero_terms.append(False)
            expect_term = True
        elif m.group(4):
            seen_term[-1] = True
            expect_term = False
        elif m.group(5):
            zero_terms[-1] = True
            seen_term[-1] = True
            expect_term = False
        else:
            raise ParseError(f"unexpected token {m.group(6)!r}", 1, col)
    if expect_term:
        raise ParseError("expected a term", 1, len(text) + 1)
    out: set = set()
    degree = None
    for w, z in zip(words, zero_terms):
        if z:
            continue
        red = adem_reduce(w)
        d = sum(w)
        if degree is not None and d != degree:
            raise ParseError("terms of different degrees", 1, 1)
        degree = d
        out ^= red.terms
    return SteenrodElement(frozenset(out))
