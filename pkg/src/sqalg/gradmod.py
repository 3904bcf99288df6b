"""Finite graded modules over A or A(1) given by generator action tables.

A module has a named basis with integer degrees.  For each algebra
generator (Sq1, Sq2 over A(1); Sq1, Sq2, Sq4, ... over A) it stores the image
of every basis element as a bitmask over the basis.  Everything else acts
through words in the generators.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .config import DEFAULT
from .errors import IsoSearchInconclusive, ModuleFormatError, ParseError
from .f2linalg import Echelon, F2Matrix, apply_rows, bits_of, kernel_basis, rank_rows, rref_rows
from .steenrod import (
    SteenrodElement,
    Sq,
    a1_basis,
    a1_coordinates,
    a1_top,
    a1_words,
    antipode,
    format_mono,
    generator_relations,
    generators,
    in_generators,
    multiply,
)

TAGS = ("A", "A(1)")


def _is_power_of_two(k: int) -> bool:
    return k > 0 and k & (k - 1) == 0


@dataclass(frozen=True, eq=False)
class GradedModule:
    algebra: str
    names: tuple[str, ...]
    degrees: tuple[int, ...]
    actions: dict = field(default_factory=dict)  # generator degree -> images per basis element

    def __post_init__(self):
        if self.algebra not in TAGS:
            raise ModuleFormatError(f"unknown algebra tag {self.algebra!r}")
        names = tuple(self.names)
        degrees = tuple(int(d) for d in self.degrees)
        if len(names) != len(degrees):
            raise ModuleFormatError("names and degrees differ in length")
        if len(set(names)) != len(names):
            raise ModuleFormatError("basis names are not unique")
        n = len(names)
        acts = {}
        for k, images in dict(self.actions).items():
            k = int(k)
            if self.algebra == "A(1)" and k not in (1, 2):
                raise ModuleFormatError(f"Sq{k} is not a generator of A(1)")
            if self.algebra == "A" and not _is_power_of_two(k):
                raise ModuleFormatError(f"Sq{k} is not an algebra generator of A")
            images = tuple(int(v) for v in images)
            if len(images) != n:
                raise ModuleFormatError(f"Sq{k} table has {len(images)} entries for {n} basis elements")
            for i, v in enumerate(images):
                if v >> n:
                    raise ModuleFormatError(f"Sq{k} of {names[i]} leaves the basis")
                for j in bits_of(v):
                    if degrees[j] != degrees[i] + k:
                        raise ModuleFormatError(
                            f"Sq{k} sends {names[i]} (degree {degrees[i]}) to {names[j]} (degree {degrees[j]})"
                        )
            if any(images):
                acts[k] = images
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "actions", acts)

    # -- basic data ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def lo(self) -> int:
        return min(self.degrees, default=0)

    @property
    def hi(self) -> int:
        return max(self.degrees, default=0)

    @property
    def span(self) -> int:
        return self.hi - self.lo if self.names else 0

    @cached_property
    def _by_degree(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, d in enumerate(self.degrees):
            out.setdefault(d, []).append(i)
        return out

    def basis_in_degree(self, d: int) -> list[int]:
        return self._by_degree.get(d, [])

    def dims(self) -> dict[int, int]:
        return {d: len(ix) for d, ix in sorted(self._by_degree.items())}

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def vector(self, *names: str) -> int:
        v = 0
        for nm in names:
            v ^= 1 << self.index(nm)
        return v

    def format_vector(self, v: int) -> str:
        if not v:
            return "0"
        return " + ".join(self.names[i] for i in bits_of(v))

    def generator_degrees(self) -> tuple[int, ...]:
        return generators(self.algebra, self.span)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedModule):
            return NotImplemented
        return (
            self.algebra == other.algebra
            and self.names == other.names
            and self.degrees == other.degrees
            and self.actions == other.actions
        )

    def __repr__(self) -> str:
        return f"GradedModule({self.algebra}, dims={self.dims()})"

    # -- actions ------------------------------------------------------------

    def act_gen(self, k: int, v: int) -> int:
        images = self.actions.get(k)
        if images is None:
            return 0
        return apply_rows(images, v)

    def act_word(self, word: Sequence[int], v: int) -> int:
        for k in reversed(word):
            if not v:
                break
            v = self.act_gen(k, v)
        return v

    def act(self, theta: SteenrodElement, v: int) -> int:
        """Action of an arbitrary Steenrod element, through generator words."""
        if theta.is_zero() or not v:
            return 0
        if theta.degree == 0:
            return v
        if theta.degree > self.span:
            if self.algebra == "A(1)" and not _in_a1(theta):
                raise ValueError(f"{theta} does not lie in A(1)")
            return 0
        words = _words_for(theta, self.algebra, self.generator_degrees())
        out = 0
        for w in words:
            out ^= self.act_word(w, v)
        return out

    def sq(self, k: int, v: int) -> int:
        return self.act(Sq(k), v)

    def action_matrix(self, theta: SteenrodElement, d: int) -> F2Matrix:
        """Matrix of ``theta`` from degree d to degree d + |theta| (rows = sources)."""
        src = self.basis_in_degree(d)
        tgt = self.basis_in_degree(d + (theta.degree or 0))
        pos = {j: c for c, j in enumerate(tgt)}
        rows = []
        for i in src:
            img = self.act(theta, 1 << i)
            r = 0
            for j in bits_of(img):
                r |= 1 << pos[j]
            rows.append(r)
        return F2Matrix(len(src), len(tgt), tuple(rows))


def _in_a1(theta: SteenrodElement) -> bool:
    return a1_coordinates(theta) is not None


_WORD_CACHE: dict = {}


def _words_for(theta: SteenrodElement, tag: str, gens: tuple[int, ...]):
    key = (theta.terms, tag, gens)
    words = _WORD_CACHE.get(key)
    if words is None:
        words = in_generators(theta, gens)
        if words is None:
            raise ValueError(f"{theta} is not generated by Sq{', Sq'.join(map(str, gens))} over {tag}")
        _WORD_CACHE[key] = words
    return words


# ------------------------------------------------------------- constructors


def module_from_lists(algebra: str, basis: Sequence[tuple[str, int]], actions: dict) -> GradedModule:
    """Build a module from ``{k: {source: [targets]}}`` by basis name."""
    names = [b[0] for b in basis]
    degrees = [b[1] for b in basis]
    pos = {nm: i for i, nm in enumerate(names)}
    acts = {}
    for k, table in actions.items():
        images = [0] * len(names)
        for src, tgts in table.items():
            for t in tgts:
                images[pos[src]] ^= 1 << pos[t]
        acts[k] = images
    return GradedModule(algebra, tuple(names), tuple(degrees), acts)


def zero_module(tag: str = "A(1)") -> GradedModule:
    return GradedModule(tag, (), (), {})


def trivial(tag: str = "A(1)", degree: int = 0, name: str = "1") -> GradedModule:
    """F2 concentrated in one degree."""
    return GradedModule(tag, (name,), (degree,), {})


def shift(m: GradedModule, n: int) -> GradedModule:
    """Degree shift [n]: the degree-d basis moves to degree d + n."""
    return GradedModule(m.algebra, m.names, tuple(d + n for d in m.degrees), m.actions)


def restrict(m: GradedModule, tag: str = "A(1)") -> GradedModule:
    """Restriction of an A-module to A(1)."""
    if m.algebra == tag:
        return m
    if tag != "A(1)":
        raise ValueError("can only restrict from A to A(1)")
    return GradedModule("A(1)", m.names, m.degrees, {k: v for k, v in m.actions.items() if k in (1, 2)})


def direct_sum(*modules: GradedModule) -> GradedModule:
    if not modules:
        raise ValueError("direct_sum needs at least one module")
    tag = modules[0].algebra
    if any(x.algebra != tag for x in modules):
        raise ValueError("summands over different algebras")
    clash = len({nm for x in modules for nm in x.names}) != sum(x.dim for x in modules)
    names, degrees = [], []
    offsets = []
    for s, x in enumerate(modules):
        offsets.append(len(names))
        names.extend(f"{s}:{nm}" if clash else nm for nm in x.names)
        degrees.extend(x.degrees)
    acts: dict[int, list[int]] = {}
    for x, off in zip(modules, offsets):
        for k, images in x.actions.items():
            row = acts.setdefault(k, [0] * len(names))
            for i, v in enumerate(images):
                row[off + i] = v << off
    return GradedModule(tag, tuple(names), tuple(degrees), acts)


def tensor(m: GradedModule, n: GradedModule) -> GradedModule:
    """Tensor product with the diagonal (Cartan) action."""
    if m.algebra != n.algebra:
        raise ValueError("tensor factors over different algebras")
    tag = m.algebra
    names, degrees = [], []
    for a, da in zip(m.names, m.degrees):
        for b, db in zip(n.names, n.degrees):
            names.append(f"{a}⊗{b}")
            degrees.append(da + db)
    out = GradedModule(tag, tuple(names), tuple(degrees), {})
    gens = out.generator_degrees()
    top = max(gens)
    # Sq^i on each factor for every i up to the largest generator
    left = [[m.sq(i, 1 << a) for a in range(m.dim)] for i in range(top + 1)]
    right = [[n.sq(i, 1 << b) for b in range(n.dim)] for i in range(top + 1)]
    nd = n.dim
    acts = {}
    for k in gens:
        images = []
        for a in range(m.dim):
            for b in range(nd):
                v = 0
                for i in range(k + 1):
                    x, y = left[i][a], right[k - i][b]
                    if not x or not y:
                        continue
                    for p in bits_of(x):
                        v ^= y << (p * nd)
                images.append(v)
        acts[k] = images
    return GradedModule(tag, tuple(names), tuple(degrees), acts)


def dualize(m: GradedModule) -> GradedModule:
    """F2-dual with left action (Sq^k f)(x) = f(chi(Sq^k) x), in degrees -n."""
    names = tuple(f"{nm}*" for nm in m.names)
    degrees = tuple(-d for d in m.degrees)
    acts = {}
    for k in m.generator_degrees():
        theta = antipode(Sq(k))
        images = [0] * m.dim
        for j in range(m.dim):
            for i in bits_of(m.act(theta, 1 << j)):
                images[i] |= 1 << j
        acts[k] = images
    return GradedModule(m.algebra, names, degrees, acts)


def a1_name(word) -> str:
    return "".join(f"Sq{r}" for r in word)


def free_module(tag: str, shifts: Sequence[int]) -> GradedModule:
    """Direct sum of copies of A(1), the i-th copy generated in degree shifts[i]."""
    if tag != "A(1)":
        raise ValueError("free modules are only available over A(1)")
    basis = a1_basis()
    words = a1_words()
    left = {k: [a1_coordinates(multiply(Sq(k), b)) for b in basis] for k in (1, 2)}
    names, degrees = [], []
    acts = {1: [], 2: []}
    for c, s in enumerate(shifts):
        off = len(names)
        for b, w in zip(basis, words):
            names.append(f"{a1_name(w)}g{c}")
            degrees.append(s + b.degree)
        for k in (1, 2):
            acts[k].extend(v << off for v in left[k])
    return GradedModule("A(1)", tuple(names), tuple(degrees), acts)


def a1_quotient(relations: Iterable[SteenrodElement], prefix: str = "q") -> GradedModule:
    """The cyclic module A(1)/A(1){relations}; basis named prefix + degree index."""
    basis = a1_basis()
    ideal = Echelon()
    for r in relations:
        for b in basis:
            c = a1_coordinates(multiply(b, r))
            if c is None:
                raise ValueError(f"{r} does not lie in A(1)")
            ideal.add(c)
    # greedy complement in basis order
    ideal_rows = _echelon_rows(ideal)
    probe = Echelon()
    for r in ideal_rows:
        probe.add(r)
    reps = [i for i in range(len(basis)) if probe.add(1 << i)]
    ech = Echelon(track=True)
    for r in ideal_rows:
        ech.add(r)
    for i in reps:
        ech.add(1 << i)
    nid = len(ideal_rows)
    names, degrees = [], []
    count: dict[int, int] = {}
    for i in reps:
        d = basis[i].degree
        c = count.get(d, 0)
        count[d] = c + 1
        names.append(f"{prefix}{d}" if c == 0 else f"{prefix}{d}_{c}")
        degrees.append(d)
    acts = {}
    for k in (1, 2):
        images = []
        for i in reps:
            prod = a1_coordinates(multiply(Sq(k), basis[i]))
            tag = ech.coordinates(prod)
            v = 0
            for slot in bits_of(tag >> nid):
                v |= 1 << slot
            images.append(v)
        acts[k] = images
    return GradedModule("A(1)", tuple(names), tuple(degrees), acts)


def _echelon_rows(ech: Echelon) -> list[int]:
    return [ech._rows[p] for p in ech._order]


def joker() -> GradedModule:
    """The Joker A(1)/A(1){Sq3}, basis j0..j4 in degrees 0..4."""
    return a1_quotient([Sq(3)], prefix="j")


def f2(tag: str = "A(1)") -> GradedModule:
    return trivial(tag, 0, "1")


# ------------------------------------------------------------ axiom checks


class Violation(NamedTuple):
    relation: str
    degree: int
    witness: str
    image: str

    def __str__(self) -> str:
        return f"{self.relation} acts nontrivially on {self.witness} (degree {self.degree}): {self.image}"


def check_axioms(m: GradedModule) -> list[Violation]:
    """Every relation among generator words must act as zero.

    Relations are enumerated degreewise as the kernel of the map from
    generator words to A, so the check is complete for the given span.
    """
    out = []
    gens = m.generator_degrees()
    for n in range(2, m.span + 1):
        rels = generator_relations(n, gens)
        if not rels:
            continue
        for i in range(m.dim):
            if m.degrees[i] + n > m.hi:
                continue
            for rel in rels:
                v = 0
                for w in rel:
                    v ^= m.act_word(w, 1 << i)
                if v:
                    label = " + ".join(format_mono(w) for w in rel)
                    out.append(Violation(label, m.degrees[i], m.names[i], m.format_vector(v)))
    return out


# -------------------------------------------------------------- module maps


@dataclass(frozen=True, eq=False)
class ModuleMap:
    source: GradedModule
    target: GradedModule
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != self.source.dim:
            raise ValueError("one image per source basis element is required")
        for i, v in enumerate(self.images):
            for j in bits_of(v):
                if self.target.degrees[j] != self.source.degrees[i]:
                    raise ValueError("module maps must preserve degree")

    def __call__(self, v: int) -> int:
        return apply_rows(self.images, v)

    def is_equivariant(self) -> bool:
        for k in set(self.source.generator_degrees()) | set(self.target.generator_degrees()):
            for i in range(self.source.dim):
                if self(self.source.act_gen(k, 1 << i)) != self.target.act_gen(k, self.images[i]):
                    return False
        return True

    def is_iso(self) -> bool:
        if self.source.dims() != self.target.dims():
            return False
        return _invertible(self.source, self.target, self.images) and self.is_equivariant()

    def describe(self) -> list[str]:
        return [f"{self.source.names[i]} -> {self.target.format_vector(v)}" for i, v in enumerate(self.images)]


def _invertible(src: GradedModule, tgt: GradedModule, images: Sequence[int]) -> bool:
    for d, ix in src._by_degree.items():
        if len(tgt.basis_in_degree(d)) != len(ix):
            return False
        if rank_rows(images[i] for i in ix) != len(ix):
            return False
    return src.dim == tgt.dim


def identity_map(m: GradedModule) -> ModuleMap:
    return ModuleMap(m, m, tuple(1 << i for i in range(m.dim)))


def hom_basis(m: GradedModule, n: GradedModule) -> list[tuple[int, ...]]:
    """Basis of the degree-preserving module maps m -> n, as image tuples."""
    if m.algebra != n.algebra:
        raise ValueError("modules over different algebras")
    unknowns = []  # (source index, target index)
    for i, d in enumerate(m.degrees):
        for j in n.basis_in_degree(d):
            unknowns.append((i, j))
    if not unknowns:
        return []
    slot = {u: c for c, u in enumerate(unknowns)}
    by_src: dict[int, list[tuple[int, int]]] = {}
    for (i, j), c in slot.items():
        by_src.setdefault(i, []).append((j, c))
    gens = sorted(set(m.generator_degrees()) | set(n.generator_degrees()))
    rows = []
    for k in gens:
        for i in range(m.dim):
            eq: dict[int, int] = {}  # target coordinate -> row bits
            # f(Sq^k b_i)
            for ip in bits_of(m.act_gen(k, 1 << i)):
                for j, c in by_src.get(ip, []):
                    eq[j] = eq.get(j, 0) ^ (1 << c)
            # Sq^k f(b_i)
            for j, c in by_src.get(i, []):
                for jp in bits_of(n.act_gen(k, 1 << j)):
                    eq[jp] = eq.get(jp, 0) ^ (1 << c)
            rows.extend(r for r in eq.values() if r)
    mat = F2Matrix(len(rows), len(unknowns), tuple(rows))
    out = []
    for vec in kernel_basis(mat):
        images = [0] * m.dim
        for c in bits_of(vec.bits):
            i, j = unknowns[c]
            images[i] |= 1 << j
        out.append(tuple(images))
    return out


def invariants(m: GradedModule) -> tuple:
    """Dimensions and action ranks; isomorphic modules have equal invariants."""
    if m.algebra == "A(1)":
        elems = a1_basis()[1:]
    else:
        elems = [Sq(k) for k in range(1, m.span + 1)]
    ranks = []
    for e in elems:
        for d in sorted(m._by_degree):
            ranks.append(m.action_matrix(e, d).rank())
    return (m.algebra, tuple(sorted(m.dims().items())), tuple(ranks))


def iso_check(m: GradedModule, n: GradedModule, seed: int = 0, bounds=DEFAULT) -> ModuleMap | None:
    """An explicit isomorphism m -> n, or None when none exists.

    Candidates are drawn from the space of module maps: a seeded random
    sample first, then exhaustive enumeration when that space is small
    enough.  Raises IsoSearchInconclusive rather than guessing when it is not.
    """
    if m.algebra != n.algebra:
        raise ValueError("modules over different algebras")
    if m.dims() != n.dims():
        return None
    if m.dim == 0:
        return ModuleMap(m, n, ())
    if invariants(m) != invariants(n):
        return None
    basis = hom_basis(m, n)
    if not basis:
        return None
    if m.names == n.names and m.degrees == n.degrees and m.actions == n.actions:
        return identity_map(m)
    rng = random.Random(seed)
    dim = len(basis)

    def combo(mask: int) -> tuple[int, ...]:
        images = [0] * m.dim
        for b in bits_of(mask):
            for i, v in enumerate(basis[b]):
                images[i] ^= v
        return tuple(images)

    for mask in [(1 << dim) - 1] + [1 << b for b in range(dim)]:
        images = combo(mask)
        if _invertible(m, n, images):
            return ModuleMap(m, n, images)
    for _ in range(bounds.iso_random_tries):
        images = combo(rng.getrandbits(dim))
        if _invertible(m, n, images):
            return ModuleMap(m, n, images)
    if dim > bounds.iso_exhaustive_dim:
        raise IsoSearchInconclusive(f"Hom space of dimension {dim} too large to exhaust")
    images = [0] * m.dim
    prev = 0
    for step in range(1, 1 << dim):
        gray = step ^ (step >> 1)
        flip = (gray ^ prev).bit_length() - 1
        prev = gray
        for i, v in enumerate(basis[flip]):
            images[i] ^= v
        if _invertible(m, n, images):
            return ModuleMap(m, n, tuple(images))
    return None


# ---------------------------------------------------------- free summands


class Splitting(NamedTuple):
    shifts: list[int]
    remainder: GradedModule
    witness: ModuleMap  # free_module(shifts) ⊕ remainder -> m


def split_free_summands(m: GradedModule) -> Splitting:
    """Split off free A(1) summands, lowest degree first.

    A vector x with top·x != 0 (top = nonzero element of A(1) in degree 6)
    generates a free summand.  Picking a functional lam with lam(top·x) = 1,
    the module map determined through the Frobenius pairing of A(1) has
    kernel {y : lam(a·y) = 0 for all a in A(1)}, which is the complement.
    """
    if m.algebra != "A(1)":
        raise ValueError("free summands are split over A(1)")
    top = a1_top()
    basis = a1_basis()
    # current complement, per degree, as vectors in m's coordinates
    comp = {d: [1 << i for i in ix] for d, ix in m._by_degree.items()}
    shifts, gens = [], []
    while True:
        found = None
        for d in sorted(comp):
            for v in comp[d]:
                if m.act(top, v):
                    found = (d, v)
                    break
            if found:
                break
        if found is None:
            break
        d, x = found
        tx = m.act(top, x)
        lam = tx & -tx  # coordinate functional at the lowest set bit
        shifts.append(d)
        gens.append(x)
        new = {}
        for e, vecs in comp.items():
            conds = [b for b in basis if b.degree == d + 6 - e]
            if not conds or not vecs:
                new[e] = list(vecs)
                continue
            # v in span(vecs) with lam(b v) = 0 for every b of the right degree
            rows = []
            for c, v in enumerate(vecs):
                r = 0
                for t, b in enumerate(conds):
                    if m.act(b, v) & lam:
                        r |= 1 << t
                rows.append(r)
            kept = []
            mat = F2Matrix(len(conds), len(vecs), tuple(_transpose(rows, len(conds))))
            for kv in kernel_basis(mat):
                w = 0
                for c in bits_of(kv.bits):
                    w ^= vecs[c]
                kept.append(w)
            new[e] = kept
        comp = new
    remainder, rem_vectors = _submodule(m, comp)
    free = free_module("A(1)", shifts)
    total = direct_sum(free, remainder) if (free.dim and remainder.dim) else (free if free.dim else remainder)
    images = []
    for c, x in enumerate(gens):
        for b in basis:
            images.append(m.act(b, x))
    images.extend(rem_vectors)
    witness = ModuleMap(total, m, tuple(images))
    return Splitting(shifts, remainder, witness)


def _transpose(rows: Sequence[int], ncols: int) -> list[int]:
    cols = [0] * ncols
    for i, r in enumerate(rows):
        for j in bits_of(r):
            cols[j] |= 1 << i
    return cols


def _submodule(m: GradedModule, vectors: dict[int, list[int]]) -> tuple[GradedModule, list[int]]:
    """Module structure on the span of the given per-degree vectors (assumed closed)."""
    names, degrees, vecs = [], [], []
    coords = {}
    for d in sorted(vectors):
        # rref so each vector is named after its leading basis element
        rows, pivots = rref_rows(vectors[d], m.dim)
        ech = Echelon(track=True)
        for r, p in zip(rows, pivots):
            ech.add(r)
            names.append(m.names[p])
            degrees.append(d)
            vecs.append(r)
        coords[d] = (ech, len(vecs) - len(rows))
    acts = {}
    for k in m.generator_degrees():
        images = []
        for v, d in zip(vecs, degrees):
            img = m.act_gen(k, v)
            if not img:
                images.append(0)
                continue
            if d + k not in coords:
                raise ValueError("vectors do not span a submodule")
            ech, off = coords[d + k]
            tag = ech.coordinates(img)
            if tag is None:
                raise ValueError("vectors do not span a submodule")
            images.append(tag << off)
        acts[k] = images
    return GradedModule(m.algebra, tuple(names), tuple(degrees), acts), vecs


def top_action_nonzero(m: GradedModule, v: int) -> bool:
    return m.act(a1_top(), v) != 0


# -------------------------------------------------------------- file format


def _action_key(k: int) -> str:
    return f"Sq{k}"


def to_json(m: GradedModule) -> str:
    """Canonical text form, one basis element or action entry per line."""
    dump = lambda x: json.dumps(x, ensure_ascii=False)
    lines = ["{", f'  "algebra": {dump(m.algebra)},', '  "basis": [']
    basis = [f'    {{"name": {dump(nm)}, "degree": {d}}}' for nm, d in zip(m.names, m.degrees)]
    if basis:
        lines.append(",\n".join(basis))
    lines.append("  ],")
    blocks = []
    for k in sorted(m.actions):
        entries = [f"      [{dump(m.names[i])}, {dump(m.format_vector(v))}]" for i, v in enumerate(m.actions[k]) if v]
        blocks.append(f'    {dump(_action_key(k))}: [\n' + ",\n".join(entries) + "\n    ]")
    if blocks:
        lines.append('  "actions": {')
        lines.append(",\n".join(blocks))
        lines.append("  }")
    else:
        lines.append('  "actions": {}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _position(text: str, needle: str) -> tuple[int, int]:
    idx = text.find(needle)
    if idx < 0:
        return 1, 1
    line = text.count("\n", 0, idx) + 1
    col = idx - (text.rfind("\n", 0, idx) + 1) + 1
    return line, col


def from_json(text: str) -> GradedModule:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("module file must hold a JSON object")
    for key in ("algebra", "basis"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    tag = doc["algebra"]
    if tag not in TAGS:
        raise ParseError(f"unknown algebra {tag!r}", *_position(text, json.dumps(tag)))
    names, degrees = [], []
    for entry in doc["basis"]:
        try:
            names.append(str(entry["name"]))
            degrees.append(int(entry["degree"]))
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"bad basis entry {entry!r}", *_position(text, json.dumps(entry.get("name") if isinstance(entry, dict) else entry))) from None
    pos = {nm: i for i, nm in enumerate(names)}
    acts = {}
    for key, entries in doc.get("actions", {}).items():
        if not (isinstance(key, str) and key.startswith("Sq") and key[2:].isdigit()):
            raise ParseError(f"bad action key {key!r}", *_position(text, json.dumps(key)))
        k = int(key[2:])
        images = [0] * len(names)
        for entry in entries:
            if not (isinstance(entry, list) and len(entry) == 2):
                raise ParseError(f"bad action entry {entry!r}", *_position(text, key))
            src, expr = entry
            if src not in pos:
                raise ParseError(f"unknown basis element {src!r}", *_position(text, json.dumps(src)))
            v = 0
            expr = str(expr).strip()
            if expr != "0":
                for term in expr.split("+"):
                    term = term.strip()
                    if term not in pos:
                        raise ParseError(f"unknown basis element {term!r}", *_position(text, expr))
                    v ^= 1 << pos[term]
            images[pos[src]] ^= v
        acts[k] = images
    try:
        return GradedModule(tag, tuple(names), tuple(degrees), acts)
    except ModuleFormatError as e:
        raise ParseError(str(e)) from None
