"""Minimal free resolutions over A(1) and Ext charts.

A free module F_s is stored as a list of generator degrees; basis element
(g, j) = a_j·g, where a_j runs over ``a1_basis()``, lives at bit 8g + j.
Resolutions are built degree by degree: for each internal degree t, and
each stage s in turn, new generators are chosen to span a complement of
the current image inside the kernel of the previous differential.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .config import DEFAULT
from .f2linalg import Echelon, bits_of
from .gradmod import GradedModule, restrict
from .steenrod import a1_basis, a1_coordinates, multiply

A1_DIM = 8
A1_TOP = 6


@lru_cache(maxsize=None)
def _a1_tables() -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    basis = a1_basis()
    degs = tuple(b.degree for b in basis)
    mult = tuple(tuple(a1_coordinates(multiply(a, b)) for b in basis) for a in basis)
    return degs, mult


def a1_degrees() -> tuple[int, ...]:
    return _a1_tables()[0]


class _Free:
    """A free A(1)-module on generators of given degrees."""

    def __init__(self):
        self.gen_degrees: list[int] = []

    def positions(self, t: int) -> list[int]:
        degs = a1_degrees()
        return [A1_DIM * g + j for g, dg in enumerate(self.gen_degrees) for j in range(A1_DIM) if dg + degs[j] == t]

    def act(self, i: int, v: int) -> int:
        mult = _a1_tables()[1][i]
        out = 0
        for p in bits_of(v):
            g, j = divmod(p, A1_DIM)
            for k in bits_of(mult[j]):
                out ^= 1 << (A1_DIM * g + k)
        return out


class _Target:
    """The module being resolved, with the A(1) basis acting by stored matrices."""

    def __init__(self, m: GradedModule):
        self.m = m
        self.images = [tuple(m.act(a, 1 << i) for i in range(m.dim)) for a in a1_basis()]

    def positions(self, t: int) -> list[int]:
        return list(self.m.basis_in_degree(t))

    def act(self, i: int, v: int) -> int:
        out = 0
        for p in bits_of(v):
            out ^= self.images[i][p]
        return out


@dataclass
class ResolutionStage:
    s: int
    gen_degrees: list[int] = field(default_factory=list)
    images: list[int] = field(default_factory=list)  # d(g) in the previous stage (or the module)

    def generators_in(self, t: int) -> int:
        return sum(1 for d in self.gen_degrees if d == t)


class Resolution:
    """A minimal resolution F_s -> ... -> F_0 -> M, through internal degree t_max."""

    def __init__(self, m: GradedModule, s_max: int, t_max: int):
        if m.algebra != "A(1)":
            m = restrict(m)
        self.module = m
        self.s_max = s_max
        self.t_max = t_max
        self.target = _Target(m)
        self.free = [_Free() for _ in range(s_max + 1)]
        self.stages = [ResolutionStage(s) for s in range(s_max + 1)]
        lo = m.lo if m.dim else 0
        for t in range(lo, t_max + 1):
            for s in range(s_max + 1):
                self._step(s, t)

    def codomain(self, s: int):
        return self.target if s == 0 else self.free[s - 1]

    def d(self, s: int, v: int) -> int:
        """The differential F_s -> F_(s-1) (F_(-1) = M) on a packed element."""
        tgt = self.codomain(s)
        images = self.stages[s].images
        out = 0
        for p in bits_of(v):
            g, j = divmod(p, A1_DIM)
            out ^= tgt.act(j, images[g])
        return out

    def kernel(self, s: int, t: int) -> list[int]:
        """Basis of ker(F_s -> F_(s-1)) in degree t, as packed elements of F_s."""
        pos = self.free[s].positions(t)
        return _kernel([(1 << p, self.d(s, 1 << p)) for p in pos])

    def _step(self, s: int, t: int) -> None:
        if s == 0:
            candidates = [1 << p for p in self.target.positions(t)]
        else:
            if self.free[s - 1].gen_degrees and min(self.free[s - 1].gen_degrees) > t:
                return
            if not self.free[s - 1].gen_degrees:
                return
            candidates = self.kernel(s - 1, t)
        if not candidates:
            return
        image = Echelon()
        for p in self.free[s].positions(t):
            image.add(self.d(s, 1 << p))
        stage = self.stages[s]
        for v in candidates:
            if image.add(v):
                stage.gen_degrees.append(t)
                stage.images.append(v)
                self.free[s].gen_degrees.append(t)

    def free_dims(self, s: int, t: int) -> int:
        return len(self.free[s].positions(t))


def _kernel(pairs: Sequence[tuple[int, int]]) -> list[int]:
    """Kernel of a map given as (source vector, image) pairs, in source coordinates."""
    rows: dict[int, tuple[int, int]] = {}
    out = []
    for src, img in pairs:
        while img:
            low = img & -img
            hit = rows.get(low)
            if hit is None:
                break
            img ^= hit[1]
            src ^= hit[0]
        if img:
            rows[img & -img] = (src, img)
        else:
            out.append(src)
    return out


def minimal_resolution(m: GradedModule, s_max: int = DEFAULT.s_max, t_max: int = DEFAULT.t_max) -> list[ResolutionStage]:
    return Resolution(m, s_max, t_max).stages


@dataclass
class ExtChart:
    s_max: int
    t_max: int  # last internal degree reported
    dims: dict = field(default_factory=dict)  # (s, t) -> dimension, zeros omitted

    def __getitem__(self, st: tuple[int, int]) -> int:
        s, t = st
        if s > self.s_max or t > self.t_max:
            raise KeyError(f"({s}, {t}) lies outside the computed range")
        return self.dims.get(st, 0)

    def diagonal(self, offset: int = 0) -> list[int]:
        """dims(s, s + offset) for s = 0..s_max, where in range."""
        return [self[s, s + offset] for s in range(self.s_max + 1) if s + offset <= self.t_max]

    def __add__(self, other: ExtChart) -> ExtChart:
        dims = dict(self.dims)
        for k, v in other.dims.items():
            dims[k] = dims.get(k, 0) + v
        return ExtChart(min(self.s_max, other.s_max), min(self.t_max, other.t_max), dims)


def ext_chart(m: GradedModule, s_max: int = DEFAULT.s_max, t_max: int = DEFAULT.t_max) -> ExtChart:
    """Ext^{s,t}_{A(1)}(m, F2), reported for t <= t_max - 6."""
    res = Resolution(m, s_max, t_max)
    shown = t_max - A1_TOP
    dims: dict[tuple[int, int], int] = {}
    for st in res.stages:
        for t in st.gen_degrees:
            if t <= shown:
                dims[(st.s, t)] = dims.get((st.s, t), 0) + 1
    return ExtChart(s_max, shown, dims)


def e2_diagonal(m: GradedModule, s_max: int = DEFAULT.s_max) -> list[int]:
    """dims(s, s) for 0 <= s <= s_max."""
    return ext_chart(m, s_max, s_max + A1_TOP).diagonal(0)


def is_minimal(res: Resolution) -> bool:
    """No differential has a component 1·g' on a generator g' of the same degree."""
    for st in res.stages[1:]:
        for v in st.images:
            if any(p % A1_DIM == 0 for p in bits_of(v)):
                return False
    return True
