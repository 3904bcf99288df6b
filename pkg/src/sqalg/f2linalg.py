"""Dense linear algebra over GF(2) with rows packed into Python ints.

Bit ``j`` of a row is the entry in column ``j``.  Pivoting is deterministic:
first nonzero column, then first row at or below the current one holding it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


def bits_of(v: int) -> list[int]:
    """Indices of the set bits of ``v`` in increasing order."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def popcount(v: int) -> int:
    return bin(v).count("1")


def apply_rows(images: Sequence[int], v: int) -> int:
    """Apply a linear map given by the images of the standard basis vectors."""
    out = 0
    while v:
        low = v & -v
        out ^= images[low.bit_length() - 1]
        v ^= low
    return out


def rref_rows(rows: Iterable[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form of packed rows; returns (nonzero rows, pivots)."""
    work = [r for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        bit = 1 << col
        piv = None
        for i in range(r, len(work)):
            if work[i] & bit:
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        prow = work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= prow
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def rank_rows(rows: Iterable[int]) -> int:
    ech = Echelon()
    return sum(1 for v in rows if ech.add(v))


class Echelon:
    """Incrementally grown echelon basis of a subspace of GF(2)^n.

    Each stored row is keyed by its lowest set bit and has no set bits below
    it.  When ``track`` is on, every row carries a mask recording which of the
    added vectors (in insertion order) it is a combination of, so membership
    tests can also return coordinates.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self._rows: dict[int, int] = {}
        self._tags: dict[int, int] = {}
        self._order: list[int] = []
        self._count = 0

    def __len__(self) -> int:
        return len(self._rows)

    def _reduce(self, v: int, tag: int = 0) -> tuple[int, int]:
        for p in self._order:
            if v >> p & 1:
                v ^= self._rows[p]
                if self.track:
                    tag ^= self._tags[p]
        return v, tag

    def reduce(self, v: int) -> int:
        return self._reduce(v)[0]

    def contains(self, v: int) -> bool:
        return self._reduce(v)[0] == 0

    def add(self, v: int) -> bool:
        """Add ``v``; returns True iff it was independent of the current span."""
        tag = 1 << self._count if self.track else 0
        self._count += 1
        v, tag = self._reduce(v, tag)
        if not v:
            return False
        p = (v & -v).bit_length() - 1
        self._rows[p] = v
        if self.track:
            self._tags[p] = tag
        # keep pivots ascending so one pass of _reduce clears every pivot bit
        lo, hi = 0, len(self._order)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._order[mid] < p:
                lo = mid + 1
            else:
                hi = mid
        self._order.insert(lo, p)
        return True

    def coordinates(self, v: int) -> int | None:
        """Mask of added vectors summing to ``v``, or None when ``v`` is outside the span."""
        if not self.track:
            raise ValueError("Echelon was built without tracking")
        rest, tag = self._reduce(v)
        if rest:
            return None
        return tag


@dataclass(frozen=True)
class F2Vector:
    length: int
    bits: int = 0

    def __post_init__(self):
        if self.bits >> self.length:
            raise ValueError("bits set beyond vector length")

    @classmethod
    def from_list(cls, entries: Sequence[int]) -> F2Vector:
        bits = 0
        for i, e in enumerate(entries):
            if e & 1:
                bits |= 1 << i
        return cls(len(entries), bits)

    def to_list(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.length)]

    def __add__(self, other: F2Vector) -> F2Vector:
        if other.length != self.length:
            raise ValueError("length mismatch")
        return F2Vector(self.length, self.bits ^ other.bits)

    def __getitem__(self, i: int) -> int:
        return (self.bits >> i) & 1

    def is_zero(self) -> bool:
        return self.bits == 0


@dataclass(frozen=True)
class F2Matrix:
    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise ValueError("row count mismatch")
        for r in self.rows:
            if r >> self.ncols:
                raise ValueError("row has bits beyond ncols")

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]], ncols: int | None = None) -> F2Matrix:
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        rows = []
        for row in entries:
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            rows.append(F2Vector.from_list(row).bits)
        return cls(len(rows), ncols, tuple(rows))

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> F2Matrix:
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> F2Matrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def transpose(self) -> F2Matrix:
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            for j in bits_of(r):
                cols[j] |= 1 << i
        return F2Matrix(self.ncols, self.nrows, tuple(cols))

    def matvec(self, v: F2Vector) -> F2Vector:
        if v.length != self.ncols:
            raise ValueError("dimension mismatch")
        out = 0
        for i, r in enumerate(self.rows):
            if popcount(r & v.bits) & 1:
                out |= 1 << i
        return F2Vector(self.nrows, out)

    def __matmul__(self, other: F2Matrix) -> F2Matrix:
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        return F2Matrix(self.nrows, other.ncols, tuple(apply_rows(other.rows, r) for r in self.rows))

    def rank(self) -> int:
        return rank_rows(self.rows)


def rref(m: F2Matrix) -> tuple[F2Matrix, tuple[int, ...]]:
    """Reduced row echelon form; zero rows are kept at the bottom."""
    rows, pivots = rref_rows(m.rows, m.ncols)
    rows = rows + [0] * (m.nrows - len(rows))
    return F2Matrix(m.nrows, m.ncols, tuple(rows)), tuple(pivots)


def rank(m: F2Matrix) -> int:
    return m.rank()


def kernel_basis(m: F2Matrix) -> list[F2Vector]:
    """Basis of {v : m v = 0}, one vector per free column, in column order."""
    rows, pivots = rref_rows(m.rows, m.ncols)
    pivset = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pivset:
            continue
        v = 1 << free
        for row, p in zip(rows, pivots):
            if row >> free & 1:
                v |= 1 << p
        basis.append(F2Vector(m.ncols, v))
    return basis


def solve(m: F2Matrix, b: F2Vector) -> F2Vector | None:
    """Some x with m x = b, or None if the system is inconsistent."""
    if b.length != m.nrows:
        raise ValueError(f"right-hand side has length {b.length}, expected {m.nrows}")
    n = m.ncols
    aug = [r | (((b.bits >> i) & 1) << n) for i, r in enumerate(m.rows)]
    rows, pivots = rref_rows(aug, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = 0
    for row, p in zip(rows, pivots):
        if row >> n & 1:
            x |= 1 << p
    return F2Vector(n, x)


def solve_rows(columns: Sequence[int], target: int) -> int | None:
    """Find a mask c with XOR of ``columns[i]`` over set bits of c equal to target."""
    ech = Echelon(track=True)
    for c in columns:
        ech.add(c)
    return ech.coordinates(target)
