"""Independent oracles used by the test suite.

Nothing here imports the code paths it is used to check: the polynomial
action knows only the Cartan formula and Sq^k x^n = C(n, k) x^(n+k); the
resolution oracle works with numpy arrays and its own row reduction.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import comb

import numpy as np

NVARS = 4


@lru_cache(maxsize=None)
def sq_monomial(k: int, expo: tuple[int, ...]) -> frozenset:
    """Sq^k of x1^e1 ... x4^e4 in F2[x1, ..., x4]."""
    out: set = set()
    ranges = [range(min(e, k) + 1) for e in expo]
    for ks in product(*ranges):
        if sum(ks) != k:
            continue
        if all(comb(e, j) % 2 for e, j in zip(expo, ks)):
            out ^= {tuple(e + j for e, j in zip(expo, ks))}
    return frozenset(out)


def sq_poly(k: int, poly: frozenset) -> frozenset:
    out: set = set()
    for m in poly:
        out ^= sq_monomial(k, m)
    return frozenset(out)


def apply_word(word, poly: frozenset) -> frozenset:
    """Apply Sq^r1 ... Sq^rk to ``poly`` one square at a time, rightmost first."""
    for r in reversed(word):
        poly = sq_poly(r, poly)
        if not poly:
            break
    return poly


def apply_sum(words, poly: frozenset) -> frozenset:
    out: set = set()
    for w in words:
        out ^= apply_word(w, poly)
    return frozenset(out)


# Monomials on which the action of A is faithful through degree 12; the test
# suite re-checks this by a rank computation.
DETECTORS = (
    frozenset({(1, 1, 1, 1)}),
    frozenset({(3, 1, 1, 1)}),
    frozenset({(3, 3, 1, 1)}),
    frozenset({(7, 3, 1, 0)}),
    frozenset({(7, 3, 1, 1)}),
)


# ------------------------------------------------------------------------
# Dense resolution oracle over A(1).
#
# A(1) is rebuilt here from words in Sq1, Sq2 acting on F2[x1..x4], so the
# oracle shares no code with the package: its basis elements are words, and
# products are compared through their action on polynomials.


def _word_signature(word) -> tuple:
    return tuple(apply_word(word, d) for d in DETECTORS)


@lru_cache(maxsize=None)
def a1_words():
    """Words in Sq1, Sq2 forming a basis of A(1), grouped by degree."""
    by_deg: dict[int, list] = {0: [()]}
    sigs: dict[int, list] = {0: [_word_signature(())]}
    n = 0
    while True:
        n += 1
        found = []
        found_sigs = []
        for g in (1, 2):
            for w in by_deg.get(n - g, []):
                cand = (g,) + w
                sig = _word_signature(cand)
                if not any(s for s in sig):
                    continue
                if _independent(found_sigs + [sig]):
                    found.append(cand)
                    found_sigs.append(sig)
        if not found:
            break
        by_deg[n] = found
        sigs[n] = found_sigs
    return by_deg


def _sig_vector(sigs, universe):
    rows = []
    for sig in sigs:
        row = np.zeros(len(universe), dtype=np.uint8)
        for slot, poly in enumerate(sig):
            for m in poly:
                row[universe[(slot, m)]] ^= 1
        rows.append(row)
    return np.array(rows, dtype=np.uint8)


def _universe(sigs):
    keys = sorted({(slot, m) for sig in sigs for slot, poly in enumerate(sig) for m in poly})
    return {k: i for i, k in enumerate(keys)}


def np_rank(mat: np.ndarray) -> int:
    """Rank over GF(2) of a 0/1 numpy array by plain Gaussian elimination."""
    a = (mat.copy() % 2).astype(np.uint8)
    if a.size == 0:
        return 0
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        nz = np.nonzero(a[r:, c])[0]
        if len(nz) == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        mask = a[:, c].astype(bool)
        mask[r] = False
        a[mask] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def np_nullspace(mat: np.ndarray) -> np.ndarray:
    """Basis (as rows) of {v : mat @ v = 0 mod 2}."""
    a = (mat.copy() % 2).astype(np.uint8)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if len(nz) == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        mask = a[:, c].astype(bool)
        mask[r] = False
        a[mask] ^= a[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for i, p in enumerate(pivots):
            if a[i, f]:
                v[p] = 1
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), cols)


def _independent(sigs) -> bool:
    uni = _universe(sigs)
    return np_rank(_sig_vector(sigs, uni)) == len(sigs)


def _reduce_against(rows: np.ndarray, target: np.ndarray):
    """Coefficients c with c @ rows = target over GF(2), or None."""
    n = rows.shape[0]
    aug = np.concatenate([rows.T, target.reshape(-1, 1)], axis=1) % 2
    sol = np_nullspace(aug.astype(np.uint8))
    for v in sol:
        if v[n]:
            return v[:n]
    return None


@lru_cache(maxsize=None)
def a1_table():
    """Flattened word basis, degrees, and the product table of A(1)."""
    by_deg = a1_words()
    words = [w for d in sorted(by_deg) for w in by_deg[d]]
    degs = [len_deg(w) for w in words]
    mult = {}
    for i, u in enumerate(words):
        for j, w in enumerate(words):
            prod = u + w
            d = degs[i] + degs[j]
            idx = [k for k, x in enumerate(words) if degs[k] == d]
            coeff = np.zeros(len(words), dtype=np.uint8)
            sig = _word_signature(prod)
            if idx and any(sig):
                sigs = [_word_signature(words[k]) for k in idx] + [sig]
                uni = _universe(sigs)
                mat = _sig_vector(sigs, uni)
                c = _reduce_against(mat[:-1], mat[-1])
                assert c is not None
                for k, x in zip(idx, c):
                    coeff[k] = x
            mult[(i, j)] = coeff
    return words, degs, mult


def len_deg(word) -> int:
    return sum(word)


class DenseModule:
    """A finite graded vector space with Sq1 and Sq2 given as numpy matrices.

    ``sq[k][t]`` maps degree t to degree t + k, acting on column vectors.
    """

    def __init__(self, dims: dict, sq: dict):
        self.dims = dims
        self.sq = sq

    def apply(self, word, t: int, v: np.ndarray) -> np.ndarray:
        for r in reversed(word):
            if self.dims.get(t + r, 0) == 0:
                return np.zeros(0, dtype=np.uint8)
            v = (self.sq[r][t] @ v) % 2
            t += r
        return v.astype(np.uint8)


def dense_from_tables(names, degrees, actions) -> DenseModule:
    """Build a DenseModule from raw basis data and bitmask action tables."""
    dims: dict = {}
    slot = []
    for d in degrees:
        slot.append(dims.get(d, 0))
        dims[d] = dims.get(d, 0) + 1
    sq = {1: {}, 2: {}}
    for k in (1, 2):
        for t in dims:
            sq[k][t] = np.zeros((dims.get(t + k, 0), dims[t]), dtype=np.uint8)
        for i, img in enumerate(actions.get(k, [0] * len(names))):
            j = 0
            while img:
                if img & 1:
                    sq[k][degrees[i]][slot[j], slot[i]] ^= 1
                img >>= 1
                j += 1
    return DenseModule(dims, sq)


def dense_resolution(mod: DenseModule, s_max: int, t_max: int):
    """Ext dims over A(1) by resolving with full kernels at every stage.

    Returns (ext, free_dims, kernel_dims) where ext[(s, t)] counts stage-s
    generators, free_dims[(s, t)] = dim F_s in degree t and kernel_dims[(s, t)]
    = dim ker(F_s -> F_(s-1)) in degree t.
    """
    words, degs, mult = a1_table()
    one = words.index(())
    sq_idx = {1: words.index((1,)), 2: words.index((2,))}
    lo = min(mod.dims) if mod.dims else 0
    ts = range(lo, t_max + 1)

    # current target V (the module or the previous free module) and the kernel
    # K inside it, degree by degree
    def target_dim(t):
        return cur_dims.get(t, 0)

    cur_dims = {t: mod.dims.get(t, 0) for t in ts}

    def mod_act(k, t, v):
        if not cur_dims.get(t + k, 0):
            return np.zeros(0, dtype=np.uint8)
        return (mod.sq[k][t] @ v) % 2

    act = mod_act
    kernel = {t: np.eye(cur_dims[t], dtype=np.uint8) for t in ts}
    ext: dict = {}
    free_dims: dict = {}
    kernel_dims: dict = {}
    for s in range(s_max + 1):
        gens = []  # (degree, vector in target)
        for t in ts:
            K = kernel[t]
            if K.shape[0] == 0:
                continue
            dec = []
            for k in (1, 2):
                for row in kernel.get(t - k, np.zeros((0, 0), dtype=np.uint8)):
                    img = act(k, t - k, row)
                    if img.size:
                        dec.append(img)
            dec_rank = np_rank(np.array(dec)) if dec else 0
            basis, rank = list(dec), dec_rank
            for row in K:
                r = np_rank(np.array(basis + [row]))
                if r > rank:
                    basis.append(row)
                    gens.append((t, row))
                    rank = r
            n_new = rank - dec_rank
            if n_new:
                ext[(s, t)] = n_new
        # free module on gens: basis (g, j) in degree deg g + degs[j]
        fpos = {t: [] for t in ts}
        for g, (dg, _) in enumerate(gens):
            for j, dj in enumerate(degs):
                if dg + dj in fpos:
                    fpos[dg + dj].append((g, j))
        for t in ts:
            free_dims[(s, t)] = len(fpos[t])

        def d_of(g, j, gens=gens, act=act):
            dg, v = gens[g]
            t = dg
            for r in reversed(words[j]):
                v = act(r, t, v)
                t += r
                if v.size == 0:
                    return None
            return v

        new_kernel = {}
        for t in ts:
            cols = []
            for (g, j) in fpos[t]:
                img = d_of(g, j)
                cols.append(img if img is not None else np.zeros(target_dim(t), dtype=np.uint8))
            if not cols:
                new_kernel[t] = np.zeros((0, 0), dtype=np.uint8)
            elif target_dim(t) == 0:
                new_kernel[t] = np.eye(len(cols), dtype=np.uint8)
            else:
                new_kernel[t] = np_nullspace(np.array(cols).T)
            kernel_dims[(s, t)] = new_kernel[t].shape[0]

        def free_act(k, t, v, fpos=fpos):
            src = fpos[t]
            tgt = {p: i for i, p in enumerate(fpos.get(t + k, []))}
            out = np.zeros(len(tgt), dtype=np.uint8)
            if not tgt:
                return np.zeros(0, dtype=np.uint8)
            for i, (g, j) in enumerate(src):
                if v[i]:
                    coeff = mult[(sq_idx[k], j)]
                    for m in np.nonzero(coeff)[0]:
                        out[tgt[(g, m)]] ^= 1
            return out

        cur_dims = {t: len(fpos[t]) for t in ts}
        act = free_act
        kernel = new_kernel
        assert one == 0
    return ext, free_dims, kernel_dims
