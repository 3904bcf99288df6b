"""Named models and the built-in verification suite.

The check functions take the J8 algebra as an argument so that a mutated
copy (see ``mutate``) can be pushed through exactly the same checks.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator

from . import gradmod as G
from .config import DEFAULT, Bounds
from .errors import AlgebraError, IsoSearchInconclusive
from .expr import parse_poly, poly_mul
from .ext import ext_chart
from .spda import (
    PresentedAlgebra,
    algebra_isomorphisms,
    build_algebra,
    dual_sw_by_recurrence,
    dual_sw_classes,
    sw_classes,
    thom_module,
    total_class_product,
    verify_char_identities,
    verify_pd,
    verify_sharp_pd,
    wu_classes,
    wu_classes_via_antipode,
)
from .steenrod import (
    SteenrodElement,
    Sq,
    a1_basis,
    a1_top,
    adem_reduce,
    admissible_basis,
    antipode,
    multiply,
)

# ------------------------------------------------------------------ models

J8_GENERATORS = [("u2", 2), ("u3", 3)]
J8_RELATIONS = ["u2^3 + u3^2", "u2^2*u3"]
J8_SQ = {"u2": {1: "u3", 2: "u2^2"}, "u3": {1: "0", 2: "u2*u3", 3: "u3^2"}}


def model_j8(max_degree: int | None = None) -> PresentedAlgebra:
    """F2[u2, u3]/(u2^3 + u3^2, u2^2 u3) with Sq1 u2 = u3, a PD algebra of degree 8."""
    return build_algebra(J8_GENERATORS, J8_RELATIONS, J8_SQ, 8, max_degree)


def model_rp(n: int = 2) -> PresentedAlgebra:
    """F2[x]/(x^(n+1)), deg x = 1."""
    return build_algebra([("x", 1)], [f"x^{n + 1}"], {"x": {1: "x^2"}}, n)


def model_bso3(max_degree: int = 10) -> PresentedAlgebra:
    """F2[w2, w3] truncated at ``max_degree``, squares from the Wu formula."""
    return build_algebra(
        [("w2", 2), ("w3", 3)],
        [],
        {"w2": {1: "w3", 2: "w2^2"}, "w3": {1: "0", 2: "w2*w3", 3: "w3^2"}},
        None,
        max_degree,
    )


def model_kz3() -> PresentedAlgebra:
    """H*(K(Z/2, 3)) through degree 6: z3 and the classes Sq1 z3, Sq2 z3, Sq2 Sq1 z3."""
    return build_algebra(
        [("z3", 3), ("a4", 4), ("a5", 5), ("a6", 6)],
        [],
        {
            "z3": {1: "a4", 2: "a5", 3: "z3^2"},
            "a4": {1: "0", 2: "a6"},
            "a5": {1: "z3^2"},
        },
        None,
        6,
    )


def model_thom(P: PresentedAlgebra | None = None) -> G.GradedModule:
    """Thom module of the normal bundle of J8, over A."""
    P = model_j8() if P is None else P
    return thom_module(P, dual_sw_classes(P).dual_sw)


def model_thom_diagram() -> G.GradedModule:
    """The same module over A(1), entered edge by edge."""
    basis = [("u", 0), ("u2*u", 2), ("u3*u", 3), ("u2^2*u", 4), ("u2*u3*u", 5), ("u2^3*u", 6), ("u2^4*u", 8)]
    return G.module_from_lists(
        "A(1)",
        basis,
        {
            1: {"u2*u": ["u3*u"], "u2*u3*u": ["u2^3*u"]},
            2: {"u2*u": ["u2^2*u"], "u3*u": ["u2*u3*u"], "u2^2*u": ["u2^3*u"]},
        },
    )


def decomposition_module(P: PresentedAlgebra | None = None, joker: G.GradedModule | None = None) -> G.GradedModule:
    """H*(Sigma^2 J) ⊗ H*(DX) for X with cohomology P, over A(1).

    H*(DX) is the dual of the reduced cohomology of X.
    """
    P = model_j8() if P is None else P
    J = G.joker() if joker is None else joker
    X = P.as_module("A(1)", reduced=True)
    return G.tensor(G.shift(J, 2), G.dualize(X))


def decomposition_expected() -> G.GradedModule:
    J = G.joker()
    return G.direct_sum(G.tensor(J, G.shift(J, -4)), G.shift(J, -6))


# ------------------------------------------------------------------ reports


@dataclass
class Check:
    name: str
    topic: str
    passed: bool
    witness: str = ""


@dataclass
class PaperSuiteReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, topic: str, passed: bool, witness: str = "") -> None:
        self.checks.append(Check(name, topic, bool(passed), witness))

    def extend(self, other: PaperSuiteReport) -> None:
        self.checks.extend(other.checks)

    def format(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.witness}" for c in self.checks]
        lines.append(f"{sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _guard(report: PaperSuiteReport, name: str, topic: str, fn: Callable[[], tuple[bool, str]]) -> bool:
    try:
        ok, witness = fn()
    except (AlgebraError, IsoSearchInconclusive, ValueError, KeyError) as e:
        ok, witness = False, f"{type(e).__name__}: {e}"
    report.add(name, topic, ok, witness)
    return ok


# -------------------------------------------------------------- criteria


def check_adem(report: PaperSuiteReport | None = None, max_degree: int = 20, max_length: int = 4) -> PaperSuiteReport:
    report = PaperSuiteReport() if report is None else report
    topic = "Adem relations"

    def sq1sq2():
        got = adem_reduce((1, 2))
        return got == Sq(3), f"Sq1 Sq2 = {got}"

    def confluence():
        n = 0
        for word in _words(max_degree, max_length):
            n += 1
            left, right = adem_reduce(word, "left"), adem_reduce(word, "right")
            if left != right:
                return False, f"{word}: {left} vs {right}"
        return True, f"{n} words agree under both reduction orders"

    _guard(report, "adem.sq1sq2", topic, sq1sq2)
    _guard(report, "adem.confluence", topic, confluence)
    return report


def _words(max_degree: int, max_length: int) -> Iterator[tuple[int, ...]]:
    def rec(prefix, budget):
        if prefix:
            yield prefix
        if len(prefix) == max_length:
            return
        for r in range(1, budget + 1):
            yield from rec(prefix + (r,), budget - r)

    yield from rec((), max_degree)


def check_antipode(report: PaperSuiteReport | None = None, k_max: int = 20, involution_degree: int = 16) -> PaperSuiteReport:
    report = PaperSuiteReport() if report is None else report
    topic = "antipode"

    def recursion():
        for k in range(1, k_max + 1):
            acc = SteenrodElement.zero()
            for r in range(k + 1):
                acc = acc + multiply(Sq(k - r), antipode(Sq(r)))
            if not acc.is_zero():
                return False, f"k = {k}: sum is {acc}"
        return True, f"sum_r Sq(k-r) chi(Sq r) = 0 for 1 <= k <= {k_max}"

    def involution():
        count = 0
        for n in range(involution_degree + 1):
            for m in admissible_basis(n):
                x = SteenrodElement(frozenset((m,)))
                if antipode(antipode(x)) != x:
                    return False, f"chi^2 moves {x}"
                count += 1
        return True, f"chi^2 = id on {count} admissible monomials"

    _guard(report, "antipode.recursion", topic, recursion)
    _guard(report, "antipode.involution", topic, involution)
    return report


def joker_diagram() -> G.GradedModule:
    """The five-cell Joker drawn in degrees 2..6."""
    basis = [(f"c{d}", d) for d in range(2, 7)]
    return G.module_from_lists(
        "A(1)",
        basis,
        {1: {"c2": ["c3"], "c5": ["c6"]}, 2: {"c2": ["c4"], "c3": ["c5"], "c4": ["c6"]}},
    )


def _edges(m: G.GradedModule) -> set:
    return {(k, m.degrees[i], m.degrees[j]) for k, images in m.actions.items() for i, v in enumerate(images) for j in G.bits_of(v)}


def check_a1(report: PaperSuiteReport | None = None) -> PaperSuiteReport:
    report = PaperSuiteReport() if report is None else report
    topic = "A(1) and the Joker"

    def a1():
        basis = a1_basis()
        degs = [b.degree for b in basis]
        ok = len(basis) == 8 and max(degs) == 6 and degs.count(6) == 1 and a1_top().degree == 6
        return ok, f"dim {len(basis)}, degrees {degs}"

    def joker():
        J = G.joker()
        dims = [J.dims().get(d, 0) for d in range(5)]
        diagram = G.shift(joker_diagram(), -2)
        same = _edges(J) == _edges(diagram) and G.iso_check(J, diagram) is not None
        return dims == [1] * 5 and same and not G.check_axioms(J), f"dims {dims}, edges {sorted(_edges(J))}"

    _guard(report, "a1.basis", topic, a1)
    _guard(report, "a1.joker", topic, joker)
    return report


J8_EXPECTED = {
    "wu": {4: "u2^2"},
    "sw": {4: "u2^2", 6: "u2^3", 8: "u2^4"},
    "dual_sw": {4: "u2^2", 6: "u2^3", 8: "0"},
}


def _table_matches(P: PresentedAlgebra, seq, expected: dict) -> tuple[bool, str]:
    bad = []
    for k, x in enumerate(seq):
        want = P.one() if k == 0 else P.parse(expected.get(k, "0"), k)
        if x != want:
            bad.append(f"{k}: {x} (expected {want})")
    return not bad, "; ".join(bad) or ", ".join(f"{k}: {P.format(seq[k])}" for k in range(len(seq)) if not seq[k].is_zero())


def check_j8(P: PresentedAlgebra | None = None, report: PaperSuiteReport | None = None) -> PaperSuiteReport:
    P = model_j8() if P is None else P
    report = PaperSuiteReport() if report is None else report
    topic = "J8 characteristic classes"
    _guard(report, "j8.dims", topic, lambda: (P.dims(8) == [1, 0, 1, 1, 1, 1, 1, 0, 1], f"dims {P.dims(8)}"))

    def pd():
        r = verify_pd(P, 8)
        return r.ok, "; ".join(r.failures) or "pairings are perfect"

    def sharp():
        r = verify_sharp_pd(P, 8)
        return r.ok, "; ".join(r.failures[:3]) or "cap product respects the squares"

    _guard(report, "j8.pd", topic, pd)
    if not _guard(report, "j8.sharp_pd", topic, sharp):
        return report
    state = {}

    def wu():
        t = wu_classes(P)
        state["wu"] = t
        ok, w = _table_matches(P, t.wu, J8_EXPECTED["wu"])
        alt = wu_classes_via_antipode(P)
        return ok and alt == t.wu, w + ("" if alt == t.wu else "; antipode route disagrees")

    def sw():
        t = sw_classes(P, state["wu"])
        state["sw"] = t
        return _table_matches(P, t.sw, J8_EXPECTED["sw"])

    def dual():
        t = dual_sw_classes(P, state["sw"])
        state["full"] = t
        ok, w = _table_matches(P, t.dual_sw, J8_EXPECTED["dual_sw"])
        rec = dual_sw_by_recurrence(P, t.sw)
        return ok and rec == t.dual_sw, w + ("" if rec == t.dual_sw else "; recurrence disagrees")

    def identities():
        r = verify_char_identities(state["full"], 8)
        return r.ok, "; ".join(r.failures) or "v_k = 0 above 4, w8 = v4^2, sum w_i wbar_(k-i) = 0"

    for name, fn in (("j8.wu", wu), ("j8.sw", sw), ("j8.dual_sw", dual), ("j8.identities", identities)):
        if not _guard(report, name, topic, fn):
            break
    return report


def check_bso3(report: PaperSuiteReport | None = None) -> PaperSuiteReport:
    report = PaperSuiteReport() if report is None else report
    topic = "BSO(3) ideal"
    B = model_bso3()
    r = B.parse("w2^3 + w3^2")
    for k, want in ((1, "w2^2*w3"), (2, "w2*(w2^3 + w3^2)"), (4, "w2^5")):
        _guard(report, f"bso3.sq{k}", topic, lambda k=k, want=want: (B.sq(k, r) == B.parse(want), f"Sq{k}(w2^3 + w3^2) = {B.sq(k, r)}"))

    def identity():
        names = B.gen_names
        lhs = parse_poly("w2^5", names)
        rhs = poly_mul(parse_poly("w2^2", names), parse_poly("w2^3 + w3^2", names)) ^ poly_mul(
            parse_poly("w3", names), parse_poly("w2^2*w3", names)
        )
        return lhs == rhs, "w2^5 = w2^2(w2^3 + w3^2) + w3(w2^2 w3) in F2[w2, w3]"

    def invariance():
        Q = build_algebra(J8_GENERATORS, J8_RELATIONS, J8_SQ, None, 10, check=False)
        bad = [p for p in Q.problems() if p.kind == "ideal"]
        return not bad, "; ".join(map(str, bad)) or "ideal closed under Sq1..Sq4 through degree 10"

    _guard(report, "bso3.identity", topic, identity)
    _guard(report, "bso3.invariance", topic, invariance)
    return report


def check_thom(P: PresentedAlgebra | None = None, report: PaperSuiteReport | None = None) -> PaperSuiteReport:
    P = model_j8() if P is None else P
    report = PaperSuiteReport() if report is None else report
    topic = "Thom module"
    state = {}

    def build():
        M = model_thom(P)
        state["M"] = M
        bad = G.check_axioms(M)
        return not bad, "; ".join(map(str, bad[:3])) or f"dims {M.dims()}"

    def iso():
        w = G.iso_check(G.restrict(state["M"]), model_thom_diagram())
        return w is not None, "iso over A(1): " + (", ".join(w.describe()) if w else "none")

    def squares():
        M = state["M"]
        u = M.vector("u")
        s4, s8 = M.sq(4, u), M.sq(8, u)
        ok = s4 == M.vector("u2^2*u") and s8 == 0
        return ok, f"Sq4 u = {M.format_vector(s4)}, Sq8 u = {M.format_vector(s8)}"

    if _guard(report, "thom.axioms", topic, build):
        _guard(report, "thom.diagram", topic, iso)
        _guard(report, "thom.squares", topic, squares)
    return report


def check_decomposition(
    P: PresentedAlgebra | None = None,
    report: PaperSuiteReport | None = None,
    bounds: Bounds = DEFAULT,
    joker: G.GradedModule | None = None,
) -> PaperSuiteReport:
    P = model_j8() if P is None else P
    report = PaperSuiteReport() if report is None else report
    topic = "tensor decomposition"
    state = {}

    def derived():
        M = decomposition_module(P, joker)
        state["M"] = M
        w = G.iso_check(M, decomposition_expected(), bounds=bounds)
        return w is not None, f"Sigma^2 J ⊗ D(X) has dims {sorted(M.dims().items())}"

    def split():
        sp = G.split_free_summands(state["M"])
        rem = G.direct_sum(G.f2(), G.shift(G.joker(), -6))
        w = G.iso_check(sp.remainder, rem, bounds=bounds)
        ok = sorted(sp.shifts) == [-4, -3, -2] and w is not None and sp.witness.is_iso()
        return ok, f"free shifts {sorted(sp.shifts)}, remainder dim {sp.remainder.dim}"

    if _guard(report, "decomposition.module", topic, derived):
        _guard(report, "decomposition.split", topic, split)
    return report


JOKER_TOWER = [0, 0] + [1] * 11  # dims(s, s + 6) for s = 0..12, from the dense oracle


def check_ext(report: PaperSuiteReport | None = None, bounds: Bounds = DEFAULT, joker: G.GradedModule | None = None) -> PaperSuiteReport:
    report = PaperSuiteReport() if report is None else report
    topic = "Ext over A(1)"
    s_max, t_max = bounds.s_max, bounds.t_max
    J = G.joker() if joker is None else joker

    def f2_tower():
        d = ext_chart(G.f2(), 10, 16).diagonal(0)
        return d == [1] * 11, f"dims(s, s) = {d}"

    def free():
        c = ext_chart(G.free_module("A(1)", [-4, -2, -3]), s_max, t_max)
        pos = sorted(c.dims)
        return pos == [(0, -4), (0, -3), (0, -2)], f"nonzero at {pos}"

    def joker():
        d = ext_chart(J, s_max, t_max).diagonal(6)
        first = next((s for s, x in enumerate(d) if x), None)
        single = first is not None and all(x == 1 for x in d[first:])
        return d == JOKER_TOWER and single, f"dims(s, s+6) = {d}"

    def combined():
        d = ext_chart(G.direct_sum(G.tensor(J, G.shift(J, -4)), G.shift(J, -6)), s_max, s_max + 6).diagonal(0)
        return d[-1] == 2 and d == [1, 1] + [2] * (s_max - 1), f"E2 diagonal {d}"

    _guard(report, "ext.f2", topic, f2_tower)
    _guard(report, "ext.free", topic, free)
    _guard(report, "ext.joker", topic, joker)
    _guard(report, "ext.combined", topic, combined)
    return report


def check_total_classes(P: PresentedAlgebra | None = None, report: PaperSuiteReport | None = None) -> PaperSuiteReport:
    P = model_j8() if P is None else P
    report = PaperSuiteReport() if report is None else report

    def square():
        got = total_class_product(P, "1 + u2 + u3", "1 + u2 + u3")
        return got == P.parse_total("1 + u2^2 + u3^2"), f"(1 + u2 + u3)^2 = {P.format_total(got)}"

    _guard(report, "total.square", "total classes", square)
    return report


def check_k_invariant(report: PaperSuiteReport | None = None) -> PaperSuiteReport:
    report = PaperSuiteReport() if report is None else report
    topic = "k-invariant"
    K = model_kz3()
    z = K.gen("z3")

    def identity():
        a = adem_reduce((1, 2)) == Sq(3)
        lhs = K.sq(1, K.sq(2, z))
        ok = a and lhs == K.sq(3, z) == z * z
        return ok, f"Sq1 Sq2 z3 = {lhs}, Sq3 z3 = {K.sq(3, z)}"

    def u3sq():
        J = model_j8()
        u3 = J.gen("u3")
        return not (u3 * u3).is_zero(), f"u3^2 = {u3 * u3} in J8"

    _guard(report, "kinv.identity", topic, identity)
    _guard(report, "kinv.u3_squared", topic, u3sq)
    return report


def check_self_iso(report: PaperSuiteReport | None = None) -> PaperSuiteReport:
    report = PaperSuiteReport() if report is None else report
    J = model_j8()
    found = algebra_isomorphisms(J, model_j8(), limit=None)
    report.add("j8.automorphisms", "algebra isomorphism search", bool(found), f"{len(found)} automorphism(s)")
    return report


# -------------------------------------------------------------- mutations


def j8_action_entries(P: PresentedAlgebra | None = None, top: int = 8) -> list[tuple[int, int, int, int]]:
    """All (k, n, source index, target index) slots of the action table of J8."""
    P = model_j8() if P is None else P
    out = []
    for n in range(top + 1):
        for k in range(1, top - n + 1):
            for i in range(P.dim(n)):
                for j in range(P.dim(n + k)):
                    out.append((k, n, i, j))
    return out


def mutate(P: PresentedAlgebra, k: int, n: int, i: int, j: int) -> PresentedAlgebra:
    images = list(P.sq_images(k, n))
    images[i] ^= 1 << j
    return P.with_action(k, n, images)


def mutation_sensitive_checks(P: PresentedAlgebra) -> dict[str, bool]:
    """Pass/fail of the J8, Thom and decomposition bundles for one algebra."""
    return {
        "j8": check_j8(P).passed,
        "thom": check_thom(P).passed,
        "decomposition": check_decomposition(P).passed,
    }


def check_mutations(report: PaperSuiteReport | None = None) -> PaperSuiteReport:
    report = PaperSuiteReport() if report is None else report
    P = model_j8()
    survivors = []
    entries = j8_action_entries(P)
    for e in entries:
        if all(mutation_sensitive_checks(mutate(P, *e)).values()):
            survivors.append(e)
    report.add(
        "mutation.j8",
        "mutation sensitivity",
        not survivors,
        f"{len(entries) - len(survivors)}/{len(entries)} single-entry mutations detected"
        + (f"; undetected {survivors}" if survivors else ""),
    )
    return report


# ------------------------------------------------------------------ suite


SECTIONS = (
    ("adem", check_adem),
    ("antipode", check_antipode),
    ("a1", check_a1),
    ("j8", check_j8),
    ("bso3", check_bso3),
    ("thom", check_thom),
    ("decomposition", check_decomposition),
    ("ext", check_ext),
    ("total", check_total_classes),
    ("mutation", check_mutations),
    ("kinv", check_k_invariant),
    ("automorphisms", check_self_iso),
)


def paper_suite(only: list[str] | None = None) -> PaperSuiteReport:
    """Run the named sections (all by default); failures are collected, never raised."""
    report = PaperSuiteReport()
    for name, fn in SECTIONS:
        if only is not None and name not in only:
            continue
        report.extend(fn())
    return report
