"""The Bockstein refinement of the s-invariant over Z/4Z.

The scan output over Z/4Z is saturated under unit cancellations, so the
entries between generators of equal quantum degree all equal 2.  Handle
slides (filtration-respecting basis changes within a homological degree)
diagonalize each quantum level into elementary summands; the length-1
summands landing in homological degree 0 span the image of the first
differential of the Bockstein, read as classes mod 2.  Intersecting with
the classes extending to filtered cocycles and testing survival in the
low quotient decides whether each refinement gains 2 over the base
invariant; the mirror diagram supplies the other half of the quadruple.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coeff import F2, Z4
from .complex import scan
from .diagram import mirror_pd, orient_and_sign, scan_order
from .sinv import BasedComplex, from_filtered, mod2_reduction, s_from_based


class NotSaturatedError(RuntimeError):
    """A unit entry at equal quantum degree survived the scan."""


@dataclass(frozen=True)
class Sq1Quadruple:
    r_plus: int
    s_plus: int
    r_minus: int
    s_minus: int

    def as_tuple(self):
        return (self.r_plus, self.s_plus, self.r_minus, self.s_minus)


class Z4NormalForm:
    """A Z/4Z based complex in filtered normal form plus its summand data."""

    def __init__(self, based: BasedComplex):
        self.based = based
        self.elementary: dict[int, list[tuple[int, int]]] = {}
        self.slide_log: list[tuple[str, int, int, int]] = []

    @property
    def slides(self):
        return len(self.slide_log)

    def elementary_at(self, q):
        return list(self.elementary.get(q, []))


def _slide_source(D: BasedComplex, s_prime, s0, u):
    """Replace s' by s' + u*s0 (same degree, q(s0) >= q(s'))."""
    ring = D.ring
    assert D.h[s_prime] == D.h[s0] and D.q[s0] >= D.q[s_prime]
    for t, v in list(D.out[s0].items()):
        D.add_to_entry(s_prime, t, ring.mul(u, v))
    for z in list(D.inc[s_prime]):
        D.add_to_entry(z, s0, ring.neg(ring.mul(u, D.out[z][s_prime])))


def _slide_target(D: BasedComplex, t0, t_prime, u):
    """Replace t0 by t0 + u*t' (same degree, q(t') >= q(t0))."""
    ring = D.ring
    assert D.h[t0] == D.h[t_prime] and D.q[t_prime] >= D.q[t0]
    for w, v in list(D.out[t_prime].items()):
        D.add_to_entry(t0, w, ring.mul(u, v))
    for z in list(D.inc[t0]):
        D.add_to_entry(z, t_prime, ring.neg(ring.mul(u, D.out[z][t0])))


def normal_form(D: BasedComplex) -> Z4NormalForm:
    """Bring a saturated Z/4Z complex into filtered normal form.

    Quantum levels are processed from the inside (highest q) outward;
    within a level the 2-entries between equal-q generators are
    diagonalized by handle slides, recording the elementary summands.
    Slides at a level never disturb the internal structure of higher
    levels.
    """
    if D.ring != Z4:
        raise ValueError("normal form runs over Z/4Z")
    for a, row in D.out.items():
        for b, v in row.items():
            if D.q[b] == D.q[a] and D.ring.is_unit(v):
                raise NotSaturatedError(
                    f"unit entry at equal quantum degree {D.q[a]}"
                )
    nf = Z4NormalForm(D)
    levels = sorted({q for q in D.q.values()}, reverse=True)
    for q in levels:
        pairs = []
        for h in sorted(D.degrees()):
            srcs = [g for g in D.gens_at(h) if D.q[g] == q]
            for s0 in srcs:
                t0 = next(
                    (t for t in sorted(D.out[s0]) if D.q[t] == q), None
                )
                if t0 is None:
                    continue
                assert D.out[s0][t0] == 2, "equal-q entry must be 2"
                # clear the pivot row first: afterwards column slides add
                # nothing but the cancelling pivot entry, so finished rows
                # never get repolluted
                for t_prime in sorted(D.out[s0]):
                    if t_prime == t0 or D.q.get(t_prime) != q:
                        continue
                    _slide_target(D, t0, t_prime, 1)
                    nf.slide_log.append(("t", t0, t_prime, 1))
                for s_prime in sorted(D.inc[t0]):
                    if s_prime == s0 or D.q.get(s_prime) != q:
                        continue
                    _slide_source(D, s_prime, s0, 1)
                    nf.slide_log.append(("s", s_prime, s0, 1))
                assert all(
                    D.q[t] != q for t in D.out[s0] if t != t0
                ), "row not cleared"
                assert all(
                    D.q[s] != q for s in D.inc[t0] if s != s0
                ), "column not cleared"
                pairs.append((s0, t0))
        if pairs:
            nf.elementary[q] = pairs
    # integral tensor origin: no elementary chain is longer than 1
    sources = {s for ps in nf.elementary.values() for s, _t in ps}
    targets = {t for ps in nf.elementary.values() for _s, t in ps}
    assert not (sources & targets), "elementary chain of length > 1"
    if __debug__:
        for a, row in D.out.items():
            for b in row:
                assert D.q[b] >= D.q[a], "slide broke the filtration"
    return nf


def sq1_image(nf: Z4NormalForm, q) -> list[int]:
    """Generators of the Bockstein image inside degree 0 at level q.

    These are the targets of length-1 elementary summands ending in
    homological degree 0, read as mod-2 classes.
    """
    return [
        t for (s, t) in nf.elementary_at(q) if nf.based.h[t] == 0
    ]


def _f2_span_solve(vectors, target):
    """Is target in the F2 span of the vectors (sets of generator ids)?"""
    coords = sorted({x for v in vectors for x in v} | set(target))
    idx = {c: i for i, c in enumerate(coords)}

    def top(v):
        return v.bit_length() - 1

    def reduce(cur, pivots):
        while cur:
            hit = next((p for p in pivots if top(p) == top(cur)), None)
            if hit is None:
                return cur
            cur ^= hit
        return cur

    pivots: list[int] = []
    for v in vectors:
        cur = 0
        for x in v:
            cur ^= 1 << idx[x]
        cur = reduce(cur, pivots)
        if cur:
            pivots.append(cur)
    cur = 0
    for x in target:
        cur ^= 1 << idx[x]
    return reduce(cur, pivots) == 0


def intersect_with_p(E: BasedComplex, q, classes) -> list[frozenset]:
    """Span of class combinations extending to filtered cocycles mod 2.

    ``E`` is the mod-2 based complex; a combination c of level-q degree-0
    generators lies in the image of the filtration map exactly when some
    correction h by higher-level degree-0 generators makes c + h a
    cocycle.  Returns a basis of the subspace, each element given by its
    level-q support.
    """
    classes = [int(c) for c in classes]
    if not classes:
        return []
    correctors = [g for g in E.gens_at(0) if E.q[g] > q]
    unknowns = classes + correctors
    k = len(classes)
    n = len(unknowns)
    eq_index: dict[int, int] = {}
    cols = [0] * n
    for j, g in enumerate(unknowns):
        for t, v in E.out[g].items():
            if v % 2:
                i = eq_index.setdefault(t, len(eq_index))
                cols[j] |= 1 << i

    def top(v):
        return v.bit_length() - 1

    # kernel of the column system, tracking unknown combinations
    reduced: list[tuple[int, int]] = []
    kernel: list[int] = []
    for j in range(n):
        v, tag = cols[j], 1 << j
        while v:
            hit = next((rw for rw in reduced if top(rw[0]) == top(v)), None)
            if hit is None:
                break
            v ^= hit[0]
            tag ^= hit[1]
        if v:
            reduced.append((v, tag))
        else:
            kernel.append(tag)

    # project kernel vectors to class coordinates and take a basis
    proj: list[int] = []
    mask = (1 << k) - 1
    for tag in kernel:
        p = tag & mask
        while p:
            hit = next((rp for rp in proj if top(rp) == top(p)), None)
            if hit is None:
                break
            p ^= hit
        if p:
            proj.append(p)
    return [
        frozenset(classes[j] for j in range(k) if (p >> j) & 1) for p in proj
    ]


def survives_quotient(E: BasedComplex, q_cut, cls) -> bool:
    """Is the class nonzero in H^0 of the mod-2 quotient below q_cut?

    The quotient keeps generators of quantum degree < q_cut; the class is
    a coboundary exactly when its support lies in the span of the
    truncated degree-(-1) coboundaries.
    """
    support = {g for g in cls if E.q[g] < q_cut}
    if support != set(cls):
        raise ValueError("class has support at or above the cut")
    if not support:
        return False
    vectors = []
    for z in E.gens_at(-1):
        if E.q[z] >= q_cut:
            continue
        row = {t for t, v in E.out[z].items() if v % 2 and E.q[t] < q_cut}
        if row:
            vectors.append(row)
    return not _f2_span_solve(vectors, support)


def half_refinement_from_based(D: BasedComplex):
    """s over F2 and the positive refinement pair from a Z/4Z complex.

    ``D`` must be the saturated scan output (or any complex in the same
    position); it is consumed by the normal-form slides.
    """
    s_f2 = s_from_based(mod2_reduction(D)).s
    nf = normal_form(D)
    E = mod2_reduction(nf.based)
    # mod-2 generator ids follow the insertion order of the reduction
    gid_map = {}
    e_ids = iter(sorted(E.h))
    for h in D.degrees():
        for gid in D.by_h[h]:
            gid_map[gid] = next(e_ids)

    def gained(level_q, q_cut):
        image = [gid_map[g] for g in sq1_image(nf, level_q)]
        subspace = intersect_with_p(E, level_q, image)
        return any(survives_quotient(E, q_cut, cls) for cls in subspace)

    r_plus = s_f2 + 2 if gained(s_f2 + 1, s_f2 + 3) else s_f2
    s_plus = s_f2 + 2 if gained(s_f2 - 1, s_f2 + 1) else s_f2
    return s_f2, r_plus, s_plus


def _half_refinement(pd):
    od = orient_and_sign(pd)
    order = scan_order(od)
    C = scan(order, Z4, mode="sq1")
    return half_refinement_from_based(from_filtered(C))


def refine(pd) -> tuple[int, Sq1Quadruple]:
    """The full Bockstein refinement quadruple of a knot diagram.

    Returns (s over F2, (r+, s+, r-, s-)); the negative pair comes from
    the mirror diagram with signs flipped.
    """
    s_f2, r_plus, s_plus = _half_refinement(pd)
    s_m, r_plus_m, s_plus_m = _half_refinement(mirror_pd(pd))
    if s_m != -s_f2:
        raise AssertionError("mirror scan disagrees on the base invariant")
    quad = Sq1Quadruple(r_plus, s_plus, -r_plus_m, -s_plus_m)
    return s_f2, quad
