"""Filtered cochain complexes over the cobordism category; the scan driver.

The scan builds the deformed complex one crossing at a time: tensor with
the crossing's two-term complex, deloop every circle, then saturate with
quantum-degree-preserving Gaussian eliminations inside the mode's
homological window and truncate outside its retention window.  Over a
field the final complex has strictly quantum-raising coboundaries; over
Z/4Z entries equal to 2 survive at equal quantum degree.
"""

from __future__ import annotations

import heapq
import os

from . import cob
from .cob import Cob, Tangle, compose, deloop_iso, glue_cobs, glue_tangles, identity_cob

DEBUG = os.environ.get("BNSCAN_DEBUG", "") == "1"

INF = 10**9

# Crossing piece matchings on legs 0..3 (counterclockwise from the
# incoming under-strand): resolution 0 joins legs (0,3) and (1,2),
# resolution 1 joins (0,1) and (2,3).
PIECE0_MATCH = (3, 2, 1, 0)
PIECE1_MATCH = (1, 0, 3, 2)


class NotCancellableError(ValueError):
    """Gaussian elimination requested along a non-invertible entry."""


def crossing_complex(ring):
    """The two-term complex of one crossing: pieces and the saddle.

    Returns ((tangle0, tangle1), saddle) with the 0-resolution in local
    degree 0 and the 1-resolution in local degree 1, quantum shift +1.
    """
    t0 = Tangle(PIECE0_MATCH, 0, 0)
    t1 = Tangle(PIECE1_MATCH, 0, 1)
    ends = tuple(sorted((
        (cob.SRC, cob.ARC, 0), (cob.SRC, cob.ARC, 1),
        (cob.TGT, cob.ARC, 0), (cob.TGT, cob.ARC, 1),
    )))
    saddle = Cob(t0, t1, {(((ends, 0),), 0): ring.one})
    return (t0, t1), saddle


class FilteredComplex:
    """Sparse bigraded complex: objects per degree, entries per object.

    Objects have stable integer ids; ``out[src]`` maps target ids to
    cobordism entries one homological degree up, ``inc[tgt]`` indexes the
    sources.  All mutation goes through the add/remove/update helpers so
    the two indexes stay coherent.
    """

    def __init__(self, ring):
        self.ring = ring
        self.obj: dict[int, Tangle] = {}
        self.h: dict[int, int] = {}
        self.by_h: dict[int, list[int]] = {}
        self.out: dict[int, dict[int, Cob]] = {}
        self.inc: dict[int, set[int]] = {}
        self._next = 0

    # -- bookkeeping -------------------------------------------------------

    def add_object(self, h, tangle):
        oid = self._next
        self._next += 1
        self.obj[oid] = tangle
        self.h[oid] = h
        self.by_h.setdefault(h, []).append(oid)
        self.out[oid] = {}
        self.inc[oid] = set()
        return oid

    def remove_object(self, oid):
        for tgt in list(self.out[oid]):
            self.inc[tgt].discard(oid)
        for src in list(self.inc[oid]):
            self.out[src].pop(oid, None)
        self.by_h[self.h[oid]].remove(oid)
        del self.obj[oid], self.h[oid], self.out[oid], self.inc[oid]

    def set_entry(self, src, tgt, entry):
        if entry.is_zero():
            if tgt in self.out[src]:
                del self.out[src][tgt]
                self.inc[tgt].discard(src)
            return
        self.out[src][tgt] = entry
        self.inc[tgt].add(src)

    def add_to_entry(self, src, tgt, extra):
        cur = self.out[src].get(tgt)
        total = extra if cur is None else cur.plus(self.ring, extra)
        self.set_entry(src, tgt, total)

    def degrees(self):
        return sorted(h for h, ids in self.by_h.items() if ids)

    def objects_at(self, h):
        return list(self.by_h.get(h, []))

    def n_objects(self):
        return len(self.obj)

    # -- verification ------------------------------------------------------

    def check(self):
        """Debug invariants: d^2 = 0 and non-negative filtration jumps."""
        ring = self.ring
        for a, outs in self.out.items():
            for b, f in outs.items():
                assert self.h[b] == self.h[a] + 1, "entry skips a degree"
                assert f.src == self.obj[a] and f.tgt == self.obj[b]
                if self.obj[a].circles == 0 and self.obj[b].circles == 0:
                    assert f.degree() >= 0, "entry lowers the filtration"
        for a, outs in self.out.items():
            acc: dict[int, Cob] = {}
            for b, f in outs.items():
                for c, g in self.out[b].items():
                    comp = compose(ring, g, f)
                    if c in acc:
                        acc[c] = acc[c].plus(ring, comp)
                    else:
                        acc[c] = comp
            for c, total in acc.items():
                assert total.is_zero(), f"d^2 != 0 through {a} -> {c}"

    def strictly_raising(self):
        return all(
            f.degree() > 0 for outs in self.out.values() for f in outs.values()
        )


# -- the scan steps ----------------------------------------------------------


def initial_complex(ring, n_plus, n_minus):
    """The seed complex: one empty object carrying the global shifts.

    Tensoring every crossing piece at local degrees {0,1} and quantum
    shifts {0,1} on top of this reproduces the usual normalization
    (homological degrees offset by the negative crossing count).
    """
    C = FilteredComplex(ring)
    C.add_object(-n_minus, Tangle((), 0, n_plus - 2 * n_minus))
    return C


class MismatchError(ValueError):
    """The gluing interface does not match the complex boundary."""


def tensor_with_crossing(C, step):
    """Glue one crossing onto every object; Koszul signs on the saddle."""
    ring = C.ring
    if C.obj:
        m = next(iter(C.obj.values())).n_points
        used = {p for p, _x in step.pairs} | set(step.left_order)
        if used != set(range(m)) or len(step.boundary_before) != m:
            raise MismatchError(
                f"interface covers positions {sorted(used)} of a {m}-point boundary"
            )
    (t0, t1), saddle = crossing_complex(ring)
    pieces = (t0, t1)
    ids0 = identity_cob(ring, t0)
    ids1 = identity_cob(ring, t1)
    piece_id = (ids0, ids1)
    pairs = step.pairs
    self_pairs = step.self_pairs
    left_order = step.left_order
    piece_order = step.piece_order

    D = FilteredComplex(ring)
    glue_cache: dict = {}

    def glued_info(oid, k):
        key = (oid, k)
        got = glue_cache.get(key)
        if got is None:
            src_t = C.obj[oid]
            piece = pieces[k]
            raw, end_map = glue_tangles(
                src_t, piece.match, pairs, left_order, piece_order,
                self_pairs=self_pairs,
            )
            shifted = Tangle(
                raw.match, raw.circles, src_t.qshift + piece.qshift
            )
            got = (shifted, end_map)
            glue_cache[key] = got
        return got

    new_id: dict = {}
    for h in C.degrees():
        for oid in C.objects_at(h):
            for k in (0, 1):
                tangle, _emap = glued_info(oid, k)
                new_id[(oid, k)] = D.add_object(h + k, tangle)
    for src, outs in C.out.items():
        for tgt, f in outs.items():
            for k in (0, 1):
                entry = glue_cobs(
                    ring, f, piece_id[k], pairs,
                    glued_info(src, k), glued_info(tgt, k),
                    self_pairs=self_pairs,
                )
                D.add_to_entry(new_id[(src, k)], new_id[(tgt, k)], entry)
    for oid in C.obj:
        sign = ring.one if C.h[oid] % 2 == 0 else ring.neg(ring.one)
        ident = identity_cob(ring, C.obj[oid])
        entry = glue_cobs(
            ring, ident, saddle, pairs,
            glued_info(oid, 0), glued_info(oid, 1),
            self_pairs=self_pairs,
        ).scaled(ring, sign)
        D.add_to_entry(new_id[(oid, 0)], new_id[(oid, 1)], entry)
    if DEBUG:
        D.check()
    return D


def deloop(C):
    """Replace every circled object by its two shifted circle-free halves."""
    ring = C.ring
    queue = [
        oid for h in C.degrees() for oid in C.objects_at(h)
        if C.obj[oid].circles > 0
    ]
    while queue:
        oid = queue.pop()
        if oid not in C.obj:
            continue
        t = C.obj[oid]
        if t.circles == 0:
            continue
        h = C.h[oid]
        (tp, tm), (p_plus, p_minus, i_plus, i_minus) = deloop_iso(ring, t)
        id_p = C.add_object(h, tp)
        id_m = C.add_object(h, tm)
        for src in list(C.inc[oid]):
            f = C.out[src][oid]
            C.add_to_entry(src, id_p, compose(ring, p_plus, f))
            C.add_to_entry(src, id_m, compose(ring, p_minus, f))
        for tgt, g in list(C.out[oid].items()):
            C.add_to_entry(id_p, tgt, compose(ring, g, i_plus))
            C.add_to_entry(id_m, tgt, compose(ring, g, i_minus))
        C.remove_object(oid)
        if tp.circles:
            queue.append(id_p)
            queue.append(id_m)
    if DEBUG:
        C.check()
    return C


def cancellable_coefficient(C, a, b):
    """The unit k when the entry a -> b is k * id at equal qshift."""
    entry = C.out[a].get(b)
    if entry is None:
        return None
    k = entry.identity_coefficient()
    if k is None or not C.ring.is_unit(k):
        return None
    return k


def gauss_eliminate(C, a, b):
    """Cancel the pair (a, b) along a unit-identity entry.

    The remaining differential picks up the correction term composed
    through the cancelled pair; returns the updated (src, tgt) pairs.
    """
    ring = C.ring
    k = cancellable_coefficient(C, a, b)
    if k is None:
        raise NotCancellableError(f"entry {a}->{b} is not a unit identity")
    inv = ring.invert(k)
    minus_inv = ring.neg(inv)
    srcs = [s for s in C.inc[b] if s != a]
    tgts = [(t, g) for t, g in C.out[a].items() if t != b]
    touched = []
    for s in srcs:
        delta = C.out[s][b]
        for t, gamma in tgts:
            corr = compose(ring, gamma, delta).scaled(ring, minus_inv)
            C.add_to_entry(s, t, corr)
            touched.append((s, t))
    C.remove_object(a)
    C.remove_object(b)
    return touched


def reduce_pass(C, elim_lo=-INF, elim_hi=INF, retain_lo=-INF, retain_hi=INF):
    """Saturate eliminations inside the window, then truncate outside it.

    Candidates are processed lowest homological degree first, then by an
    estimate of the fill-in they cause, then by object ids; the queue is
    revalidated lazily.  Afterwards no unit-identity equal-degree entry
    remains with source degree inside [elim_lo, elim_hi].
    """
    ring = C.ring

    def fill_estimate(a, b):
        return (len(C.inc[b]) - 1) * (len(C.out[a]) - 1)

    heap = []

    def push(a, b):
        if a not in C.obj or b not in C.obj:
            return
        h = C.h[a]
        if not (elim_lo <= h <= elim_hi):
            return
        if cancellable_coefficient(C, a, b) is not None:
            heapq.heappush(heap, (h, fill_estimate(a, b), a, b))

    for a, outs in C.out.items():
        for b in outs:
            push(a, b)
    while heap:
        _h, _fill, a, b = heapq.heappop(heap)
        if a not in C.obj or b not in C.obj:
            continue
        if cancellable_coefficient(C, a, b) is None:
            continue
        touched = gauss_eliminate(C, a, b)
        for s, t in touched:
            push(s, t)
    for h in C.degrees():
        if h < retain_lo or h > retain_hi:
            for oid in C.objects_at(h):
                C.remove_object(oid)
    if DEBUG:
        C.check()
    return C


def scan(order, ring, mode="s"):
    """Run the whole scan for one knot diagram.

    Modes: "full" keeps everything (the final complex computes the graded
    homology), "s" truncates to the window needed for the s-invariant,
    "sq1" to the wider window needed for the Bockstein refinement.
    """
    if mode not in ("full", "s", "sq1"):
        raise ValueError(f"unknown scan mode {mode!r}")
    od = order.diagram
    n = od.pd.n
    if n == 0:
        # a crossingless unknot diagram is a bare circle
        C = FilteredComplex(ring)
        C.add_object(0, Tangle((), 1, 0))
        deloop(C)
        return C
    C = initial_complex(ring, od.n_plus, od.n_minus)
    for i, step in enumerate(order.steps, start=1):
        C = tensor_with_crossing(C, step)
        deloop(C)
        if mode == "full":
            reduce_pass(C)
        elif mode == "s":
            reduce_pass(C, -2 - n + i, 1, -1 - n + i, 1)
        else:
            reduce_pass(C, -2 - n + i, 2, -2 - n + i, 2)
    for oid, t in C.obj.items():
        assert t.n_points == 0 and t.circles == 0, "scan left open objects"
    return C


def dump(C):
    """Stable debug dump: one line per generator, one per entry."""
    from .cob import evaluate

    lines = []
    index = {}
    for h in C.degrees():
        for i, oid in enumerate(C.objects_at(h)):
            index[oid] = i
            lines.append(f"{h} {C.obj[oid].qshift} {i}")
    for h in C.degrees():
        for oid in C.objects_at(h):
            for tgt in sorted(C.out[oid], key=lambda t: (C.h[t], index[t])):
                entry = C.out[oid][tgt]
                coeff, jump = evaluate(C.ring, entry)
                lines.append(
                    f"{h} {index[oid]} {index[tgt]} {coeff} {jump // 2}"
                )
    return "\n".join(lines) + "\n"
