"""Planar realization of front codes, intersection numbers and the pairing.

The front of the surface is the plane with punctures on the horizontal
axis.  Vertical half-lines above and below each puncture cut it into
strips; strip ``g`` lies between positions ``g`` and ``g + 1``.  A reduced
code is a chain of chords, one per strip visited.  Each strip is a disk whose
boundary reads, counterclockwise from the top left corner::

    0 left upper   1 left puncture   2 left lower
    3 right lower  4 right puncture  5 right upper

Two strands on the same half-line are ordered by distance to its puncture,
and that order is read off from where they part company: the strand that
leaves the common route on the inner side is the nearer one.  Each pair of
lifts to the universal cover then crosses at most once, so counting linked
chords strip by strip gives the geometric intersection number.

>>> intersection_number("Ps 0o 0u Ps", "Ps (-1)o (-1)u Ps")
0
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import cmp_to_key

import numpy as np

from .code import (
    C_TOKEN, PS, Code, CodeError, Index, is_symmetric, parse_code,
)
from .shift import gap_walk

L_O, L_P, L_U, R_U, R_P, R_O = range(6)
_TOWARD = {L_O: 1, R_U: 1, L_U: -1, R_O: -1}   # +1 when ccw runs into the puncture


class GeometryError(CodeError):
    pass


# curves --------------------------------------------------------------------

@dataclass(frozen=True)
class _Curve:
    """Points along a strand and the strip of each chord between them.

    ``pts[j]`` is ``(pos, side)`` for a crossing (side 0 above, 1 below) or
    ``(pos, None)`` for an end at a puncture.
    """

    pts: tuple
    gaps: tuple


def _check_front(c: Code):
    t = c.tokens
    if C_TOKEN in t:
        raise GeometryError("back loops leave the front; intersection is undefined")
    if not c.is_reduced():
        raise GeometryError(f"code is not reduced: {c}")
    if not c.is_arc:
        raise GeometryError("only arcs based at p can be realized")


def _arc_curve(c: Code) -> _Curve:
    t = c.tokens
    walk = gap_walk(t)
    if walk is None:
        raise GeometryError("trivial arc")
    pts = tuple((0, None) if x == PS else (x >> 2, x & 1) for x in t)
    return _Curve(pts, tuple(walk[1:len(t)]))


def _ray_curve(c: Code) -> _Curve:
    """The zipped ray of a symmetric arc, ending at its central puncture."""
    t = c.tokens
    h = len(t) // 2
    walk = gap_walk(t)
    q = t[h] >> 2
    head = t[:h - 1]
    pts = tuple((0, None) if x == PS else (x >> 2, x & 1) for x in head)
    return _Curve(pts + ((q, None),), tuple(walk[1:h]))


def _edge(pt, g: int) -> int:
    pos, side = pt
    left = pos == g
    if side is None:
        return L_P if left else R_P
    if left:
        return L_O if side == 0 else L_U
    return R_O if side == 0 else R_U


# strand order ----------------------------------------------------------------

def _rank(values):
    return np.unique(values, return_inverse=True)[1].astype(np.int64)


class _Keys:
    """Ranked prefixes of every directed passage key.

    A directed passage leaves a crossing point into one of its two strips.
    Its key lists, strip after strip, where the strand exits measured
    counterclockwise from where it entered; each exit flips or keeps the
    sense of the remaining comparison.  Both signs of every key are ranked
    together so that a flip is just a jump to the negated node.  Level ``k``
    ranks prefixes of length ``2**k``; the last level ranks whole keys.
    """

    def __init__(self, curves):
        owners, index = [], []
        for ci, cv in enumerate(curves):
            for j, (pos, side) in enumerate(cv.pts):
                if side is not None:
                    owners.append(ci)
                    index.append(j)
        m = len(index)
        where = {(owners[i], index[i]): i for i in range(m)}
        sent = 4 * m
        val = np.zeros(sent + 1, dtype=np.int64)
        nxt = np.full(sent + 1, sent, dtype=np.int64)
        right = np.empty(m, dtype=np.int64)
        left = np.empty(m, dtype=np.int64)
        for i in range(m):
            cv = curves[owners[i]]
            j = index[i]
            pos = cv.pts[j][0]
            for d, step in ((0, 1), (1, -1)):
                g = cv.gaps[j] if step == 1 else cv.gaps[j - 1]
                e = _edge(cv.pts[j], g)
                nj = j + step
                x = _edge(cv.pts[nj], g)
                v = -_TOWARD[e] * ((x - e) % 6)
                node = 4 * i + 2 * d
                val[node], val[node + 1] = v, -v
                if cv.pts[nj][1] is not None:
                    flip = -_TOWARD[e] * _TOWARD[x]
                    tgt = 4 * where[(owners[i], nj)] + 2 * d
                    nxt[node] = tgt if flip > 0 else tgt + 1
                    nxt[node + 1] = tgt + 1 if flip > 0 else tgt
                if g == pos:
                    right[i] = node
                else:
                    left[i] = node
        r = _rank(val)
        jump = nxt
        self.levels = [(r, jump)]
        while np.any(jump[:sent] != sent):
            r = _rank(r * (int(r.max()) + 1) + r[jump])
            jump = jump[jump]
            self.levels.append((r, jump))
        self.full = r
        self.owners, self.index = owners, index
        self.right, self.left = right, left

    def lcp(self, u, v) -> float:
        """Length of the common prefix of two keys (inf when equal)."""
        if self.full[u] == self.full[v]:
            return float("inf")
        n = 0
        for k in range(len(self.levels) - 1, -1, -1):
            r, jump = self.levels[k]
            if r[u] == r[v]:
                n += 1 << k
                u, v = jump[u], jump[v]
        return n

    def order(self, items):
        """Sort crossing points of one half-line, outermost first.

        Two strands compare where their common route ends first: on the
        right if it ends no later there, otherwise on the left.  Along a
        shared route the deciding end changes once, so a pair of lifts
        crosses at most once.
        """
        full, R, L = self.full, self.right, self.left

        def cmp(i, j):
            u, v = R[i], R[j]
            lr = self.lcp(u, v)
            x, y = L[i], L[j]
            ll = self.lcp(x, y)
            if lr == ll == float("inf"):
                return (self.owners[i] > self.owners[j]) - (self.owners[i] < self.owners[j])
            if lr <= ll:
                return 1 if full[u] > full[v] else -1
            return 1 if full[x] > full[y] else -1

        items = sorted(items, key=lambda i: (full[R[i]], full[L[i]]))
        return sorted(items, key=cmp_to_key(cmp))


@dataclass(frozen=True)
class WiringDiagram:
    """Strands of several codes placed on the front without bigons.

    ``order[(pos, side)]`` lists the strands crossing that half-line from
    the far end in toward the puncture as ``(code number, point number)``.  ``chords``
    holds, per code, ``(strip, start point, end point)`` triples.
    """

    codes: tuple
    curves: tuple
    order: dict
    chords: tuple

    @property
    def punctures(self):
        ps = {pt[0] for cv in self.curves for pt in cv.pts}
        lo, hi = min(ps) - 1, max(ps) + 1
        return [Index.at(p) for p in range(lo, hi + 1)]

    def near(self):
        """Rank of every crossing point on its half-line, 0 nearest the puncture."""
        out = {}
        for hl, lst in self.order.items():
            for r, key in enumerate(reversed(lst)):
                out[key] = r
        return out

    def strand_dump(self) -> str:
        """One line per strip passage: ``code strip from -> to``."""
        near = self.near()
        lines = []
        for ci, cv in enumerate(self.curves):
            for j, g in enumerate(cv.gaps):
                ends = []
                for k in (j, j + 1):
                    pos, side = cv.pts[k]
                    lab = Index.at(pos).label()
                    if side is None:
                        ends.append(f"{lab}*")
                    else:
                        ends.append(f"{lab}{'ou'[side]}#{near[(ci, k)]}")
                lines.append(f"{ci} {Index.at(g).label()}|{Index.at(g + 1).label()} "
                             f"{ends[0]} -> {ends[1]}")
        return "\n".join(lines)


def _diagram(curves, codes=()) -> WiringDiagram:
    keys = _Keys(curves)
    groups = {}
    for i, (o, j) in enumerate(zip(keys.owners, keys.index)):
        groups.setdefault(curves[o].pts[j], []).append(i)
    order = {hl: [(keys.owners[i], keys.index[i]) for i in keys.order(items)]
             for hl, items in groups.items()}
    chords = tuple(tuple((g, j, j + 1) for j, g in enumerate(cv.gaps)) for cv in curves)
    return WiringDiagram(tuple(codes), tuple(curves), order, chords)


def realize_front(codes) -> WiringDiagram:
    """Place the strands of reduced front arcs in minimal position."""
    cs = [parse_code(c) for c in codes]
    for c in cs:
        _check_front(c)
    return _diagram([_arc_curve(c) for c in cs], cs)


# chord counting --------------------------------------------------------------

_SPAN = 1 << 40


def _coords(dg: WiringDiagram, ci: int):
    """Chords of one curve as (strip, a, b, corner flag) with ccw coordinates."""
    near = dg.near()
    cv = dg.curves[ci]
    out = []
    for g, j0, j1 in dg.chords[ci]:
        pair = []
        corner = False
        for j in (j0, j1):
            e = _edge(cv.pts[j], g)
            if e in (L_P, R_P):
                corner = True
                pair.append(e * _SPAN)
            else:
                r = near[(ci, j)] + 1
                pair.append(e * _SPAN + (_SPAN - r if _TOWARD[e] > 0 else r))
        out.append((g, pair[0], pair[1], corner))
    return out


def _linked(a0, a1, b0, b1) -> bool:
    if len({a0, a1, b0, b1}) < 4:
        return False    # shared puncture end
    lo, hi = min(a0, a1), max(a0, a1)
    return (lo < b0 < hi) != (lo < b1 < hi)


class _Fenwick:
    def __init__(self, n):
        self.t = [0] * (n + 1)

    def add(self, i):
        i += 1
        t = self.t
        while i < len(t):
            t[i] += 1
            i += i & -i

    def total(self, i):
        i += 1
        s = 0
        t = self.t
        while i > 0:
            s += t[i]
            i -= i & -i
        return s


def _count_linked(A, B) -> int:
    """Linked pairs between two chord lists of one strip (no corners)."""
    if not A or not B:
        return 0
    A = [(min(p), max(p)) for p in A]
    B = [(min(p), max(p)) for p in B]
    ends = np.sort(np.array([v for p in A for v in p], dtype=np.int64))
    bx = np.array([p[0] for p in B], dtype=np.int64)
    by = np.array([p[1] for p in B], dtype=np.int64)
    inside = np.searchsorted(ends, by) - np.searchsorted(ends, bx, side="right")
    # chords of A nested inside a chord of B
    ys = sorted({y for _, y in A})
    yi = {y: i for i, y in enumerate(ys)}
    events = sorted([(x, 0, y) for x, y in A] + [(x, 1, y) for x, y in B], reverse=True)
    fw = _Fenwick(len(ys))
    nested = 0
    for x, kind, y in events:
        if kind == 0:
            fw.add(yi[y])
        else:
            k = bisect.bisect_left(ys, y) - 1
            if k >= 0:
                nested += fw.total(k)
    return int(inside.sum()) - 2 * nested


def _cross(dg: WiringDiagram, ia: int, ib: int) -> int:
    ca, cb = _coords(dg, ia), _coords(dg, ib)
    by_gap_a, by_gap_b, corner_a, corner_b = {}, {}, {}, {}
    for g, x, y, c in ca:
        (corner_a if c else by_gap_a).setdefault(g, []).append((x, y))
    for g, x, y, c in cb:
        (corner_b if c else by_gap_b).setdefault(g, []).append((x, y))
    total = 0
    for g in by_gap_a.keys() & by_gap_b.keys():
        total += _count_linked(by_gap_a[g], by_gap_b[g])
    for g, lst in corner_a.items():
        others = by_gap_b.get(g, []) + corner_b.get(g, [])
        total += sum(_linked(*p, *q) for p in lst for q in others)
    for g, lst in corner_b.items():
        total += sum(_linked(*q, *p) for p in lst for q in by_gap_a.get(g, []))
    return total


def intersection_number(a, b) -> int:
    """Minimal number of crossings of two front arcs away from ``p``."""
    a, b = parse_code(a), parse_code(b)
    for c in (a, b):
        _check_front(c)
    if a == b or a.tokens == b.tokens[::-1]:
        # a pushed off copy meets each self crossing twice
        return 2 * self_intersection(a)
    dg = realize_front([a, b])
    return _cross(dg, 0, 1)


def self_intersection(a) -> int:
    """Self crossings of a front arc in minimal position; zero when simple."""
    a = parse_code(a)
    _check_front(a)
    dg = _diagram([_arc_curve(a)], (a,))
    return _cross(dg, 0, 0) // 2


def are_disjoint(a, b) -> bool:
    return intersection_number(a, b) == 0


# symmetric arcs and the pairing ------------------------------------------------

@dataclass(frozen=True)
class Zipped:
    """``c = Ps ray B reverse(ray) Ps`` with ``B`` a loop around one puncture."""

    ray: Code
    loop: Code

    @property
    def center(self) -> Index:
        return Index.at(self.loop.tokens[0] >> 2)

    def unzip(self) -> Code:
        r = self.ray.tokens
        return Code((PS,) + r + self.loop.tokens + r[::-1] + (PS,))


def zip_symmetric(c) -> Zipped:
    """Zip the fellow travelling ends of a symmetric arc into a ray.

    >>> z = zip_symmetric("Ps 0o 0u Ps")
    >>> (str(z.ray), str(z.loop))
    ('', '0o 0u')
    """
    c = parse_code(c)
    if not c.is_arc or not is_symmetric(c):
        raise GeometryError(f"not a symmetric arc: {c}")
    t = c.tokens
    h = len(t) // 2
    return Zipped(Code(t[1:h - 1], check=False), Code(t[h - 1:h + 1], check=False))


@dataclass(frozen=True)
class SignedPairing:
    i_plus: int
    i_minus: int

    def swapped(self) -> "SignedPairing":
        return SignedPairing(self.i_minus, self.i_plus)

    def __iter__(self):
        return iter((self.i_plus, self.i_minus))


# Fixed once so that the pair (alpha_0, alpha_2) for g_1 reads (6, 5).
_ORIENTATION = 1


def pairing(d, g) -> SignedPairing:
    """Signed crossings of the zipped rays of two symmetric arcs.

    A crossing counts as positive when the ray of ``g`` passes the ray of
    ``d`` from its left to its right.
    """
    d, g = parse_code(d), parse_code(g)
    for c in (d, g):
        _check_front(c)
        zip_symmetric(c)
    if d == g:
        return SignedPairing(0, 0)
    dg = _diagram([_ray_curve(d), _ray_curve(g)], (d, g))
    by_gap = {}
    for gap, x, y, _ in _coords(dg, 1):
        by_gap.setdefault(gap, []).append((x, y))
    by_gap = {k: np.array(v, dtype=np.int64) for k, v in by_gap.items()}
    plus = minus = 0
    for gap, x, y, _ in _coords(dg, 0):
        other = by_gap.get(gap)
        if other is None:
            continue
        u, v = other[:, 0], other[:, 1]
        lo, hi = min(x, y), max(x, y)
        distinct = (u != x) & (u != y) & (v != x) & (v != y)
        iu, iv = (lo < u) & (u < hi), (lo < v) & (v < hi)
        linked = distinct & (iu != iv)
        # the ray of g ends on the side of d's chord it crosses into
        right = iv if x < y else ~iv
        pos = linked & (right if _ORIENTATION > 0 else ~right)
        plus += int(pos.sum())
        minus += int(linked.sum()) - int(pos.sum())
    return SignedPairing(plus, minus)


def format_diagram(dg: WiringDiagram) -> str:
    head = " ".join(p.label() for p in dg.punctures)
    codes = "\n".join(f"{i}: {c}" for i, c in enumerate(dg.codes))
    return f"punctures {head}\n{codes}\n{dg.strand_dump()}"
