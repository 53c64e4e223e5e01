"""The shifts h1, h2(n), h3(n), the maps g_n = h3 . h2 . h1 and their orbits.

Arcs are unoriented, so images of arcs are reported in a canonical reading:
of a code and its reverse, the one whose token sequence is smaller (``o``
before ``u``, lower positions first).  Segments keep their orientation.

>>> str(alpha_arc(1, 1))
'Ps 0o 1o 2o 2u 1o 0o 0u 1o 2u 2o 1o 0o Ps'
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

from .code import (
    C_TOKEN, Code, CodeStructureError, half_split, overlap_length,
    parse_code, reverse,
)
from .shift import (
    DEFAULT_CAP, CapExceeded, ShiftSpec, apply_inverse, apply_shift, make_shift,
)


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class FamilyShiftKind:
    kind: str
    n: int = 1

    def __post_init__(self):
        if self.kind not in ("h1", "h2", "h3"):
            raise FamilyError(f"unknown family shift {self.kind!r}")
        if self.n < 1:
            raise FamilyError("n must be at least 1")


@lru_cache(maxsize=None)
def _family(kind: str, n: int) -> ShiftSpec:
    if kind == "h1":
        return make_shift("right", -1, 1, {"P": "u", 0: "u"})
    if kind == "h2":
        bd = {j: ("o" if j % 2 == 0 else "u") for j in range(-n, n + 1)}
        bd["P"] = "o"
        return make_shift("left", n + 1, -n - 1, bd)
    bd = {j: "o" for j in range(-n, n + 1)}
    bd["P"] = "u"
    return make_shift("right", -n - 1, n + 1, bd)


def family_shift(kind, n: int = 1) -> ShiftSpec:
    """``family_shift("h2", 1)`` or ``family_shift(FamilyShiftKind("h3", 2))``.

    >>> str(family_shift("h2", 1))
    'left n1=2 n2=(-2) {(-1):u, P:o, 0:o, 1:u}'
    """
    if not isinstance(kind, FamilyShiftKind):
        kind = FamilyShiftKind(kind, n)
    return _family(kind.kind, kind.n)


def g_factors(n: int):
    if n < 1:
        raise FamilyError("n must be at least 1")
    return (family_shift("h1"), family_shift("h2", n), family_shift("h3", n))


def canonical(c: Code) -> Code:
    """The smaller of an arc and its reverse; segments are returned as is."""
    if not c.is_arc:
        return c
    r = reverse(c)
    return r if r.tokens < c.tokens else c


def apply_g(n: int, c, power: int = 1, cap: int = DEFAULT_CAP) -> Code:
    """``g_n`` to the given power.  Arcs come back in canonical reading."""
    c = parse_code(c)
    fs = g_factors(n)
    if power >= 0:
        for _ in range(power):
            for s in fs:
                c = apply_shift(s, c, cap=cap)
    else:
        for _ in range(-power):
            for s in reversed(fs):
                c = apply_inverse(s, c, cap=cap)
    return canonical(c)


# orbits ---------------------------------------------------------------------

ALPHA0 = parse_code("Ps 0o 0u Ps")


def beta0(n: int) -> Code:
    """``Ps (-1)o ... (-n-1)o (-n-1)u ... (-1)o Ps``."""
    down = [f"({-j})o" for j in range(1, n + 2)]
    up = [f"({-j})o" for j in range(n, 0, -1)]
    return parse_code(" ".join(["Ps"] + down + [f"({-n - 1})u"] + up + ["Ps"]))


class _Orbit:
    """Memo of ``g_n^i(start)``; reads are lock free, writes serialized."""

    def __init__(self):
        self._memo = {}
        self._lock = threading.Lock()

    def get(self, key, n, i, start, cap):
        memo = self._memo
        hit = memo.get((key, n, i))
        if hit is not None:
            if len(hit) > cap:
                raise CapExceeded(f"image exceeds {cap} tokens")
            return hit
        step = 1 if i > 0 else -1
        j = i
        while j != 0 and (key, n, j) not in memo:
            j -= step
        c = memo.get((key, n, j), start) if j else start
        while j != i:
            c = apply_g(n, c, step, cap=cap)
            j += step
            with self._lock:
                memo[(key, n, j)] = c
        return canonical(c)

    def clear(self):
        with self._lock:
            self._memo.clear()


_orbits = _Orbit()


def clear_orbit_cache() -> None:
    """Forget memoized orbits; long ones can hold a lot of memory."""
    _orbits.clear()


def alpha_arc(n: int, i: int, cap: int = DEFAULT_CAP) -> Code:
    """``g_n^i(Ps 0o 0u Ps)``."""
    if n < 1:
        raise FamilyError("n must be at least 1")
    return _orbits.get("alpha", n, i, ALPHA0, cap)


def beta_arc(n: int, i: int, cap: int = DEFAULT_CAP) -> Code:
    if n < 1:
        raise FamilyError("n must be at least 1")
    return _orbits.get("beta", n, i, canonical(beta0(n)), cap)


def alpha_ring(n: int, i: int, cap: int = DEFAULT_CAP) -> Code:
    """The initial half of ``alpha_i``."""
    return half_split(alpha_arc(n, i, cap))[0]


def chi(n: int, i: int, cap: int = DEFAULT_CAP) -> Code:
    return alpha_ring(n, i, cap)[1:]


# starts like ------------------------------------------------------------------

def phi_starts_like(n: int, c, cap: int = DEFAULT_CAP) -> int:
    """Largest ``i`` such that ``c`` starts like ``alpha_i``.

    Only ``alpha_i`` whose initial half fits inside ``c`` can qualify, which
    bounds the search.
    """
    c = parse_code(c)
    best = 0
    i = 1
    while True:
        a = alpha_arc(n, i, cap)
        need = len(a) // 2
        if need > len(c):
            return best
        if overlap_length(c, a) >= need:
            best = i
        i += 1


def distance_lower_bound(n: int, a, b, cap: int = DEFAULT_CAP) -> int:
    return abs(phi_starts_like(n, a, cap) - phi_starts_like(n, b, cap))


# highways and lanes -------------------------------------------------------------

PO, PU = 0, 1   # tokens of P_o and P_u (position 0)


@dataclass(frozen=True)
class Lane:
    side: str
    tokens: Code
    lane_length: int
    innermost: bool
    start: int

    def __str__(self):
        mark = " innermost" if self.innermost else ""
        return f"{self.side} lane at {self.start}, length {self.lane_length}{mark}: {self.tokens}"


def has_highways(c) -> bool:
    t = parse_code(c).tokens
    if len(t) < 4:
        return False
    pats = set()
    for q in (t[1], t[-2]):
        if q == C_TOKEN:
            continue
        pats.add((q, PO, PU, q))
        pats.add((q, PU, PO, q))
    return any(t[j:j + 4] in pats for j in range(len(t) - 3))


def _fellow(t, seq):
    """Length of the longest gamma read from ``seq`` that matches both the
    initial part after ``Ps`` and, reversed, the terminal part before it."""
    n = len(t)
    m = 0
    for x in seq:
        if x == C_TOKEN:
            break
        if x != t[1 + m] or x != t[n - 2 - m]:
            break
        m += 1
    return m


def find_lanes(c) -> list:
    """All left and right lanes of an arc with highways."""
    c = parse_code(c)
    if not c.is_arc:
        raise CodeStructureError("lanes live on arcs")
    t = c.tokens
    if not has_highways(c):
        return []
    n = len(t)
    found = []
    for j in range(1, n - 2):
        a, b = t[j], t[j + 1]
        if {a, b} != {PO, PU}:
            continue
        fwd = _fellow(t, (t[k] for k in range(j + 2, n - 1)))
        bwd = _fellow(t, (t[k] for k in range(j - 1, 0, -1)))
        if a == PO:
            # Po Pu gamma is a left lane, reversed gamma Po Pu a right lane
            found.append(("left", j, j + 2 + fwd))
            found.append(("right", j - bwd, j + 2))
        else:
            found.append(("right", j, j + 2 + fwd))
            found.append(("left", j - bwd, j + 2))
    best = {}
    for side, lo, hi in found:
        if hi - lo - 1 > best.get(side, (-1,))[0]:
            best[side] = (hi - lo - 1, lo)
    lanes = []
    for side, lo, hi in found:
        L = hi - lo - 1
        inner = best[side] == (L, lo)
        lanes.append(Lane(side, Code(t[lo:hi], check=False), L, inner, lo))
    return lanes


def highway_check(n: int, i: int, cap: int = DEFAULT_CAP) -> bool:
    """Does ``ring(alpha_i)`` end in ``rev(chi_{i-1}) Pu Po chi_{i-1}``?"""
    if i < 2:
        raise FamilyError("highways start at i = 2")
    x = chi(n, i - 1, cap).tokens
    pat = x[::-1] + (PU, PO) + x
    ring_ = alpha_ring(n, i, cap).tokens
    return len(ring_) >= len(pat) and ring_[len(ring_) - len(pat):] == pat
