"""Closed curves ``c_i``, their Theta-codes and the transition matrices.

A curve is the arc ``alpha_i`` with its two ends near ``p`` joined around
the far side of ``p``: the start markers become ``Po`` and ``Pu`` and the
word is read cyclically from ``Po``.

The Theta alphabet comes from a pants decomposition of the front.  Every
non-negative puncture ``k`` has its own pair of pants with cuffs ``k_L`` and
``k_R``; ``p`` and ``-1`` share one, with cuffs ``(-1)_L`` and ``(-1)_R``,
and the cylinder between that cuff and ``0_L`` carries the extra connector
``(-1)_RR``.  Negative punctures below ``-1`` are treated like the
non-negative ones.

>>> str(theta_encode(to_curve("Ps 0o 0u Ps")))
'Po (-1)R (-1)RR 0L 0o 0u 0L (-1)RR (-1)R Pu'
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .code import (
    UNDER, CodeStructureError, Index, is_cross,
    is_symmetric, parse_code, token_str,
)
from .family import ALPHA0, FamilyError, g_factors
from .shift import BOTTOM, DEFAULT_CAP, TOP, image_based_loop

PO, PU = 0, 1


class TrainTrackError(ValueError):
    pass


@dataclass(frozen=True)
class CurveCode:
    """Cyclic word read from the base point, which sits in gap ``base_gap``."""

    tokens: tuple
    base_gap: int = -1

    def __len__(self):
        return len(self.tokens)

    def __str__(self):
        return " ".join(token_str(t) for t in self.tokens)


def _cyclic_reduce(t):
    t = list(t)
    while len(t) > 1 and t[0] == t[-1]:
        t = t[1:-1]
    return tuple(t)


def to_curve(a) -> CurveCode:
    """Close a symmetric arc around the far side of ``p``.

    The reading is kept: the curve leaves the base over ``p`` and follows
    the arc from its first crossing.

    >>> str(to_curve("Ps 0o 0u Ps"))
    'Po 0o 0u Pu'
    """
    a = parse_code(a)
    if not a.is_arc or not is_symmetric(a):
        raise TrainTrackError(f"not a symmetric arc: {a}")
    if not a.is_reduced():
        raise TrainTrackError(f"not reduced: {a}")
    inner = a.tokens[1:-1]
    # the ends leave p into gap 0 (first crossing at 0) or gap -1
    base = -1 if inner[0] >> 2 == 1 else 0
    return CurveCode((PO,) + inner + (PU,), base)


def apply_g_curve(n: int, c: CurveCode, cap: int = DEFAULT_CAP) -> CurveCode:
    """Image of a curve under ``g_n``, rebased at ``Po``."""
    t = c.tokens
    for s in g_factors(n):
        # the base is off D, on the side of p not moved by this shift
        side = TOP if s.b_of(0) == UNDER else BOTTOM
        t = image_based_loop(s, t, c.base_gap, side, cap=cap)
    t = _cyclic_reduce(t)
    if t[0] != PO and t[-1] == PO:
        t = (PO,) + t[:-1]
    return CurveCode(t, c.base_gap)


@lru_cache(maxsize=None)
def curve_orbit(n: int, i: int) -> CurveCode:
    """``c_i = g_n^i(c_0)`` for ``i >= 0``."""
    if n < 1:
        raise FamilyError("n must be at least 1")
    if i < 0:
        raise TrainTrackError("curve orbit is indexed from 0")
    if i == 0:
        return to_curve(ALPHA0)
    return apply_g_curve(n, curve_orbit(n, i - 1))


# Theta codes ------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaCode:
    tokens: tuple

    def __len__(self):
        return len(self.tokens)

    def __str__(self):
        return " ".join(self.tokens)


def _region(pos: int) -> tuple:
    """Position range ``(lo, hi)`` of the pair of pants around a puncture."""
    return (-1, 0) if pos in (-1, 0) else (pos, pos)


def _cuff(region, side: str) -> str:
    return ("(-1)" if region == (-1, 0) else Index.at(region[0]).label()) + side


def _connectors(r1, r2, gap: int):
    """Cuffs crossed moving from pants ``r1`` to ``r2`` through ``gap``."""
    out = [_cuff(r1, "R" if gap >= r1[1] else "L")]
    if gap == 0:
        out.append("(-1)RR")
    out.append(_cuff(r2, "L" if gap < r2[0] else "R"))
    return out


def theta_encode(c) -> ThetaCode:
    """Theta-code of a front supported curve.

    Each crossing keeps its name.  Between two consecutive crossings in
    different pants the connecting cuffs are inserted, with ``(-1)RR`` added
    whenever the passage runs between ``p`` and ``0``.
    """
    if not isinstance(c, CurveCode):
        raise TrainTrackError("theta_encode takes a CurveCode")
    t = c.tokens
    if not t:
        return ThetaCode(())
    out = []
    g = c.base_gap
    prev = None
    for x in t:
        if not is_cross(x):
            raise TrainTrackError(f"unsupported token {token_str(x)}")
        k = x >> 2
        if g not in (k - 1, k):
            raise CodeStructureError("curve word does not describe a path")
        if prev is not None and _region(prev >> 2) != _region(k):
            out.extend(_connectors(_region(prev >> 2), _region(k), g))
        out.append(token_str(x))
        g = k if g == k - 1 else k - 1
        prev = x
    if g != c.base_gap:
        raise CodeStructureError("curve word does not close up")
    if _region(prev >> 2) != _region(t[0] >> 2):
        out.extend(_connectors(_region(prev >> 2), _region(t[0] >> 2), g))
    return ThetaCode(_cyclic_reduce(_reduce_adjacent(out)))


def _reduce_adjacent(word):
    st = []
    for x in word:
        if st and st[-1] == x:
            st.pop()
        else:
            st.append(x)
    return st


def theta_length(c) -> int:
    return len(theta_encode(c))


def agreement_length(a: ThetaCode, b: ThetaCode) -> int:
    """Number of initial tokens two Theta-codes share."""
    n = 0
    for x, y in zip(a.tokens, b.tokens):
        if x != y:
            break
        n += 1
    return n


@dataclass(frozen=True)
class PrefixRow:
    i: int
    arc_length: int
    theta_length: int
    required: int
    agreement: int

    @property
    def sandwich(self) -> bool:
        return self.arc_length <= self.theta_length <= 5 * self.arc_length

    @property
    def ok(self) -> bool:
        return self.sandwich and self.agreement >= self.required


def prefix_data(n: int, upto: int):
    """Rows for ``c_0 .. c_upto``: lengths, the bound ``floor(l/10)`` and the
    measured agreement with the next Theta-code."""
    rows = []
    nxt = theta_encode(curve_orbit(n, 0))
    for i in range(upto + 1):
        cur = nxt
        nxt = theta_encode(curve_orbit(n, i + 1))
        rows.append(PrefixRow(i, len(curve_orbit(n, i)), len(cur), len(cur) // 10,
                              agreement_length(cur, nxt)))
    return rows


# matrices ---------------------------------------------------------------------

_A1 = ((5, 6, 0, 2), (6, 9, 0, 2), (10, 10, 2, 3), (6, 6, 1, 2))
_AN = ((5, 6, 0, 2, 0), (6, 9, 0, 2, 0), (10, 10, 2, 2, 1), (6, 6, 1, 1, 1),
       (6, 6, 1, 2, 0))

TOP_EIGENVALUE = 9 / 2 + math.sqrt(41) / 2 + math.sqrt((59 + 9 * math.sqrt(41)) / 2)


@dataclass(frozen=True)
class TransitionMatrix:
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise TrainTrackError("transition matrix must be square")
        if any(x < 0 for r in rows for x in r):
            raise TrainTrackError("transition matrix must be nonnegative")
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        return len(self.rows)

    def __mul__(self, other):
        n = self.size
        cols = list(zip(*other.rows))
        return TransitionMatrix(tuple(
            tuple(sum(a * b for a, b in zip(self.rows[i], cols[j])) for j in range(n))
            for i in range(n)))

    def __str__(self):
        w = max(len(str(x)) for r in self.rows for x in r)
        return "\n".join(" ".join(str(x).rjust(w) for x in r) for r in self.rows)


def transition_matrix(n: int) -> TransitionMatrix:
    if n < 1:
        raise TrainTrackError("n must be at least 1")
    return TransitionMatrix(_A1 if n <= 2 else _AN)


def perron_frobenius_check(m: TransitionMatrix) -> bool:
    """Is every entry of ``m**2`` positive?"""
    return all(x > 0 for r in (m * m).rows for x in r)


def leading_eigenvalue(m: TransitionMatrix, tol: float = 1e-12,
                       max_iter: int = 10_000) -> float:
    """Spectral radius of a primitive matrix by power iteration.

    >>> leading_eigenvalue(TransitionMatrix(((3,),)))
    3.0
    """
    n = m.size
    v = [1.0] * n
    lam = 0.0
    for _ in range(max_iter):
        w = [sum(a * b for a, b in zip(r, v)) for r in m.rows]
        s = max(w)
        if s <= 0:
            raise TrainTrackError("power iteration collapsed to zero")
        w = [x / s for x in w]
        if abs(s - lam) <= tol * s and max(abs(x - y) for x, y in zip(v, w)) <= tol:
            return s
        v, lam = w, s
    raise TrainTrackError(f"power iteration did not converge in {max_iter} steps")
