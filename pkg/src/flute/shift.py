"""Permissible shifts and the image of a code under them.

A shift is described by its direction, the two ends ``n1``, ``n2`` of the
turbulent interval and the side (over/under) on which the domain ``D``
passes each turbulent puncture.  Every other puncture lies inside ``D`` and
is carried to its neighbour; ``n1`` jumps to ``n2``.

Images are computed in a fixed picture.  Crossing points of the half-lines
are placed outside ``D``: ``k_o`` above it, ``k_u`` below it, so the shift
leaves them alone.  Each time the path passes through ``D`` inside a gap,
the passage is replaced by its image, which swings around the next domain
puncture in the direction of the shift.  Reduction then does the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .code import (
    C_TOKEN, OVER, PS, UNDER, Code, CodeStructureError, Index,
    is_cross, parse_code, pos_of, reduce_tokens, tok, token_str,
)

TOP, BOTTOM = 0, 1
DEFAULT_CAP = 10 ** 7


class ShiftError(ValueError):
    pass


class NotALoop(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


def _as_pos(k) -> int:
    if isinstance(k, Index):
        return k.pos
    return pos_of(k)


def _kind(x) -> int:
    if x in (OVER, "o", "over"):
        return OVER
    if x in (UNDER, "u", "under"):
        return UNDER
    raise ShiftError(f"boundary side must be o or u, got {x!r}")


@dataclass(frozen=True)
class ShiftSpec:
    """A validated permissible shift.  Indices are stored as positions.

    ``generic`` admits shifts whose domain contains ``p``; they model the
    worked examples that live away from the marked puncture.
    """

    direction: str
    a: int
    b: int
    side: tuple
    generic: bool = False
    _side: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_side", dict(self.side))

    @property
    def n1(self) -> Index:
        return Index.at(self.a)

    @property
    def n2(self) -> Index:
        return Index.at(self.b)

    @property
    def step(self) -> int:
        return 1 if self.direction == "right" else -1

    @property
    def boundary(self) -> dict:
        return {Index.at(p): ("o" if k == OVER else "u") for p, k in sorted(self._side.items())}

    def turbulent(self, p: int) -> bool:
        return p in self._side

    def b_of(self, p: int) -> int:
        return self._side[p]

    def lo_hi(self):
        return min(self.a, self.b), max(self.a, self.b)

    def __str__(self):
        bd = ", ".join(f"{Index.at(p)}:{'o' if k == OVER else 'u'}" for p, k in sorted(self._side.items()))
        return f"{self.direction} n1={self.n1} n2={self.n2} {{{bd}}}"


def make_shift(direction, n1, n2, boundary, generic=False) -> ShiftSpec:
    """Validate and build a shift.

    >>> h = make_shift("right", -1, 1, {"P": "u", 0: "u"})
    >>> str(h)
    'right n1=(-1) n2=1 {P:u, 0:u}'
    """
    if direction not in ("right", "left"):
        raise ShiftError(f"direction must be right or left, got {direction!r}")
    for k in (n1, n2):
        if k == "P" or (isinstance(k, Index) and k.value == "P"):
            raise ShiftError("the ends of the turbulent interval are integers")
    a, b = _as_pos(n1), _as_pos(n2)
    if direction == "right" and not a < b:
        raise ShiftError("a right shift needs n1 < n2")
    if direction == "left" and not b < a:
        raise ShiftError("a left shift needs n2 < n1")
    side = {_as_pos(k): _kind(v) for k, v in dict(boundary).items()}
    lo, hi = min(a, b), max(a, b)
    if set(side) != set(range(lo + 1, hi)):
        raise ShiftError("boundary must cover exactly the turbulent interval")
    if not generic and 0 not in side:
        raise ShiftError("p lies in the shift region")
    return ShiftSpec(direction, a, b, tuple(sorted(side.items())), generic)


def invert(s: ShiftSpec) -> ShiftSpec:
    d = "left" if s.direction == "right" else "right"
    return ShiftSpec(d, s.b, s.a, s.side, s.generic)


def parse_shift_record(text: str) -> ShiftSpec:
    """Read ``direction n1 n2 k:o k:u ...`` (whitespace or comma separated)."""
    parts = text.replace(",", " ").split()
    if len(parts) < 3:
        raise ShiftError("shift record needs direction, n1, n2")
    d, n1, n2 = parts[0], parts[1], parts[2]
    kw = {}
    for f in (d, n1, n2):
        if "=" in f:
            k, v = f.split("=", 1)
            kw[k] = v
    if kw:
        d, n1, n2 = kw.get("direction", d), kw.get("n1", n1), kw.get("n2", n2)
    bd = {}
    for item in parts[3:]:
        k, _, v = item.partition(":")
        bd[k if k == "P" else int(k.strip("()"))] = v
    return make_shift(d, int(n1.strip("()")), int(n2.strip("()")), bd)


def format_shift_record(s: ShiftSpec) -> str:
    bd = " ".join(f"{Index.at(p).value}:{'o' if k == OVER else 'u'}" for p, k in sorted(s._side.items()))
    return f"{s.direction} {Index.at(s.a).value} {Index.at(s.b).value} {bd}"


def shift_pos(s: ShiftSpec, p: int) -> int:
    if s.turbulent(p):
        raise ShiftError(f"{Index.at(p)} is not in the domain")
    if s.direction == "right":
        return s.b if p == s.a else p + 1
    return s.b if p == s.a else p - 1


def shift_index(s: ShiftSpec, k) -> Index:
    """Where a domain puncture goes.

    >>> h1 = make_shift("right", -1, 1, {"P": "u", 0: "u"})
    >>> shift_index(h1, -1), shift_index(h1, 5)
    (Index(1), Index(6))
    """
    return Index.at(shift_pos(s, _as_pos(k)))


def boundary_segment(s: ShiftSpec, a, b) -> Code:
    """The code of the boundary of ``D`` strictly between ``a`` and ``b``."""
    pa, pb = _as_pos(a), _as_pos(b)
    lo, hi = s.lo_hi()
    if pa > pb:
        pa, pb = pb, pa
    if pa < lo or pb > hi:
        raise ShiftError("interval leaves the turbulent region")
    return Code([tok(p, s.b_of(p)) for p in range(pa + 1, pb)], check=False)


# geometry of the picture ---------------------------------------------------

def height(t: int) -> int:
    return TOP if t & 3 == OVER else BOTTOM


def gap_walk(tokens):
    """Gap occupied before each token, plus the final gap.

    Gap ``g`` lies between positions ``g`` and ``g + 1``.  Returns ``None``
    when the code has no crossings.
    """
    cross = [t >> 2 for t in tokens if is_cross(t)]
    if not cross:
        return None
    k0 = cross[0]
    if tokens and tokens[0] == PS:
        cands = [g for g in (-1, 0) if g in (k0 - 1, k0)]
    else:
        cands = [k0 - 1, k0]
    end_p = bool(tokens) and tokens[-1] == PS and len(tokens) > 1
    good = []
    for g0 in cands:
        g, ok = g0, True
        seq = []
        for t in tokens:
            seq.append(g)
            if is_cross(t):
                k = t >> 2
                if g == k - 1:
                    g = k
                elif g == k:
                    g = k - 1
                else:
                    ok = False
                    break
        if ok and (not end_p or g in (-1, 0)):
            seq.append(g)
            good.append(seq)
    if not good:
        raise CodeStructureError("crossings do not describe a path")
    return good[0]


class _Imager:
    """Shared state for computing images under one shift."""

    def __init__(self, s: ShiftSpec):
        self.s = s
        self._l = {}

    def swing(self, g: int):
        """Image of a top-to-bottom passage through D inside gap g."""
        got = self._l.get(g)
        if got is None:
            s = self.s
            w = []
            p = g + 1 if s.step == 1 else g
            while s.turbulent(p):
                w.append(tok(p, s.b_of(p)))
                p += s.step
            got = tuple(w) + (tok(p, OVER), tok(p, UNDER)) + tuple(reversed(w))
            self._l[g] = got
        return got

    def switch(self, out, g, h_from, h_to):
        if h_from == h_to:
            return
        L = self.swing(g)
        out.extend(L if h_from == TOP else L[::-1])

    def travel(self, g_from, g_to, h):
        """Crossings met walking just outside D from one gap to another."""
        s = self.s
        res = []
        if g_from < g_to:
            ps = range(g_from + 1, g_to + 1)
        else:
            ps = range(g_from, g_to, -1)
        for p in ps:
            if s.turbulent(p):
                res.append(tok(p, s.b_of(p)))
            else:
                res.append(tok(p, OVER if h == TOP else UNDER))
        return res

    def p_height(self):
        s = self.s
        if not s.turbulent(0):
            raise ShiftError("arcs at p need p outside the domain")
        return TOP if s.b_of(0) == UNDER else BOTTOM


def forced(s: ShiftSpec, t: int):
    """Side forced on a turbulent crossing that disagrees with the boundary."""
    k = t >> 2
    if not s.turbulent(k):
        return None
    if t & 3 == OVER and s.b_of(k) == UNDER:
        return TOP
    if t & 3 == UNDER and s.b_of(k) == OVER:
        return BOTTOM
    return None


def _n_loop(s, x, y):
    return x >> 2 == y >> 2 and x >> 2 in (s.a, s.b) and x != y and is_cross(x) and is_cross(y)


def endpoint_side(s: ShiftSpec, tokens, at_end: bool) -> int:
    """Side of D for a segment endpoint next to a turbulent character."""
    seq = tokens[::-1] if at_end else tokens
    n = len(seq)
    i = 0
    while i < n and is_cross(seq[i]) and s.turbulent(seq[i] >> 2):
        f = forced(s, seq[i])
        if f is not None:
            return f
        i += 1
    if i + 1 < n and _n_loop(s, seq[i], seq[i + 1]):
        first_over = seq[i] & 3 == OVER
        if not at_end:
            return TOP if first_over else BOTTOM
        # seq is reversed, so seq[i] is the later character of the loop
        return TOP if first_over else BOTTOM
    return TOP


def _back_loop(im, out, tokens, i, g, cur, backs):
    """Emit a back loop and return the side it leaves on.

    A back loop's ends sit off ``D`` on the sides of its neighbours.  A
    later back loop in the same gap is the same loop run backwards, so its
    sides are fixed and the strand may have to cross ``D`` to meet it.
    """
    nxt = next((height(x) for x in tokens[i + 1:] if is_cross(x)), None)
    if g in backs:
        e, x = backs[g][::-1]
    else:
        e = cur if cur is not None else nxt
        x = nxt if nxt is not None else e
    if cur is not None and e is not None:
        im.switch(out, g, cur, e)
    out.append(C_TOKEN)
    backs[g] = (e, x)
    return x


def _image_tokens(s: ShiftSpec, tokens, start_side=None, end_side=None, cap=DEFAULT_CAP,
                  start_at=None, end_at=None):
    im = _Imager(s)
    n = len(tokens)
    if n == 0:
        return ()
    walk = gap_walk(tokens)
    if walk is None:
        return tuple(tokens)
    out = []
    cross_idx = [i for i, t in enumerate(tokens) if is_cross(t)]
    first, last = cross_idx[0], cross_idx[-1]

    # the start
    if tokens[0] == PS:
        cur = im.p_height()
        out.append(PS)
    elif start_at is not None:
        cur = start_at
    elif start_side is not None:
        cur = start_side
    else:
        k = tokens[first] >> 2
        if not s.turbulent(k):
            g0 = walk[first]
            gp = shift_pos(s, k) + (g0 - k)
            cur = height(tokens[first])
            out.extend(im.travel(gp, g0, cur))
        else:
            cur = endpoint_side(s, tokens, False)
    backs = {}
    for i, t in enumerate(tokens):
        if t == PS:
            continue
        if t == C_TOKEN:
            cur = _back_loop(im, out, tokens, i, walk[i], cur, backs)
            continue
        h = height(t)
        im.switch(out, walk[i], cur, h)
        out.append(t)
        cur = h
        if len(out) > 4 * cap:
            out = list(reduce_tokens(out))
            if len(out) > cap:
                raise CapExceeded(f"image exceeds {cap} tokens")

    g = walk[-1]
    if tokens[-1] == PS and n > 1:
        im.switch(out, g, cur, im.p_height())
        out.append(PS)
    elif tokens[-1] == C_TOKEN:
        pass
    elif end_at is not None:
        im.switch(out, g, cur, end_at)
    elif end_side is not None:
        im.switch(out, g, cur, end_side)
    else:
        k = tokens[last] >> 2
        if not s.turbulent(k):
            gp = shift_pos(s, k) + (g - k)
            out.extend(im.travel(g, gp, cur))
        else:
            im.switch(out, g, cur, endpoint_side(s, tokens, True))
    red = reduce_tokens(out)
    if len(red) > cap:
        raise CapExceeded(f"image exceeds {cap} tokens")
    return red


def endpoint_sides(s: ShiftSpec, c):
    """Sides of ``D`` the engine gives a segment's two ends.

    ``None`` marks an end at ``p`` or next to a domain puncture, where no
    side is involved.  Ends off ``D`` are fixed by the shift, so passing
    these sides to :func:`apply_inverse` undoes :func:`apply_shift`.
    """
    t = parse_code(c).tokens
    cross = [x for x in t if is_cross(x)]
    names = {TOP: "above", BOTTOM: "below"}
    res = []
    for at_end, edge in ((False, t[:1]), (True, t[-1:])):
        if not cross or edge == (PS,):
            res.append(None)
            continue
        k = (cross[-1] if at_end else cross[0]) >> 2
        res.append(names[endpoint_side(s, t, at_end)] if s.turbulent(k) else None)
    return tuple(res)


def ends_determined(s: ShiftSpec, c) -> bool:
    """True when the code pins down where the image's endpoints lie.

    A segment end next to a domain puncture sits inside ``D`` and moves
    with it.  When it starts or lands in the part of ``D`` that runs
    through the turbulent region, the code cannot record its place along
    ``D``, so the inverse image is only defined up to sliding that end.
    Back loops lose their sides in the same way.
    """
    t = parse_code(c).tokens
    if C_TOKEN in t:
        return False
    walk = gap_walk(t)
    if walk is None:
        return True
    lo, hi = s.lo_hi()
    band = range(lo, hi)
    cross = [i for i, x in enumerate(t) if is_cross(x)]
    for i, g in ((cross[0], walk[cross[0]]), (cross[-1], walk[-1])):
        if t[0] == PS and i == cross[0] or t[-1] == PS and i == cross[-1]:
            continue
        k = t[i] >> 2
        if s.turbulent(k):
            continue
        gp = shift_pos(s, k) + (g - k)
        if g in band or gp in band:
            return False
    # an end off D must still read as one in the image, and vice versa
    img = _image_tokens(s, t)
    ci = [x for x in img if is_cross(x)]
    if PS not in t:
        # crossings at a single puncture leave the direction of travel open
        if len({x >> 2 for x in ci}) < 2 or len({t[i] >> 2 for i in cross}) < 2:
            return False
    if not ci:
        return False
    ends = []
    if t[0] != PS:
        ends.append((cross[0], ci[0]))
    if t[-1] != PS:
        ends.append((cross[-1], ci[-1]))
    for a, b in ends:
        if s.turbulent(t[a] >> 2) != s.turbulent(b >> 2):
            return False
    return True


def apply_shift(s: ShiftSpec, c, start_side=None, end_side=None, cap=DEFAULT_CAP) -> Code:
    """Reduced image of a code.

    Segment endpoints next to turbulent characters sit on the side of ``D``
    given by the first disagreeing character of the end piece, and ends next
    to a domain puncture sit in ``D`` and move with it.  ``start_side`` and
    ``end_side`` (``"above"``/``"below"``) place an end off ``D`` on that
    side, where the shift fixes it.

    >>> h1 = make_shift("right", -1, 1, {"P": "u", 0: "u"})
    >>> str(apply_shift(h1, parse_code("Ps 0o 0u Ps")))
    'Ps 0o 0u Ps'
    """
    c = parse_code(c)
    ss = _side_arg(start_side)
    es = _side_arg(end_side)
    red = _image_tokens(s, c.tokens, ss, es, cap)
    return Code(red, c.flavor, check=False)


def _side_arg(x):
    if x is None:
        return None
    if x in (TOP, "above", "top", "T"):
        return TOP
    if x in (BOTTOM, "below", "bottom", "B"):
        return BOTTOM
    raise ValueError(f"side must be above or below, got {x!r}")


def apply_inverse(s: ShiftSpec, c, start_side=None, end_side=None, cap=DEFAULT_CAP) -> Code:
    return apply_shift(invert(s), c, start_side, end_side, cap)


def image_based_loop(s: ShiftSpec, tokens, base_gap: int, base_side: int, cap=DEFAULT_CAP):
    """Image of a loop whose both ends sit at one fixed point off ``D``.

    ``tokens`` is the word read from the base point, which lies in gap
    ``base_gap`` on side ``base_side``.  The point must be fixed by the
    shift, which holds for points near ``p``.
    """
    im = _Imager(s)
    out = []
    g, cur = base_gap, base_side
    for t in tokens:
        if not is_cross(t):
            raise ShiftError(f"unsupported token {token_str(t)} in a closed word")
        k = t >> 2
        if g == k - 1:
            ng = k
        elif g == k:
            ng = k - 1
        else:
            raise CodeStructureError("closed word does not describe a path")
        h = height(t)
        im.switch(out, g, cur, h)
        out.append(t)
        cur, g = h, ng
    if g != base_gap:
        raise CodeStructureError("closed word does not return to its base gap")
    im.switch(out, g, cur, base_side)
    red = reduce_tokens(out)
    if len(red) > cap:
        raise CapExceeded(f"image exceeds {cap} tokens")
    return red


# standard position, described ----------------------------------------------

@dataclass(frozen=True)
class Piece:
    tag: str
    tokens: Code


@dataclass(frozen=True)
class Decomposition:
    pieces: tuple
    crossings: tuple
    sides: tuple

    def rejoin(self) -> Code:
        acc = None
        for pc in self.pieces:
            if acc is None:
                acc = pc.tokens
            else:
                t = acc.tokens[:-1] + pc.tokens.tokens if acc.tokens[-1:] == pc.tokens.tokens[:1] else acc.tokens + pc.tokens.tokens
                acc = Code(t, check=False)
        return acc if acc is not None else Code((), check=False)


def _zone(s, t):
    if t == C_TOKEN:
        return "back"
    if t == PS:
        return "turbulent"
    return "turbulent" if s.turbulent(t >> 2) else "shift"


def standard_decomposition(s: ShiftSpec, c) -> Decomposition:
    """Split a code into turbulent runs, connectors and shift-region runs.

    Connectors are the length-2 pieces straddling a change of zone; pieces
    overlap in one character so they rejoin by efficient concatenation.
    ``crossings`` lists ``(i, i + 1)`` positions of full crossings inside
    turbulent runs and ``sides`` the forced side of each character (None
    when free).
    """
    c = parse_code(c)
    t = c.tokens
    if not t:
        return Decomposition((), (), ())
    zones = [_zone(s, x) for x in t]
    pieces = []
    i = 0
    n = len(t)
    while i < n:
        j = i
        while j + 1 < n and zones[j + 1] == zones[i]:
            j += 1
        tag = {"turbulent": "turbulent", "shift": "shiftRegion", "back": "backLoop"}[zones[i]]
        pieces.append(Piece(tag, Code(t[i:j + 1], check=False)))
        if j + 1 < n:
            ctag = "backLoopConnector" if "back" in (zones[j], zones[j + 1]) else "connector"
            pieces.append(Piece(ctag, Code(t[j:j + 2], check=False)))
        i = j + 1
    sides = tuple(forced(s, x) if is_cross(x) else None for x in t)
    crossings = tuple(_full_crossings(t, sides, zones))
    return Decomposition(tuple(pieces), crossings, sides)


def _full_crossings(t, sides, zones):
    """Place one full crossing between each pair of consecutive forced
    characters on opposite sides, at the latest adjacent pair of largest
    index that touches a disagreeing character (leftmost on ties)."""
    res = []
    last = None
    for i, sd in enumerate(sides):
        if zones[i] != "turbulent":
            last = None
            continue
        if sd is None:
            continue
        if last is not None and sides[last] != sd:
            best = None
            for j in range(last, i):
                if sides[j] is None and sides[j + 1] is None:
                    continue
                key = (max(t[j] >> 2, t[j + 1] >> 2), min(t[j] >> 2, t[j + 1] >> 2))
                if best is None or key > best[0]:
                    best = (key, j)
            res.append((best[1], best[1] + 1))
        last = i
    return res


# loops ----------------------------------------------------------------------

def loop_kind(c) -> str:
    """Classify a loop: ``regular``, ``over-under`` or ``back``."""
    t = parse_code(c).tokens
    if t == (C_TOKEN,):
        return "back"
    if PS in t:
        raise NotALoop("a loop has no start marker")
    if len(t) == 2 and is_cross(t[0]) and is_cross(t[1]) and t[0] >> 2 == t[1] >> 2 and t[0] != t[1]:
        return "over-under"
    if len(t) >= 4 and t[0] == t[-1] and is_cross(t[0]):
        for j in range(1, len(t) - 2):
            x, y = t[j], t[j + 1]
            if is_cross(x) and is_cross(y) and x >> 2 == y >> 2 and x != y:
                return "regular"
    raise NotALoop(f"{format_tokens(t)} is not a loop")


def format_tokens(t):
    return " ".join(token_str(x) for x in t)


def loop_is_trivial_direct(s: ShiftSpec, c) -> bool:
    c = parse_code(c)
    loop_kind(c)
    return len(apply_shift(s, c).tokens) == 0


def loop_theorem_form(s: ShiftSpec, c) -> bool:
    """Closed form of loops with trivial image.

    ``k_x`` then the boundary of ``D`` from ``k`` toward ``n1``, a loop
    around ``n1``, and back again, with ``k`` turbulent and ``x`` agreeing
    with the boundary.
    """
    c = parse_code(c)
    loop_kind(c)
    t = c.tokens
    if len(t) < 4 or C_TOKEN in t:
        return False
    k = t[0] >> 2
    if not s.turbulent(k) or t[0] & 3 != s.b_of(k):
        return False
    step = -1 if s.a < s.b else 1
    w = [t[0]]
    p = k + step
    while p != s.a:
        if not s.turbulent(p):
            return False
        w.append(tok(p, s.b_of(p)))
        p += step
    m = len(w)
    if len(t) != 2 * m + 2:
        return False
    if tuple(w) != t[:m] or tuple(reversed(w)) != t[m + 2:]:
        return False
    x, y = t[m], t[m + 1]
    return x >> 2 == s.a and y >> 2 == s.a and x != y
