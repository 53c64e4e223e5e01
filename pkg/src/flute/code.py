"""Arc codes on the front of the flute surface.

Punctures are indexed by the integers together with an extra symbol ``P``
sitting between ``-1`` and ``0``.  A code records, in order, the half-lines
an arc crosses: ``k_o`` above puncture ``k``, ``k_u`` below it.  Arcs based
at ``p`` begin and end with the start marker ``Ps``; a back loop is ``C``.

Internally every index is stored as an integer *position*: negative
integers keep their value, ``P`` sits at 0 and non-negative integers are
shifted up by one.  A token is ``4 * pos + kind``.

>>> c = parse_code("Ps 0o 1o 1o 1u 2u 2o 1o 0o Ps")
>>> str(reduce(c))
'Ps 0o 1u 2u 2o 1o 0o Ps'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

OVER, UNDER, START, BACK = 0, 1, 2, 3
KIND_SUFFIX = {OVER: "o", UNDER: "u", START: "s"}
SUFFIX_KIND = {v: k for k, v in KIND_SUFFIX.items()}

C_TOKEN = BACK
PS = 4 * 0 + START


class CodeError(ValueError):
    """Base class for malformed codes."""


class CodeSyntaxError(CodeError):
    pass


class CodeStructureError(CodeError):
    pass


class ConcatMismatch(CodeError):
    pass


def pos_of(value) -> int:
    if value == "P":
        return 0
    value = int(value)
    return value if value < 0 else value + 1


def value_of(pos: int):
    if pos == 0:
        return "P"
    return pos if pos < 0 else pos - 1


@total_ordering
@dataclass(frozen=True)
class Index:
    """A puncture index: an integer or ``"P"``, with ``-1 < P < 0``."""

    value: object

    def __post_init__(self):
        if self.value != "P" and not isinstance(self.value, int):
            raise TypeError(f"bad index {self.value!r}")

    @property
    def pos(self) -> int:
        return pos_of(self.value)

    @classmethod
    def at(cls, pos: int) -> "Index":
        return cls(value_of(pos))

    def __lt__(self, other):
        return self.pos < Index._coerce(other).pos

    def __eq__(self, other):
        try:
            return self.pos == Index._coerce(other).pos
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self.pos)

    @staticmethod
    def _coerce(x) -> "Index":
        return x if isinstance(x, Index) else Index(x)

    def succ(self) -> "Index":
        return Index.at(self.pos + 1)

    def pred(self) -> "Index":
        return Index.at(self.pos - 1)

    def adjacent(self, other) -> bool:
        return abs(self.pos - Index._coerce(other).pos) == 1

    def between(self, a, b) -> bool:
        """Open-interval membership, endpoints in either order."""
        lo, hi = sorted((Index._coerce(a).pos, Index._coerce(b).pos))
        return lo < self.pos < hi

    def label(self) -> str:
        v = self.value
        return f"({v})" if isinstance(v, int) and v < 0 else str(v)

    def __str__(self):
        return self.label()

    def __repr__(self):
        return f"Index({self.value!r})"


# token helpers ------------------------------------------------------------

def tok(pos: int, kind: int) -> int:
    return 4 * pos + kind


def tpos(t: int) -> int:
    return t >> 2


def tkind(t: int) -> int:
    return t & 3


def flip(t: int) -> int:
    """Swap over and under."""
    return t ^ 1


def is_cross(t: int) -> bool:
    return t & 3 < 2


def is_p_cross(t: int) -> bool:
    return t >> 2 == 0 and t & 3 < 2


def token_str(t: int) -> str:
    k = t & 3
    if k == BACK:
        return "C"
    return Index.at(t >> 2).label() + KIND_SUFFIX[k]


_TOKEN_RE = re.compile(r"^(?:P|\(?-?\d+\)?)([ous])$")


def parse_token(s: str) -> int:
    if s == "C":
        return C_TOKEN
    m = _TOKEN_RE.match(s)
    if not m:
        raise CodeSyntaxError(f"bad token {s!r}")
    idx = s[:-1]
    if idx.startswith("(") != idx.endswith(")"):
        raise CodeSyntaxError(f"bad token {s!r}")
    idx = idx.strip("()")
    kind = SUFFIX_KIND[m.group(1)]
    if kind == START and idx != "P":
        raise CodeSyntaxError(f"start marker needs index P: {s!r}")
    return tok(pos_of(idx), kind)


@dataclass(frozen=True)
class Character:
    kind: str
    index: Index | None = None

    @classmethod
    def of(cls, t: int) -> "Character":
        k = t & 3
        if k == BACK:
            return cls("BackLoop")
        name = {OVER: "Over", UNDER: "Under", START: "Start"}[k]
        return cls(name, Index.at(t >> 2))

    def __str__(self):
        if self.kind == "BackLoop":
            return "C"
        return self.index.label() + {"Over": "o", "Under": "u", "Start": "s"}[self.kind]


# validation ---------------------------------------------------------------

P_GAPS = frozenset((-1, 0))


def check_tokens(tokens, closed=False):
    """Check start placement and that the crossings describe a path.

    Gaps are named by the position of their left puncture.  Crossing at
    position k joins gaps k-1 and k; the path must cross half-lines that
    bound the gap it currently sits in.
    """
    n = len(tokens)
    starts = [i for i, t in enumerate(tokens) if t == PS]
    if closed and starts:
        raise CodeStructureError("closed word contains a start marker")
    if starts and not set(starts) <= {0, n - 1}:
        raise CodeStructureError("start marker must be an endpoint")
    cur = None
    prev = None
    for i, t in enumerate(tokens):
        if t == PS:
            if prev == C_TOKEN:
                raise CodeStructureError("back loop next to start marker")
            if i == 0:
                cur = P_GAPS
            elif cur is not None and not (cur & P_GAPS):
                raise CodeStructureError(f"cannot reach p at token {i}")
            prev = t
            continue
        if t == C_TOKEN:
            if prev == PS:
                raise CodeStructureError("back loop next to start marker")
            prev = t
            continue
        if t & 3 > 1:
            raise CodeStructureError(f"bad token {t}")
        k = t >> 2
        sides = (k - 1, k)
        if cur is None:
            cur = frozenset(sides)
        else:
            hit = cur.intersection(sides)
            if not hit:
                raise CodeStructureError(
                    f"{token_str(t)} is not adjacent to the previous crossing")
            cur = frozenset(k if g == k - 1 else k - 1 for g in hit)
        prev = t
    return cur


# the Code value -----------------------------------------------------------

class Code:
    """Immutable token sequence; ``flavor`` is ``"arc"`` or ``"segment"``."""

    __slots__ = ("tokens", "flavor", "_hash")

    def __init__(self, tokens, flavor=None, check=True):
        tokens = tuple(tokens)
        if check:
            check_tokens(tokens)
        if flavor is None:
            flavor = "arc" if len(tokens) >= 2 and tokens[0] == PS and tokens[-1] == PS else "segment"
        if flavor == "arc" and not (len(tokens) >= 2 and tokens[0] == PS and tokens[-1] == PS):
            raise CodeStructureError("an arc starts and ends with Ps")
        if flavor == "segment" and len(tokens) >= 2 and tokens[0] == PS and tokens[-1] == PS:
            raise CodeStructureError("a segment holds at most one Ps")
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "flavor", flavor)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("Code is immutable")

    @property
    def is_arc(self):
        return self.flavor == "arc"

    @property
    def characters(self):
        return [Character.of(t) for t in self.tokens]

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Code(self.tokens[i], check=False)
        return self.tokens[i]

    def __eq__(self, other):
        if isinstance(other, Code):
            return self.tokens == other.tokens
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.tokens)
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        return " ".join(token_str(t) for t in self.tokens)

    def __repr__(self):
        s = str(self)
        if len(s) > 60:
            s = s[:57] + "..."
        return f"Code({s!r})"

    def __add__(self, other):
        return Code(self.tokens + tuple(other), check=False)

    def is_reduced(self):
        return reduce_tokens(self.tokens) == self.tokens


def parse_code(text, flavor=None) -> Code:
    """Parse whitespace separated tokens.  ``(-1)o`` and ``-1o`` both work.

    >>> len(parse_code("Ps 0o 1u 2o 2u 1u 0u Ps"))
    8
    >>> parse_code("Ps 0o 2o Ps")
    Traceback (most recent call last):
    ...
    flute.code.CodeStructureError: 2o is not adjacent to the previous crossing
    """
    if isinstance(text, Code):
        return text
    return Code([parse_token(s) for s in text.split()], flavor)


def format_code(c) -> str:
    return str(c) if isinstance(c, Code) else " ".join(token_str(t) for t in c)


# reduction ----------------------------------------------------------------

def reduce_tokens(tokens):
    st = []
    for t in tokens:
        if st:
            top = st[-1]
            if t == top and t != PS:
                st.pop()
                continue
            if top == PS and is_p_cross(t):
                continue
            if t == PS:
                while st and is_p_cross(st[-1]):
                    st.pop()
        st.append(t)
    return tuple(st)


def reduce(c) -> Code:
    """Cancel adjacent equal pairs and P crossings next to the start."""
    c = parse_code(c)
    return Code(reduce_tokens(c.tokens), c.flavor, check=False)


def reverse(c) -> Code:
    c = parse_code(c)
    return Code(c.tokens[::-1], c.flavor, check=False)


def efficient_concat(a, b) -> Code:
    """Join two codes overlapping in one shared character, then reduce.

    >>> str(efficient_concat(parse_code("Ps 0o"), parse_code("0o 1o")))
    'Ps 0o 1o'
    """
    a, b = parse_code(a), parse_code(b)
    if not a.tokens or not b.tokens or a.tokens[-1] != b.tokens[0]:
        raise ConcatMismatch(f"{a} does not end where {b} starts")
    return Code(reduce_tokens(a.tokens[:-1] + b.tokens))


def code_length(c) -> int:
    return len(parse_code(c).tokens)


def half_split(c):
    """Split an arc after its first ``len // 2`` characters."""
    c = parse_code(c)
    if not c.is_arc:
        raise CodeStructureError("half_split needs an arc")
    h = len(c) // 2
    return Code(c.tokens[:h], check=False), Code(c.tokens[h:], check=False)


def ring(c) -> Code:
    return half_split(c)[0]


def _lcp(x, y) -> int:
    n = min(len(x), len(y))
    i = 0
    while i < n and x[i] == y[i]:
        i += 1
    return i


def overlap_length(a, b) -> int:
    """Longest shared initial/terminal segment, in either direction."""
    a, b = parse_code(a).tokens, parse_code(b).tokens
    ra, rb = a[::-1], b[::-1]
    return max(_lcp(a, b), _lcp(a, rb), _lcp(ra, b), _lcp(ra, rb))


def starts_like(a, b) -> bool:
    """True when ``a`` carries the first half of ``b`` at one of its ends."""
    return overlap_length(a, b) >= len(parse_code(b)) // 2


def is_symmetric(c) -> bool:
    """``delta q1 q2 reverse(delta)`` with q1, q2 at the same puncture."""
    t = parse_code(c).tokens
    n = len(t)
    if n < 4 or n % 2:
        return False
    h = n // 2
    a, b = t[h - 1], t[h]
    if not (is_cross(a) and is_cross(b) and a >> 2 == b >> 2 and a != b):
        return False
    return t[:h - 1] == t[h + 1:][::-1]
