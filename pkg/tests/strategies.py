"""Random codes for property tests, shared by several test modules."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from flute.code import C_TOKEN, PS, Code, CodeError, is_symmetric, reduce_tokens


def walk_tokens(rng, length, start_gap, back_loops=False):
    """Random crossings of a path starting in ``start_gap``; returns (tokens, gap)."""
    toks, g = [], start_gap
    for _ in range(length):
        if back_loops and toks and toks[-1] != C_TOKEN and rng.random() < 0.08:
            toks.append(C_TOKEN)
            continue
        k = rng.choice((g, g + 1))
        toks.append(4 * k + rng.randint(0, 1))
        g = k if g == k - 1 else k - 1
    return toks, g


def random_code(rng, length, arc=None, back_loops=False, lo=-5, hi=6):
    """A reduced, well formed code; an arc when ``arc`` is true."""
    if arc is None:
        arc = rng.random() < 0.5
    while True:
        if arc:
            toks, g = walk_tokens(rng, length, rng.choice((-1, 0)), back_loops)
            if g not in (-1, 0) or (toks and toks[-1] == C_TOKEN):
                continue
            toks = [PS] + toks + [PS]
        else:
            k = rng.randint(lo, hi)
            toks, _ = walk_tokens(rng, length, rng.choice((k - 1, k)), back_loops)
        red = reduce_tokens(toks)
        if arc and len(red) < 2:
            continue
        if not arc and (not red or PS in red):
            continue
        try:
            return Code(red)
        except CodeError:
            continue


def unreduced_tokens(rng, length):
    """A path that may backtrack, so it reduces nontrivially."""
    toks, g = [], rng.randint(-4, 4)
    for _ in range(length):
        if toks and rng.random() < 0.3:
            toks.append(toks[-1])
            k = toks[-1] >> 2
            g = k if g == k - 1 else k - 1
            continue
        k = rng.choice((g, g + 1))
        toks.append(4 * k + rng.randint(0, 1))
        g = k if g == k - 1 else k - 1
    return toks


def random_symmetric(rng, half, window=(-4, 5)):
    """``Ps delta q1 q2 reverse(delta) Ps``, reduced."""
    lo, hi = window
    while True:
        g = rng.choice((-1, 0))
        delta = []
        ok = True
        for _ in range(half):
            cands = [k for k in (g, g + 1) if lo <= k <= hi]
            if not cands:
                ok = False
                break
            k = rng.choice(cands)
            delta.append(4 * k + rng.randint(0, 1))
            g = k if g == k - 1 else k - 1
        if not ok:
            continue
        ks = [k for k in (g, g + 1) if lo <= k <= hi and (not delta or delta[-1] >> 2 != k)]
        if not ks:
            continue
        k = rng.choice(ks)
        q = [4 * k, 4 * k + 1]
        rng.shuffle(q)
        toks = [PS] + delta + q + delta[::-1] + [PS]
        if reduce_tokens(toks) != tuple(toks):
            continue
        c = Code(toks)
        if is_symmetric(c):
            return c


seeds = st.integers(min_value=0, max_value=2**32 - 1)


def codes(max_len=20, arc=None, back_loops=False):
    return st.builds(lambda s, n: random_code(random.Random(s), n, arc, back_loops),
                     seeds, st.integers(1, max_len))
