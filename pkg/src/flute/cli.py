"""Command line front end.

Codes come as arguments or, when none are given, one per line on stdin, so
commands can be piped into each other.  Exit status is 0 on success, 1 when
a computation is refused (cap exceeded, not a loop, no such shift) and 2
when the input does not parse.
"""

from __future__ import annotations

import argparse
import json
import sys

from .code import (
    CodeError, CodeStructureError, CodeSyntaxError, parse_code, reduce, token_str,
)
from .family import (
    FamilyError, alpha_arc, apply_g, beta_arc, family_shift, find_lanes,
    highway_check, phi_starts_like,
)
from .geometry import GeometryError, intersection_number, pairing, realize_front
from .shift import (
    CapExceeded, DEFAULT_CAP, NotALoop, ShiftError, apply_inverse, apply_shift,
    loop_is_trivial_direct, loop_theorem_form, parse_shift_record,
)
from .traintrack import (
    TrainTrackError, curve_orbit, leading_eigenvalue, perron_frobenius_check,
    theta_encode, to_curve, transition_matrix,
)

DOMAIN_ERRORS = (ShiftError, FamilyError, GeometryError, TrainTrackError,
                 CapExceeded, NotALoop)


class _ParseFailure(Exception):
    pass


def _codes(args, need=None):
    texts = list(args.codes) or [ln.strip() for ln in sys.stdin if ln.strip()]
    if need is not None and len(texts) != need:
        raise _ParseFailure(f"expected {need} codes, got {len(texts)}")
    out = []
    for t in texts:
        try:
            out.append(parse_code(t))
        except (CodeSyntaxError, CodeStructureError) as e:
            raise _ParseFailure(str(e)) from e
    return out


def _shift_arg(text):
    """``h1``, ``h2:n``, ``h3:n`` or ``g:n``."""
    name, _, n = text.partition(":")
    try:
        n = int(n) if n else 1
    except ValueError:
        raise _ParseFailure(f"bad shift {text!r}") from None
    if name not in ("h1", "h2", "h3", "g"):
        raise _ParseFailure(f"unknown shift {text!r}")
    return name, n


def _shift(args):
    """The shift named by ``--shift`` or read from ``--shift-file``; None for g."""
    if args.shift_file is not None:
        try:
            with open(args.shift_file) as f:
                return "file", 0, parse_shift_record(f.read())
        except (OSError, ShiftError) as e:
            raise _ParseFailure(f"{args.shift_file}: {e}") from e
    if args.shift is None:
        raise _ParseFailure("one of --shift or --shift-file is required")
    name, n = _shift_arg(args.shift)
    return name, n, None if name == "g" else family_shift(name, n)


def _tokens(c):
    return [token_str(t) for t in c]


class _Out:
    def __init__(self, as_json):
        self.json = as_json
        self.records = []

    def emit(self, text, **record):
        if self.json:
            self.records.append(record)
        else:
            print(text)

    def flush(self):
        if self.json:
            print(json.dumps(self.records if len(self.records) != 1 else self.records[0]))


# commands ---------------------------------------------------------------------

def cmd_reduce(args, out):
    for c in _codes(args):
        r = reduce(c)
        out.emit(str(r), input=str(c), tokens=_tokens(r))


def cmd_apply(args, out):
    name, n, s = _shift(args)
    label = args.shift or args.shift_file
    for c in _codes(args):
        if s is None:
            r = apply_g(n, c, args.power, cap=args.max_tokens)
        else:
            r = c
            f = apply_shift if args.power >= 0 else apply_inverse
            for _ in range(abs(args.power)):
                r = f(s, r, cap=args.max_tokens)
        out.emit(str(r), input=str(c), shift=label, power=args.power,
                 tokens=_tokens(r))


def _orbit(args, out, fn, label):
    for i in range(args.steps + 1):
        c = fn(args.n, i, cap=args.max_tokens)
        out.emit(f"{label}_{i}: {c}", n=args.n, i=i, length=len(c), tokens=_tokens(c))


def cmd_iterate(args, out):
    _orbit(args, out, alpha_arc, "alpha")


def cmd_beta(args, out):
    _orbit(args, out, beta_arc, "beta")


def cmd_phi(args, out):
    for c in _codes(args):
        v = phi_starts_like(args.n, c, cap=args.max_tokens)
        out.emit(str(v), input=str(c), n=args.n, phi=v)


def cmd_loop_check(args, out):
    _, _, s = _shift(args)
    if s is None:
        raise ShiftError("loop-check takes a single shift h1, h2:n or h3:n")
    for c in _codes(args):
        d, f = loop_is_trivial_direct(s, c), loop_theorem_form(s, c)
        out.emit(f"direct={d} closed_form={f}", input=str(c), direct=d, closed_form=f)


def cmd_lanes(args, out):
    for c in _codes(args):
        lanes = find_lanes(c)
        if not out.json:
            print(f"{len(lanes)} lanes in {c}")
            for ln in lanes:
                print(f"  {ln}")
        out.records.append({"input": str(c), "lanes": [
            {"side": ln.side, "start": ln.start, "length": ln.lane_length,
             "innermost": ln.innermost, "tokens": _tokens(ln.tokens)} for ln in lanes]})


def cmd_highway(args, out):
    ok = highway_check(args.n, args.i, cap=args.max_tokens)
    out.emit(str(ok), n=args.n, i=args.i, highway=ok)


def cmd_intersect(args, out):
    a, b = _codes(args, 2)
    v = intersection_number(a, b)
    out.emit(str(v), a=str(a), b=str(b), intersection=v)
    if args.strands:
        dump = realize_front([a, b]).strand_dump()
        if out.json:
            out.records[-1]["strands"] = dump.splitlines()
        else:
            print(dump)


def cmd_pairing(args, out):
    d, g = _codes(args, 2)
    p = pairing(d, g)
    out.emit(f"{p.i_plus} {p.i_minus}", d=str(d), g=str(g),
             i_plus=p.i_plus, i_minus=p.i_minus)


def cmd_theta(args, out):
    if args.i is not None:
        curves = [(f"c_{args.i}", curve_orbit(args.n, args.i))]
    else:
        curves = [(str(c), to_curve(c)) for c in _codes(args)]
    for src, c in curves:
        th = theta_encode(c)
        out.emit(str(th), source=src, curve=str(c), length=len(th), tokens=list(th.tokens))


def cmd_matrix(args, out):
    m = transition_matrix(args.n)
    rec = {"n": args.n, "rows": [list(r) for r in m.rows],
           "perron_frobenius": perron_frobenius_check(m)}
    text = str(m)
    if args.eigenvalue:
        lam = leading_eigenvalue(m)
        rec["eigenvalue"] = lam
        text += f"\neigenvalue {lam:.12f}"
    out.emit(text, **rec)


# parser -----------------------------------------------------------------------

def _shift_opts(sp):
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--shift", help="h1, h2:n, h3:n or g:n")
    g.add_argument("--shift-file", help="file holding a shift record "
                   "such as 'right -1 1 P:u 0:u'")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--max-tokens", type=int, default=DEFAULT_CAP,
                        help="refuse images longer than this")

    p = argparse.ArgumentParser(prog="flute",
                                description="Arc codes on the flute surface.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, codes=True, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.set_defaults(fn=fn)
        if codes:
            sp.add_argument("codes", nargs="*", help="codes; stdin when omitted")
        return sp

    add("reduce", cmd_reduce, help="reduce codes")
    sp = add("apply", cmd_apply, help="apply h1, h2:n, h3:n or g:n")
    _shift_opts(sp)
    sp.add_argument("--power", type=int, default=1)
    for name, fn in (("iterate", cmd_iterate), ("beta", cmd_beta)):
        sp = add(name, fn, codes=False, help=f"{'alpha' if name == 'iterate' else 'beta'}_0 .. _I")
        sp.add_argument("--n", type=int, default=1)
        sp.add_argument("--steps", type=int, required=True)
    sp = add("phi", cmd_phi, help="largest i with the code starting like alpha_i")
    sp.add_argument("--n", type=int, default=1)
    sp = add("loop-check", cmd_loop_check, help="trivial image test, two ways")
    _shift_opts(sp)
    add("lanes", cmd_lanes, help="left and right lanes")
    sp = add("highway", cmd_highway, codes=False, help="highway check for alpha_i")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--i", type=int, required=True)
    sp = add("intersect", cmd_intersect, help="geometric intersection of two arcs")
    sp.add_argument("--strands", action="store_true", help="dump the strand placement")
    add("pairing", cmd_pairing, help="signed pairing of two symmetric arcs")
    sp = add("theta", cmd_theta, help="Theta-code of a closed up symmetric arc")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--i", type=int, default=None, help="use c_i instead of input codes")
    sp = add("matrix", cmd_matrix, codes=False, help="transition matrix A_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--eigenvalue", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = _Out(args.json)
    try:
        args.fn(args, out)
    except _ParseFailure as e:
        print(f"flute: {e}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as e:
        print(f"flute: {e}", file=sys.stderr)
        return 1
    except CodeError as e:
        print(f"flute: {e}", file=sys.stderr)
        return 2
    out.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
