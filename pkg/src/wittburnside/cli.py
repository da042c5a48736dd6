"""Command-line front end: frames, universal polynomials, Witt arithmetic and verification suites."""

from __future__ import annotations

import argparse
import json
import sys

from . import groupkit as gk
from . import polygen, verify
from . import wittcore as wc
from .errors import WittBurnsideError
from .frame import Frame, build_frame

DEFAULT_PRIMES = (2, 3, 5)


class UsageError(Exception):
    pass


# -- shared flags


def _add_group_flags(parser, trunc_default=None):
    parser.add_argument("--p", type=int, default=2, help="the prime")
    parser.add_argument("--d", type=int, default=2, help="rank of (Z/p^n)^d")
    parser.add_argument("--trunc", type=int, default=trunc_default, help="truncation exponent n")
    parser.add_argument("--exponents", help="comma-separated exponents for a non-homogeneous abelian group")
    parser.add_argument("--dihedral", type=int, metavar="N", help="use the dihedral group of order 2^N")
    parser.add_argument("--max-size", type=int, help="keep only nodes of size at most this")
    parser.add_argument("--any-prime", action="store_true", help="allow primes outside {2, 3, 5}")


def _add_output_flags(parser, formats):
    parser.add_argument("--format", choices=formats, default=formats[0])
    parser.add_argument("--output", "-o", help="write to this file instead of stdout")


def _check_prime(args):
    if not gk.is_prime(args.p):
        raise UsageError(f"--p {args.p}: not a prime")
    if args.p not in DEFAULT_PRIMES and not args.any_prime:
        raise UsageError(f"--p {args.p}: outside {{2, 3, 5}}; pass --any-prime to allow it")


def _check_trunc(args, flag="--trunc"):
    if args.trunc is None:
        raise UsageError(f"{flag} is required")
    if args.trunc < 1:
        raise UsageError(f"{flag} {args.trunc}: must be at least 1")


def _spec_from_args(args):
    if args.dihedral is not None:
        if args.dihedral < 2:
            raise UsageError(f"--dihedral {args.dihedral}: must be at least 2")
        return gk.Dihedral2(args.dihedral)
    _check_prime(args)
    if args.exponents:
        try:
            exps = tuple(int(x) for x in args.exponents.split(","))
        except ValueError:
            raise UsageError(f"--exponents {args.exponents!r}: expected integers") from None
        return gk.AbelianP(args.p, exps)
    _check_trunc(args)
    if args.d < 1:
        raise UsageError(f"--d {args.d}: must be at least 1")
    return gk.AbelianP(args.p, (args.trunc,) * args.d)


def _frame_from_args(args) -> Frame:
    return build_frame(_spec_from_args(args), max_size=args.max_size)


def _emit(args, text: str):
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


# -- frame


def _frame_text(frame: Frame) -> str:
    lines = [f"# {len(frame)} nodes, spec {json.dumps(frame.spec.to_json(), sort_keys=True)}",
             "# id size level cyclic phi_T(T) covers"]
    for nd in frame.nodes:
        lv = "-" if nd.level is None else str(nd.level)
        covers = ",".join(str(c) for c in frame.covers(nd.id)) or "-"
        lines.append(f"{nd.id} {nd.size} {lv} {'yes' if nd.cyclic else 'no'} {frame.self_phi[nd.id]} {covers}")
    return "\n".join(lines) + "\n"


def cmd_frame(args) -> int:
    frame = _frame_from_args(args)
    if args.format == "json":
        _emit(args, _dumps(frame.to_json()))
    elif args.format == "dot":
        _emit(args, frame.to_dot())
    else:
        _emit(args, _frame_text(frame))
    return 0


# -- poly


def cmd_poly(args) -> int:
    frame = _frame_from_args(args)
    polys = polygen.gen_polys(frame, args.kind, size_cap=args.size_cap)
    if args.format == "json":
        _emit(args, _dumps(polys.to_json()))
    else:
        letter = "S" if args.kind == "sum" else "M"
        lines = [f"{letter}_{t} = {f.to_text()}" for t, f in sorted(polys.polys.items())]
        _emit(args, "\n".join(lines) + "\n")
    return 0


# -- witt


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read vector {path!r}: {exc}") from None


_frame_cache: dict = {}


def frame_from_json(data) -> Frame:
    """A frame from {"type": ..., [max_size]} or a full frame dump {"spec": ...}."""
    spec_data = data.get("spec", data)
    max_size = data.get("max_size")
    key = (json.dumps(spec_data, sort_keys=True), max_size)
    if key not in _frame_cache:
        _frame_cache[key] = build_frame(gk.spec_from_json(spec_data), max_size=max_size)
    return _frame_cache[key]


def _frame_json(frame: Frame) -> dict:
    data = dict(frame.spec.to_json())
    if frame.max_size != frame.spec.order:
        data["max_size"] = frame.max_size
    return data


def _parse_coord(ring: wc.CoeffRing, x):
    if ring.poly:
        if isinstance(x, dict):
            return ring.coerce(wc.MPoly.from_json(x))
        return ring.coerce(int(x))
    return ring.coerce(int(x))


def vector_from_json(data) -> wc.WittVector:
    try:
        frame = frame_from_json(data["frame"])
        ring = wc.CoeffRing.from_tag(data.get("ring", "Z"))
        coords = [_parse_coord(ring, x) for x in data["coords"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed vector: {exc}") from None
    if len(coords) != len(frame):
        raise UsageError(f"vector has {len(coords)} coordinates, frame has {len(frame)} nodes")
    return wc.WittVector(frame, ring, coords)


def _coord_json(x):
    if isinstance(x, wc.MPoly):
        return x.to_json()
    return str(int(x))


def vector_to_json(v: wc.WittVector, frame_data=None) -> dict:
    return {
        "frame": frame_data if frame_data is not None else _frame_json(v.frame),
        "ring": v.ring.tag,
        "coords": [_coord_json(x) for x in v.coords],
    }


def cmd_witt(args) -> int:
    op = args.op
    inputs = [_load_json(path) for path in args.vectors]
    arity = {"add": 2, "sub": 2, "mul": 2, "neg": 1, "scalar": 1, "ghost": 1, "ghostinv": 1, "inv": 1,
             "project": 1, "ideal": 1, "teich": 0}[op]
    if len(inputs) != arity:
        raise UsageError(f"witt {op} takes {arity} vector argument(s), got {len(inputs)}")
    if op == "teich":
        if args.node is None:
            raise UsageError("witt teich needs --node")
        frame = _frame_from_args(args)
        ring = wc.CoeffRing.from_tag(args.ring)
        out = wc.teichmuller(frame, ring, args.node, args.value)
        _emit(args, _dumps(vector_to_json(out)))
        return 0
    if op == "ghostinv":
        data = inputs[0]
        try:
            frame = frame_from_json(data["frame"])
            ring = wc.CoeffRing.from_tag(data.get("ring", "Z"))
            comps = tuple(_parse_coord(ring, x) for x in data["ghost"])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed ghost vector: {exc}") from None
        out = wc.ghost_inverse(wc.GhostVector(frame, ring, comps))
        _emit(args, _dumps(vector_to_json(out, data["frame"])))
        return 0
    vecs = [vector_from_json(d) for d in inputs]
    frame_data = inputs[0]["frame"]
    a = vecs[0]
    if op in ("add", "sub", "mul"):
        b = vecs[1]
        out = {"add": wc.add, "sub": wc.sub, "mul": wc.mul}[op](a, b)
    elif op == "neg":
        out = wc.neg(a)
    elif op == "scalar":
        out = wc.int_scalar(args.n, a)
    elif op == "inv":
        out = wc.invert_unit(a)
    elif op == "ghost":
        g = wc.ghost(a)
        _emit(args, _dumps({"frame": frame_data, "ring": a.ring.tag, "ghost": [_coord_json(x) for x in g.components]}))
        return 0
    elif op == "project":
        if not args.nodes:
            raise UsageError("witt project needs --nodes")
        ids = [int(x) for x in args.nodes.split(",")]
        out = wc.project(a, ids)
        sub = out.frame
        data = {"frame": {**_frame_json(a.frame), "embedding": list(sub.embedding)}, "ring": out.ring.tag,
                "coords": [_coord_json(x) for x in out.coords]}
        _emit(args, _dumps(data))
        return 0
    else:  # ideal
        if (args.size is None) == (args.kernel is None):
            raise UsageError("witt ideal needs exactly one of --size or --kernel")
        ideal = wc.In(args.size) if args.size is not None else wc.KN(args.kernel)
        member = wc.ideal_membership(a, ideal)
        _emit(args, _dumps({"member": member, "nodes": wc.ideal_nodes(a.frame, ideal)}))
        return 0
    _emit(args, _dumps(vector_to_json(out, frame_data)))
    return 0


# -- verify


def _verify_report(args):
    suite = args.suite
    trials = args.trials
    kw = {} if trials is None else {"trials": trials}
    if suite == "ratio":
        return verify.check_ratio_property(_frame_from_args(args))
    if suite == "nilpotent":
        _check_prime(args)
        _check_trunc(args)
        return verify.nilpotent_witness(args.p, args.trunc)[1]
    if suite == "linked":
        return verify.check_linked_constraints(_frame_from_args(args), seed=args.seed, **kw)
    if suite == "ideals":
        return verify.check_ideal_products(_frame_from_args(args), args.m, args.n, seed=args.seed, **kw)
    if suite == "homogeneity":
        return polygen.check_homogeneity(polygen.gen_polys(_frame_from_args(args), args.kind, args.size_cap))
    if suite == "congruence":
        params = {"size_cap": args.size_cap}
        if args.r is not None:
            params["r"] = args.r
        return polygen.universal_congruence(_frame_from_args(args), args.which, params)
    _check_trunc(args)
    if suite == "nondomain":
        return verify.check_nondomain(args.p, args.d, args.trunc)
    if suite == "annihilator":
        return verify.check_annihilator(args.p, args.trunc, seed=args.seed, **kw)
    if suite == "reduced":
        return verify.check_reduced_coordinate(args.p, args.trunc, seed=args.seed, **kw)
    if suite == "primes":
        return verify.prime_ideal_paths(args.p, args.trunc, seed=args.seed, **kw)
    raise UsageError(f"unknown suite {suite!r}")


def cmd_verify(args) -> int:
    if args.trials is not None and args.trials < 1:
        raise UsageError(f"--trials {args.trials}: must be at least 1")
    report = _verify_report(args)
    text = _dumps(report.to_json()) if args.json else report.to_text()
    _emit(args, text)
    return 0 if report.passed else 1


# -- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wittburnside", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_frame = sub.add_parser("frame", help="build and print a frame")
    _add_group_flags(p_frame)
    _add_output_flags(p_frame, ["text", "json", "dot"])
    p_frame.set_defaults(func=cmd_frame)

    p_poly = sub.add_parser("poly", help="generate universal sum or product polynomials")
    _add_group_flags(p_poly)
    p_poly.add_argument("--kind", choices=["sum", "product"], default="sum")
    p_poly.add_argument("--size-cap", type=int, help="largest node size (default p^2, at most p^3)")
    _add_output_flags(p_poly, ["text", "json"])
    p_poly.set_defaults(func=cmd_poly)

    p_witt = sub.add_parser("witt", help="Witt vector arithmetic on JSON vectors")
    p_witt.add_argument("op", choices=["add", "sub", "mul", "neg", "scalar", "teich", "ghost", "ghostinv",
                                       "inv", "project", "ideal"])
    p_witt.add_argument("vectors", nargs="*", help="JSON vector files, '-' for stdin")
    _add_group_flags(p_witt)
    p_witt.add_argument("--ring", default="Z", help="ring tag for teich: Z, Z/m, F<p>")
    p_witt.add_argument("--node", type=int, help="node id for teich")
    p_witt.add_argument("--value", type=int, default=1, help="value for teich")
    p_witt.add_argument("--n", type=int, default=1, help="integer for scalar")
    p_witt.add_argument("--nodes", help="comma-separated down-closed node ids for project")
    p_witt.add_argument("--size", type=int, help="ideal I_n: vanish below this size")
    p_witt.add_argument("--kernel", type=int, help="ideal K_N: vanish on the downset of this node")
    p_witt.add_argument("--output", "-o")
    p_witt.set_defaults(func=cmd_witt)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("suite", choices=verify.SUITES)
    _add_group_flags(p_ver)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--trials", type=int)
    p_ver.add_argument("--json", action="store_true", help="emit the report as JSON")
    p_ver.add_argument("--m", type=int, default=1, help="ideals: first exponent")
    p_ver.add_argument("--n", type=int, default=1, help="ideals: second exponent")
    p_ver.add_argument("--kind", choices=["sum", "product"], default="sum", help="homogeneity: which polynomials")
    p_ver.add_argument("--size-cap", type=int)
    p_ver.add_argument("--which", default="gen1",
                       choices=["gen1", "gen2", "gen3", "nicyclicsum", "nicyclicprod", "pmult"],
                       help="congruence: which identity")
    p_ver.add_argument("--r", type=int, help="congruence: number of products")
    p_ver.add_argument("--output", "-o")
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"wittburnside: error: {exc}", file=sys.stderr)
        return 2
    except WittBurnsideError as exc:
        print(f"wittburnside: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
