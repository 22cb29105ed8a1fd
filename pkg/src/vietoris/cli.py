"""Command-line entry point ``vw``.

Exit status: 0 success, 1 a property or round trip failed, 2 bad usage,
configuration or input.  Diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import suite
from .coalg import (
    Coalgebra,
    bisim_preorder,
    bisim_quotient,
    coalgebra_from_json,
    coalgebra_to_json,
    quotient,
    terminal_chain,
)
from .dot import hasse_dot
from .dualalg import (
    ModalAlgebra,
    algebra_from_json,
    algebra_to_json,
    check_axioms,
    complex_algebra,
    frame_from_algebra,
    frame_isomorphism,
    modal_isomorphism,
)
from .errors import VietorisError
from .finposet import poset_from_json, poset_to_json
from .hyperspace import CAPS, Variant, build, hyperspace_to_json, mask_label
from .onestep import (
    Rank0Term,
    Rank1Term,
    compose_00,
    compose_01,
    compose_10,
    term_from_json,
    term_to_json,
)


class UsageError(Exception):
    pass


class Input:
    """Raw bytes of an input plus where they came from, for digests and diagnostics."""

    def __init__(self, name: str, raw: bytes):
        self.name = name
        self.raw = raw

    @property
    def digest(self) -> str:
        return "sha256:" + hashlib.sha256(self.raw).hexdigest()

    def json(self):
        try:
            text = self.raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise UsageError(f"{self.name}: not UTF-8 ({e.reason} at byte {e.start})") from None
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise UsageError(f"{self.name}:{e.lineno}:{e.colno}: {e.msg}") from None


def read_input(path: str) -> Input:
    if path == "-":
        return Input("<stdin>", sys.stdin.buffer.read())
    try:
        with open(path, "rb") as fh:
            return Input(path, fh.read())
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None


def inline_or_file(arg: str) -> Input:
    """``@path`` reads a file; anything else is taken as literal JSON."""
    if arg.startswith("@"):
        return read_input(arg[1:])
    return Input("<argument>", arg.encode("utf-8"))


def args_digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return "sha256:" + hashlib.sha256(blob).hexdigest()


def dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _variant(args, default=None) -> Variant:
    if args.variant is None:
        if default is None:
            raise UsageError("--variant is required")
        return default
    return Variant.parse(args.variant)


# -- commands ------------------------------------------------------------------------


def cmd_hyperspace(args) -> tuple[int, str]:
    inp = read_input(args.input)
    P = poset_from_json(inp.json(), inp.name)
    v = _variant(args)
    cap = args.max_n
    if cap is not None and cap > CAPS[v]:
        raise UsageError(f"--max-n {cap} exceeds the {v.value} maximum {CAPS[v]}")
    H = build(v, P, cap)
    if args.format == "dot":
        return 0, hasse_dot(H.order, [mask_label(K) for K in H.elems], f"{v.value}")
    out = {"input_digest": inp.digest, **hyperspace_to_json(H), "size": len(H)}
    return 0, dump(out)


def cmd_export_dot(args) -> tuple[int, str]:
    inp = read_input(args.input)
    obj = inp.json()
    if isinstance(obj, dict) and "base" in obj and "variant" in obj:
        v = Variant.parse(obj["variant"])
        H = build(v, poset_from_json(obj["base"], f"{inp.name}: base"))
        return 0, hasse_dot(H.order, [mask_label(K) for K in H.elems], v.value)
    P = poset_from_json(obj, inp.name)
    if args.variant is not None:
        v = Variant.parse(args.variant)
        H = build(v, P)
        return 0, hasse_dot(H.order, [mask_label(K) for K in H.elems], v.value)
    return 0, hasse_dot(P)


def _coalgebra(inp: Input, args) -> Coalgebra:
    obj = inp.json()
    if isinstance(obj, dict) and args.variant is not None and "variant" not in obj:
        obj = {**obj, "variant": args.variant}
    return coalgebra_from_json(obj, inp.name)


def cmd_dualize(args) -> tuple[int, str]:
    inp = read_input(args.input)
    c = _coalgebra(inp, args)
    A = complex_algebra(c)
    report = check_axioms(A)
    out = {"input_digest": inp.digest, "variant": c.variant.value,
           "algebra": algebra_to_json(A), "axioms": report.to_json()}
    return (0 if report.passed else 1), dump(out)


def _algebra_witness(A, B):
    if isinstance(A, ModalAlgebra):
        perm = modal_isomorphism(A, B)
        return None if perm is None else {"kind": "atom-permutation", "perm": list(perm)}
    same = A.base == B.base and all(getattr(A, t, None) == getattr(B, t, None)
                                    for t in ("box", "diamond"))
    return {"kind": "identity"} if same else None


def cmd_framify(args) -> tuple[int, str]:
    inp = read_input(args.input)
    obj = inp.json()
    if isinstance(obj, dict) and "algebra" in obj:
        obj = obj["algebra"]  # accept dualize output directly
    A = algebra_from_json(obj, inp.name)
    c = frame_from_algebra(A)
    witness = _algebra_witness(A, complex_algebra(c))
    out = {"input_digest": inp.digest, "frame": coalgebra_to_json(c),
           "algebra_isomorphism": witness}
    ok = witness is not None
    if args.against is not None:
        ref = read_input(args.against)
        target = _coalgebra(ref, args)
        perm = frame_isomorphism(c, target)
        out["against_digest"] = ref.digest
        out["frame_isomorphism"] = None if perm is None else list(perm)
        ok = ok and perm is not None
    return (0 if ok else 1), dump(out)


def cmd_bisim(args) -> tuple[int, str]:
    inp = read_input(args.input)
    c = _coalgebra(inp, args)
    part = bisim_quotient(c)
    out = {"input_digest": inp.digest, "variant": c.variant.value,
           "blocks": list(part.blocks), "n_blocks": part.n_blocks,
           "classes": [[x for x in range(c.n) if part.blocks[x] == b]
                       for b in range(part.n_blocks)]}
    if c.variant is Variant.CLASSICAL:
        q, _ = quotient(c, part)
        out["quotient"] = coalgebra_to_json(q)
    else:
        R, rounds = bisim_preorder(c)
        out["preorder"] = [[y for y in range(c.n) if R[x] >> y & 1] for x in range(c.n)]
        out["rounds"] = rounds
    return 0, dump(out)


def cmd_chain(args) -> tuple[int, str]:
    v = _variant(args)
    output = None
    digest_src = {"variant": v.value, "depth": args.depth, "max_n": args.max_n}
    if args.output_poset is not None:
        inp = read_input(args.output_poset)
        output = poset_from_json(inp.json(), inp.name)
        digest_src["output"] = inp.digest
    Z = terminal_chain(v, output, depth=args.depth, cap=args.max_n)
    out = {"input_digest": args_digest(digest_src), "variant": v.value,
           "output": None if output is None else poset_to_json(output),
           "sizes": Z.sizes(), "status": str(Z.status),
           "converged": Z.status.converged, "k": Z.status.k,
           "projections": [list(lv.projection.tbl) for lv in Z.levels[1:]]}
    return 0, dump(out)


_RULES = {"00": (compose_00, 0, Rank0Term), "01": (compose_01, 0, Rank1Term),
          "10": (compose_10, 1, Rank0Term)}


def cmd_compose_terms(args) -> tuple[int, str]:
    fn, lhs_rank, rhs_kind = _RULES[args.rule]
    lhs_in = inline_or_file(args.lhs)
    rhs_in = inline_or_file(args.rhs)
    lhs = term_from_json(lhs_in.json(), "lhs")
    rhs_obj = rhs_in.json()
    if not isinstance(rhs_obj, list):
        raise UsageError("rhs: expected a list of terms")
    rhs = [term_from_json(t, f"rhs[{i}]") for i, t in enumerate(rhs_obj)]
    want_lhs = Rank0Term if lhs_rank == 0 else Rank1Term
    if not isinstance(lhs, want_lhs):
        raise UsageError(f"rule {args.rule} needs a rank-{lhs_rank} left term")
    for i, r in enumerate(rhs):
        if not isinstance(r, rhs_kind):
            raise UsageError(f"rhs[{i}]: rule {args.rule} needs rank-"
                             f"{0 if rhs_kind is Rank0Term else 1} arguments")
    arity = args.arity.split(",") if args.arity else None
    if arity == [""]:
        arity = []
    t = fn(lhs, rhs, arity)
    out = {"input_digest": args_digest({"lhs": lhs_in.digest, "rhs": rhs_in.digest,
                                        "rule": args.rule, "arity": arity}),
           "rule": args.rule, "result": term_to_json(t)}
    return 0, dump(out)


def _config(args) -> suite.SuiteConfig:
    names = tuple(args.suite) if args.suite else tuple(suite.SUITES)
    caps = {}
    if args.max_n is not None:
        caps = {n: args.max_n for n in names}
    for item in args.cap or ():
        name, _, val = item.partition("=")
        try:
            caps[name] = int(val)
        except ValueError:
            raise UsageError(f"--cap expects NAME=INT, got {item!r}") from None
    return suite.SuiteConfig(names, caps, args.trials, args.seed, args.format).validate()


def cmd_check(args) -> tuple[int, str]:
    if args.replay is not None:
        inp = read_input(args.replay)
        obj = inp.json()
        cexs = [c for s in obj.get("suites", []) for p in s.get("properties", [])
                for c in p.get("counterexamples", [])] if isinstance(obj, dict) else obj
        if not isinstance(cexs, list):
            raise UsageError(f"{inp.name}: expected a report or a list of counterexamples")
        results = []
        for c in cexs:
            try:
                reproduced = suite.replay(c)
            except (KeyError, TypeError) as e:
                raise UsageError(f"{inp.name}: malformed counterexample ({e})") from None
            results.append({"property": c["property"], "reproduced": reproduced})
        out = {"input_digest": inp.digest, "replayed": results}
        return (1 if any(r["reproduced"] for r in results) else 0), dump(out)
    config = _config(args)
    report = suite.run_check(config)
    if args.timings:
        for s in report.suites:
            print(f"{s.name}: {s.seconds:.2f}s", file=sys.stderr)
    if config.format == "text":
        text = report.to_text()
    elif config.format == "dot":
        text = report.to_dot()
    else:
        text = dump(report.to_json(timings=args.timings_in_report))
    return (0 if report.passed else 1), text


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--variant", choices=[v.value for v in Variant])
    common.add_argument("--seed", type=int, default=suite.SEED)
    common.add_argument("--trials", type=int)
    common.add_argument("--max-n", dest="max_n", type=int)
    common.add_argument("--format", choices=suite.FORMATS, default="json")
    common.add_argument("-o", "--output", help="write to a file instead of stdout")

    p = argparse.ArgumentParser(prog="vw", description="Finite Vietoris hyperspace workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("hyperspace", parents=[common], help="hyperspace of a poset")
    s.add_argument("input", help="poset JSON file, or - for stdin")
    s.set_defaults(fn=cmd_hyperspace)

    s = sub.add_parser("export-dot", parents=[common], help="Hasse diagram as DOT")
    s.add_argument("input", help="poset or hyperspace JSON file")
    s.set_defaults(fn=cmd_export_dot)

    s = sub.add_parser("dualize", parents=[common], help="complex algebra of a coalgebra")
    s.add_argument("input")
    s.set_defaults(fn=cmd_dualize)

    s = sub.add_parser("framify", parents=[common], help="dual frame of a finite algebra")
    s.add_argument("input")
    s.add_argument("--against", help="frame JSON to produce an isomorphism witness against")
    s.set_defaults(fn=cmd_framify)

    s = sub.add_parser("bisim", parents=[common], help="behavioural equivalence classes")
    s.add_argument("input")
    s.set_defaults(fn=cmd_bisim)

    s = sub.add_parser("chain", parents=[common], help="terminal sequence of a variant")
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--output-poset", dest="output_poset", help="poset JSON of outputs")
    s.set_defaults(fn=cmd_chain)

    s = sub.add_parser("compose-terms", parents=[common], help="substitute rank-0/1 terms")
    s.add_argument("--lhs", required=True, help="term JSON, or @file")
    s.add_argument("--rhs", required=True, help="JSON list of terms, or @file")
    s.add_argument("--rule", required=True, choices=sorted(_RULES))
    s.add_argument("--arity", help="comma-separated target generators (needed when rhs is empty)")
    s.set_defaults(fn=cmd_compose_terms)

    s = sub.add_parser("check", parents=[common], help="run the property suites")
    s.add_argument("--suite", action="append", choices=list(suite.SUITES),
                   help="restrict to a suite (repeatable)")
    s.add_argument("--cap", action="append", metavar="SUITE=N", help="per-suite size cap")
    s.add_argument("--timings", action="store_true", help="print wall-clock per suite on stderr")
    s.add_argument("--timings-in-report", dest="timings_in_report", action="store_true",
                   help="also record wall-clock in the JSON report (not byte-stable)")
    s.add_argument("--replay", help="re-check the counterexamples of a saved report")
    s.set_defaults(fn=cmd_check)
    return p


# output formats each command can render; export-dot always writes DOT
_FORMATS = {"hyperspace": ("json", "dot"), "check": suite.FORMATS, "export-dot": suite.FORMATS}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    allowed = _FORMATS.get(args.command, ("json",))
    if args.format not in allowed:
        print(f"vw {args.command}: error: --format {args.format} not supported "
              f"(expected {' or '.join(allowed)})", file=sys.stderr)
        return 2
    try:
        status, text = args.fn(args)
    except (UsageError, VietorisError, ValueError) as e:
        print(f"vw {args.command}: error: {e}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
