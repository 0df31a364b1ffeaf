"""Command line front end: apndesigns <subcommand> ...

Exit codes: 0 success or all checks hold, 1 a verified negative (not a
design, a conjecture fails), 2 usage or parameter error, 3 undetermined.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import boolfn, codes
from .affine import orbit, stabilizer_order
from .blocks import (
    Block,
    ap_kasami_transfer,
    apn_exponent,
    apn_image_block,
    construct,
    kasami_block,
    kasami_transfer,
    oval_block,
    oval_exponent,
    random_block,
)
from .designs import (
    DesignParams,
    classify,
    run_criteria,
    verify_t_design,
)
from .equations import CONJECTURES, check_conjecture
from .errors import BudgetExceeded, PreconditionError
from .gf2n import make_field

SCHEMA = "1"
EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_UNDETERMINED = 0, 1, 2, 3

log = logging.getLogger("apndesigns")

_APN = {"gold": "Gold", "welch": "Welch", "niho": "Niho", "inverse": "Inverse",
        "dobbertin": "Dobbertin", "kasami-ap": "Kasami"}
_OVAL = {"oval-trans": "TransOval", "oval-segre": "SegreOval",
         "oval-glynn1": "GlynnIOval", "oval-glynn2": "GlynnIIOval"}
FAMILIES = ("kasami", *_APN, "apn", *_OVAL, "oval", "random")


class Spec:
    """A base block plus what is known about where it came from."""

    def __init__(self, block: Block, construction: str, params: dict,
                 transfer=None, equation_exponent=None):
        self.block = block
        self.construction = construction
        self.params = params
        self.transfer = transfer  # (E, d) or None
        self.equation_exponent = equation_exponent


def _need(value, flag, family):
    if value is None:
        raise PreconditionError(f"--family {family} needs {flag}")
    return value


def build_spec(args) -> Spec:
    if getattr(args, "block", None):
        data = json.loads(Path(args.block).read_text())
        block = Block.from_json(data)
        spec = Spec(block, data.get("construction", "explicit"), data.get("params", {}))
        i = spec.params.get("i")
        # the transfer pair is recoverable when the recorded recipe still rebuilds this block
        if spec.construction == "kasami" and i and kasami_block(block.ctx, i) == block:
            spec.transfer, spec.equation_exponent = kasami_transfer(block.ctx, i), 3
        return spec
    if getattr(args, "label", None):
        return Spec(construct(args.label), "label", {"label": args.label})
    fam = args.family
    if fam is None:
        raise PreconditionError("give --family, --label or --block")
    n = _need(args.n, "--n", fam)
    ctx = make_field(n)
    params = {"n": n}
    if fam == "kasami":
        i = _need(args.i, "--i", fam)
        E, d = kasami_transfer(ctx, i)
        return Spec(kasami_block(ctx, i), "kasami", {**params, "i": i}, (E, d), 3)
    if fam in _APN:
        s = apn_exponent(_APN[fam], n, args.i)
        if args.i is not None:
            params["i"] = args.i
        spec = Spec(apn_image_block(ctx, s), fam, {**params, "s": s % ctx.order})
        if fam == "kasami-ap":
            spec.transfer = ap_kasami_transfer(ctx, args.i)
            spec.equation_exponent = 2**args.i + 1
        return spec
    if fam == "apn":
        s = _need(args.s, "--s", fam)
        return Spec(apn_image_block(ctx, s), fam, {**params, "s": s})
    if fam in _OVAL:
        s = oval_exponent(_OVAL[fam], n, args.i, args.bar)
        return Spec(oval_block(ctx, s), fam, {**params, "s": s, "bar": args.bar})
    if fam == "oval":
        s = _need(args.s, "--s", fam)
        return Spec(oval_block(ctx, s), fam, {**params, "s": s})
    k = _need(args.k, "--k", fam)
    rng = np.random.default_rng(args.seed)
    return Spec(random_block(ctx, k, rng), fam, {**params, "k": k, "seed": args.seed})


# -- subcommands --------------------------------------------------------------

def cmd_block(args):
    spec = build_spec(args)
    report = spec.block.to_json(spec.construction, spec.params)
    report["k"] = spec.block.k
    text = f"{spec.construction} {spec.params}: k={spec.block.k}\n" + " ".join(report["members"])
    return report, text, EXIT_OK


def cmd_orbit(args):
    spec = build_spec(args)
    D = orbit(spec.block)
    if args.binary:
        if not args.out:
            raise PreconditionError("--binary needs --out")
        Path(args.out).write_bytes(D.to_binary())
        args.out = None
    report = {"v": D.v, "k": D.k, "stab_order": D.stab_order, "num_blocks": D.num_blocks}
    if not args.binary:
        report["design"] = D.to_json(spec.construction)
    text = f"orbit: v={D.v} k={D.k} stab={D.stab_order} blocks={D.num_blocks}"
    return report, text, EXIT_OK


def _design_result(res):
    return res.to_json() if isinstance(res, DesignParams) else {"not_a_design": res.to_json()}


def cmd_verify(args):
    spec = build_spec(args)
    D = orbit(spec.block)
    stab = stabilizer_order(spec.block)
    t2, t3 = verify_t_design(D, 2), verify_t_design(D, 3)
    report = {
        "construction": spec.construction, "params": spec.params,
        "stab_order": stab, "num_blocks": D.num_blocks,
        "orbit_stabilizer_ok": stab * D.num_blocks == D.v * (D.v - 1),
        "t2": _design_result(t2), "t3": _design_result(t3),
    }
    if args.criteria:
        E, d = spec.transfer or (None, 1)
        summary = run_criteria(D, E, d, spec.equation_exponent if E is not None else None)
        report["criteria"] = summary.to_json()
        report["criteria"]["source"] = "transfer pair" if E is not None else "base block, d=1"
    ok = isinstance(t3, DesignParams)
    if ok:
        text = f"{t3}, stab={stab}, blocks={D.num_blocks}"
    else:
        w = t3.to_json()["witness"]
        text = (f"not a 3-design: {w[0]['subset']} in {w[0]['count']} blocks, "
                f"{w[1]['subset']} in {w[1]['count']}; stab={stab}, blocks={D.num_blocks}")
    if args.criteria:
        text += "\ncriteria agree: " + str(report["criteria"]["agree"])
    return report, text, EXIT_OK if ok else EXIT_NEGATIVE


def _params_text(v, dim, dist: codes.Distance):
    d = dist.exact if dist.exact is not None else f"{dist.lower}..{dist.upper}"
    return f"[{v},{dim},{d}]"


def cmd_code(args):
    spec = build_spec(args)
    D = orbit(spec.block)
    C = codes.code_from_design(D)
    dist = codes.min_distance(C, args.budget, args.seed)
    if args.exact and dist.exact is None:
        raise BudgetExceeded(f"minimum distance only bounded: {dist.lower} <= d <= {dist.upper}")
    report = {"v": C.v, "dim": C.dim, **dist.to_json(), "self_dual": codes.is_self_dual(C)}
    text = _params_text(C.v, C.dim, dist)
    try:
        counts = codes.weight_enumerator(C, args.budget, via_dual=True)
        report["weight_enumerator"] = codes.enumerator_dict(counts)
    except BudgetExceeded:
        counts = None
    if args.dual:
        Cd = codes.dual(C)
        if counts is not None:
            dd = codes._min_nonzero(codes.macwilliams(counts, C.v, C.dim))
            ddist = codes.Distance(dd, dd)
        else:
            ddist = codes.min_distance(Cd, args.budget, args.seed)
        report["dual"] = {"v": Cd.v, "dim": Cd.dim, **ddist.to_json()}
        text += ", dual " + _params_text(Cd.v, Cd.dim, ddist)
    text += f", self-dual {str(report['self_dual']).lower()}"
    return report, text, EXIT_OK


def _int_list(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


def cmd_conjecture(args):
    results = [check_conjecture(args.id, n, args.i) for n in _int_list(args.n)]
    report = {"results": [r.to_json(timing=not args.no_timestamp) for r in results]}
    text = "\n".join(f"{r.id} n={r.n}: {r.verdict}" for r in results)
    verdicts = {r.verdict for r in results}
    if "fails" in verdicts:
        code = EXIT_NEGATIVE
    elif "out-of-budget" in verdicts:
        code = EXIT_UNDETERMINED
    else:
        code = EXIT_OK
    return report, text, code


def cmd_classify(args):
    labels = [x.strip() for x in args.labels.split(",") if x.strip()]
    if not labels:
        raise PreconditionError("--labels needs at least one design label")
    designs = {lab: orbit(construct(lab)) for lab in labels}
    result = classify(designs, args.node_budget)
    report = result.to_json()
    text = "\n".join("{" + ", ".join(c) + "}" for c in result.classes)
    if result.undetermined:
        text += "\nundetermined: " + "; ".join(f"{a}~{b}" for a, b in result.undetermined)
    return report, text, EXIT_UNDETERMINED if result.undetermined else EXIT_OK


def cmd_walsh(args):
    spec = build_spec(args)
    w = boolfn.walsh(boolfn.char_fn(spec.block))
    vals, counts = np.unique(w.coeffs, return_counts=True)
    dist = {str(int(v)): int(c) for v, c in zip(vals, counts)}
    report = {**w.to_json(), "distribution": dist}
    if spec.block.ctx.n % 2:
        report["semi_bent"] = boolfn.is_semibent(w)
    text = "walsh values: " + ", ".join(f"{v} x{c}" for v, c in dist.items())
    return report, text, EXIT_OK


# -- parser -----------------------------------------------------------------

def _add_common(p):
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit timestamps and timings, for byte-stable output")
    p.add_argument("--seed", type=int, default=codes.DEFAULT_SEED,
                   help=f"seed for randomized steps (default {codes.DEFAULT_SEED})")
    p.add_argument("--threads", type=int, help="worker threads (sets APNDESIGNS_THREADS)")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_family(p):
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--label", help="design label such as KA_5_1, AP_5_13, OV_5_6")
    p.add_argument("--block", help="block JSON file written by the block subcommand")
    p.add_argument("--n", type=int)
    p.add_argument("--i", type=int)
    p.add_argument("--s", type=int, help="exponent for --family apn / oval")
    p.add_argument("--bar", action="store_true", help="use the bar exponent 1-s of an oval family")
    p.add_argument("--k", type=int, help="block size for --family random")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apndesigns", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (
        ("block", cmd_block, "construct a base block"),
        ("orbit", cmd_orbit, "orbit of a block under x -> ax+b"),
        ("verify", cmd_verify, "check the 2- and 3-design properties of an orbit"),
        ("code", cmd_code, "binary code spanned by an orbit design"),
        ("walsh", cmd_walsh, "Walsh spectrum of a block's indicator"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_family(p)
        _add_common(p)
        p.set_defaults(func=fn)
        if name == "orbit":
            p.add_argument("--binary", action="store_true", help="write the binary orbit file to --out")
        if name == "verify":
            p.add_argument("--criteria", action="store_true",
                           help="also evaluate the equivalent criteria")
        if name == "code":
            p.add_argument("--budget", type=int, default=codes.ENUM_BUDGET,
                           help="log2 of the codeword enumeration budget")
            p.add_argument("--dual", action="store_true", help="report dual code parameters")
            p.add_argument("--exact", action="store_true",
                           help="fail with exit 2 unless the distance is exact")

    p = sub.add_parser("conjecture", help="check a conjecture at given n")
    p.add_argument("--id", required=True, choices=CONJECTURES)
    p.add_argument("--n", required=True, help="comma separated, e.g. 5,7,11")
    p.add_argument("--i", type=int, help="parameter i for unique-root")
    _add_common(p)
    p.set_defaults(func=cmd_conjecture)

    p = sub.add_parser("classify", help="partition designs into isomorphism classes")
    p.add_argument("--labels", required=True, help="comma separated labels, e.g. KA_5_1,AP_5_13")
    p.add_argument("--node-budget", type=int, help="search tree limit per pair")
    _add_common(p)
    p.set_defaults(func=cmd_classify)
    return parser


def _emit(report, text, args):
    if args.format == "json":
        out = {"schema": SCHEMA, "command": args.command, **report}
        if not args.no_timestamp:
            out["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        body = json.dumps(out, indent=2, default=int) + "\n"
    else:
        body = text + "\n"
    if args.out:
        Path(args.out).write_text(body)
    else:
        sys.stdout.write(body)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.threads is not None:
        if args.threads < 1:
            parser.error("--threads must be positive")
        os.environ["APNDESIGNS_THREADS"] = str(args.threads)
    log.info("running %s", args.command)
    try:
        report, text, code = args.func(args)
    except (PreconditionError, ValueError, OSError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(report, text, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
