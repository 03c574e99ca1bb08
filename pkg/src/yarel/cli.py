"""Command-line front end.

Exit codes: 0 success, 1 program or analysis error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

from . import int32
from .analysis import DEFAULT_PROBES, DEFAULT_RANGE, NotAffine, classify, extract_affine
from .checker import check_unit, diagnose
from .codegen import emit_all
from .errors import CheckFailed, WrongArgCount, YarelError
from .evaluator import EvalLimits, run
from .inverter import invert_env, invert_unit, inverse_name
from .syntax import Call, load_file, pretty_print

EXIT_OK, EXIT_ERROR, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def search_path(extra: Sequence[str]) -> List[str]:
    dirs = list(extra)
    env = os.environ.get("YAREL_PATH", "")
    dirs.extend(d for d in env.split(os.pathsep) if d)
    return dirs


def _emit(args, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _fail(args, command: str, err: YarelError) -> int:
    errors = err.errors if isinstance(err, CheckFailed) else [err]
    if args.json:
        print(json.dumps({"command": command, "ok": False,
                          "errors": [{"kind": e.kind, "path": e.path,
                                      "line": e.loc.line if e.loc else 0,
                                      "col": e.loc.col if e.loc else 0,
                                      "message": e.message} for e in errors]}, sort_keys=True))
    else:
        for e in errors:
            print(e.render(), file=sys.stderr)
    return EXIT_ERROR


def _limits(args) -> EvalLimits:
    if args.max_steps < 1:
        raise UsageError("--max-steps must be positive")
    return EvalLimits(args.max_steps)


def parse_values(tokens: Sequence[str]) -> List[int]:
    values = []
    for tok in tokens:
        for part in tok.split(","):
            part = part.strip()
            if not part:
                continue
            try:
                v = int(part)
            except ValueError:
                raise UsageError(f"not an integer: {part!r}") from None
            if not int32.in_range(v):
                raise UsageError(f"{v} does not fit in {int32.WIDTH} bits")
            values.append(v)
    return values


def parse_range(text: str):
    sep = ":" if ":" in text else ","
    try:
        lo, hi = (int(p) for p in text.split(sep))
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected LO:HI") from None
    if lo > hi:
        raise UsageError(f"empty range {text!r}")
    return lo, hi


def cmd_check(args) -> int:
    dirs = search_path(args.include)
    payload = {"command": "check", "ok": True, "errors": [], "functions": {}}
    lines, status = [], EXIT_OK
    for path in args.paths:
        try:
            unit = load_file(path, dirs)
            errors = diagnose(unit)
        except YarelError as exc:
            errors = [exc]
            unit = None
        if errors:
            status = EXIT_ERROR
            payload["ok"] = False
            for e in errors:
                payload["errors"].append({"kind": e.kind, "path": e.path,
                                          "line": e.loc.line if e.loc else 0,
                                          "col": e.loc.col if e.loc else 0, "message": e.message})
                if not args.json:
                    print(e.render(), file=sys.stderr)
        else:
            env = check_unit(unit)
            payload["functions"].update({name: env.arity(name) for name in env})
            lines.append(f"{path}: ok ({len(env)} functions)")
    _emit(args, payload, lines)
    return status


def cmd_run(args) -> int:
    values = parse_values(args.values)
    limits = _limits(args)
    try:
        unit = load_file(args.path, search_path(args.include))
        env = check_unit(unit)
    except YarelError as exc:
        return _fail(args, "run", exc)
    if args.fname not in env and inverse_name(args.fname) in env:
        env = invert_env(env)
    if args.fname not in env:
        raise UsageError(f"no function named {args.fname}")
    try:
        result = run(env, args.fname, values, limits)
    except WrongArgCount as exc:
        raise UsageError(exc.message) from None
    except YarelError as exc:
        return _fail(args, "run", exc)
    _emit(args, {"command": "run", "ok": True, "function": args.fname, "args": values,
                 "result": list(result)},
          [",".join(map(str, result))])
    return EXIT_OK


def cmd_invert(args) -> int:
    try:
        unit = load_file(args.path, search_path(args.include))
        check_unit(unit)
        inverted = invert_unit(unit)
        check_unit(inverted)
    except YarelError as exc:
        return _fail(args, "invert", exc)
    written = []
    try:
        if args.out and os.path.isdir(args.out):
            for name, m in inverted.modules.items():
                target = os.path.join(args.out, name + ".yarel")
                _write(target, pretty_print(m) + "\n")
                written.append(target)
        elif args.out and args.out != "-":
            _write(args.out, pretty_print(inverted.entry_module) + "\n")
            written.append(args.out)
        elif not args.json:
            print(pretty_print(inverted.entry_module))
    except OSError as exc:
        print(f"{args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_ERROR
    if args.json:
        print(json.dumps({"command": "invert", "ok": True, "written": written,
                          "source": pretty_print(inverted.entry_module)}, sort_keys=True))
    return EXIT_OK


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_emit(args) -> int:
    try:
        unit = load_file(args.path, search_path(args.include))
        env = check_unit(unit)
        files = emit_all(env, with_inverses=not args.no_inverses)
    except YarelError as exc:
        return _fail(args, "emit", exc)
    try:
        os.makedirs(args.out_dir, exist_ok=True)
        for name in sorted(files):
            _write(os.path.join(args.out_dir, name), files[name])
    except OSError as exc:
        print(f"{args.out_dir}: {exc.strerror}", file=sys.stderr)
        return EXIT_ERROR
    _emit(args, {"command": "emit", "ok": True, "files": sorted(files)},
          [os.path.join(args.out_dir, name) for name in sorted(files)])
    return EXIT_OK


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def cmd_affine(args) -> int:
    domain = parse_range(args.range)
    limits = _limits(args)
    if args.probes < 1:
        raise UsageError("--probes must be positive")
    try:
        unit = load_file(args.path, search_path(args.include))
        env = check_unit(unit)
    except YarelError as exc:
        return _fail(args, "affine", exc)
    if args.fname not in env:
        raise UsageError(f"no function named {args.fname}")
    e = Call(args.fname)
    report = classify(e, env)
    try:
        result = extract_affine(e, env, args.probes, domain, args.seed, limits)
    except YarelError as exc:
        return _fail(args, "affine", exc)

    arity = env.arity(args.fname)
    payload = {"command": "affine", "function": args.fname, "arity": arity,
               "if_free": report.is_if_free, "nest_free": report.is_nest_free,
               "srl_fragment": report.is_srl_fragment, "range": list(domain),
               "probes": args.probes, "seed": args.seed}
    lines = [
        f"function:     {args.fname} (arity {arity})",
        f"if-free:      {_yes(report.is_if_free)}",
        f"nest-free:    {_yes(report.is_nest_free)}",
        f"srl-fragment: {_yes(report.is_srl_fragment)}",
        f"probes:       {args.probes} in [{domain[0]}, {domain[1]}] (seed {args.seed})",
    ]
    flags = (f"if_free={int(report.is_if_free)} nest_free={int(report.is_nest_free)} "
             f"srl={int(report.is_srl_fragment)}")
    if isinstance(result, NotAffine):
        payload.update(ok=False, affine=False, witness=list(result.witness),
                       expected=list(result.expected), actual=list(result.actual))
        lines += [
            "affine:       no",
            f"witness:      {','.join(map(str, result.witness))}",
            f"predicted:    {','.join(map(str, result.expected))}",
            f"computed:     {','.join(map(str, result.actual))}",
            f"summary: fn={args.fname} arity={arity} affine=no {flags} "
            f"witness={','.join(map(str, result.witness))}",
        ]
        _emit(args, payload, lines)
        return EXIT_ERROR
    det = result.determinant
    payload.update(ok=True, affine=True, matrix=[list(r) for r in result.matrix],
                   offset=list(result.offset), determinant=det)
    width = max(len(str(v)) for row in result.matrix for v in row + (0,))
    width = max(width, max(len(str(v)) for v in result.offset))
    lines.append("affine:       yes")
    lines.append("matrix:")
    lines.extend("  " + " ".join(str(v).rjust(width) for v in row) for row in result.matrix)
    lines.append("offset:")
    lines.append("  " + " ".join(str(v).rjust(width) for v in result.offset))
    lines.append(f"determinant:  {det}")
    lines.append(f"summary: fn={args.fname} arity={arity} affine=yes det={det} {flags} "
                 f"probes={args.probes}")
    _emit(args, payload, lines)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="yarel", description="Yarel reversible language toolchain")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-I", "--include", action="append", default=[], metavar="DIR",
                        help="extra import search directory (repeatable; YAREL_PATH also read)")
    common.add_argument("--json", action="store_true", help="print one JSON object")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="parse and arity-check modules")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", parents=[common], help="run a function",
                       description="Values may be comma separated; put -- before negative values.")
    p.add_argument("path")
    p.add_argument("fname")
    p.add_argument("values", nargs="*")
    p.add_argument("--max-steps", type=int, default=EvalLimits().max_steps)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("invert", parents=[common], help="add f_inv companions to a module")
    p.add_argument("path")
    p.add_argument("--out", help="output file, or a directory to write every module of the unit")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("emit", parents=[common], help="write Java classes, one per function")
    p.add_argument("path")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-inverses", action="store_true", help="skip the f_inv companions")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("affine", parents=[common], help="fit x -> Mx + c and report det M")
    p.add_argument("path")
    p.add_argument("fname")
    p.add_argument("--probes", type=int, default=DEFAULT_PROBES)
    p.add_argument("--range", default=f"{DEFAULT_RANGE[0]}:{DEFAULT_RANGE[1]}", metavar="LO:HI",
                   help="probe range; write --range=-5:5 when LO is negative")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=EvalLimits().max_steps)
    p.set_defaults(func=cmd_affine)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"yarel {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"yarel {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
