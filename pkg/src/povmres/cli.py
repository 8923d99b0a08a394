"""Command-line front end.

Exit codes: 0 success, 1 domain or verification failure, 2 I/O or parse failure.
Reports are JSON written to stdout (or ``--report PATH``); diagnostics go to
stderr at the level set by ``POVM_LOG_LEVEL``.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import channels as chn
from . import conversion as cv
from . import measurement as ms
from . import monotones as mo
from . import tolerances
from .errors import FreeOperationError, PovmError, TheoremViolation, ValidationError
from .suite import run_suite

log = logging.getLogger("povmres")

EXIT_OK, EXIT_FAIL, EXIT_IO = 0, 1, 2


class InputError(Exception):
    """Unreadable or unparsable input file (exit 2)."""


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def new_report(command: str) -> dict:
    return {
        "command": command,
        "c_m": None,
        "e_m": None,
        "log_base": tolerances.LOG_BASE,
        "tolerances": tolerances.as_dict(),
    }


def _load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON ({exc.msg})") from None


def _povm_arrays(path: str):
    obj = _load_json(path)
    try:
        return ms.povm_arrays_from_json(obj)
    except (ValidationError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_povm(path: str) -> ms.Povm:
    effects, dims = _povm_arrays(path)
    return ms.Povm(effects, dims)


def load_channel(path: str) -> chn.KrausChannel:
    obj = _load_json(path)
    try:
        return chn.KrausChannel.from_json(obj)
    except ValidationError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def dump(obj, path: str | None = None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _entanglement_block(p: ms.Povm) -> dict:
    b = mo.entanglement_monotone_bracket(p)
    block = b.to_json()
    sep = ms.is_separable_effectwise(p)
    block["separability"] = sep.value
    block["faithfulness_inconclusive"] = b.upper <= tolerances.BRACKET_TOL and sep is ms.Separability.UNDECIDED
    return block


def cmd_validate(args) -> int:
    effects, dims = _povm_arrays(args.povm)
    problems = ms.diagnose(effects, dims)
    report = new_report("validate")
    report["valid"] = not problems
    report["diagnostics"] = [
        {"invariant": p.invariant, "effect": p.index, "residual": _finite(p.residual)} for p in problems
    ]
    for p in problems:
        log.error("%s: %s", args.povm, p)
    dump(report, args.report)
    return EXIT_OK if not problems else EXIT_FAIL


def cmd_coherence(args) -> int:
    p = load_povm(args.povm)
    report = new_report("coherence")
    report["c_m"] = mo.coherence_monotone(p)
    report["contributions"] = mo.coherence_contributions(p)
    report["incoherent"] = ms.is_incoherent(p)
    dump(report, args.report)
    return EXIT_OK


def cmd_entanglement(args) -> int:
    p = load_povm(args.povm)
    if p.dims_split is None:
        raise ValidationError("entanglement requires a POVM with dims_split")
    report = new_report("entanglement")
    report["e_m"] = _entanglement_block(p)
    report["effects"] = [b.to_json() for b in mo.effect_brackets(p)]
    dump(report, args.report)
    return EXIT_OK


def cmd_convert(args) -> int:
    p = load_povm(args.povm)
    if args.channel == "cnot":
        ch, channel_id = chn.cnot_dagger_channel(p.dim), cv.CNOT_ID
    else:
        ch, channel_id = load_channel(args.channel), f"file:{Path(args.channel).name}"
    out = cv.convert(p, ch)
    c = mo.coherence_monotone(p)
    em = mo.entanglement_monotone_bracket(out)
    reg = cv.regime(p.dim, p.outcomes)
    result = cv.ConversionResult(c, em, channel_id, reg, cv.lower_bound_factor(p.dim, p.outcomes) * c, c)
    report = new_report("convert")
    report["c_m"] = c
    report["e_m"] = _entanglement_block(out)
    report["conversion"] = result.to_json()
    if args.output:
        dump(out.to_json(), args.output)
        report["output"] = args.output
    dump(report, args.report)
    return EXIT_OK


def cmd_verify(args) -> int:
    p = load_povm(args.povm)
    report = new_report("verify")
    report["c_m"] = mo.coherence_monotone(p)
    report["theorem"] = args.theorem
    if args.theorem == 1:
        sweep = cv.theorem1_sweep(p, args.trials, args.seed)
        ok = cv.verify_theorem1(p, args.trials, args.seed)
        report["max_e_m_lower"] = max(b.lower for _, _, b in sweep)
    elif args.theorem == 2:
        try:
            result = cv.verify_theorem2(p)
            ok = True
            report["conversion"] = result.to_json()
            report["e_m"] = result.output_em.to_json()
        except TheoremViolation as exc:
            ok = False
            report["error"] = str(exc)
    else:
        inc = cv.induced_coherence(p, args.trials, args.seed)
        report["induced_coherence"] = inc
        ok = inc <= report["c_m"] + 1e-8
        if p.outcomes >= p.dim:
            ok = ok and abs(inc - report["c_m"]) <= 1e-7
        if ms.is_incoherent(p):
            ok = ok and abs(inc) <= 1e-7
    report["passed"] = ok
    dump(report, args.report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_suite(args) -> int:
    outcomes = run_suite(args.seed, args.trials, args.jobs)
    report = new_report("suite")
    report["seed"] = args.seed
    report["trials"] = args.trials
    report["properties"] = [o.to_json() for o in outcomes]
    report["passed"] = all(o.ok for o in outcomes)
    width = max(len(o.name) for o in outcomes)
    for o in outcomes:
        status = "PASS" if o.ok else "FAIL"
        line = f"{status}  {o.name:<{width}}  {o.passed:>4}/{o.total:<4} max residual {o.max_residual:.2e}"
        if not o.ok:
            line += f"  (seed {args.seed}, instance {o.failing_instance}{', ' + o.error if o.error else ''})"
        print(line, file=sys.stderr)
    dump(report, args.report)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="povmres", description="Coherence and entanglement of quantum measurements.")
    parser.add_argument("--report", metavar="PATH", help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check POVM invariants")
    p.add_argument("povm")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("coherence", help="coherence monotone of a POVM")
    p.add_argument("povm")
    p.set_defaults(func=cmd_coherence)

    p = sub.add_parser("entanglement", help="entanglement bracket of a bipartite POVM")
    p.add_argument("povm")
    p.set_defaults(func=cmd_entanglement)

    p = sub.add_parser("convert", help="convert coherence into bipartite entanglement")
    p.add_argument("povm")
    p.add_argument("--channel", default="cnot", help="'cnot' or a channel JSON file")
    p.add_argument("-o", "--output", help="write the converted POVM here")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("verify", help="check a conversion theorem on one POVM")
    p.add_argument("povm")
    p.add_argument("--theorem", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--seed", type=_nonnegative, default=0)
    p.add_argument("--trials", type=_positive, default=100)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("suite", help="run every seeded property suite")
    p.add_argument("--seed", type=_nonnegative, default=0)
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("POVM_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (FreeOperationError, ValidationError, PovmError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
