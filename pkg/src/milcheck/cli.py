"""Command-line front end.

Exit codes: 0 the property holds or a witness was found, 1 it fails or no
witness exists, 2 usage or input error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import _kernels
from .bisim import largest_bisimulation, teams_bisimilar
from .bounded_sat import SatQuery, bounded_sat
from .checker import BudgetExhausted, CheckConfig, UnregisteredAtomError, check
from .corpus import corpus_to_json, gen_corpus
from .dining import (
    anonymity_formula, build_model, min_branching, phi_global, phi_local, succinct_chain,
    succinct_family, verify_proposition,
)
from .fo_translate import (
    EsoBudgetExhausted, TranslationError, export, render_eso, sentence_size, translate,
)
from .formula import FormulaSyntaxError, modal_depth, parse, render, size
from .kripke import ModelFormatError, load_model, model_to_dict, save_model

SCHEMA = "milcheck.report/1"
DEFAULT_BUDGET = 10 ** 7

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _formula_arg(text):
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read formula file: {e}") from None
    return parse(text.strip())


def _team_arg(text, m):
    if text is None:
        return None
    try:
        team = frozenset(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad team {text!r}: expected comma-separated world ids") from None
    return m.check_team(team)


def _cfg(args):
    return CheckConfig(
        enable_flat_shortcut=not getattr(args, "no_flat_shortcut", False),
        enable_memo=not getattr(args, "no_memo", False),
        max_enumeration_budget=args.budget,
    )


def _cmd_check(args):
    m, file_team = load_model(args.model)
    team = _team_arg(args.team, m)
    if team is None:
        team = file_team if file_team is not None else frozenset(m.worlds)
    f = _formula_arg(args.formula)
    holds = check(m, team, f, _cfg(args))
    report = {"formula": render(f), "team": sorted(team), "holds": holds}
    text = f"{'holds' if holds else 'fails'}: {render(f)} on team {sorted(team)}"
    return (EXIT_OK if holds else EXIT_FAIL), report, text


def _cmd_sat(args):
    f = _formula_arg(args.formula)
    q = SatQuery(f, args.max_worlds, require_nonempty_team=not args.allow_empty_team)
    found = bounded_sat(q, _cfg(args))
    if found is None:
        report = {"formula": render(f), "max_worlds": args.max_worlds, "witness": None}
        return EXIT_FAIL, report, f"no witness with at most {args.max_worlds} worlds"
    m, team = found
    doc = model_to_dict(m, team)
    if args.output:
        save_model(m, team, args.output)
    report = {"formula": render(f), "max_worlds": args.max_worlds, "witness": doc}
    text = json.dumps(doc, indent=1)
    return EXIT_OK, report, text


def _cmd_translate(args):
    f = _formula_arg(args.formula)
    s = translate(f)
    out = render_eso(s) if args.format == "text" else export(s, args.format)
    report = {
        "formula": render(f), "format": args.format, "output": out,
        "second_order": list(s.so_vars), "size": sentence_size(s),
    }
    return EXIT_OK, report, out.rstrip("\n")


def _cmd_bisim(args):
    m1, t1 = load_model(args.model1)
    m2, t2 = load_model(args.model2)
    vars = sorted(v for v in args.vars.split(",") if v) if args.vars is not None else None
    z = largest_bisimulation(m1, m2, vars)
    pairs = sorted(z.pairs)
    report = {"relation": [list(p) for p in pairs]}
    lines = ["relation: " + " ".join(f"{a}~{b}" for a, b in pairs)]
    code = EXIT_OK
    if t1 is not None and t2 is not None:
        ok = teams_bisimilar(z, t1, t2)
        report["teams_bisimilar"] = ok
        lines.append(f"teams {sorted(t1)} and {sorted(t2)}: {'bisimilar' if ok else 'not bisimilar'}")
        code = EXIT_OK if ok else EXIT_FAIL
    return code, report, "\n".join(lines)


def _cmd_dc(args):
    n = args.n
    inst = build_model(n)
    report = {"n": n, "worlds": inst.model.n_worlds, "edges": len(inst.model.edges)}
    lines = [f"dining cryptographers n={n}: {inst.model.n_worlds} worlds, {len(inst.model.edges)} edges"]
    code = EXIT_OK
    if args.emit_model:
        save_model(inst.model, frozenset({inst.root}), args.emit_model)
        lines.append(f"model written to {args.emit_model}")
    cfg = _cfg(args)
    root = frozenset({inst.root})
    if args.check:
        parts = {"global": check(inst.model, root, phi_global(n), cfg)}
        for i in range(n):
            for k in range(n):
                if i != k:
                    parts[f"local_{i}_{k}"] = check(inst.model, root, phi_local(n, i, k), cfg)
        ok = all(parts.values())
        report["anonymity_formula"] = ok
        report["conjuncts"] = parts
        lines.append(f"anonymity formula at q0: {'holds' if ok else 'fails'}")
        lines.extend(f"  {name}: {'holds' if v else 'fails'}" for name, v in parts.items())
        code = max(code, EXIT_OK if ok else EXIT_FAIL)
    if args.verify_proposition:
        ok, failures = verify_proposition(inst, detail=True)
        report["proposition"] = ok
        report["proposition_failures"] = len(failures)
        lines.append(f"direct anonymity check: {'holds' if ok else f'fails ({len(failures)} cases)'}")
        code = max(code, EXIT_OK if ok else EXIT_FAIL)
    if args.succinct is not None:
        i = args.succinct
        fam = succinct_family(i)
        chain = succinct_chain(i)
        bound = 2 ** (i + 1) + 1
        mb = min_branching(chain, bound, cfg)
        report["succinct"] = {
            "i": i, "family_size": size(fam), "family_modal_depth": modal_depth(fam),
            "chain_size": size(chain), "chain_min_branching": mb,
        }
        lines.append(
            f"succinct family i={i}: size {size(fam)}, modal depth {modal_depth(fam)}; "
            f"chain member: size {size(chain)}, min root branching {mb}"
        )
    if not (args.check or args.verify_proposition or args.succinct is not None):
        report["anonymity_formula_size"] = size(anonymity_formula(n))
    return code, report, "\n".join(lines)


def _cmd_corpus(args):
    c = gen_corpus(args.seed, args.size)
    text = corpus_to_json(c)
    return EXIT_OK, json.loads(text), text


def build_parser():
    p = argparse.ArgumentParser(prog="milcheck", description=__doc__.splitlines()[0])
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="enumeration step budget for the checker (default 10^7)")
    p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    # same flags after the subcommand; SUPPRESS keeps the top-level value
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    c = add("check", help="check a formula on a model file")
    c.add_argument("model")
    c.add_argument("formula", help="formula text or @file")
    c.add_argument("--team", help="comma-separated world ids (default: the file's team, else all worlds)")
    c.add_argument("--no-flat-shortcut", action="store_true")
    c.add_argument("--no-memo", action="store_true")

    s = add("sat", help="bounded satisfiability search")
    s.add_argument("formula")
    s.add_argument("--max-worlds", type=int, default=3)
    s.add_argument("--allow-empty-team", action="store_true")
    s.add_argument("--output", help="write the witness model file here")

    t = add("translate", help="existential second-order translation")
    t.add_argument("formula")
    t.add_argument("--format", choices=("text", "tptp", "smtlib"), default="text")

    b = add("bisim", help="largest bisimulation between two model files")
    b.add_argument("model1")
    b.add_argument("model2")
    b.add_argument("--vars", help="comma-separated variables for label agreement")

    d = add("dc", help="dining cryptographers case study")
    d.add_argument("--n", type=int, default=3)
    d.add_argument("--emit-model", metavar="PATH")
    d.add_argument("--check", action="store_true", help="check the anonymity formula at q0")
    d.add_argument("--verify-proposition", action="store_true")
    d.add_argument("--succinct", type=int, metavar="I")
    d.add_argument("--no-flat-shortcut", action="store_true")
    d.add_argument("--no-memo", action="store_true")

    g = add("corpus", help="print a seeded formula/model corpus as JSON")
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--size", type=int, default=50)
    return p


_COMMANDS = {
    "check": _cmd_check, "sat": _cmd_sat, "translate": _cmd_translate,
    "bisim": _cmd_bisim, "dc": _cmd_dc, "corpus": _cmd_corpus,
}


def _run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = EXIT_OK if e.code == 0 else EXIT_USAGE
        return code, {"schema": SCHEMA, "error": "usage"}, "", False
    base = {"schema": SCHEMA, "command": args.command}
    try:
        if args.budget is not None and args.budget <= 0:
            raise UsageError("--budget must be positive")
        code, report, text = _COMMANDS[args.command](args)
    except (BudgetExhausted, EsoBudgetExhausted) as e:
        report = {**base, "exit_code": EXIT_BUDGET, "error": "budget", "message": str(e)}
        return EXIT_BUDGET, report, f"budget exhausted: {e}", args.json
    except (UsageError, FormulaSyntaxError, ModelFormatError, TranslationError,
            UnregisteredAtomError, OSError, ValueError) as e:
        report = {**base, "exit_code": EXIT_USAGE, "error": "input", "message": str(e)}
        return EXIT_USAGE, report, f"error: {e}", args.json
    report = {**base, "backend": _kernels.BACKEND, "exit_code": code, **report}
    return code, report, text, args.json


def run(argv=None):
    """Parse ``argv`` and run one subcommand. Returns ``(exit_code, report,
    text)``; report is the JSON-ready dict."""
    return _run(argv)[:3]


def main(argv=None):
    code, report, text, as_json = _run(argv)
    if as_json:
        print(json.dumps(report, indent=1, sort_keys=True))
    elif report.get("error") and text:
        print(text, file=sys.stderr)
    elif text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
