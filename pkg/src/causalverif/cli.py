"""Command-line entry point: ``causalverif <subcommand> ...``.

Exit status is 0 on success, 1 when a ``--fail-on-*`` flag fires or an analysis
precondition does not hold (a failing spec for coverage, a passing formula for
explain, an already determined STE output), and 2 on usage, input and format
errors. ``--json`` prints ``{"tool_version", "subcommand", "inputs", "result"}``.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .cause import (BelowThreshold, CauseReport, blame, bounded_value, check_cause, fraction_str,
                    load_epistemic_state)
from .coverage import causal_coverage, coverage_check, vacuity_check
from .errors import (CausalVerifError, FormulaHolds, OutputAlreadyDetermined, SpecificationFails)
from .explain import explain_approx, explain_exact, render_diagram
from .exprs import parse_assignment
from .ltl import check_structure, check_trace, load_kripke, load_trace, parse_ltl, to_str
from .model import load_model
from .ste import STRATEGIES, X, benchmark, load_netlist, refine, responsibility_order, ternary_eval

_PRECONDITION = (SpecificationFails, FormulaHolds, OutputAlreadyDetermined)


class _Fail(Exception):
    """Analysis finished but a ``--fail-on-*`` condition fired."""


def _q(v) -> str:
    if isinstance(v, BelowThreshold):
        return str(v)
    return fraction_str(Fraction(v))


def _jsonable(v):
    if isinstance(v, (Fraction, BelowThreshold)):
        return _q(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _emit(args, inputs: dict, result: dict, human: str) -> None:
    if args.json:
        env = {"tool_version": __version__, "subcommand": args.command, "inputs": inputs,
               "result": _jsonable(result)}
        sys.stdout.write(json.dumps(env, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(human if human.endswith("\n") else human + "\n")


# ------------------------------------------------------------------- causality


def _report_dict(rep: CauseReport, value=None) -> dict:
    d = {"candidate": dict(rep.candidate), "is_cause": rep.is_cause,
         "responsibility": rep.responsibility if value is None else value,
         "failed_condition": rep.failed_condition, "witness": None}
    if rep.witness is not None:
        w = rep.witness
        d["witness"] = {"contingency": {v: w.contingency_values[v] for v in w.contingency_vars},
                        "alternative": dict(w.alt_cause_values)}
    return d


def _cmd_cause(args):
    m = load_model(args.model)
    rep = check_cause(m, args.context, args.candidate, args.phi, k_max=args.k_max, cap=args.cap, force=args.force)
    inputs = {"model": args.model, "context": args.context, "candidate": args.candidate, "phi": args.phi,
              "k_max": args.k_max}
    _emit(args, inputs, _report_dict(rep), rep.describe())
    return 0


def _cmd_responsibility(args):
    m = load_model(args.model)
    rep = check_cause(m, args.context, args.candidate, args.phi, k_max=args.k_max, cap=args.cap, force=args.force)
    value = rep.responsibility if args.k_max is None else bounded_value(m, rep, args.k_max)
    inputs = {"model": args.model, "context": args.context, "candidate": args.candidate, "phi": args.phi,
              "k_max": args.k_max}
    _emit(args, inputs, {"responsibility": value}, _q(value))
    return 0


def _cmd_blame(args):
    st = load_epistemic_state(args.state)
    value = blame(st, args.setting, args.phi, cap=args.cap, force=args.force)
    inputs = {"state": args.state, "setting": args.setting, "phi": args.phi}
    _emit(args, inputs, {"blame": value, "situations": len(st.situations)}, _q(value))
    return 0


# ------------------------------------------------------------------------- LTL


def _cmd_check(args):
    if (args.kripke is None) == (args.trace is None):
        raise _Usage("check needs exactly one of --kripke or --trace")
    if args.kripke is not None:
        k = load_kripke(args.kripke)
        f = parse_ltl(args.phi, k.alphabet)
        v = check_structure(k, f)
        result = {"holds": v.holds, "product_states": v.product_states, "counterexample": None}
        human = f"{to_str(f)}: {'holds' if v.holds else 'fails'}"
        if v.counterexample is not None:
            cx = v.counterexample
            result["counterexample"] = {"signals": list(cx.signals), "cycles": [list(r) for r in cx.cycles],
                                        "loop_start": cx.loop_start}
            human += "\ncounterexample:\n" + cx.to_csv()
        inputs = {"kripke": args.kripke, "phi": args.phi}
        holds = v.holds
    else:
        t = load_trace(args.trace)
        f = parse_ltl(args.phi, t.signals)
        holds = check_trace(t, f)
        result = {"holds": holds}
        human = f"{to_str(f)}: {'holds' if holds else 'fails'} on the trace"
        inputs = {"trace": args.trace, "phi": args.phi}
    _emit(args, inputs, result, human)
    if args.fail_on_violation and not holds:
        raise _Fail
    return 0


def _cmd_coverage(args):
    k = load_kripke(args.kripke)
    f = parse_ltl(args.phi, k.alphabet)
    if args.counterfactual_only:
        rep = coverage_check(k, f, args.atom)
    else:
        rep = causal_coverage(k, f, args.atom, args.k_max, all_atoms=args.all_atoms, cap=args.cap,
                              force=args.force)
    rows = []
    lines = [f"{'state':<8} {'atom':<8} {'covered':<8} {'cause':<6} {'resp':<7} witness"]
    for e in rep.entries:
        wit = None if e.witness_mutations is None else [[m.state, m.atom] for m in e.witness_mutations]
        rows.append({"state": e.state, "atom": e.atom, "covered": e.covered, "is_cause": e.is_cause,
                     "responsibility": e.responsibility, "witness": wit})
        resp = "-" if e.responsibility is None else _q(e.responsibility)
        cause = "-" if e.is_cause is None else ("yes" if e.is_cause else "no")
        wtxt = "-" if wit is None else ("{}" if not wit else ", ".join(f"flip {a}@{s}" for s, a in wit))
        lines.append(f"{e.state:<8} {e.atom:<8} {('yes' if e.covered else 'no'):<8} {cause:<6} {resp:<7} {wtxt}")
    inputs = {"kripke": args.kripke, "phi": args.phi, "atom": args.atom, "k_max": args.k_max,
              "all_atoms": args.all_atoms}
    _emit(args, inputs, {"formula": to_str(f), "entries": rows}, "\n".join(lines))
    if args.fail_on_uncovered and not any(e.covered for e in rep.entries):
        raise _Fail
    return 0


def _cmd_vacuity(args):
    k = load_kripke(args.kripke)
    f = parse_ltl(args.phi, k.alphabet)
    rep = vacuity_check(k, f)
    rows = []
    lines = [f"{'occurrence':<24} {'polarity':<9} {'replaced':<9} vacuous"]
    for e in rep.entries:
        rows.append({"path": list(e.path), "subformula": e.text, "polarity": e.polarity,
                     "replaced_with": to_str(e.replaced_with), "vacuous": e.vacuous})
        pol = "+" if e.polarity > 0 else "-"
        lines.append(f"{e.text:<24} {pol:<9} {to_str(e.replaced_with):<9} {'yes' if e.vacuous else 'no'}")
    inputs = {"kripke": args.kripke, "phi": args.phi}
    _emit(args, inputs, {"formula": to_str(f), "vacuous": rep.vacuous, "occurrences": rows}, "\n".join(lines))
    if args.fail_on_vacuous and rep.vacuous:
        raise _Fail
    return 0


def _cmd_explain(args):
    t = load_trace(args.trace)
    f = parse_ltl(args.phi, t.signals)
    if args.exact:
        e = explain_exact(t, f, cap=args.cap, force=args.force)
    else:
        e = explain_approx(t, f)
    pts = []
    for p in e.points:
        d = {"signal": p.signal, "cycle": p.cycle, "value": p.value}
        if e.responsibilities is not None:
            d["responsibility"] = e.responsibilities[p]
        pts.append(d)
    inputs = {"trace": args.trace, "phi": args.phi, "method": e.method}
    _emit(args, inputs, {"formula": to_str(f), "method": e.method, "points": pts},
          render_diagram(t, e, color=args.color))
    return 0


# ------------------------------------------------------------------------- STE


def _parse_assign(text: str | None) -> dict[str, Any]:
    if not text:
        return {}
    out = {}
    for k, v in parse_assignment(text):
        out[k] = X if str(v).upper() == "X" else v
    return out


def _cmd_ste(args):
    if args.bench:
        try:
            seed, count = (int(x) for x in args.bench.split(","))
        except ValueError:
            raise _Usage("--bench expects SEED,COUNT") from None
        rows, means = benchmark(seed, count)
        lines = [f"{'circuit':<8} {'x_inputs':<9} " + " ".join(f"{s:<15}" for s in STRATEGIES)]
        for r in rows:
            lines.append(f"{r.circuit:<8} {r.x_inputs:<9} " + " ".join(f"{r.counts[s]:<15}" for s in STRATEGIES))
        lines.append(f"{'mean':<18} " + " ".join(f"{float(means[s]):<15.3f}" for s in STRATEGIES))
        result = {"rows": [{"circuit": r.circuit, "x_inputs": r.x_inputs, "counts": r.counts} for r in rows],
                  "means": means}
        _emit(args, {"bench": args.bench}, result, "\n".join(ln.rstrip() for ln in lines))
        return 0
    if args.netlist is None:
        raise _Usage("ste needs --netlist (or --bench SEED,COUNT)")
    c, init = load_netlist(args.netlist, args.unroll)
    assign = {**init, **_parse_assign(args.assign)}
    outputs = [args.output] if args.output else list(c.outputs)
    if not outputs:
        raise _Usage("netlist declares no outputs; pass --output")
    values = ternary_eval(c, assign)
    result, lines = {"outputs": {}}, []
    for o in outputs:
        if o not in values:
            raise _Usage(f"{o!r} is not a node of the netlist")
        if values[o] != X:
            result["outputs"][o] = {"value": values[o], "order": [], "refinement": None}
            lines.append(f"{o} = {values[o]} (already determined)")
            continue
        order = responsibility_order(c, assign, o, cap=args.cap)
        tr = refine(c, assign, o, args.strategy, seed=args.seed, cap=args.cap)
        result["outputs"][o] = {
            "value": X,
            "order": [{"node": s.node, "score": s.score, "exact": s.exact} for s in order],
            "refinement": {"strategy": tr.strategy, "instantiations": tr.instantiations,
                           "steps": [{"node": st.node, "branch": [list(b) for b in st.branch]} for st in tr.steps],
                           "leaves": [{"branch": [list(b) for b in br], "value": v} for br, v in tr.leaves],
                           "status": tr.status},
        }
        lines.append(f"{o} = X")
        lines.append("  responsibility order: " + ", ".join(f"{s.node} {_q(s.score)}" for s in order))
        lines.append(f"  {tr.strategy} refinement: {tr.instantiations} instantiation(s)")
        for st in tr.steps:
            where = ", ".join(f"{n}={v}" for n, v in st.branch) or "root"
            lines.append(f"    split {st.node} at {where}")
    inputs = {"netlist": args.netlist, "assign": args.assign, "output": args.output,
              "strategy": args.strategy, "unroll": args.unroll, "seed": args.seed}
    _emit(args, inputs, result, "\n".join(lines))
    return 0


# ---------------------------------------------------------------------- corpus

CORPUS = {
    "vote11.json": "voting 11-0 (causal model)",
    "vote6.json": "voting 6-5 (causal model)",
    "rocks_naive.json": "rock throwing, naive (causal model)",
    "rocks_preemption.json": "rock throwing with hit-order variables (causal model)",
    "firing_squad.json": "firing squad (causal model, ten contexts)",
    "firing_squad_state.json": "firing squad uniform epistemic state",
    "req_grant.json": "one request followed by three grants (Kripke structure)",
    "gpq.json": "single state labeled p and q (Kripke structure)",
    "req_nogrant.csv": "request at cycle 1, never granted (trace)",
    "and2.json": "AND gate (netlist)",
    "mux.json": "multiplexer (netlist)",
    "or_tree.json": "balanced OR tree over four inputs (netlist)",
    "shift2.json": "two-stage shift register (sequential netlist)",
}


def data_path(name: str) -> Path:
    return Path(str(resources.files("causalverif") / "data" / name))


def run_corpus(seed: int = 0, bench_count: int = 20) -> dict:
    """Every bundled worked example evaluated with the library API."""
    from .cause import find_causes, responsibility
    from .ltl.kripke import load_kripke as lk

    out: dict[str, Any] = {}
    v11, v6 = load_model(data_path("vote11.json")), load_model(data_path("vote6.json"))
    out["vote11"] = {f"V{i}=G": responsibility(v11, "eleven_zero", f"V{i}=G", "WIN=G") for i in range(1, 12)}
    out["vote6"] = {f"V{i}=G": responsibility(v6, "six_five", f"V{i}=G", "WIN=G") for i in range(1, 7)}
    for name in ("rocks_naive", "rocks_preemption"):
        m = load_model(data_path(name + ".json"))
        out[name] = {c: _report_dict(check_cause(m, "both_throw", c, "BS=1")) for c in ("ST=1", "BT=1")}
        out[name]["all_causes"] = [dict(r.candidate) for r in find_causes(m, "both_throw", "BS=1")]
    fs = load_model(data_path("firing_squad.json"))
    st = load_epistemic_state(data_path("firing_squad_state.json"))
    out["firing_squad"] = {
        "blame": {f"S{i}=1": blame(st, f"S{i}=1", "DEATH=1") for i in range(1, 11)},
        "responsibility_of_S1": {f"live{j}": responsibility(fs, f"live{j}", "S1=1", "DEATH=1")
                                 for j in range(1, 11)},
    }
    rg = lk(data_path("req_grant.json"))
    f = parse_ltl("G(req -> F grant)")
    cc = causal_coverage(rg, f, "grant")
    out["req_grant"] = {
        "formula": to_str(f),
        "covered": coverage_check(rg, f, "grant").covered_states(),
        "causes": {e.state: {"responsibility": e.responsibility,
                             "witness": [[m.state, m.atom] for m in e.witness_mutations]}
                   for e in cc.causes()},
    }
    g = lk(data_path("gpq.json"))
    f = parse_ltl("G(p | q)")
    out["gpq"] = {
        "formula": to_str(f),
        "vacuous": [e.text for e in vacuity_check(g, f).entries if e.vacuous],
        "causes": {f"{e.state}.{e.atom}": e.responsibility for e in causal_coverage(g, f, None).causes()},
    }
    t = load_trace(data_path("req_nogrant.csv"))
    e_ex, e_ap = explain_exact(t, f := parse_ltl("G(req -> F grant)")), explain_approx(t, f)
    out["req_nogrant"] = {
        "exact": [[p.signal, p.cycle] for p in e_ex.points],
        "approximate": [[p.signal, p.cycle] for p in e_ap.points],
        "diagram": render_diagram(t, e_ex),
    }
    ste = {}
    for name, assign in (("and2", {"n2": 1}), ("mux", {"d0": 0, "d1": 1}), ("or_tree", {})):
        c, _ = load_netlist(data_path(name + ".json"))
        o = c.outputs[0]
        ste[name] = {"order": [[s.node, s.score] for s in responsibility_order(c, assign, o)],
                     "instantiations": {s: refine(c, assign, o, s, seed=seed).instantiations for s in STRATEGIES}}
    out["ste"] = ste
    rows, means = benchmark(seed, bench_count)
    out["ste_bench"] = {"seed": seed, "count": bench_count, "means": means,
                        "counts": [r.counts for r in rows]}
    return out


def _cmd_corpus(args):
    if args.action == "list":
        lines = [f"{n:<26} {d}" for n, d in CORPUS.items()]
        _emit(args, {}, {"files": list(CORPUS)}, "\n".join(lines))
        return 0
    if args.action == "export":
        if not args.dir:
            raise _Usage("corpus export needs a target directory")
        dest = Path(args.dir)
        dest.mkdir(parents=True, exist_ok=True)
        written = []
        for n in CORPUS:
            target = dest / n
            if target.exists() and not args.force:
                raise _Usage(f"{target} exists; pass --force to overwrite")
            shutil.copyfile(data_path(n), target)
            written.append(n)
        _emit(args, {"dir": args.dir}, {"written": written}, f"wrote {len(written)} files to {dest}")
        return 0
    res = run_corpus(args.seed, args.bench_count)
    lines = []
    for k, v in res.items():
        if k == "req_nogrant":
            lines.append(f"{k}: exact {v['exact']}  approximate {v['approximate']}")
            lines.append(v["diagram"].rstrip("\n"))
        else:
            lines.append(f"{k}: {json.dumps(_jsonable(v), sort_keys=True)}")
    _emit(args, {"seed": args.seed, "bench_count": args.bench_count}, res, "\n".join(lines))
    return 0


# ---------------------------------------------------------------------- parser


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="causalverif", description="Actual causality, responsibility and "
                                "blame, applied to coverage, vacuity, counterexample explanation and STE.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the machine-readable envelope")
    common.add_argument("--cap", type=int, default=None,
                        help="search guardrail (default from CAUSALVERIF_CAP, else 24)")
    common.add_argument("--force", action="store_true", help="ignore the search guardrail")
    sub = p.add_subparsers(dest="command", metavar="SUBCOMMAND", required=True)

    def causal(name, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--model", required=True, help="causal model JSON file")
        s.add_argument("--context", required=True, help="context name, or assignments like 'U1=1, U2=0'")
        s.add_argument("--candidate", required=True, help="conjunction like 'ST=1' or 'ST=1, BT=1'")
        s.add_argument("--phi", required=True, help="outcome formula like 'BS=1'")
        s.add_argument("--k-max", type=int, default=None, help="contingency size bound")
        return s

    causal("cause", "decide actual causality and print a witness")
    causal("responsibility", "degree of responsibility as p/q")
    s = sub.add_parser("blame", parents=[common], help="expected responsibility over an epistemic state")
    s.add_argument("--state", required=True, help="epistemic state JSON file")
    s.add_argument("--setting", required=True, help="setting like 'S1=1'")
    s.add_argument("--phi", required=True)

    s = sub.add_parser("check", parents=[common], help="LTL check of a Kripke structure or a trace")
    s.add_argument("--kripke")
    s.add_argument("--trace")
    s.add_argument("--phi", required=True)
    s.add_argument("--fail-on-violation", action="store_true", help="exit 1 when the formula fails")

    s = sub.add_parser("coverage", parents=[common], help="mutation and causal coverage")
    s.add_argument("--kripke", required=True)
    s.add_argument("--phi", required=True)
    s.add_argument("--atom", default=None, help="atom of interest (default: every atom)")
    s.add_argument("--k-max", type=int, default=None)
    s.add_argument("--all-atoms", action="store_true", help="one variable per (state, atom) for every atom")
    s.add_argument("--counterfactual-only", action="store_true", help="skip the causal search")
    s.add_argument("--fail-on-uncovered", action="store_true", help="exit 1 when no state is covered")

    s = sub.add_parser("vacuity", parents=[common], help="subformula vacuity")
    s.add_argument("--kripke", required=True)
    s.add_argument("--phi", required=True)
    s.add_argument("--fail-on-vacuous", action="store_true", help="exit 1 when any occurrence is vacuous")

    s = sub.add_parser("explain", parents=[common], help="causes of a failure on a trace")
    s.add_argument("--trace", required=True, help="trace CSV (a '#loop N' line makes it a lasso)")
    s.add_argument("--phi", required=True)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--approx", action="store_true", help="one-pass approximation (default)")
    s.add_argument("--color", action="store_true", help="mark causes in red (ANSI)")

    s = sub.add_parser("ste", parents=[common], help="ternary simulation and refinement ordering")
    s.add_argument("--netlist")
    s.add_argument("--output", default=None)
    s.add_argument("--assign", default=None, help="input values like 'a=0, b=X' (unlisted inputs are X)")
    s.add_argument("--strategy", choices=STRATEGIES, default="responsibility")
    s.add_argument("--unroll", type=int, default=None, help="time frames for netlists with latches")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bench", default=None, metavar="SEED,COUNT", help="strategy comparison on random circuits")

    s = sub.add_parser("corpus", parents=[common], help="bundled worked examples")
    s.add_argument("action", nargs="?", choices=("run", "list", "export"), default="run")
    s.add_argument("dir", nargs="?", help="target directory for export")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bench-count", type=int, default=20)
    return p


_COMMANDS = {"cause": _cmd_cause, "responsibility": _cmd_responsibility, "blame": _cmd_blame,
             "check": _cmd_check, "coverage": _cmd_coverage, "vacuity": _cmd_vacuity,
             "explain": _cmd_explain, "ste": _cmd_ste, "corpus": _cmd_corpus}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if hasattr(sys.stdout, "reconfigure"):
        try:
            sys.stdout.reconfigure(encoding="utf-8")
        except (ValueError, OSError):
            pass
    try:
        return _COMMANDS[args.command](args)
    except _Fail:
        return 1
    except _Usage as e:
        parser.print_usage(sys.stderr)
        print(f"causalverif {args.command}: error: {e}", file=sys.stderr)
        return 2
    except _PRECONDITION as e:
        print(f"causalverif {args.command}: {e}", file=sys.stderr)
        return 1
    except CausalVerifError as e:
        print(f"causalverif {args.command}: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"causalverif {args.command}: error: {e.filename or ''}: {e.strerror}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
