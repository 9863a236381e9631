"""Command-line front end.

Every command prints its artifact to standard output or to ``--out``.
Failures print one JSON object ``{"error": ..., "message": ...}`` on standard
error and exit with status 2 (bad input) or 1 (analysis failure).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import chains, fixtures
from .absorption import (
    FirstPassageReport,
    analyze,
    build_semaphore_automaton,
    expected_tau,
    survival_curve,
)
from .languages import (
    RULES,
    build_test_automaton,
    expected_tau_test,
    loop_graph_dot,
    loop_words,
    pattern_waiting_time,
    psi_test,
    test_loop_graph,
)
from .semigroup import (
    Alphabet,
    AlphabetError,
    FiniteSemigroup,
    cayley_dot,
    dump_model,
    format_fraction,
    generate_semigroup,
    load_model,
    minimal_ideal,
    parse_probabilities,
    push_probabilities,
    syntactic_quotient,
)
from .sim import SimConfig, exact_stderr, simulate_first_passage


class UsageError(ValueError):
    pass


BUILTINS = ("markov-linear", "min:N", "b2", "rees-aa", "rees-z2")


def _builtin(name: str) -> FiniteSemigroup:
    if name == "markov-linear":
        return fixtures.markov_linear()
    if name.startswith("min:"):
        return fixtures.min_semigroup(int(name[4:]))[0]
    table = {"b2": fixtures.b2, "rees-aa": fixtures.rees_aa, "rees-z2": fixtures.rees_z2}
    if name in table:
        return table[name]()[0]
    raise UsageError(f"unknown model {name!r}: not a file and not one of {', '.join(BUILTINS)}")


def load_semigroup(source: str, max_size: int) -> tuple[FiniteSemigroup, Alphabet | None]:
    if os.path.exists(source) or source.lstrip().startswith("{"):
        gens, alphabet, adjoin = load_model(source)
        S = generate_semigroup(gens, alphabet.letters, adjoin_identity=adjoin, max_size=max_size)
        return S, alphabet if alphabet.is_stochastic else None
    return _builtin(source), None


def resolve_alphabet(letters: Sequence[str], probs: str | None, model: Alphabet | None = None) -> Alphabet:
    """``--probs`` wins, then probabilities stored in the model, then uniform."""
    if probs:
        return Alphabet(tuple(letters), parse_probabilities(probs))
    if model is not None:
        return model
    return Alphabet.uniform(tuple(letters))


def _fmt(v, as_float: bool):
    if v is None:
        return None
    if isinstance(v, float) or as_float:
        return f"{float(v):.15g}"
    return format_fraction(v)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _emit_report(report: FirstPassageReport, args, extra: dict | None = None) -> None:
    _emit(_report_text(report, args.format, args.float, extra), args.out)
    if args.csv:
        _emit(report.to_csv(args.float), args.csv)


def _report_text(report: FirstPassageReport, fmt: str, as_float: bool, extra: dict | None = None) -> str:
    if fmt == "csv":
        return report.to_csv(as_float)
    if fmt != "json":
        raise UsageError(f"format {fmt!r} is not available for this command")
    doc = report.to_json(as_float)
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- commands


def cmd_analyze(args) -> None:
    S, model_alpha = load_semigroup(args.model, args.max_size)
    alphabet = resolve_alphabet(S.letters, args.probs, model_alpha)
    aut = build_semaphore_automaton(S)
    report = analyze(aut, alphabet, args.tmax, chernoff=not args.no_chernoff)
    _emit_report(report, args)


def cmd_graph(args) -> None:
    S, _ = load_semigroup(args.model, args.max_size)
    ideal = minimal_ideal(S)
    text = cayley_dot(S, "RCay", ideal.kernel)
    if ideal.is_left_zero and args.semaphore:
        text += build_semaphore_automaton(S, ideal).dot()
    _emit(text, args.out)


def cmd_quotient(args) -> None:
    S, model_alpha = load_semigroup(args.model, args.max_size)
    alphabet = resolve_alphabet(S.letters, args.probs, model_alpha)
    ideal = minimal_ideal(S)
    q = syntactic_quotient(S, ideal)
    qalpha = push_probabilities(q.letter_map, alphabet, q.semigroup.letters)
    s1 = survival_curve(build_semaphore_automaton(S, ideal), alphabet, args.tmax)
    s2 = survival_curve(build_semaphore_automaton(q.semigroup), qalpha, args.tmax)
    if args.format == "dot":
        _emit(cayley_dot(q.semigroup, "Quotient", minimal_ideal(q.semigroup).kernel), args.out)
        return
    doc = {
        "size": len(S) - 1,
        "quotient_size": len(q.semigroup) - 1,
        "classes": [sorted(S.word_label(e) for e in c) for c in q.classes],
        "quotient_letters": list(q.semigroup.letters),
        "quotient_probabilities": [_fmt(p, args.float) for p in qalpha.probabilities],
        "survival": [_fmt(v, args.float) for v in s1],
        "quotient_survival": [_fmt(v, args.float) for v in s2],
        "survival_identical": s1 == s2,
    }
    _emit(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", args.out)


def cmd_testword(args) -> None:
    letters = tuple(args.alphabet)
    alphabet = resolve_alphabet(letters, args.probs)
    if args.format == "dot":
        text = build_test_automaton(args.word, alphabet, args.rule).dot()
        text += loop_graph_dot(test_loop_graph(args.word, alphabet))
        _emit(text, args.out)
        return
    doc = {
        "word": args.word,
        "loop_words": ["".join(w) for w in loop_words(args.word, alphabet)],
        "psi": _fmt(psi_test(args.word, alphabet), args.float),
        "expected_tau": _fmt(expected_tau_test(args.word, alphabet), args.float),
        "first_occurrence_waiting_time": _fmt(pattern_waiting_time(args.word, alphabet), args.float),
    }
    _emit(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", args.out)


def _chain_model(args) -> tuple[chains.ChainModel, chains.Poset | None]:
    kind = args.kind
    if kind in ("tsetlin", "edgeflip"):
        if args.n is None:
            raise UsageError(f"chain {kind} needs --n")
        return (chains.tsetlin_chain(args.n) if kind == "tsetlin" else chains.edgeflip_chain(args.n)), None
    if not args.poset:
        raise UsageError(f"chain {kind} needs --poset")
    P = chains.Poset.example() if args.poset == "example" else chains.Poset.load(args.poset)
    return (chains.promotion_chain(P) if kind == "promotion" else chains.wp_chain(P)), P


def _state_name(v) -> str:
    if isinstance(v, tuple):
        return chains.word_str(v)
    return str(v)


def cmd_chain(args) -> None:
    model, P = _chain_model(args)
    kind = args.kind
    n_params = {"tsetlin": args.n, "edgeflip": args.n}.get(kind) or (P.n if P else None)
    if args.probs:
        x = parse_probabilities(args.probs)
        if sum(x) != 1 or len(x) != n_params:
            raise AlphabetError(f"expected {n_params} probabilities summing to 1")
    else:
        x = tuple(Fraction(1, n_params) for _ in range(n_params))
    alphabet = model.alphabet(x)
    S = model.semigroup
    aut = build_semaphore_automaton(S)
    report = analyze(aut, alphabet, args.tmax, chernoff=not args.no_chernoff)
    names = tuple(_state_name(model.key(e)) for e in aut.target_elements)
    report.target_labels = tuple(S.word_label(e) for e in aut.target_elements)
    by_state: dict[str, Fraction] = {}
    for name, p in zip(names, report.psi):
        by_state[name] = by_state.get(name, Fraction(0)) + p
    extra: dict = {
        "target_states": dict(zip(report.target_labels, names)),
        "stationary": {k: _fmt(v, args.float) for k, v in by_state.items()},
    }
    if kind == "tsetlin":
        closed = chains.tsetlin_stationary(x)
        extra["psi_closed_form"] = {_state_name(k): _fmt(v, args.float) for k, v in closed.items()}
        extra["expected_tau_closed_form"] = _fmt(chains.tsetlin_expected_tau(x), args.float)
    elif kind == "edgeflip":
        closed = chains.edgeflip_stationary(x)
        extra["psi_closed_form"] = {k: _fmt(v, args.float) for k, v in closed.items() if v}
    elif kind == "promotion":
        closed = chains.promotion_stationary(P, x)
        extra["psi_closed_form"] = {_state_name(k): _fmt(v, args.float) for k, v in closed.items()}
        extra["reduced_words"] = {
            _state_name(p): chains.word_str(chains.reduced_word_to_ideal(p, P)) for p in chains.linear_extensions(P)
        }
    else:
        closed = chains.wp_stationary(P, x)
        extra["psi_closed_form"] = {_state_name(k): _fmt(v, args.float) for k, v in closed.items()}
        extra["expected_tau_word_graph"] = _fmt(expected_tau(chains.wp_automaton(P), x)[0], args.float)
        exact, approx = chains.wp_expected_bound(P.n)
        extra["expected_tau_bound"] = {"n_H_n": _fmt(exact, args.float), "n_ln_n_plus_n_gamma": f"{approx:.15g}"}
    _emit_report(report, args, extra)


def cmd_simulate(args) -> None:
    S, model_alpha = load_semigroup(args.model, args.max_size)
    alphabet = resolve_alphabet(S.letters, args.probs, model_alpha)
    aut = build_semaphore_automaton(S)
    cfg = SimConfig(seed=args.seed, num_trajectories=args.trajectories, t_max=args.tmax)
    est = simulate_first_passage(aut, alphabet, cfg)
    exact = survival_curve(aut, alphabet, args.tmax)
    if args.format == "csv":
        lines = ["t,empirical_survival,stderr,exact_survival,z_score"]
        for t, (p, se, e) in enumerate(zip(est.survival, est.stderr, exact)):
            sd = exact_stderr(e, cfg.num_trajectories)
            z = (p - float(e)) / sd if sd > 0 else 0.0
            lines.append(f"{t},{p:.15g},{se:.15g},{float(e):.15g},{z:.6g}")
        _emit("\n".join(lines) + "\n", args.out)
        return
    doc = {
        "seed": cfg.seed,
        "num_trajectories": cfg.num_trajectories,
        "t_max": cfg.t_max,
        "censored": est.censored,
        "mean_tau": est.mean_tau,
        "mean_tau_stderr": est.mean_tau_stderr,
        "mean_tau_is_lower_bound": est.mean_is_lower_bound,
        "survival": est.survival,
        "stderr": est.stderr,
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semimix", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, model=True, fmt=("json", "csv"), default="json"):
        if model:
            sp.add_argument("--model", required=True, help=f"model JSON file or builtin ({', '.join(BUILTINS)})")
        sp.add_argument("--probs", help="exact probabilities, e.g. 1/3,1/3,1/3")
        sp.add_argument("--tmax", type=int, default=20)
        sp.add_argument("--degree", type=int, default=64, help="series truncation degree")
        sp.add_argument("--out", help="write to this file instead of standard output")
        sp.add_argument("--format", choices=fmt, default=default)
        sp.add_argument("--float", action="store_true", help="decimal output instead of p/q")
        sp.add_argument("--max-size", type=int, default=10**6, help="element cap for semigroup closure")

    a = sub.add_parser("analyze", help="first-passage report and bound table")
    common(a)
    a.add_argument("--no-chernoff", action="store_true")
    a.add_argument("--csv", help="also write the bound table to this file")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("graph", help="DOT of the right Cayley graph and semaphore automaton")
    common(g, fmt=("dot",), default="dot")
    g.add_argument("--no-semaphore", dest="semaphore", action="store_false")
    g.set_defaults(func=cmd_graph)

    q = sub.add_parser("quotient", help="syntactic quotient and survival comparison")
    common(q, fmt=("json", "dot"))
    q.set_defaults(func=cmd_quotient)

    t = sub.add_parser("testword", help="loop words, closed forms and automata of a factor ideal")
    t.add_argument("word")
    t.add_argument("--alphabet", default="ab", help="letters, one character each")
    t.add_argument("--rule", choices=RULES, default="reset", help="transition rule drawn in the DOT output")
    common(t, model=False, fmt=("json", "dot"))
    t.set_defaults(func=cmd_testword)

    c = sub.add_parser("chain", help="built-in chains")
    c.add_argument("kind", choices=("tsetlin", "edgeflip", "promotion", "wp"))
    c.add_argument("--n", type=int)
    c.add_argument("--poset", help="poset JSON file, or 'example'")
    c.add_argument("--no-chernoff", action="store_true")
    c.add_argument("--csv", help="also write the bound table to this file")
    common(c, model=False)
    c.set_defaults(func=cmd_chain)

    s = sub.add_parser("simulate", help="Monte-Carlo survival estimate")
    common(s)
    s.add_argument("--seed", type=int, default=SimConfig.seed)
    s.add_argument("--trajectories", type=int, default=100_000)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (UsageError, AlphabetError, json.JSONDecodeError, FileNotFoundError, KeyError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    except (ValueError, ArithmeticError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return 0


def round_trip(doc: dict) -> dict:
    """Parse a model document and serialise it again."""
    gens, alphabet, adjoin = load_model(doc)
    return dump_model(gens, alphabet, adjoin)


if __name__ == "__main__":
    sys.exit(main())
