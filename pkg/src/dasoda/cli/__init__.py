"""``dasoda`` command line.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 solver environment error, 4 capacity error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .. import __version__
from ..double_array import contains, greedy_build, validate
from ..errors import CapacityError, InputError, SolverEnvironmentError
from ..maxsat import STRATEGIES, optimize_size, parse_wcnf, solve_wcnf
from ..reductions.encoding import encode_scs_to_soda
from ..reductions.scs import (
    dumps_rdhp,
    dumps_scs,
    exact_scs,
    loads_rdhp,
    loads_scs_strings,
    rdhp_to_scs,
    sample_rdhp,
)
from ..reductions.smc import brute_force_smc, coloring_to_smc, dumps_smc, loads_smc
from ..sat import SAT, UNSAT, loads_cnf, run_external, solve_cnf
from ..soda import brute_force_soda, dumps_instance, exact_build, loads_instance, to_text
from .bench import format_table, load_manifest, rows_json, run_bench
from .formats import dumps_da, load_config, loads_da, parse_duration, read_words, words_to_trie

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_ENV, EXIT_CAPACITY = 0, 1, 2, 3, 4

log = logging.getLogger("dasoda")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise InputError(f"cannot read {path}: {err}") from None


def _stats(label: str, m: int, n: int) -> str:
    return f"{label}: M={m} N={n} density={m / n:.2f}"


# --- commands --------------------------------------------------------------------


def cmd_build(args) -> int:
    trie, alphabet = words_to_trie(read_words(args.words))
    da = greedy_build(trie, args.order)
    _write(args.output, dumps_da(da, alphabet))
    print(_stats("greedy", trie.node_count, da.N), file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_optimize(args) -> int:
    words = read_words(args.words)
    trie, alphabet = words_to_trie(words)
    res = optimize_size(
        trie,
        args.strategy,
        args.timeout,
        solver=args.solver,
        solver_command=args.solver_command,
        amo=args.amo,
        heuristic=args.heuristic,
        n_target=args.n_target,
        total_budget=args.budget,
        max_clauses=args.max_clauses,
    )
    _write(args.output, dumps_da(res.da, alphabet))
    out = sys.stderr if args.output in (None, "-") else sys.stdout
    m = trie.node_count
    print(_stats("greedy", m, res.greedy_size), file=out)
    print(_stats("sat", m, res.size) + f" status={res.status} calls={len(res.calls)}", file=out)
    if args.report:
        row = {
            "name": Path(args.words).stem,
            "nodes": m,
            "greedy_size": res.greedy_size,
            "greedy_density": round(m / res.greedy_size, 2),
            "sat_size": res.size,
            "sat_density": round(m / res.size, 2),
            "timeout_min": None if args.timeout is None else round(args.timeout / 60, 2),
            "status": res.status,
            "calls": [list(c) for c in res.calls],
        }
        _write(args.report, json.dumps(row, indent=2) + "\n")
    return EXIT_OK


def verify_files(da_text: str, words: list[str]) -> list[str]:
    """Violation messages for a serialized double-array against a word list."""
    da, alphabet = loads_da(da_text)
    problems: list[str] = []
    seqs = []
    for w in words:
        s = alphabet.encode(w)
        if s is None:
            problems.append(f"membership: {w!r} uses characters outside the stored alphabet")
        else:
            seqs.append(s)
    trie, _ = words_to_trie([w for w in words if alphabet.encode(w) is not None], alphabet)
    report = validate(da, trie)
    problems += [str(v) for v in report.violations]
    if report.ok:
        want = np.zeros(da.N, dtype=bool)
        for node in trie.terminal:
            want[da.node_of[node] - 1] = True
        for s in np.flatnonzero(want != da.terminal) + 1:
            problems.append(f"terminal: slot {s} flag is {bool(da.terminal[s - 1])}, expected {bool(want[s - 1])}")
    for w, s in zip((w for w in words if alphabet.encode(w) is not None), seqs):
        if not contains(da, s):
            problems.append(f"membership: {w!r} is not stored")
    return problems


def cmd_verify(args) -> int:
    problems = verify_files(_read(args.da), read_words(args.words))
    if problems:
        for p in problems:
            print(p)
        print(f"FAILED: {len(problems)} violation(s)")
        return EXIT_VERIFY
    print("ok")
    return EXIT_OK


def cmd_gen(args) -> int:
    prefix = Path(args.out)
    if prefix.parent != Path(""):
        prefix.parent.mkdir(parents=True, exist_ok=True)
    meta: dict = {"kind": args.kind, "seed": args.seed, "n": args.n, "planted": args.planted}
    files = {}
    if args.kind == "smc":
        n, edges, coloring = _random_graph(args.n, args.seed, args.p, args.planted)
        inst = coloring_to_smc(n, edges, args.gadget)
        files["smc"] = dumps_smc(inst)
        meta.update(edges=[list(e) for e in edges], gadget=args.gadget, planted_coloring=coloring)
    else:
        g, path = sample_rdhp(
            args.n, args.seed, planted=args.planted, relax=args.relax_rdhp, extra_edges=args.extra_edges
        )
        files["rdhp"] = dumps_rdhp(g)
        meta.update(relaxed=args.relax_rdhp, hamiltonian=path is not None, path=list(path) if path else None)
        if args.kind in ("scs", "soda"):
            scs = rdhp_to_scs(g, relax=args.relax_rdhp)
            files["scs"] = dumps_scs(scs)
            meta["scs_target"] = scs.target_length
        if args.kind == "soda":
            enc = encode_scs_to_soda(scs)
            files["soda"] = dumps_instance(enc.to_soda())
            meta.update(soda_target=enc.target_length, width=enc.width, block=enc.block)
    for ext, text in files.items():
        Path(f"{prefix}.{ext}").write_text(text, encoding="utf-8")
    meta["files"] = [f"{prefix.name}.{ext}" for ext in files]
    Path(f"{prefix}.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print("wrote " + ", ".join(meta["files"]) + f", {prefix.name}.json")
    return EXIT_OK


def _random_graph(n: int, seed: int, p: float, planted: bool):
    """``G(n, p)``; with ``planted`` only edges between distinct hidden colors."""
    if n < 1 or not 0.0 <= p <= 1.0:
        raise InputError(f"need n >= 1 and 0 <= p <= 1 (got n={n}, p={p})")
    rng = np.random.default_rng(seed)
    colors = rng.integers(1, 4, size=n)
    edges = []
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if rng.random() < p and not (planted and colors[a - 1] == colors[b - 1]):
                edges.append((a, b))
    coloring = {str(v): int(c) for v, c in enumerate(colors, start=1)} if planted else None
    return n, edges, coloring


def cmd_bench(args) -> int:
    runs = load_manifest(args.manifest)
    rows = run_bench(runs, args.jobs)
    sys.stdout.write(format_table(rows))
    if args.json:
        _write(args.json, rows_json(rows))
    return EXIT_OK


def cmd_exact(args) -> int:
    cap = {} if args.limit is None else {"limit": args.limit}
    text = _read(args.input)
    head = text.split(maxsplit=1)[0] if text.strip() else ""
    if head == "soda":
        inst = loads_instance(text)
        sol = brute_force_soda(inst, open_end=args.open_end, **cap)
        print(f"soda optimum={sol.length}")
        print(to_text(sol.string))
        print("offsets " + " ".join(map(str, sol.offsets)))
    elif head == "scs":
        _, strings, target = loads_scs_strings(text)
        sol = exact_scs(strings, args.limit or 18)
        print(f"scs optimum={sol.length} target={target}")
        print(" ".join(map(str, sol.superstring)))
    elif head == "smc":
        w = brute_force_smc(loads_smc(text), args.limit or 12)
        if w is None:
            print("smc: no witness")
            return EXIT_VERIFY
        print("smc shifts " + " ".join(map(str, w.shifts)))
    elif head == "rdhp":
        paths = loads_rdhp(text).hamiltonian_paths()
        print(f"rdhp hamiltonian paths={len(paths)}")
        for p in paths[: args.limit or 10]:
            print(" ".join(map(str, p)))
    else:
        trie, alphabet = words_to_trie(read_words(args.input))
        da = exact_build(trie, **cap)
        print(_stats("exact", trie.node_count, da.N), file=sys.stderr if args.output in (None, "-") else sys.stdout)
        _write(args.output, dumps_da(da, alphabet))
    return EXIT_OK


def cmd_solve_wcnf(args) -> int:
    text = _read(args.input)
    if args.solver == "external":
        out = run_external(args.input, args.solver_command, args.timeout)
    elif "p wcnf" in text:
        out = solve_wcnf(parse_wcnf(text), args.timeout, args.heuristic)
    else:
        out = solve_cnf(loads_cnf(text), budget=args.timeout, heuristic=args.heuristic)
    if out.status == SAT:
        if out.cost is not None:
            print(f"o {out.cost}")
        optimal = out.stats.get("optimal", out.cost is not None)
        print("s OPTIMUM FOUND" if out.cost is not None and optimal else "s SATISFIABLE")
        print("v " + " ".join(map(str, out.model)) + " 0")
    elif out.status == UNSAT:
        print("s UNSATISFIABLE")
    else:
        print("s UNKNOWN")
    return EXIT_OK


# --- argument parsing --------------------------------------------------------------


def _duration(text: str) -> float | None:
    try:
        return parse_duration(text)
    except InputError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits: {text}")
    return v


def _solver_options(p: argparse.ArgumentParser, strategy: bool = True) -> None:
    if strategy:
        p.add_argument("--strategy", choices=STRATEGIES, default=None)
        p.add_argument("--amo", choices=("pairwise", "sequential"), default=None)
        p.add_argument("--budget", type=_duration, default=None, help="wall-clock limit for the whole run")
        p.add_argument("--max-clauses", type=int, default=None)
    p.add_argument("--timeout", type=_duration, default=None, help="per solver call, e.g. 30s, 2m")
    p.add_argument("--solver", choices=("internal", "external"), default=None)
    p.add_argument("--solver-command", default=None)
    p.add_argument("--heuristic", choices=("index", "vsids"), default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dasoda", description="Compact double-array tries.")
    ap.add_argument("--version", action="version", version=f"dasoda {__version__}")
    ap.add_argument("--config", default=None, help="key=value file; DASODA_* variables override it")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="greedy first-fit double-array from a word list")
    p.add_argument("words")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--order", choices=("dfs", "bfs"), default="dfs")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("optimize", help="shrink the double-array with the MAX-SAT model")
    p.add_argument("words")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--n-target", type=int, default=None, help="size tried by the decision strategy")
    p.add_argument("--report", default=None, help="write a JSON report row here")
    _solver_options(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="check a double-array file against a word list")
    p.add_argument("da")
    p.add_argument("words")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate reduction instances")
    p.add_argument("kind", choices=("rdhp", "scs", "soda", "smc"))
    p.add_argument("--n", type=int, default=5, help="vertices")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out", required=True, help="output path prefix")
    p.add_argument("--relax-rdhp", action="store_true", help="allow out-degree 1")
    p.add_argument("--no-planted", dest="planted", action="store_false")
    p.add_argument("--extra-edges", type=int, default=0)
    p.add_argument("--p", type=float, default=0.5, help="edge probability for smc graphs")
    p.add_argument("--gadget", choices=("incidence", "adjacency"), default="incidence")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="greedy vs SAT table from a JSON manifest")
    p.add_argument("manifest")
    p.add_argument("--json", default=None, help="write machine-readable rows here")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("exact", help="exhaustive oracles for word lists and instance files")
    p.add_argument("input")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--limit", type=int, default=None, help="size cap for the exhaustive search")
    p.add_argument("--open-end", action="store_true", help="SODA: let strings overhang the end")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("solve-wcnf", help="solve a DIMACS CNF or WCNF file")
    p.add_argument("input")
    _solver_options(p, strategy=False)
    p.set_defaults(func=cmd_solve_wcnf)
    return ap


_DEFAULTS = {
    "strategy": "binsearch",
    "amo": "sequential",
    "solver": "internal",
    "heuristic": "index",
    "max_clauses": 3_000_000,
}


def _apply_config(args) -> None:
    """Flags win over ``DASODA_*`` variables, which win over the config file."""
    cfg = load_config(args.config)
    convert = {"timeout": parse_duration, "budget": parse_duration, "max_clauses": int}
    for key in ("strategy", "amo", "solver", "solver_command", "heuristic", "timeout", "budget", "max_clauses"):
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue
        if key in cfg:
            try:
                value = convert.get(key, str)(cfg[key])
            except ValueError:
                raise InputError(f"config {key}={cfg[key]!r} is not valid") from None
            setattr(args, key, value)
        elif key in _DEFAULTS:
            setattr(args, key, _DEFAULTS[key])
    if getattr(args, "strategy", None) not in (None, *STRATEGIES):
        raise InputError(f"unknown strategy {args.strategy!r}")


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        _apply_config(args)
        return args.func(args)
    except CapacityError as err:
        print(f"dasoda: capacity: {err}", file=sys.stderr)
        return EXIT_CAPACITY
    except SolverEnvironmentError as err:
        print(f"dasoda: solver: {err}", file=sys.stderr)
        return EXIT_ENV
    except InputError as err:
        print(f"dasoda: input: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
