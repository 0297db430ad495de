"""Benchmark manifests and greedy-vs-SAT report tables.

A manifest is JSON::

    {
      "strategy": "binsearch",
      "timeout": "30s",          # per solver call
      "budget": "10m",           # per row; rows past it render as "-"
      "amo": "sequential",
      "datasets": [
        {"name": "word", "path": "words.txt", "prefixes": [30, 100]},
        {"name": "zipf", "generate": {"count": 80, "seed": 3}}
      ]
    }

Relative paths resolve against the manifest's directory.  Rows come out in
manifest order whatever ``jobs`` is.
"""

from __future__ import annotations

import json
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from ..double_array import greedy_build
from ..errors import DasodaError, InputError
from ..maxsat import STRATEGIES, optimize_size
from .formats import parse_duration, read_words, words_to_trie
from .words import generate_words


def density(nodes: int, size: int) -> float:
    return round(nodes / size, 2)


@dataclass
class BenchRow:
    name: str
    nodes: int | None = None
    greedy_size: int | None = None
    greedy_density: float | None = None
    sat_size: int | None = None
    sat_density: float | None = None
    timeout_min: float | None = None
    status: str = "error"
    seconds: float = 0.0
    error: str | None = None


@dataclass
class _Run:
    name: str
    source: dict  # {"path": ...} or {"generate": {...}}
    prefix: int | None
    strategy: str
    timeout: float | None
    budget: float | None
    options: dict


def load_manifest(path: str | Path) -> list[_Run]:
    path = Path(path)
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise InputError(f"cannot read manifest {path}: {err}") from None
    if not isinstance(manifest, dict) or not isinstance(manifest.get("datasets"), list):
        raise InputError("manifest needs a 'datasets' list")
    strategy = manifest.get("strategy", "binsearch")
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}")
    timeout = parse_duration(manifest.get("timeout"))
    budget = parse_duration(manifest.get("budget"))
    options = {"amo": manifest.get("amo", "sequential"), "heuristic": manifest.get("heuristic", "index")}
    if "solver_command" in manifest:
        options.update(solver="external", solver_command=manifest["solver_command"])
    runs = []
    for k, ds in enumerate(manifest["datasets"]):
        name = ds.get("name", f"set{k}")
        if "path" in ds:
            p = Path(ds["path"])
            source = {"path": str(p if p.is_absolute() else path.parent / p)}
        elif "generate" in ds:
            source = {"generate": dict(ds["generate"])}
        else:
            raise InputError(f"dataset {name!r} needs 'path' or 'generate'")
        prefixes = ds.get("prefixes")
        if prefixes is None:
            runs.append(_Run(name, source, None, strategy, timeout, budget, options))
            continue
        for x in prefixes:
            if not isinstance(x, int) or x < 1:
                raise InputError(f"dataset {name!r}: bad prefix {x!r}")
            runs.append(_Run(f"{name}_{x}", source, x, strategy, timeout, budget, options))
    return runs


def _words(run: _Run) -> list[str]:
    if "path" in run.source:
        words = read_words(run.source["path"])
    else:
        try:
            words = generate_words(**run.source["generate"])
        except TypeError as err:
            raise InputError(f"bad generate parameters: {err}") from None
    return words if run.prefix is None else words[: run.prefix]


def run_row(run: _Run) -> BenchRow:
    row = BenchRow(run.name)
    row.timeout_min = None if run.timeout is None else round(run.timeout / 60, 2)
    t0 = time.monotonic()
    try:
        trie, _ = words_to_trie(_words(run))
        row.nodes = trie.node_count
        greedy = greedy_build(trie)
        row.greedy_size, row.greedy_density = greedy.N, density(trie.node_count, greedy.N)
        res = optimize_size(trie, run.strategy, run.timeout, total_budget=run.budget, **run.options)
        row.sat_size, row.sat_density = res.size, density(trie.node_count, res.size)
        row.status = "over-budget" if res.over_budget else res.status
    except Exception as err:  # a failing row must not stop the suite
        row.error = f"{type(err).__name__}: {err}"
        row.status = "error"
        if not isinstance(err, DasodaError):
            traceback.print_exc()
    row.seconds = round(time.monotonic() - t0, 3)
    return row


def run_bench(runs: list[_Run], jobs: int = 1) -> list[BenchRow]:
    if jobs <= 1:
        return [run_row(r) for r in runs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_row, runs))


_COLUMNS = ("name", "nodes", "#greedy", "density", "#SAT", "density", "timeout(min)", "status")


def format_table(rows: list[BenchRow]) -> str:
    def cell(row: BenchRow, x, sat: bool = False):
        if x is None or (sat and row.status in ("over-budget", "error")):
            return "-"
        return f"{x:.2f}" if isinstance(x, float) else str(x)

    body = [
        [
            r.name,
            cell(r, r.nodes),
            cell(r, r.greedy_size),
            cell(r, r.greedy_density),
            cell(r, r.sat_size, True),
            cell(r, r.sat_density, True),
            cell(r, r.timeout_min),
            r.status,
        ]
        for r in rows
    ]
    widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(_COLUMNS)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(_COLUMNS, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(b, widths)) for b in body]
    return "\n".join(line.rstrip() for line in lines) + "\n"


def rows_json(rows: list[BenchRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2) + "\n"
