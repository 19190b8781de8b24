"""Experiment driver: benchmark-graph sweeps, run sweeps to CSV, scaling
fits, the cached-vs-uncached wall-time benchmark, and move-count reports.

Commands: generate, run, fit, bench-ds, moves-report. Exit codes: 0 success,
1 usage error, 2 bad input data, 3 at least one run exceeded the wall-clock
cap (its row is flagged, all rows are still written).

All CSV output is deterministic for a fixed config and seed set: rows are
sorted, floats are written with repr (shortest round-trip), and wall-clock
measurements appear only in bench-ds output.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import sim
from .community import CommunityState
from .graph import FcsConfig, Graph, GraphError, fcs_header, generate_fcs, \
    load_edge_list, write_edge_list
from .qcost import DEFAULT_PARAMS, CostParams


class UsageError(Exception):
    """Bad command line; maps to exit code 1."""


class DataError(Exception):
    """Bad config values, missing files, or degenerate inputs; exit code 2."""


RUN_COLUMNS = (
    "graph", "n", "seed", "algo", "levels", "moves", "modularity",
    "classical", "est_ql", "est_qlsg", "est_sql", "est_sqlsg", "est_eql",
    "budget_exceeded", "timed_out",
)

_TOTAL_COLUMNS = ("classical", "est_ql", "est_qlsg", "est_sql", "est_sqlsg",
                  "est_eql")

# Query-total column per fitted variant; the sparse-graph variants ride along
# in the same rows as their parent algorithm.
VARIANT_SERIES = (
    ("ol", "ol", "classical"),
    ("ol-replace", "ol-replace", "classical"),
    ("ql", "ql", "est_ql"),
    ("qlsg", "ql", "est_qlsg"),
    ("sql", "sql", "est_sql"),
    ("sqlsg", "sql", "est_sqlsg"),
    ("eql", "eql", "est_eql"),
)


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: a graph source, algorithms, seeds, and output target."""

    n_grid: tuple[int, ...] = ()
    seeds: int = 10
    algorithms: tuple[str, ...] = ("ol",)
    avg_degree: float = 5.0
    community_size: int = 50
    mu: float = 0.3
    graph_files: tuple[Path, ...] = ()
    out: Path = Path("results.csv")
    params: CostParams = DEFAULT_PARAMS
    use_cache: bool = True
    deterministic_nsamples: bool = False
    workers: int = 1
    timeout_s: float = 3600.0

    def __post_init__(self) -> None:
        if self.seeds < 1:
            raise DataError("seeds must be >= 1")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise DataError("n_grid must be strictly increasing")
        unknown = set(self.algorithms) - set(sim.ALGORITHMS)
        if unknown:
            raise DataError(
                f"unknown algorithms {sorted(unknown)}; "
                f"choices: {sorted(sim.ALGORITHMS)}"
            )
        if self.workers < 1:
            raise DataError("workers must be >= 1")
        if self.timeout_s <= 0:
            raise DataError("timeout_s must be positive")


@dataclass(frozen=True)
class FitResult:
    """One variant's weighted log-log fit against the n-grid."""

    variant: str
    slope: float
    intercept: float
    residuals: tuple[float, ...]
    ratio: Optional[float]  # baseline slope / this slope, when ol is present


def weighted_loglog_fit(
    ns: Sequence[float], ys: Sequence[float]
) -> tuple[float, float, tuple[float, ...]]:
    """Least squares on (log10 n, log10 y) with weights log n.

    Returns (slope, intercept, per-point residuals). Needs >= 3 points and
    strictly positive values on both axes.
    """
    if len(ns) != len(ys):
        raise DataError("fit needs equally many n and y values")
    if len(ns) < 3:
        raise DataError(f"fit needs >= 3 grid points, got {len(ns)}")
    ns_arr = np.asarray(ns, dtype=np.float64)
    ys_arr = np.asarray(ys, dtype=np.float64)
    if np.any(ns_arr <= 0.0) or np.any(ys_arr <= 0.0):
        raise DataError("fit needs positive n and query totals")
    x = np.log10(ns_arr)
    y = np.log10(ys_arr)
    w = np.log(ns_arr)
    xb = float(np.sum(w * x) / np.sum(w))
    yb = float(np.sum(w * y) / np.sum(w))
    var = float(np.sum(w * (x - xb) ** 2))
    if var == 0.0:
        raise DataError("fit needs at least two distinct n values")
    slope = float(np.sum(w * (x - xb) * (y - yb)) / var)
    intercept = yb - slope * xb
    residuals = tuple(float(r) for r in (y - (slope * x + intercept)))
    return slope, intercept, residuals


# -- config handling -------------------------------------------------------------


_BOOL_WORDS = {"true": True, "yes": True, "1": True,
               "false": False, "no": False, "0": False}

_PARAM_KEYS = ("alpha", "cq", "eps_total", "lswitch", "nsamples_init",
               "budget_log_base")

_CONFIG_KEYS = {
    "n_grid", "seeds", "algos", "avg_degree", "community_size", "mu",
    "graph_files", "out", "use_cache", "deterministic_nsamples", "workers",
    "timeout_s", *_PARAM_KEYS,
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Flat `key = value` lines; blank lines and '#' comments ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise DataError(f"{source}:{lineno}: unknown config key {key!r}")
        if key in out:
            raise DataError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _parse_bool(value: str, key: str) -> bool:
    try:
        return _BOOL_WORDS[value.lower()]
    except KeyError:
        raise DataError(f"{key} must be a boolean, got {value!r}") from None


def _parse_int_list(value: str, key: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in value.split(",") if p.strip())
    except ValueError:
        raise DataError(f"{key} must be comma-separated integers") from None


def config_from_sources(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, overridden by the config file, overridden by CLI flags."""
    raw: dict[str, str] = {}
    if getattr(args, "config", None) is not None:
        path = Path(args.config)
        try:
            raw = parse_config_text(path.read_text(encoding="utf-8"),
                                    source=str(path))
        except OSError as exc:
            raise DataError(f"cannot read config {path}: {exc}") from exc

    kwargs: dict = {}
    params_kwargs: dict = {}
    try:
        for key, value in raw.items():
            if key == "n_grid":
                kwargs["n_grid"] = _parse_int_list(value, key)
            elif key == "seeds":
                kwargs["seeds"] = int(value)
            elif key == "algos":
                kwargs["algorithms"] = tuple(
                    p.strip() for p in value.split(",") if p.strip())
            elif key == "avg_degree":
                kwargs["avg_degree"] = float(value)
            elif key == "community_size":
                kwargs["community_size"] = int(value)
            elif key == "mu":
                kwargs["mu"] = float(value)
            elif key == "graph_files":
                kwargs["graph_files"] = tuple(
                    Path(p.strip()) for p in value.split(",") if p.strip())
            elif key == "out":
                kwargs["out"] = Path(value)
            elif key == "use_cache":
                kwargs["use_cache"] = _parse_bool(value, key)
            elif key == "deterministic_nsamples":
                kwargs["deterministic_nsamples"] = _parse_bool(value, key)
            elif key == "workers":
                kwargs["workers"] = int(value)
            elif key == "timeout_s":
                kwargs["timeout_s"] = float(value)
            elif key in ("lswitch", "nsamples_init"):
                params_kwargs[key] = int(value)
            else:  # remaining CostParams overrides are floats
                params_kwargs[key] = float(value)
    except ValueError as exc:
        raise DataError(f"bad config value: {exc}") from exc

    if getattr(args, "n_grid", None) is not None:
        kwargs["n_grid"] = _parse_int_list(args.n_grid, "--n-grid")
    if getattr(args, "seeds", None) is not None:
        kwargs["seeds"] = args.seeds
    if getattr(args, "algo", None):
        names: list[str] = []
        for entry in args.algo:
            names.extend(p.strip() for p in entry.split(",") if p.strip())
        kwargs["algorithms"] = tuple(names)
    if getattr(args, "graph", None):
        kwargs["graph_files"] = tuple(Path(p) for p in args.graph)
    if getattr(args, "out", None) is not None:
        kwargs["out"] = Path(args.out)
    if getattr(args, "no_cache", False):
        kwargs["use_cache"] = False
    if getattr(args, "deterministic_nsamples", False):
        kwargs["deterministic_nsamples"] = True

    if params_kwargs:
        try:
            kwargs["params"] = replace(DEFAULT_PARAMS, **params_kwargs)
        except ValueError as exc:
            raise DataError(f"bad cost parameter: {exc}") from exc
    return ExperimentConfig(**kwargs)


# -- graph sources ---------------------------------------------------------------


def _generated_graphs(cfg: ExperimentConfig) -> list[tuple[str, int, Graph]]:
    """(name, seed, graph) for the generator grid; validates before building."""
    if not cfg.n_grid:
        raise DataError("an n_grid is required (config n_grid or --n-grid)")
    specs = []
    for n in cfg.n_grid:
        for seed in range(cfg.seeds):
            specs.append(FcsConfig(n=n, avg_degree=cfg.avg_degree,
                                   community_size=cfg.community_size,
                                   mu=cfg.mu, seed=seed))
    return [(f"fcs_n{c.n}_s{c.seed}", c.seed, generate_fcs(c)) for c in specs]


def _loaded_graphs(cfg: ExperimentConfig) -> list[tuple[str, int, Graph]]:
    """(name, seed, graph) for explicit edge-list files, one run per seed."""
    out = []
    for path in cfg.graph_files:
        if not path.exists():
            raise DataError(f"graph file not found: {path}")
        g = load_edge_list(path)
        for seed in range(cfg.seeds):
            out.append((path.name, seed, g))
    return out


def _graphs(cfg: ExperimentConfig) -> list[tuple[str, int, Graph]]:
    return _loaded_graphs(cfg) if cfg.graph_files else _generated_graphs(cfg)


# -- generate --------------------------------------------------------------------


def cmd_generate(cfg: ExperimentConfig) -> int:
    """Write one benchmark edge list per (n, seed); all-or-nothing."""
    if not cfg.n_grid:
        raise DataError("an n_grid is required (config n_grid or --n-grid)")
    built: list[tuple[FcsConfig, Graph]] = []
    for n in cfg.n_grid:
        for seed in range(cfg.seeds):
            spec = FcsConfig(n=n, avg_degree=cfg.avg_degree,
                             community_size=cfg.community_size, mu=cfg.mu,
                             seed=seed)
            built.append((spec, generate_fcs(spec)))
    out_dir = cfg.out
    out_dir.mkdir(parents=True, exist_ok=True)
    for spec, g in built:
        path = out_dir / f"fcs_n{spec.n}_s{spec.seed}.edges"
        write_edge_list(g, path, header=fcs_header(spec))
        print(path)
    return 0


# -- run -------------------------------------------------------------------------


def _run_job(name: str, seed: int, g: Graph, algo: str,
             cfg: ExperimentConfig) -> tuple[dict, float]:
    start = time.perf_counter()
    result = sim.run_algorithm(
        algo, g, seed, params=cfg.params,
        deterministic_nsamples=cfg.deterministic_nsamples,
        use_cache=cfg.use_cache,
    )
    elapsed = time.perf_counter() - start
    totals = result.ledger.totals()
    row = {
        "graph": name,
        "n": g.n,
        "seed": seed,
        "algo": algo,
        "levels": result.levels,
        "moves": result.moves,
        "modularity": result.modularity,
        "classical": int(totals["classical"]),
        "budget_exceeded": int(result.budget_exceeded),
        "timed_out": 0,
    }
    for col in _TOTAL_COLUMNS[1:]:
        row[col] = totals.get(col)
    return row, elapsed


def _write_csv(path: Path, columns: Sequence[str], rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            cells = []
            for col in columns:
                v = row.get(col)
                if v is None:
                    cells.append("")
                elif isinstance(v, float):
                    cells.append(repr(v))
                else:
                    cells.append(str(v))
            fh.write(",".join(cells) + "\n")


def _summarize(rows: list[dict]) -> list[dict]:
    """Mean and population standard deviation per (n, algo)."""
    stat_cols = ("moves", "modularity", *_TOTAL_COLUMNS)
    groups: dict[tuple[int, str], list[dict]] = {}
    for row in rows:
        groups.setdefault((row["n"], row["algo"]), []).append(row)
    out = []
    for (n, algo), members in sorted(groups.items()):
        summary: dict = {"n": n, "algo": algo, "runs": len(members)}
        for col in stat_cols:
            values = [m[col] for m in members if m.get(col) is not None]
            if not values:
                summary[f"{col}_mean"] = None
                summary[f"{col}_std"] = None
                continue
            arr = np.asarray(values, dtype=np.float64)
            summary[f"{col}_mean"] = float(arr.mean())
            summary[f"{col}_std"] = float(arr.std())
        out.append(summary)
    return out


SUMMARY_COLUMNS = ("n", "algo", "runs") + tuple(
    f"{col}_{stat}" for col in ("moves", "modularity", *_TOTAL_COLUMNS)
    for stat in ("mean", "std")
)


def summary_path_for(out: Path) -> Path:
    return out.with_name(out.stem + "_summary" + (out.suffix or ".csv"))


def cmd_run(cfg: ExperimentConfig) -> int:
    """Run every (graph, seed, algorithm) job; write rows plus a summary."""
    jobs = [(name, seed, g, algo)
            for name, seed, g in _graphs(cfg) for algo in cfg.algorithms]
    rows: list[dict] = []
    timed_out = False
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(_run_job, name, seed, g, algo, cfg)
                   for name, seed, g, algo in jobs]
        for future in futures:
            row, elapsed = future.result()
            if elapsed > cfg.timeout_s:
                row["timed_out"] = 1
                timed_out = True
            rows.append(row)
    rows.sort(key=lambda r: (r["n"], r["graph"], r["seed"], r["algo"]))
    _write_csv(cfg.out, RUN_COLUMNS, rows)
    print(cfg.out)
    summary = summary_path_for(cfg.out)
    _write_csv(summary, SUMMARY_COLUMNS, _summarize(rows))
    print(summary)
    return 3 if timed_out else 0


# -- fit -------------------------------------------------------------------------


def _read_rows(path: Path) -> list[dict]:
    if not path.exists():
        raise DataError(f"input CSV not found: {path}")
    with path.open("r", encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise DataError(f"{path}: no data rows")
    return rows


def _mean_totals_by_n(rows: list[dict], algo: str,
                      column: str) -> tuple[list[int], list[float]]:
    groups: dict[int, list[float]] = {}
    for row in rows:
        if row.get("algo") != algo:
            continue
        cell = row.get(column)
        if cell in (None, ""):
            continue
        groups.setdefault(int(row["n"]), []).append(float(cell))
    ns = sorted(groups)
    return ns, [sum(groups[n]) / len(groups[n]) for n in ns]


def fit_results(rows: list[dict]) -> list[FitResult]:
    """Weighted log-log fits per variant present in the rows."""
    fits: list[FitResult] = []
    baseline: Optional[float] = None
    for variant, algo, column in VARIANT_SERIES:
        ns, means = _mean_totals_by_n(rows, algo, column)
        if not ns:
            continue
        slope, intercept, residuals = weighted_loglog_fit(ns, means)
        fits.append(FitResult(variant, slope, intercept, residuals, None))
        if variant == "ol":
            baseline = slope
    if baseline is not None:
        fits = [replace(f, ratio=baseline / f.slope) for f in fits]
    if not fits:
        raise DataError("no fittable variants in the input CSV")
    return fits


FIT_COLUMNS = ("variant", "n_points", "slope", "intercept", "ratio",
               "residuals")


def cmd_fit(input_path: Path, out: Optional[Path]) -> int:
    fits = fit_results(_read_rows(input_path))
    rows = [{
        "variant": f.variant,
        "n_points": len(f.residuals),
        "slope": f.slope,
        "intercept": f.intercept,
        "ratio": f.ratio,
        "residuals": ";".join(repr(r) for r in f.residuals),
    } for f in fits]
    if out is not None:
        _write_csv(out, FIT_COLUMNS, rows)
        print(out)
    else:
        for row in rows:
            ratio = "" if row["ratio"] is None else f" ratio={row['ratio']:.4f}"
            print(f"{row['variant']}: slope={row['slope']:.4f} "
                  f"intercept={row['intercept']:.4f}{ratio}")
    return 0


# -- bench-ds --------------------------------------------------------------------


def _cached_state_bytes(g: Graph) -> int:
    """Bytes held by the incremental neighbor-community structure."""
    st = CommunityState(g)
    return sum(arr.nbytes for arr in (
        st.labels, st.sigma, st.own_s, st.own_cnt, st.eta_comm, st.eta_w,
        st.eta_cnt, st.eta_len, st.cnt_buckets,
    ))


def _uncached_state_bytes(g: Graph) -> int:
    """Bytes for the rebuild-per-visit mode: labels, strengths, scratch."""
    cap = max(int(g.max_degree), 1) if g.n > 0 else 1
    return g.n * 8 * 2 + cap * (8 + 8)


BENCH_COLUMNS = ("graph", "n", "seed", "cached_s", "uncached_s",
                 "partitions_equal", "cached_bytes", "uncached_bytes")


def cmd_bench_ds(cfg: ExperimentConfig) -> int:
    """Time run_ol with and without the incremental structure, same seeds."""
    graphs = _graphs(cfg)
    # Warm the JIT kernels so the first timed row is not charged compilation.
    warm = generate_fcs(FcsConfig(n=20, avg_degree=2.0, community_size=10,
                                  mu=0.3, seed=0))
    sim.run_ol(warm, 0, use_cache=True, params=cfg.params)
    sim.run_ol(warm, 0, use_cache=False, params=cfg.params)
    rows = []
    for name, seed, g in graphs:
        # Best of three per mode: scheduler noise only ever adds time.
        cached_s, uncached_s = math.inf, math.inf
        cached = uncached = None
        for _ in range(3):
            t0 = time.perf_counter()
            cached = sim.run_ol(g, seed, use_cache=True, params=cfg.params)
            t1 = time.perf_counter()
            uncached = sim.run_ol(g, seed, use_cache=False, params=cfg.params)
            t2 = time.perf_counter()
            cached_s = min(cached_s, t1 - t0)
            uncached_s = min(uncached_s, t2 - t1)
        rows.append({
            "graph": name,
            "n": g.n,
            "seed": seed,
            "cached_s": cached_s,
            "uncached_s": uncached_s,
            "partitions_equal": int(np.array_equal(cached.labels,
                                                   uncached.labels)),
            "cached_bytes": _cached_state_bytes(g),
            "uncached_bytes": _uncached_state_bytes(g),
        })
    rows.sort(key=lambda r: (r["n"], r["graph"], r["seed"]))
    _write_csv(cfg.out, BENCH_COLUMNS, rows)
    mean_cached = sum(r["cached_s"] for r in rows) / len(rows)
    mean_uncached = sum(r["uncached_s"] for r in rows) / len(rows)
    print(cfg.out)
    print(f"mean cached_s={mean_cached:.6f} uncached_s={mean_uncached:.6f}")
    return 0


# -- moves-report ----------------------------------------------------------------


MOVES_COLUMNS = ("algo", "n_points", "exponent", "intercept")


def moves_fits(rows: list[dict]) -> list[dict]:
    algos = sorted({row["algo"] for row in rows if row.get("algo")})
    out = []
    for algo in algos:
        ns, means = _mean_totals_by_n(rows, algo, "moves")
        if not ns:
            continue
        slope, intercept, _ = weighted_loglog_fit(ns, means)
        out.append({"algo": algo, "n_points": len(ns), "exponent": slope,
                    "intercept": intercept})
    if not out:
        raise DataError("no move counts in the input CSV")
    return out


def cmd_moves_report(input_path: Path, out: Optional[Path]) -> int:
    fits = moves_fits(_read_rows(input_path))
    if out is not None:
        _write_csv(out, MOVES_COLUMNS, fits)
        print(out)
    else:
        for row in fits:
            print(f"{row['algo']}: exponent={row['exponent']:.4f} "
                  f"intercept={row['intercept']:.4f}")
    return 0


# -- CLI -------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we map usage to 1
        raise UsageError(message)


def _add_common_flags(p: argparse.ArgumentParser, *, graphs: bool = True,
                      cache_flags: bool = False) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seeds", type=int, help="seeds (runs) per grid point")
    p.add_argument("--out", help="output path")
    p.add_argument("--n-grid", dest="n_grid",
                   help="comma-separated vertex counts, e.g. 1000,3000")
    if graphs:
        p.add_argument("--graph", action="append",
                       help="edge-list file (repeatable; overrides the grid)")
    if cache_flags:
        p.add_argument("--algo", action="append",
                       help="algorithm name (repeatable or comma-separated)")
        p.add_argument("--no-cache", dest="no_cache", action="store_true",
                       help="rebuild neighbor weights per visit in ol runs")
        p.add_argument("--deterministic-nsamples", action="store_true",
                       help="replace sampling-prelude draws with thresholds")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qlouvain",
                     description="community-detection query-count experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write benchmark edge-list files")
    _add_common_flags(p, graphs=False)

    p = sub.add_parser("run", help="run algorithms over a sweep; write CSV")
    _add_common_flags(p, cache_flags=True)

    p = sub.add_parser("fit", help="weighted log-log fits of a run CSV")
    p.add_argument("input", help="run CSV from the run command")
    p.add_argument("--out", help="fits CSV (default: print a table)")

    p = sub.add_parser("bench-ds",
                       help="time cached vs uncached sequential sweeps")
    _add_common_flags(p)

    p = sub.add_parser("moves-report", help="fit move counts against n")
    p.add_argument("input", help="run CSV from the run command")
    p.add_argument("--out", help="report CSV (default: print a table)")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "fit":
            return cmd_fit(Path(args.input),
                           Path(args.out) if args.out else None)
        if args.command == "moves-report":
            return cmd_moves_report(Path(args.input),
                                    Path(args.out) if args.out else None)
        cfg = config_from_sources(args)
        if args.command == "generate":
            return cmd_generate(cfg)
        if args.command == "run":
            return cmd_run(cfg)
        return cmd_bench_ds(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
