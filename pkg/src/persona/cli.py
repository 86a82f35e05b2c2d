"""Batch command-line entry points.

Every artifact-producing command writes a ``manifest.json`` next to its
outputs recording the command, a config hash, a dataset hash, the seed,
and the tool version, so any run can be reproduced.  Exit codes:
0 success, 2 validation error, 3 degenerate statistics under --strict.
"""

from __future__ import annotations

import hashlib
import json
import socket
import sys
import time
from pathlib import Path

import click

from . import __version__
from .arguments import (
    TraceValidationError,
    dump_trace,
    load_dataset,
    load_trace,
    save_trace,
)
from .baselines import DegenerateUpdateError, NonLiteralClaimError, ha_beliefs
from .beliefs import WeightingParams, probability_to_confidence
from .experiments import (
    Experiment2Result,
    buckets_to_csv,
    buckets_to_markdown,
    rhos_to_csv,
    run_experiment_1,
    run_experiment_2_1,
    run_experiment_2_2,
    ttests_to_csv,
    ttests_to_markdown,
)
from .learning import DEFAULT_GRID, NoRankingsError, ParamGrid, learn_params, learn_params_pooled
from .logic import FormulaSyntaxError, LanguageError, UnknownAtomError
from .ranking import Ranking
from .replay import replay_states
from .scenarios import ScenarioError, load_scenario
from .synthetic import generate_cohort
from .arguments import build_attack_graph

VALIDATION_ERRORS = (
    TraceValidationError,
    ScenarioError,
    FormulaSyntaxError,
    UnknownAtomError,
    LanguageError,
    NoRankingsError,
    NonLiteralClaimError,
    DegenerateUpdateError,
    ValueError,
    KeyError,
    TypeError,
    FileNotFoundError,
)

EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3

#: Weighting-curve parameter pairs plotted by default.
DEFAULT_CURVE_PAIRS = ((0.5, 1.0), (0.5, 2.0), (0.5, 3.0), (0.3, 3.0), (0.7, 3.0))


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(EXIT_VALIDATION)


def _config_hash(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True, default=str).encode()
    ).hexdigest()


def _dataset_hash(path: Path) -> str:
    digest = hashlib.sha256()
    if path.is_dir():
        for f in sorted(path.glob("*.json")):
            digest.update(f.name.encode())
            digest.update(f.read_bytes())
    elif path.exists():
        digest.update(path.read_bytes())
    return digest.hexdigest()


def _write_manifest(out_dir: Path, command: str, config: dict, dataset: Path | None, seed) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "config": config,
        "config_hash": _config_hash(config),
        "dataset_hash": _dataset_hash(dataset) if dataset else None,
        "seed": seed,
        "tool_version": __version__,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _parse_grid(spec: str | None) -> ParamGrid:
    """Grid override: "s1,s2,...;r1,r2,..." (semicolon separates the axes)."""
    if spec is None:
        return DEFAULT_GRID
    try:
        s_part, r_part = spec.split(";")
        s_values = tuple(float(v) for v in s_part.split(",") if v)
        r_values = tuple(float(v) for v in r_part.split(",") if v)
    except ValueError:
        raise click.BadParameter("expected 's1,s2,...;r1,r2,...'", param_hint="--grid")
    if not s_values or not r_values:
        raise click.BadParameter("grid axes must be nonempty", param_hint="--grid")
    return ParamGrid(s_values, r_values)


@click.group()
@click.version_option(__version__)
def main():
    """Belief modeling for argumentation dialogues."""


@main.command()
@click.argument("trace_file", type=click.Path(exists=True, path_type=Path))
@click.option("--method", default="persona", show_default=True,
              type=click.Choice(["persona", "sbu", "hm1", "hm2", "ha"]))
@click.option("--params", "params_", nargs=2, type=float, default=(0.5, 1.0),
              show_default=True, metavar="S R", help="Weighting parameters for --method persona.")
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Write the dump as JSON instead of stdout.")
def replay(trace_file: Path, method: str, params_: tuple[float, float], out: Path | None):
    """Replay a trace and dump the belief state after every event."""
    try:
        trace = load_trace(trace_file)
        if method == "ha":
            graph = build_attack_graph(trace.argument_pool, trace.language)
            table = ha_beliefs(trace, graph)
            doc = {"method": "ha", "argument_beliefs": {k: table[k] for k in sorted(table)}}
        else:
            params = WeightingParams(*params_)
            states = []
            for i, belief in replay_states(trace, method, params):
                states.append({"event": i, **belief.to_payload()})
            doc = {"method": method, "states": states}
            if method == "persona":
                doc["params"] = {"s": params.s, "r": params.r}
    except VALIDATION_ERRORS as exc:
        _fail(exc)
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        out.write_text(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("dataset", type=click.Path(exists=True, path_type=Path))
@click.option("--k", default=3, show_default=True, help="Training rounds per participant.")
@click.option("--pooled", is_flag=True, help="Learn one shared pair over all participants.")
@click.option("--grid", "grid_spec", default=None, help="Override grid: 's1,s2,...;r1,r2,...'.")
@click.option("--out", type=click.Path(path_type=Path), default=None)
def learn(dataset: Path, k: int, pooled: bool, grid_spec: str | None, out: Path | None):
    """Learn weighting parameters from a trace dataset."""
    try:
        grid = _parse_grid(grid_spec)
        traces = load_dataset(dataset)
        if pooled:
            results = [learn_params_pooled(traces, k, grid)]
        else:
            by_pid: dict[str, list] = {}
            for t in traces:
                by_pid.setdefault(t.participant_id, []).append(t)
            results = [learn_params(by_pid[pid], k, grid) for pid in sorted(by_pid)]
    except VALIDATION_ERRORS as exc:
        _fail(exc)
    doc = [r.to_dict() for r in results]
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        _write_manifest(
            out.parent,
            "learn",
            {
                "k": k,
                "pooled": pooled,
                "grid": grid_spec,
                "skipped_rounds_total": sum(r.skipped_rounds for r in results),
            },
            dataset,
            None,
        )
    else:
        click.echo(text, nl=False)


def _write_report_files(out: Path, stem: str, report, matrix, fmt: str) -> None:
    if fmt in ("csv", "both"):
        (out / f"{stem}_buckets.csv").write_text(buckets_to_csv(report))
        (out / f"{stem}_ttests.csv").write_text(ttests_to_csv(matrix))
        (out / f"{stem}_rhos.csv").write_text(rhos_to_csv(report))
    if fmt in ("md", "both"):
        (out / f"{stem}.md").write_text(
            buckets_to_markdown(f"{stem}: correlation distribution", report)
            + "\n"
            + ttests_to_markdown(f"{stem}: one-sided paired t-tests (row beats column)", matrix)
        )


@main.command()
@click.argument("dataset", type=click.Path(exists=True, path_type=Path))
@click.option("--which", default="1", show_default=True, type=click.Choice(["1", "2.1", "2.2"]))
@click.option("--grid", "grid_spec", default=None)
@click.option("--k-list", default="1,2,3", show_default=True, help="Training depths (experiment 1).")
@click.option("--k-prime", default=4, show_default=True, help="Evaluation round (experiment 1).")
@click.option("--rounds", default="2,3,4,5", show_default=True, help="Rounds (experiment 2.1).")
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--format", "fmt", default="both", show_default=True, type=click.Choice(["csv", "md", "both"]))
@click.option("--strict", is_flag=True, help="Exit 3 when any statistic cell is degenerate.")
@click.option("--seed", default=0, show_default=True, help="Recorded in the manifest; runners are deterministic.")
def experiment(dataset: Path, which: str, grid_spec: str | None, k_list: str,
               k_prime: int, rounds: str, out: Path, fmt: str, strict: bool, seed: int):
    """Run an experiment over a dataset and write report tables."""
    degenerate = 0
    try:
        grid = _parse_grid(grid_spec)
        traces = load_dataset(dataset)
        out.mkdir(parents=True, exist_ok=True)
        if which == "1":
            ks = tuple(int(v) for v in k_list.split(","))
            result = run_experiment_1(traces, grid, ks, k_prime)
            _write_report_files(out, "experiment1", result.report, result.ttests, fmt)
            degenerate += sum(1 for p in result.ttests.pvalues.values() if p is None)
            degenerate += sum(result.report.excluded(c) for c in result.report.columns)
        elif which == "2.1":
            rs = tuple(int(v) for v in rounds.split(","))
            result21 = run_experiment_2_1(traces, grid, rounds=rs)
            for k in rs:
                _write_report_files(out, f"experiment21_round{k}",
                                    result21.reports[k], result21.ttests[k], fmt)
                degenerate += sum(1 for p in result21.ttests[k].pvalues.values() if p is None)
            (out / "exclusions.json").write_text(
                json.dumps(result21.exclusions, indent=2, sort_keys=True) + "\n")
        else:
            result22 = run_experiment_2_2(traces, grid)
            _write_report_files(out, "experiment22",
                                result22.reports["final"], result22.ttests["final"], fmt)
            degenerate += sum(1 for p in result22.ttests["final"].pvalues.values() if p is None)
            (out / "exclusions.json").write_text(
                json.dumps(result22.exclusions, indent=2, sort_keys=True) + "\n")
        _write_manifest(out, f"experiment {which}",
                        {"which": which, "grid": grid_spec, "k_list": k_list,
                         "k_prime": k_prime, "rounds": rounds, "format": fmt},
                        dataset, seed)
    except VALIDATION_ERRORS as exc:
        _fail(exc)
    if strict and degenerate:
        click.echo(f"degenerate statistics in {degenerate} cells", err=True)
        sys.exit(EXIT_DEGENERATE)


@main.command()
@click.argument("scenario_file", type=click.Path(exists=True, path_type=Path))
@click.option("--n", default=10, show_default=True, help="Cohort size.")
@click.option("--true-params", "true_params", nargs=2, type=float, default=None,
              help="Fix the planted pair; default draws one per participant from the grid.")
@click.option("--noise", default=0.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--rounds", default=None, type=int, help="Rounds per dialogue (default: scenario max).")
@click.option("--out", type=click.Path(path_type=Path), required=True)
def simulate(scenario_file: Path, n: int, true_params, noise: float, seed: int,
             rounds: int | None, out: Path):
    """Generate a synthetic-participant dataset from a scenario."""
    try:
        scenario = load_scenario(scenario_file)
        planted = WeightingParams(*true_params) if true_params else None
        traces = generate_cohort(scenario, n, seed, noise, planted, rounds=rounds)
        out.mkdir(parents=True, exist_ok=True)
        for trace in traces:
            save_trace(trace, out / f"{trace.participant_id}.json")
        _write_manifest(out, "simulate",
                        {"scenario": scenario.id, "n": n, "noise": noise,
                         "true_params": true_params, "rounds": rounds},
                        scenario_file, seed)
    except VALIDATION_ERRORS as exc:
        _fail(exc)
    click.echo(f"wrote {len(traces)} traces to {out}")


@main.command("plot-weighting")
@click.option("--pairs", default=None,
              help="Parameter pairs 's:r' separated by semicolons, e.g. '0.5:1;0.3:3'.")
@click.option("--step", default=0.001, show_default=True, help="Probability grid step.")
@click.option("--out", type=click.Path(path_type=Path), default=None)
def plot_weighting(pairs: str | None, step: float, out: Path | None):
    """Emit (s, r, p, confidence) samples of the weighting curves as CSV."""
    try:
        if pairs is None:
            pair_list = [WeightingParams(s, r) for s, r in DEFAULT_CURVE_PAIRS]
        else:
            pair_list = []
            for chunk in pairs.split(";"):
                s_text, r_text = chunk.split(":")
                pair_list.append(WeightingParams(float(s_text), float(r_text)))
        lines = ["s,r,p,confidence"]
        steps = round(1.0 / step)
        for params in pair_list:
            for i in range(steps + 1):
                p = min(i * step, 1.0)
                sigma = probability_to_confidence(p, params)
                lines.append(f"{params.s:g},{params.r:g},{p:.6g},{sigma:.12g}")
        text = "\n".join(lines) + "\n"
    except VALIDATION_ERRORS as exc:
        _fail(exc)
    if out:
        out.write_text(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True, envvar="PERSONA_HOST")
@click.option("--port", default=8000, show_default=True, envvar="PERSONA_PORT")
@click.option("--scenarios", "scenario_dir", type=click.Path(exists=True, path_type=Path),
              default=None, envvar="PERSONA_SCENARIOS", help="Directory of scenario JSON files.")
@click.option("--trace-dir", type=click.Path(path_type=Path), default=None,
              envvar="PERSONA_TRACE_DIR", help="Where ended sessions persist their traces.")
@click.option("--ui", "ui_dir", type=click.Path(path_type=Path), default=None,
              envvar="PERSONA_UI", help="Static UI assets to serve at /.")
def serve(host: str, port: int, scenario_dir: Path | None, trace_dir: Path | None,
          ui_dir: Path | None):
    """Run the dialogue session service."""
    import uvicorn

    from .service import create_app

    # Preflight bind check: refuse a busy port with a clean validation exit.
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        probe.close()
        _fail(RuntimeError(f"cannot bind {host}:{port}: {exc}"))
    probe.close()

    try:
        app = create_app(scenario_dir=scenario_dir, trace_dir=trace_dir, ui_dir=ui_dir)
    except VALIDATION_ERRORS as exc:
        _fail(exc)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
