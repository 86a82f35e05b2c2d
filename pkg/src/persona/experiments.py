"""Experiment runners, correlation reports, and significance matrices.

All runners are pure functions of (dataset, config): reruns produce
identical results, and the report writers emit canonical text so equal
results serialize to equal bytes.  Participants whose statistic is
undefined for a cell (missing round, degenerate ranking, non-literal
claim under the redistribution baselines) are excluded from that cell
and counted, never silently dropped or fabricated.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .arguments import DialogueTrace, HUMAN, build_attack_graph, premise_conjunction
from .baselines import DegenerateUpdateError, NonLiteralClaimError, ha_beliefs
from .beliefs import probability_of_formula
from .learning import (
    DEFAULT_GRID,
    LearnedParams,
    ParamGrid,
    learn_params,
    learn_params_pooled,
)
from .ranking import Ranking
from .replay import ranking_at_round, replay_direct, replay_weighted
from .stats import (
    CORRELATION_BUCKETS,
    DegenerateStatisticsError,
    bucket_fractions,
    paired_t_test_one_sided,
    ranking_correlation,
)

MODEL_METHODS = ("persona", "generic", "sbu", "hm1", "hm2")
ARGUMENT_METHODS = ("persona", "generic", "sbu", "ha")


@dataclass
class CorrelationReport:
    """Per-column correlation samples aligned by participant."""

    columns: tuple[str, ...]
    participants: tuple[str, ...]
    # rhos[column][i] corresponds to participants[i]; None means excluded.
    rhos: dict[str, list[Optional[float]]]
    notes: dict[str, int] = field(default_factory=dict)

    def defined(self, column: str) -> list[float]:
        return [r for r in self.rhos[column] if r is not None]

    def excluded(self, column: str) -> int:
        return sum(1 for r in self.rhos[column] if r is None)

    def buckets(self, column: str) -> tuple[float, ...]:
        return bucket_fractions(self.defined(column))


@dataclass
class TTestMatrix:
    """One-sided paired p-values for "row outperforms column"."""

    labels: tuple[str, ...]
    pvalues: dict[tuple[str, str], Optional[float]]
    pair_sizes: dict[tuple[str, str], int]

    def p(self, x: str, y: str) -> Optional[float]:
        return self.pvalues[(x, y)]


def ttest_matrix(report: CorrelationReport) -> TTestMatrix:
    """Pairwise matrix over the report columns, pairing on shared participants."""
    pvalues: dict[tuple[str, str], Optional[float]] = {}
    sizes: dict[tuple[str, str], int] = {}
    for x in report.columns:
        for y in report.columns:
            if x == y:
                continue
            paired = [
                (rx, ry)
                for rx, ry in zip(report.rhos[x], report.rhos[y])
                if rx is not None and ry is not None
            ]
            sizes[(x, y)] = len(paired)
            if len(paired) < 2:
                pvalues[(x, y)] = None
                continue
            xs = [p[0] for p in paired]
            ys = [p[1] for p in paired]
            try:
                pvalues[(x, y)] = paired_t_test_one_sided(xs, ys)
            except DegenerateStatisticsError:
                pvalues[(x, y)] = None
    return TTestMatrix(report.columns, pvalues, sizes)


def _group_by_participant(traces: Sequence[DialogueTrace]) -> dict[str, list[DialogueTrace]]:
    groups: dict[str, list[DialogueTrace]] = {}
    for t in traces:
        groups.setdefault(t.participant_id, []).append(t)
    return groups


# --- experiment 1: parameter learning over growing history ------------------

@dataclass
class Experiment1Result:
    report: CorrelationReport
    ttests: TTestMatrix
    k_prime: int
    learned: dict[tuple[str, int], LearnedParams]


def run_experiment_1(
    traces: Sequence[DialogueTrace],
    grid: ParamGrid = DEFAULT_GRID,
    k_list: Sequence[int] = (1, 2, 3),
    k_prime: int = 4,
) -> Experiment1Result:
    """Learn per participant on rounds 1..k, evaluate at a later round.

    Produces one correlation column per training depth k (labelled
    ``D_k``) and the pairwise significance matrix between depths.
    """
    if not traces:
        raise ValueError("empty dataset")
    if any(k >= k_prime for k in k_list):
        raise ValueError("every training depth must be below the evaluation round")
    groups = _group_by_participant(traces)
    participants = tuple(sorted(groups))
    columns = tuple(f"D_{k}" for k in k_list)
    rhos: dict[str, list[Optional[float]]] = {c: [] for c in columns}
    learned: dict[tuple[str, int], LearnedParams] = {}

    for pid in participants:
        p_traces = groups[pid]
        eval_trace = p_traces[0]
        has_round = (
            eval_trace.completed_rounds >= k_prime
            and eval_trace.ranking_for_round(k_prime) is not None
        )
        for k, col in zip(k_list, columns):
            if not has_round:
                rhos[col].append(None)
                continue
            fit = learn_params(p_traces, k, grid)
            learned[(pid, k)] = fit
            stated = _observed(eval_trace, k_prime)
            replayed = ranking_at_round(eval_trace, k_prime, "persona", fit.params)
            rhos[col].append(ranking_correlation(stated, replayed))

    report = CorrelationReport(columns, participants, rhos)
    return Experiment1Result(report, ttest_matrix(report), k_prime, learned)


def _observed(trace: DialogueTrace, k: int) -> Ranking:
    stated = trace.ranking_for_round(k)
    assert stated is not None
    ids = trace.candidate_ids()
    return Ranking.from_order([ids.index(c) for c in stated.order])


# --- experiment 2.1: model-ranking comparison across methods ----------------

@dataclass
class Experiment2Result:
    # reports/ttests keyed by round (experiment 2.1) or "final" (2.2)
    reports: dict
    ttests: dict
    exclusions: dict


def _trace_has_literal_claims(trace: DialogueTrace) -> bool:
    from .baselines import _literal_map

    try:
        for ev in trace.events:
            _literal_map(trace.pool_by_id(ev.argument_id).claim)
    except NonLiteralClaimError:
        return False
    return True


def run_experiment_2_1(
    traces: Sequence[DialogueTrace],
    grid: ParamGrid = DEFAULT_GRID,
    methods: Sequence[str] = MODEL_METHODS,
    rounds: Sequence[int] = (2, 3, 4, 5),
) -> Experiment2Result:
    """Compare stated vs replayed model rankings per method and round.

    For round k the adaptive methods learn on rounds 1..k-1 (per
    participant for ``persona``, pooled for ``generic``); every method
    then replays through round k's events and ranks the candidates.
    """
    if not traces:
        raise ValueError("empty dataset")
    groups = _group_by_participant(traces)
    participants = tuple(sorted(groups))
    reports: dict[int, CorrelationReport] = {}
    ttests: dict[int, TTestMatrix] = {}
    exclusions: dict[str, int] = {
        "non_literal_claims": 0,
        "missing_rounds": 0,
        "degenerate_redistributions": 0,
    }

    non_literal = {
        pid: not _trace_has_literal_claims(groups[pid][0]) for pid in participants
    }
    exclusions["non_literal_claims"] = sum(non_literal.values())

    for k in rounds:
        pooled = learn_params_pooled(traces, k - 1, grid) if "generic" in methods else None
        rhos: dict[str, list[Optional[float]]] = {m: [] for m in methods}
        for pid in participants:
            trace = groups[pid][0]
            available = (
                trace.completed_rounds >= k and trace.ranking_for_round(k) is not None
            )
            if not available:
                exclusions["missing_rounds"] += 1
                for m in methods:
                    rhos[m].append(None)
                continue
            stated = _observed(trace, k)
            for m in methods:
                if m in ("hm1", "hm2") and non_literal[pid]:
                    rhos[m].append(None)
                    continue
                if m == "persona":
                    fit = learn_params(groups[pid], k - 1, grid)
                    replayed = ranking_at_round(trace, k, "persona", fit.params)
                elif m == "generic":
                    assert pooled is not None
                    replayed = ranking_at_round(trace, k, "generic", pooled.params)
                else:
                    try:
                        replayed = ranking_at_round(trace, k, m)
                    except DegenerateUpdateError:
                        # The naive redistribution can zero out every world;
                        # such cells are excluded rather than improvised.
                        exclusions["degenerate_redistributions"] += 1
                        rhos[m].append(None)
                        continue
                rhos[m].append(ranking_correlation(stated, replayed))
        report = CorrelationReport(tuple(methods), participants, rhos)
        reports[k] = report
        ttests[k] = ttest_matrix(report)

    return Experiment2Result(reports, ttests, exclusions)


# --- experiment 2.2: argument-belief estimation ------------------------------

def _argument_scores_from_belief(trace, belief, arg_ids):
    return [
        probability_of_formula(belief, premise_conjunction(trace.pool_by_id(a)))
        for a in arg_ids
    ]


def run_experiment_2_2(
    traces: Sequence[DialogueTrace],
    grid: ParamGrid = DEFAULT_GRID,
    methods: Sequence[str] = ARGUMENT_METHODS,
    generic_k: int = 3,
    min_ranked_arguments: int = 4,
) -> Experiment2Result:
    """Compare the stated final argument ranking with per-method rankings.

    Only traces ending with a human turn that rank at least four
    arguments take part; the rest are excluded with a count.  The
    world-distribution methods score an argument by the probability of
    its premises under the final replayed belief; ``ha`` uses its own
    per-argument belief table.
    """
    if not traces:
        raise ValueError("empty dataset")
    groups = _group_by_participant(traces)
    participants = tuple(sorted(groups))
    eligible: dict[str, bool] = {}
    for pid in participants:
        trace = groups[pid][0]
        eligible[pid] = (
            len(trace.events) >= 2
            and trace.events[-1].speaker == HUMAN
            and len(trace.final_argument_ranking) >= min_ranked_arguments
        )
    exclusions = {
        "filtered_traces": sum(1 for ok in eligible.values() if not ok),
        "eligible_traces": sum(1 for ok in eligible.values() if ok),
    }

    pooled = (
        learn_params_pooled(traces, generic_k, grid) if "generic" in methods else None
    )
    rhos: dict[str, list[Optional[float]]] = {m: [] for m in methods}
    for pid in participants:
        trace = groups[pid][0]
        if not eligible[pid]:
            for m in methods:
                rhos[m].append(None)
            continue
        ranked = trace.final_argument_ranking
        stated = Ranking.from_order(range(len(ranked)))  # best first by definition
        graph = build_attack_graph(trace.argument_pool, trace.language)
        for m in methods:
            if m == "persona":
                fit = learn_params(groups[pid], max(trace.completed_rounds - 1, 1), grid)
                belief = replay_weighted(trace, fit.params)
                scores = _argument_scores_from_belief(trace, belief, ranked)
            elif m == "generic":
                assert pooled is not None
                belief = replay_weighted(trace, pooled.params)
                scores = _argument_scores_from_belief(trace, belief, ranked)
            elif m == "sbu":
                belief = replay_direct(trace)
                scores = _argument_scores_from_belief(trace, belief, ranked)
            elif m == "ha":
                table = ha_beliefs(trace, graph)
                scores = [table[a] for a in ranked]
            else:
                raise ValueError(f"unknown argument-belief method {m!r}")
            computed = Ranking.from_scores(scores)
            rhos[m].append(ranking_correlation(stated, computed))

    report = CorrelationReport(tuple(methods), participants, rhos)
    return Experiment2Result(
        {"final": report}, {"final": ttest_matrix(report)}, exclusions
    )


# --- report rendering --------------------------------------------------------

def _bucket_label(lo: float, hi: float, last: bool) -> str:
    return f"[{lo:g}, {hi:g}{']' if last else ')'}"


def buckets_to_markdown(title: str, report: CorrelationReport) -> str:
    lines = [f"### {title}", ""]
    header = "| interval | " + " | ".join(report.columns) + " |"
    sep = "|---" * (len(report.columns) + 1) + "|"
    lines += [header, sep]
    fracs = {
        c: report.buckets(c) if report.defined(c) else None for c in report.columns
    }
    for i, (lo, hi) in enumerate(CORRELATION_BUCKETS):
        label = _bucket_label(lo, hi, i == len(CORRELATION_BUCKETS) - 1)
        cells = " | ".join(
            "n/a" if fracs[c] is None else f"{fracs[c][i]:.3f}" for c in report.columns
        )
        lines.append(f"| {label} | {cells} |")
    excluded = ", ".join(f"{c}: {report.excluded(c)}" for c in report.columns)
    lines += ["", f"Excluded participants per column: {excluded}.", ""]
    return "\n".join(lines)


def buckets_to_csv(report: CorrelationReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["column", "bucket_low", "bucket_high", "fraction", "n", "excluded"])
    for c in report.columns:
        defined = report.defined(c)
        fracs = report.buckets(c) if defined else [None] * len(CORRELATION_BUCKETS)
        for (lo, hi), frac in zip(CORRELATION_BUCKETS, fracs):
            writer.writerow(
                [
                    c,
                    f"{lo:g}",
                    f"{hi:g}",
                    "" if frac is None else f"{frac:.6f}",
                    len(defined),
                    report.excluded(c),
                ]
            )
    return buf.getvalue()


def ttests_to_markdown(title: str, matrix: TTestMatrix) -> str:
    lines = [f"### {title}", ""]
    header = "| X \\ Y | " + " | ".join(matrix.labels) + " |"
    sep = "|---" * (len(matrix.labels) + 1) + "|"
    lines += [header, sep]
    for x in matrix.labels:
        cells = []
        for y in matrix.labels:
            if x == y:
                cells.append("--")
            else:
                p = matrix.p(x, y)
                cells.append("n/a" if p is None else f"{p:.3g}")
        lines.append(f"| {x} | " + " | ".join(cells) + " |")
    lines.append("")
    return "\n".join(lines)


def ttests_to_csv(matrix: TTestMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y", "p_value", "pairs"])
    for x in matrix.labels:
        for y in matrix.labels:
            if x == y:
                continue
            p = matrix.pvalues[(x, y)]
            writer.writerow([x, y, "" if p is None else f"{p:.10g}", matrix.pair_sizes[(x, y)]])
    return buf.getvalue()


def rhos_to_csv(report: CorrelationReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["participant"] + list(report.columns))
    for i, pid in enumerate(report.participants):
        row = [pid]
        for c in report.columns:
            r = report.rhos[c][i]
            row.append("" if r is None else f"{r:.10g}")
        writer.writerow(row)
    return buf.getvalue()
