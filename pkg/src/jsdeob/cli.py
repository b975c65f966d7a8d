"""Command-line interface: deobfuscate, metrics, and batch subcommands."""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .ast_nodes import Node, clone
from .engine import DeobResult, deobfuscate
from .humanize import ProviderConfig
from .interp.interpreter import EvalBudget
from .metrics import (
    EntropyReport,
    HalsteadMetrics,
    detect_techniques,
    halstead,
    normalize_for_dedup,
    obfuscation_score,
    reduction_scores,
    source_entropy,
)
from .preprocess import preprocess
from .printer import FormatOptions, print_source

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_UNREADABLE = 2


@dataclass
class CliOptions:
    model: str = "none"
    api_key: str = ""
    base_url: str = ""
    no_dynamic: bool = False
    no_humanize: bool = False
    budget_steps: Optional[int] = None
    budget_ms: Optional[int] = None
    workers: int = 1
    format: str = "json"
    out_dir: Optional[str] = None


def _options_from_args(args: argparse.Namespace) -> CliOptions:
    """Merge flags over environment variables over defaults."""
    env = os.environ
    api_key = args.apiKey or env.get("OPENAI_API_KEY") or env.get("GEMINI_API_KEY") or ""
    base_url = args.baseURL or env.get("BASE_URL") or ""
    return CliOptions(
        model=args.model,
        api_key=api_key,
        base_url=base_url,
        no_dynamic=args.no_dynamic,
        no_humanize=args.no_humanize,
        budget_steps=args.budget_steps,
        budget_ms=args.budget_ms,
        workers=getattr(args, "workers", 1),
        format=args.format,
        out_dir=args.out_dir,
    )


def _provider(opts: CliOptions) -> Optional[ProviderConfig]:
    if opts.no_humanize:
        return None
    if opts.model in ("", "none"):
        return ProviderConfig(provider="offline-heuristic")
    return ProviderConfig(
        provider="remote-llm",
        model=opts.model,
        api_key=opts.api_key,
        base_url=opts.base_url or "https://api.openai.com/v1",
    )


def _budget(opts: CliOptions) -> Optional[EvalBudget]:
    if opts.budget_steps is None and opts.budget_ms is None:
        return None
    budget = EvalBudget()
    if opts.budget_steps is not None:
        budget.max_steps = opts.budget_steps
    if opts.budget_ms is not None:
        budget.wall_clock_ms = opts.budget_ms
    return budget


def _combined_program(programs: list[Node]) -> Node:
    if len(programs) == 1:
        return programs[0]
    body: list[Node] = []
    for p in programs:
        body.extend(clone(s) for s in p.body)
    return Node("Program", None, body=body)


def _snapshot(src: str, program: Node) -> dict:
    h = halstead(program)
    e = source_entropy(src, program)
    return {
        "halstead": _halstead_dict(h),
        "entropy": _entropy_dict(e),
    }


def _halstead_dict(h: HalsteadMetrics) -> dict:
    return {
        "n1": h.n1, "n2": h.n2, "N1": h.N1, "N2": h.N2,
        "length": h.length, "vocabulary": h.vocabulary,
        "volume": h.volume, "difficulty": h.difficulty, "effort": h.effort,
    }


def _entropy_dict(e: EntropyReport) -> dict:
    return {
        "h_char": e.h_char, "h_word": e.h_word, "h_text": e.h_text,
        "h_node_num": e.h_node_num, "h_edge_num": e.h_edge_num,
        "h_node_degree": e.h_node_degree, "h_node_depth": e.h_node_depth,
        "h_ast": e.h_ast,
    }


def build_report(
    input_path: str,
    source: str,
    result: Optional[DeobResult] = None,
    include_timings: bool = True,
) -> dict:
    """Assemble the JSON run report for one input."""
    pre = preprocess(source)
    before_program = _combined_program([item.program for item in pre])
    tags = detect_techniques(source, before_program)
    score = obfuscation_score(tags)
    report: dict = {
        "schema_version": SCHEMA_VERSION,
        "input": input_path,
        "stages": ["preprocess"] if result is None else ["preprocess", "pipeline"],
        "techniques": sorted(
            ({"id": t.id, "category": t.category, "points": t.points} for t in tags),
            key=lambda d: int(d["id"][1:]),
        ),
        "obfuscation_score": score.value,
        "fingerprint": normalize_for_dedup(source),
        "metrics": {"before": _snapshot(source, before_program)},
        "diagnostics": [],
        "timings": None,
    }
    if result is None:
        report["stages"] = ["preprocess", "metrics"]
        for item in pre:
            for note in item.source.diagnostics:
                report["diagnostics"].append(f"{note.stage}: {note.message}")
        return report

    after_program = _combined_program(result.programs)
    before_h = halstead(before_program)
    after_h = halstead(after_program)
    red = reduction_scores(before_h, after_h)
    before_e = source_entropy(source, before_program)
    after_e = source_entropy(result.text, after_program)
    report["metrics"]["after"] = _snapshot(result.text, after_program)
    report["metrics"]["reduction"] = {
        "hlr": red.hlr, "her": red.her, "flagged": red.flagged,
    }
    report["metrics"]["entropy_delta"] = {
        "h_text": after_e.h_text - before_e.h_text,
        "h_ast": after_e.h_ast - before_e.h_ast,
    }
    report["pass_changes"] = _aggregate_pass_changes(result)
    report["iterations"] = sum(len(t.iterations) for t in result.traces)
    report["diagnostics"] = list(result.diagnostics)
    report["sandbox"] = {
        "steps_used": sum(t.sandbox_steps for t in result.traces),
    }
    if result.humanize_results:
        report["stages"].append("humanize")
        provenance: dict[str, int] = {}
        applied = rejected = 0
        warnings: list[str] = []
        for hres in result.humanize_results:
            applied += hres.applied
            rejected += hres.rejected
            warnings.extend(hres.plan.warnings)
            for entry in hres.plan.entries:
                provenance[entry.provenance] = provenance.get(entry.provenance, 0) + 1
        report["humanizer"] = {
            "applied": applied,
            "rejected": rejected,
            "provenance": provenance,
            "warnings": warnings,
        }
    else:
        report["humanizer"] = None
    if include_timings:
        report["timings"] = dict(result.timings)
    return report


def _aggregate_pass_changes(result: DeobResult) -> dict[str, int]:
    totals: dict[str, int] = {}
    for trace in result.traces:
        for it in trace.iterations:
            for name, n in it.pass_changes.items():
                totals[name] = totals.get(name, 0) + n
            totals["dynamic"] = totals.get("dynamic", 0) + it.dynamic_changes
    return totals


def _read_input(path: str) -> Optional[str]:
    try:
        return Path(path).read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None


def _output_paths(input_path: str, out_dir: Optional[str]) -> tuple[Path, Path]:
    src = Path(input_path)
    base = Path(out_dir) if out_dir else src.parent
    base.mkdir(parents=True, exist_ok=True)
    return base / f"{src.stem}.deob.js", base / f"{src.stem}.report.json"


def _process_file(input_path: str, opts: CliOptions,
                  include_timings: bool = True) -> tuple[int, Optional[dict]]:
    """Deobfuscate one file and write its outputs. Returns (exit code, report)."""
    source = _read_input(input_path)
    if source is None:
        return EXIT_UNREADABLE, None
    result = deobfuscate(
        source,
        enable_dynamic=not opts.no_dynamic,
        enable_humanize=not opts.no_humanize,
        provider=_provider(opts),
        budget=_budget(opts),
    )
    report = build_report(input_path, source, result, include_timings)
    out_path, report_path = _output_paths(input_path, opts.out_dir)
    out_path.write_text(result.text + ("\n" if result.text else ""), encoding="utf-8")
    report_path.write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    code = EXIT_PARTIAL if report["diagnostics"] else EXIT_OK
    return code, report


def cmd_deobfuscate(args: argparse.Namespace) -> int:
    opts = _options_from_args(args)
    code, report = _process_file(args.input, opts)
    if report is not None and opts.format == "text":
        _print_text_summary(report)
    return code


def cmd_metrics(args: argparse.Namespace) -> int:
    opts = _options_from_args(args)
    source = _read_input(args.input)
    if source is None:
        return EXIT_UNREADABLE
    report = build_report(args.input, source, result=None)
    _, report_path = _output_paths(args.input, opts.out_dir)
    report_path.write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if opts.format == "text":
        _print_text_summary(report)
    else:
        print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_PARTIAL if report["diagnostics"] else EXIT_OK


def _batch_worker(payload: tuple[str, CliOptions]) -> tuple[str, int, Optional[dict], str]:
    path, opts = payload
    try:
        code, report = _process_file(path, opts, include_timings=False)
        return path, code, report, ""
    except Exception as exc:  # per-file isolation: one failure never aborts the run
        return path, EXIT_UNREADABLE, None, f"{type(exc).__name__}: {exc}"


def cmd_batch(args: argparse.Namespace) -> int:
    opts = _options_from_args(args)
    root = Path(args.directory)
    if not root.is_dir():
        print(f"error: not a directory: {root}", file=sys.stderr)
        return EXIT_UNREADABLE
    files = sorted(
        str(p) for p in root.iterdir() if p.suffix in (".js", ".html")
    )
    jobs = [(f, opts) for f in files]
    results: list[tuple[str, int, Optional[dict], str]] = []
    if opts.workers <= 1 or len(jobs) <= 1:
        results = [_batch_worker(job) for job in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=opts.workers) as pool:
            results = list(pool.map(_batch_worker, jobs))
    results.sort(key=lambda r: r[0])
    summary = _summarize_batch(results)
    summary_path = Path(opts.out_dir or args.directory) / "batch.summary.json"
    summary_path.parent.mkdir(parents=True, exist_ok=True)
    summary_path.write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK if summary["failures"] == 0 else EXIT_PARTIAL


def _summarize_batch(results: list[tuple[str, int, Optional[dict], str]]) -> dict:
    hlrs: list[float] = []
    hers: list[float] = []
    dtext: list[float] = []
    dast: list[float] = []
    fingerprints: dict[str, int] = {}
    errors: dict[str, str] = {}
    succeeded = 0
    for path, code, report, error in results:
        if report is None:
            errors[path] = error or "unreadable input"
            continue
        succeeded += 1
        metrics = report["metrics"]
        if "reduction" in metrics:
            hlrs.append(metrics["reduction"]["hlr"])
            hers.append(metrics["reduction"]["her"])
        if "entropy_delta" in metrics:
            dtext.append(metrics["entropy_delta"]["h_text"])
            dast.append(metrics["entropy_delta"]["h_ast"])
        fp = report["fingerprint"]
        fingerprints[fp] = fingerprints.get(fp, 0) + 1
    total = len(results)
    mean = lambda xs: (sum(xs) / len(xs)) if xs else 0.0
    return {
        "schema_version": SCHEMA_VERSION,
        "files": total,
        "succeeded": succeeded,
        "failures": total - succeeded,
        "errors": errors,
        "mean_hlr": mean(hlrs),
        "mean_her": mean(hers),
        "mean_entropy_delta_text": mean(dtext),
        "mean_entropy_delta_ast": mean(dast),
        "distinct_fingerprints": len(fingerprints),
        "duplicate_files": sum(n - 1 for n in fingerprints.values()),
    }


def _print_text_summary(report: dict) -> None:
    tags = ",".join(t["id"] for t in report["techniques"]) or "-"
    line = (
        f"{report['input']}: score={report['obfuscation_score']} techniques={tags}"
    )
    metrics = report["metrics"]
    if "reduction" in metrics:
        red = metrics["reduction"]
        delta = metrics["entropy_delta"]
        line += (
            f" hlr={red['hlr']:.3f} her={red['her']:.3f}"
            f" dH_text={delta['h_text']:+.3f} dH_ast={delta['h_ast']:+.3f}"
        )
    print(line)


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--model", default="none",
                     help="LLM model for renaming, or 'none' for the heuristic")
    sub.add_argument("--apiKey", default="", help="provider API key")
    sub.add_argument("--baseURL", default="", help="provider base URL")
    sub.add_argument("--no-dynamic", action="store_true",
                     help="disable sandboxed dynamic resolution")
    sub.add_argument("--no-humanize", action="store_true",
                     help="skip identifier renaming entirely")
    sub.add_argument("--budget-steps", type=int, default=None,
                     help="sandbox step budget per evaluation")
    sub.add_argument("--budget-ms", type=int, default=None,
                     help="sandbox wall-clock budget per evaluation (ms)")
    sub.add_argument("--format", choices=("json", "text"), default="json",
                     help="console summary format")
    sub.add_argument("--out-dir", default=None,
                     help="directory for outputs (default: beside the input)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jsdeob",
        description="JavaScript deobfuscation engine",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_deob = subs.add_parser("deobfuscate", help="deobfuscate one file")
    p_deob.add_argument("input", help="path to a .js or .html file")
    _add_common_flags(p_deob)
    p_deob.set_defaults(func=cmd_deobfuscate)

    p_metrics = subs.add_parser("metrics", help="score a file without transforming")
    p_metrics.add_argument("input", help="path to a .js or .html file")
    _add_common_flags(p_metrics)
    p_metrics.set_defaults(func=cmd_metrics)

    p_batch = subs.add_parser("batch", help="process a directory of files")
    p_batch.add_argument("directory", help="directory of .js/.html files")
    p_batch.add_argument("--workers", type=int, default=1,
                         help="number of worker processes")
    _add_common_flags(p_batch)
    p_batch.set_defaults(func=cmd_batch)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
