"""End-to-end deobfuscation driver shared by the CLI and tests."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .ast_nodes import Node
from .humanize import HumanizeResult, ProviderConfig, humanize
from .interp.interpreter import EvalBudget
from .passes import PassConfig
from .pipeline import PipelineTrace, run_pipeline
from .preprocess import preprocess
from .printer import FormatOptions, print_source
from .scopes import build_scopes


@dataclass
class DeobResult:
    text: str
    programs: list[Node] = field(default_factory=list)
    traces: list[PipelineTrace] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    humanize_results: list[HumanizeResult] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    bundled: bool = False


def deobfuscate(
    text: str,
    enable_dynamic: bool = True,
    enable_humanize: bool = True,
    provider: Optional[ProviderConfig] = None,
    budget: Optional[EvalBudget] = None,
    fmt: Optional[FormatOptions] = None,
    pass_config: Optional[PassConfig] = None,
) -> DeobResult:
    fmt = fmt or FormatOptions()
    result = DeobResult(text="")
    t0 = time.monotonic()
    pre = preprocess(text)
    result.timings["preprocess"] = time.monotonic() - t0
    pieces: list[str] = []
    t1 = time.monotonic()
    for item in pre:
        result.bundled = result.bundled or item.bundled
        for note in item.source.diagnostics:
            result.diagnostics.append(f"{note.stage}: {note.message}")
        program, trace = run_pipeline(
            item.program,
            config=pass_config,
            enable_dynamic=enable_dynamic,
            budget=budget,
        )
        result.programs.append(program)
        result.traces.append(trace)
    result.timings["pipeline"] = time.monotonic() - t1
    t2 = time.monotonic()
    for program in result.programs:
        if enable_humanize:
            hres = humanize(program, build_scopes(program), provider, fmt)
            result.humanize_results.append(hres)
            pieces.append(hres.text)
        else:
            pieces.append(print_source(program, fmt))
    result.timings["humanize"] = time.monotonic() - t2
    result.text = "\n".join(pieces)
    return result
