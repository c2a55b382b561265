"""JSON files: presentations, certificate bundles and reports.

Every file is canonical JSON (sorted keys, two-space indent, trailing
newline). A path of ``-`` reads standard input.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from .action import GammaSet, GeneratorOrbit, act_symbol_by, enumerate_S
from .deweak import (
    ApplyRelator,
    DerivationTrace,
    DeweakResult,
    FreeExpand,
    FreeReduce,
    Step,
    check_trace,
    y_word,
)
from .equivariant import EquivariantPresentation, expand_R, iota_map
from .errors import EquivariantError, MalformedStep, PresentationFileError
from .models import (
    CertificateBundle,
    CheckResult,
    GammaGeneratorSpec,
    GammaSpec,
    IotaSpec,
    OrbitActionSpec,
    OrbitSpec,
    PresentationFile,
    R0PrimeEntry,
    TraceCheckReport,
    TraceRecord,
    TraceStepModel,
    TraceVerdict,
    WitnessEntry,
)
from .permgroup import DEFAULT_ELEMENT_CAP, PermGroup, Permutation, evaluate_word, word_for_element
from .word import Letter, Word
from .word_syntax import (
    format_letter,
    format_letters,
    format_word,
    parse_letter,
    parse_letters,
    parse_word,
    resolve_symbol,
)

M = TypeVar("M", bound=BaseModel)

CERTIFICATE_FILENAME = "certificate.json"


# --- raw JSON ---------------------------------------------------------------


def canonical_json(payload: Any) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def read_text(path: str | Path) -> str:
    if str(path) == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise PresentationFileError(f"cannot read {path}: {exc.strerror}") from None


def write_text(path: str | Path, text: str) -> None:
    if str(path) == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")


def load_model(path: str | Path, model: Type[M]) -> M:
    text = read_text(path)
    try:
        return model.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise PresentationFileError(f"{path}: {where}: {first['msg']}") from None


def save_model(path: str | Path, model: BaseModel) -> None:
    write_text(path, canonical_json(model))


# --- presentations ----------------------------------------------------------


def to_equivariant(pf: PresentationFile, element_cap: int = DEFAULT_ELEMENT_CAP) -> EquivariantPresentation:
    gamma = PermGroup(
        pf.gamma.degree,
        tuple((gen.name, Permutation(tuple(gen.images))) for gen in pf.gamma.generators),
        element_cap,
    )
    orbits = tuple(
        GeneratorOrbit.build(
            orbit.rep_name,
            orbit.domain_size,
            {entry.generator: entry.images for entry in orbit.action},
            orbit.base_point,
        )
        for orbit in pf.orbits
    )
    gs = GammaSet(gamma, orbits)
    relators = []
    for index, text in enumerate(pf.relators):
        try:
            relators.append(parse_word(text, gs))
        except EquivariantError as exc:
            exc.with_context(f"in relator {index}: {text!r}")
            raise
    iota = tuple((resolve_symbol(gs, entry.symbol), Permutation(tuple(entry.images))) for entry in pf.iota)
    return EquivariantPresentation(gs, tuple(relators), pf.mode, iota, pf.name)


def from_equivariant(ep: EquivariantPresentation) -> PresentationFile:
    gs = ep.gs
    return PresentationFile(
        name=ep.name,
        gamma=GammaSpec(
            degree=gs.gamma.degree,
            generators=[GammaGeneratorSpec(name=name, images=list(perm.images)) for name, perm in gs.gamma.generators],
        ),
        orbits=[
            OrbitSpec(
                rep_name=orbit.rep_name,
                domain_size=orbit.domain_size,
                base_point=orbit.base_point,
                action=[OrbitActionSpec(generator=name, images=list(perm.images)) for name, perm in orbit.action_hom],
            )
            for orbit in gs.orbits
        ],
        relators=[format_word(w, gs) for w in ep.r0],
        mode=ep.mode,
        iota=[IotaSpec(symbol=gs.symbol_name(s), images=list(perm.images)) for s, perm in ep.iota],
    )


def load_presentation(path: str | Path, element_cap: int = DEFAULT_ELEMENT_CAP) -> EquivariantPresentation:
    ep = to_equivariant(load_model(path, PresentationFile), element_cap)
    logging.info("Loaded presentation '%s' (%s mode) from %s", ep.name, ep.mode, path)
    return ep


def save_presentation(path: str | Path, ep: EquivariantPresentation) -> None:
    save_model(path, from_equivariant(ep))


# --- certificates -----------------------------------------------------------


def _gamma_word(gamma: PermGroup, element: Permutation) -> list[tuple[str, int]]:
    return [tuple(letter) for letter in word_for_element(gamma, element)]


def _step_model(step: Step, gs: GammaSet) -> TraceStepModel:
    if isinstance(step, FreeReduce):
        return TraceStepModel(kind="free_reduce", position=step.position, letter=format_letter(step.letter, gs))
    if isinstance(step, FreeExpand):
        return TraceStepModel(kind="free_expand", position=step.position, letter=format_letter(step.letter, gs))
    return TraceStepModel(
        kind="apply_relator",
        position=step.position,
        gamma=_gamma_word(gs.gamma, step.gamma),
        relator=step.relator,
        split=step.split,
        direction=step.direction,
    )


def _step_from_model(model: TraceStepModel, gs: GammaSet) -> Step:
    if model.kind == "free_reduce":
        return FreeReduce(model.position, parse_letter(model.letter, gs))
    if model.kind == "free_expand":
        return FreeExpand(model.position, parse_letter(model.letter, gs))
    try:
        gamma = evaluate_word(gs.gamma, model.gamma)
    except KeyError as exc:
        raise MalformedStep(f"unknown Γ-generator {exc.args[0]!r} in step gamma") from None
    return ApplyRelator(gamma, model.relator, model.position, model.split, model.direction)


def trace_record(s: Any, t: Any, trace: DerivationTrace, gs: GammaSet) -> TraceRecord:
    return TraceRecord(
        s=gs.symbol_name(s),
        t=gs.symbol_name(t),
        start=format_letters(trace.start, gs),
        end=format_letters(trace.end, gs),
        steps=[_step_model(step, gs) for step in trace.steps],
    )


def trace_from_record(record: TraceRecord, gs: GammaSet) -> DerivationTrace:
    return DerivationTrace(
        parse_letters(record.start, gs),
        tuple(_step_from_model(step, gs) for step in record.steps),
        parse_letters(record.end, gs),
    )


def build_certificate(result: DeweakResult) -> CertificateBundle:
    ctx = result.context
    gs = ctx.gs
    gamma = gs.gamma
    witnesses = [
        WitnessEntry(y=_gamma_word(gamma, ctx.input.Y[yi]), x=gs.symbol_name(x), word=format_word(w, gs))
        for (yi, x), w in ctx.witnesses.items()
    ]
    r0prime = []
    for slot in ctx.slots:
        if slot.kind == "conjugation":
            source = {"s0": gs.symbol_name(slot.s0), "x": gs.symbol_name(slot.x)}
        else:
            source = {"y": slot.y_index, "x": gs.symbol_name(slot.x)}
        r0prime.append(
            R0PrimeEntry(
                index=slot.index,
                kind=slot.kind,
                word=format_word(slot.word, gs),
                trivial=slot.trivial,
                source=source,
            )
        )
    source_ep = ctx.input.ep
    return CertificateBundle(
        presentation=result.presentation.name,
        X=[gs.symbol_name(x) for x in ctx.input.X],
        Y=[list(y_word(gamma, y)) for y in ctx.input.Y],
        witnesses=witnesses,
        r0prime=r0prime,
        iota=[IotaSpec(symbol=gs.symbol_name(s), images=list(perm.images)) for s, perm in source_ep.iota],
        traces=[trace_record(s, t, trace, gs) for s, t, trace in result.traces],
    )


def save_certificate(directory: str | Path, bundle: CertificateBundle) -> Path:
    path = Path(directory) / CERTIFICATE_FILENAME
    save_model(path, bundle)
    return path


def load_certificate(path: str | Path) -> CertificateBundle:
    path = Path(path)
    if path.is_dir():
        path = path / CERTIFICATE_FILENAME
    return load_model(path, CertificateBundle)


def _check(name: str, passed: bool, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=passed, detail=detail)


def check_certificate(bundle: CertificateBundle, ep: EquivariantPresentation) -> TraceCheckReport:
    """Replay every trace of ``bundle`` against the finite presentation ``ep``."""
    gs = ep.gs
    relators: list[Optional[Word]] = [None if entry.trivial else parse_word(entry.word, gs) for entry in bundle.r0prime]
    weak = EquivariantPresentation(
        gs,
        (),
        "weak",
        tuple((resolve_symbol(gs, entry.symbol), Permutation(tuple(entry.images))) for entry in bundle.iota),
    )
    iota = iota_map(weak)
    verdicts: list[TraceVerdict] = []
    endpoints_ok = True
    pairs = set()
    for record in bundle.traces:
        detail = ""
        try:
            trace = trace_from_record(record, gs)
            s, t = resolve_symbol(gs, record.s), resolve_symbol(gs, record.t)
            valid = check_trace(trace, relators, gs)
            if not valid:
                detail = "replay does not reach the recorded end"
        except EquivariantError as exc:
            valid, detail = False, str(exc)
            trace = None
        if trace is not None:
            pairs.add((s, t))
            expected_start = (Letter(s, 1), Letter(t, 1), Letter(s, -1))
            expected_end = (Letter(act_symbol_by(gs, iota[s], t), 1),)
            if trace.start != expected_start or trace.end != expected_end:
                endpoints_ok = False
                detail = detail or "trace does not go from s t s^-1 to the conjugate symbol"
        verdicts.append(
            TraceVerdict(
                s=record.s,
                t=record.t,
                valid=valid,
                relator_applications=sum(step.kind == "apply_relator" for step in record.steps),
                detail=detail,
            )
        )
    symbols = enumerate_S(gs)
    expected_pairs = {(s, t) for s in symbols for t in symbols}
    expanded = set(expand_R(ep).base.relators)
    missing = [entry.index for entry, w in zip(bundle.r0prime, relators) if w is not None and w not in expanded]
    valid_count = sum(v.valid for v in verdicts)
    checks = [
        _check("traces_replay", valid_count == len(verdicts), f"{valid_count}/{len(verdicts)} traces replay"),
        _check("trace_endpoints", endpoints_ok),
        _check("all_pairs_covered", pairs == expected_pairs, f"{len(pairs)} of {len(expected_pairs)} pairs"),
        _check("relators_in_presentation", not missing, f"missing relator slots {missing}" if missing else ""),
    ]
    return TraceCheckReport(
        presentation=bundle.presentation,
        num_traces=len(verdicts),
        valid_traces=valid_count,
        verdicts=verdicts,
        checks=checks,
    )
