"""Command line entry point: ``python -m eqpres <command> ...``.

Every command except ``example`` prints a JSON response envelope on
stdout; logs go to stderr. Exit codes: 0 success, 1 a check failed,
2 usage or input error, 3 a size cap was hit.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional

from pydantic import BaseModel

from .action import base_symbols, enumerate_S, stabilizer_of_symbol
from .catalog import BUILDERS, builtin
from .deweak import deweakify
from .equivariant import EquivariantPresentation, expand_R, realize, validate
from .errors import EquivariantError
from .files import (
    build_certificate,
    canonical_json,
    check_certificate,
    load_certificate,
    load_presentation,
    save_certificate,
    save_presentation,
)
from .homology import abelianization, homology_report
from .models import CommandResponse, DeweakSummary, ErrorInfo, HomologyLimits
from .permgroup import DEFAULT_ELEMENT_CAP, order, subgroup_order
from .presentation import DEFAULT_MAX_COSETS

EXIT_OK = 0
EXIT_CHECK_FAILED = 1


def build_response(
    command: str,
    status: str,
    data: Any = None,
    error: Optional[dict] = None,
    metadata: Optional[dict] = None,
) -> CommandResponse:
    return CommandResponse(
        status=status,
        command=command,
        data=data,
        metadata=metadata or {},
        error=ErrorInfo(**error) if error else None,
    )


def emit(response: BaseModel) -> None:
    sys.stdout.write(canonical_json(response))


def _metadata(ep: EquivariantPresentation) -> dict:
    return {"presentation": ep.name, "mode": ep.mode}


def _load(args: argparse.Namespace) -> EquivariantPresentation:
    return load_presentation(args.file, element_cap=args.element_cap)


def cmd_verify(args: argparse.Namespace) -> int:
    ep = _load(args)
    report = validate(ep, max_cosets=args.max_cosets)
    passed = report.passed
    metadata = _metadata(ep)
    if args.expect_order is not None:
        matches = report.realized_order == args.expect_order
        metadata["expected_order"] = args.expect_order
        metadata["order_matches"] = matches
        passed = passed and matches
    emit(build_response("verify", "success" if passed else "failure", report, metadata=metadata))
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_deweak(args: argparse.Namespace) -> int:
    ep = _load(args)
    result = deweakify(ep, max_cosets=args.max_cosets)
    save_presentation(args.output, result.presentation)
    metadata = _metadata(ep)
    metadata["output"] = str(args.output)
    if args.certs:
        path = save_certificate(args.certs, build_certificate(result))
        metadata["certificate"] = str(path)
    ctx = result.context
    realized = realize(result.presentation, args.max_cosets)
    summary = DeweakSummary(
        source=ep.name,
        output=result.presentation.name,
        X=[ep.gs.symbol_name(x) for x in ctx.input.X],
        Y_size=len(ctx.input.Y),
        num_r0prime=len(ctx.slots),
        num_trivial_r0prime=sum(slot.trivial for slot in ctx.slots),
        num_traces=len(result.traces),
        valid_traces=sum(result.valid),
        max_relator_applications=max((t.relator_applications() for _, _, t in result.traces), default=0),
        realized_order=realized.order,
        source_order=ctx.realization.order,
    )
    if not summary.order_matches:
        logging.warning("deweak output %s realizes order %d, source has %d", summary.output, realized.order, ctx.realization.order)
    passed = result.all_valid and summary.order_matches
    emit(build_response("deweak", "success" if passed else "failure", summary, metadata=metadata))
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_trace_check(args: argparse.Namespace) -> int:
    ep = _load(args)
    report = check_certificate(load_certificate(args.certs), ep)
    emit(build_response("trace-check", "success" if report.passed else "failure", report, metadata=_metadata(ep)))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_h2(args: argparse.Namespace) -> int:
    ep = _load(args)
    report = homology_report(
        ep,
        limits=HomologyLimits(),
        max_cosets=args.max_cosets,
        trivial_gamma=args.trivial_gamma,
        oracle=args.oracle,
    )
    passed = all(check.passed for check in report.five_term_diagnostics)
    metadata = _metadata(ep)
    metadata["trivial_gamma"] = args.trivial_gamma
    emit(build_response("h2", "success" if passed else "failure", report, metadata=metadata))
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_abelianize(args: argparse.Namespace) -> int:
    ep = _load(args)
    emit(build_response("abelianize", "success", abelianization(expand_R(ep).base), metadata=_metadata(ep)))
    return EXIT_OK


def cmd_orbits(args: argparse.Namespace) -> int:
    ep = _load(args)
    gs = ep.gs
    orbits = []
    for s0 in base_symbols(gs):
        orbit = gs.orbits[s0.orbit_index]
        orbits.append(
            {
                "rep_name": orbit.rep_name,
                "base_point": orbit.base_point,
                "domain_size": orbit.domain_size,
                "stabilizer_order": subgroup_order(gs.gamma, stabilizer_of_symbol(gs, s0)),
                "symbols": [gs.symbol_name(s) for s in enumerate_S(gs) if s.orbit_index == s0.orbit_index],
            }
        )
    data = {"gamma_order": order(gs.gamma), "num_symbols": len(enumerate_S(gs)), "orbits": orbits}
    emit(build_response("orbits", "success", data, metadata=_metadata(ep)))
    return EXIT_OK


def cmd_example(args: argparse.Namespace) -> int:
    sys.stdout.write(canonical_json(builtin(args.name, args.n)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqpres", description="Γ-equivariant group presentations")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable[[argparse.Namespace], int], help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        if name != "example":
            p.add_argument("file", help="presentation JSON, or - for stdin")
            p.add_argument("--max-cosets", type=int, default=DEFAULT_MAX_COSETS)
            p.add_argument("--element-cap", type=int, default=DEFAULT_ELEMENT_CAP)
        return p

    verify = add("verify", cmd_verify, "validate a presentation and realize its group")
    verify.add_argument("--expect-order", type=int, default=None)

    deweak = add("deweak", cmd_deweak, "turn a weak presentation into a finite one")
    deweak.add_argument("-o", "--output", required=True, type=Path)
    deweak.add_argument("--certs", type=Path, default=None, help="directory for certificate.json")

    trace_check = add("trace-check", cmd_trace_check, "replay the derivation traces of a certificate")
    trace_check.add_argument("certs", type=Path, help="certificate directory or file")

    h2 = add("h2", cmd_h2, "Schur multiplier, Γ-action and five-term diagnostics")
    h2.add_argument("--oracle", action="store_true", help="cross-check with the bar resolution")
    h2.add_argument("--trivial-gamma", action="store_true", help="generation rank for the trivial Γ")

    add("abelianize", cmd_abelianize, "invariant factors of H₁")
    add("orbits", cmd_orbits, "Γ-orbits of the generating set")

    example = add("example", cmd_example, "print a built-in presentation")
    example.add_argument("name", choices=sorted(BUILDERS))
    example.add_argument("n", type=int)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except EquivariantError as exc:
        logging.warning("%s failed: %s", args.command, exc)
        emit(build_response(args.command, "error", error=exc.to_payload()))
        return exc.exit_code
