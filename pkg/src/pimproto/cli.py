"""Command-line interface.

Headless access to everything the engine can do: validation, conversion,
DOT export, analysis, test generation, trace simulation and serving the
HTTP API.  Exit codes follow CI conventions: 0 clean, 1 domain errors or
findings of error severity (unreachable states, failed gate checks), 2
usage errors.  Machine-readable output (``--format json``) is canonical
JSON, byte-identical to the HTTP API payload for the same input.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .analysis import analyze_project, generate_tests, must_pass_through
from .convert import convert
from .errors import DomainError
from .formats import canonical_json, export_dot, export_pim_text, load_project
from .serialize import (
    analysis_to_dict,
    conversion_report_to_dict,
    test_suite_to_dict,
    trace_event_to_dict,
)
from .simulate import start_session

FORMATS = click.Choice(["text", "json"])


def _fail(err: DomainError) -> None:
    click.echo(f"error: {err.code}: {err.message}", err=True)
    sys.exit(1)


def _read_project(path: str):
    try:
        return load_project(Path(path).read_bytes())
    except DomainError as err:
        _fail(err)


def _emit(data: bytes, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(output).write_bytes(data)


@click.group()
@click.version_option(package_name="pimproto", prog_name="pimp")
def main():
    """Prototype modelling toolkit: build mock-ups, derive the state machine,
    analyse it, generate tests, play it back."""


@main.command()
@click.argument("project_file", type=click.Path(exists=True, dir_okay=False))
def validate(project_file):
    """Check a project file and report prototype warnings."""
    project = _read_project(project_file)
    if not project.screens:
        click.echo("warning: EmptyProject: project has no screens")
        click.echo(f"ok: {project.name}: 0 screens")
        return
    try:
        report = convert(project)
    except DomainError as err:
        _fail(err)
    for w in report.warnings:
        click.echo(f"warning: {w.code}: {w.message} ({w.path})")
    click.echo(f"ok: {project.name}: {len(project.screens)} screens, "
               f"{len(report.pim.transitions)} transitions")


@main.command("convert")
@click.argument("project_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default=None, help="Output path (default stdout).")
@click.option("--format", "fmt", type=FORMATS, default="text",
              help="text = canonical .pim file, json = full conversion report.")
def convert_cmd(project_file, output, fmt):
    """Derive the PIM from a project and write it out."""
    project = _read_project(project_file)
    try:
        report = convert(project)
        if fmt == "json":
            _emit(canonical_json(conversion_report_to_dict(report)).encode(), output)
        else:
            for w in report.warnings:
                click.echo(f"warning: {w.code}: {w.message} ({w.path})", err=True)
            _emit(export_pim_text(report.pim), output)
    except DomainError as err:
        _fail(err)


@main.command("export-dot")
@click.argument("project_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default=None, help="Output path (default stdout).")
def export_dot_cmd(project_file, output):
    """Derive the PIM and write a DOT state-machine diagram."""
    project = _read_project(project_file)
    try:
        _emit(export_dot(convert(project).pim), output)
    except DomainError as err:
        _fail(err)


@main.command()
@click.argument("project_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--gate", default=None, help="Gate state for a must-pass-through check.")
@click.option("--target", default=None, help="Target state for the gate check.")
@click.option("--format", "fmt", type=FORMATS, default="text")
def analyze(project_file, gate, target, fmt):
    """Reachability analysis; exits 1 when states are unreachable or a
    requested gate property does not hold."""
    if (gate is None) != (target is None):
        raise click.UsageError("--gate and --target must be given together")
    project = _read_project(project_file)
    try:
        report = analyze_project(project)
        data = analysis_to_dict(report)
        failed = bool(report.unreachable)
        if gate is not None:
            check = must_pass_through(convert(project).pim, gate, target)
            data["gate_check"] = {"gate": gate, "target": target,
                                  "holds": check.holds, "vacuous": check.vacuous}
            failed = failed or not check.holds
    except DomainError as err:
        _fail(err)
    if fmt == "json":
        _emit(canonical_json(data).encode(), None)
    else:
        click.echo(f"reachable: {', '.join(data['reachable']) or '-'}")
        click.echo(f"unreachable: {', '.join(data['unreachable']) or '-'}")
        click.echo(f"dead ends: {', '.join(data['dead_ends']) or '-'}")
        for sid, hid in report.dangling_hotspots:
            click.echo(f"dangling hotspot: {hid} on screen {sid}")
        if gate is not None:
            verdict = "holds" if data["gate_check"]["holds"] else "does not hold"
            extra = " (vacuously: target unreachable)" if data["gate_check"]["vacuous"] else ""
            click.echo(f"every path to {target} passes {gate}: {verdict}{extra}")
    sys.exit(1 if failed else 0)


@main.command("gen-tests")
@click.argument("project_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default=None, help="Output path (default stdout).")
@click.option("--format", "fmt", type=FORMATS, default="text")
def gen_tests(project_file, output, fmt):
    """Generate abstract test cases covering every reachable transition."""
    project = _read_project(project_file)
    try:
        suite = generate_tests(convert(project).pim)
    except DomainError as err:
        _fail(err)
    if fmt == "json":
        _emit(canonical_json(test_suite_to_dict(suite)).encode(), output)
        return
    lines = []
    for case in suite.tests:
        trail = "".join(f" -{b}-> {nxt}" for _, b, nxt in case.steps)
        start = case.steps[0][0] if case.steps else "-"
        lines.append(f"{case.id}: {start}{trail}")
    for source, behaviour in sorted(suite.uncovered_transitions):
        lines.append(f"uncovered: {source} {behaviour}")
    _emit(("\n".join(lines) + "\n").encode(), output)


@main.command()
@click.argument("project_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--trace", required=True,
              help="Comma-separated I-behaviour names to replay from the initial state.")
@click.option("--format", "fmt", type=FORMATS, default="text")
def simulate(project_file, trace, fmt):
    """Replay a behaviour trace and print the final state."""
    project = _read_project(project_file)
    try:
        session = start_session(project)
        events = [session.step(name.strip())
                  for name in trace.split(",") if name.strip()]
    except DomainError as err:
        _fail(err)
    if fmt == "json":
        _emit(canonical_json({
            "events": [trace_event_to_dict(e) for e in events],
            "final": session.current,
        }).encode(), None)
        return
    for e in events:
        click.echo(f"{e.source} -{e.behaviour}-> {e.result}")
    click.echo(f"final: {session.current}")


@main.command()
@click.option("--port", type=int, default=8000, envvar="PIMP_PORT",
              show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", default="./pimp-data", envvar="PIMP_DATA_DIR",
              show_default=True)
@click.option("--max-image-bytes", type=int, default=8 * 1024 * 1024,
              show_default=True)
@click.option("--session-ttl", type=float, default=1800.0, show_default=True,
              help="Idle seconds before a simulation session expires.")
def serve(port, host, data_dir, max_image_bytes, session_ttl):
    """Run the HTTP API."""
    from .service import ServiceConfig, serve as run_service

    config = ServiceConfig(data_dir=Path(data_dir), port=port, host=host,
                           max_image_bytes=max_image_bytes,
                           session_ttl=session_ttl)
    try:
        run_service(config)
    except DomainError as err:
        _fail(err)


if __name__ == "__main__":
    main()
