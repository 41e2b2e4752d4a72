"""Command line driver.

Exit codes are a stable contract:

    0  success
    1  usage errors, unreadable/unwritable files, bad arguments
    2  malformed generation or unparseable input
    3  provider failure (network, auth, exhausted script)
    4  content rejected as redundant
    5  format validation found violations

Standard output carries only data (outlines, attached nodes, violations);
diagnostics go to standard error.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from . import errors as err
from .enrichment import (
    EnrichmentKind,
    exemplify_node,
    explain_node,
    explore_node,
    generate_map,
)
from .llm import (
    DEFAULT_CREDENTIAL_ENV,
    CompletionParams,
    OpenAIChatClient,
    Provider,
    ProviderError,
    load_script,
)
from .outline import fragment_to_tree, parse_outline, validate_initial_map
from .prompts import load_config
from .store import export_outline, load, save

PROVIDER_ENV = "NODEMIND_PROVIDER"
SCRIPT_ENV = "NODEMIND_SCRIPT"
BASE_URL_ENV = "NODEMIND_BASE_URL"


def _provider_options(fn):
    fn = click.option(
        "--provider",
        "provider_kind",
        type=click.Choice(["live", "scripted"]),
        default=None,
        help="Provider backend; defaults to $NODEMIND_PROVIDER or 'live'.",
    )(fn)
    fn = click.option(
        "--script",
        "script_path",
        type=click.Path(path_type=Path),
        default=None,
        help="Fixture file of responses separated by '---' lines.",
    )(fn)
    fn = click.option("--base-url", default=None, help="Chat endpoint base URL.")(fn)
    fn = click.option(
        "--credential-env",
        default=DEFAULT_CREDENTIAL_ENV,
        show_default=True,
        help="Environment variable holding the API credential.",
    )(fn)
    fn = click.option("--model", default="gpt-4o", show_default=True)(fn)
    fn = click.option(
        "--config",
        "config_path",
        type=click.Path(path_type=Path),
        default=None,
        help="Prompt/routing config file (defaults to packaged config).",
    )(fn)
    return fn


def _make_provider(
    provider_kind: str | None,
    script_path: Path | None,
    base_url: str | None,
    credential_env: str,
) -> Provider:
    kind = provider_kind or os.environ.get(PROVIDER_ENV) or "live"
    if kind == "scripted":
        script = script_path or os.environ.get(SCRIPT_ENV)
        if not script:
            raise click.UsageError("scripted provider needs --script FILE")
        try:
            return load_script(script)
        except ValueError as exc:  # script file holds no responses
            raise err.ScriptExhausted(str(exc)) from exc
    return OpenAIChatClient(
        base_url=base_url
        or os.environ.get(BASE_URL_ENV)
        or "https://api.openai.com/v1",
        credential_env=credential_env,
    )


@click.group()
def cli():
    """Explore topics as editable, LLM-deepened mind maps."""


@cli.command()
@click.argument("query")
@click.option(
    "--out",
    "out_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Write the map document here.",
)
@click.option(
    "--figure",
    "figure_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Also render the map to this image file.",
)
@_provider_options
def generate(query, out_path, figure_path, provider_kind, script_path, base_url,
             credential_env, model, config_path):
    """Generate a map for QUERY and print its outline."""
    provider = _make_provider(provider_kind, script_path, base_url, credential_env)
    config = load_config(config_path)
    m = generate_map(query, provider, config, params=CompletionParams(model=model))
    for warning in m.warnings:
        click.echo(f"warning: {warning}", err=True)
    if out_path:
        save(m, out_path)
        click.echo(f"saved {out_path}", err=True)
    if figure_path:
        from .render import render_map_figure

        render_map_figure(m, figure_path)
        click.echo(f"rendered {figure_path}", err=True)
    click.echo(export_outline(m))
    return 0


@cli.command()
@click.argument("mapfile", type=click.Path(path_type=Path))
@click.argument("node_id")
@click.option(
    "--kind",
    type=click.Choice([k.value for k in EnrichmentKind]),
    required=True,
)
@click.option("--question", default=None, help="Question for --kind explore.")
@_provider_options
def enrich(mapfile, node_id, kind, question, provider_kind, script_path, base_url,
           credential_env, model, config_path):
    """Run one AI action on a node of a saved map and update the file."""
    provider = _make_provider(provider_kind, script_path, base_url, credential_env)
    config = load_config(config_path)
    params = CompletionParams(model=model)
    m = load(mapfile)
    if kind == EnrichmentKind.EXPLORE.value:
        if not question or not question.strip():
            raise click.UsageError("--kind explore requires --question")
        result = explore_node(m, node_id, question, provider, config, params=params)
    elif kind == EnrichmentKind.EXAMPLES.value:
        result = exemplify_node(m, node_id, provider, config, params=params)
    else:
        result = explain_node(m, node_id, provider, config, params=params)
    save(m, mapfile)
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    for nid in result.attached_ids:
        node = m.node(nid)
        click.echo(f"{node.id}\t{node.depth}\t{node.text}")
    return 0


@cli.command()
@click.argument("outline_file", type=click.Path(path_type=Path))
def validate(outline_file):
    """Check an outline file against the generation format rules."""
    try:
        text = Path(outline_file).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    tree = fragment_to_tree(parse_outline(text))
    violations = validate_initial_map(tree)
    for violation in violations:
        click.echo(str(violation))
    return 5 if violations else 0


@cli.command()
@click.argument("mapfile", type=click.Path(path_type=Path))
@click.option(
    "--out",
    "out_path",
    type=click.Path(path_type=Path),
    required=True,
    help="Image file to write (extension selects the format).",
)
@click.option("--dpi", default=150, show_default=True)
@click.option(
    "--all",
    "include_hidden",
    is_flag=True,
    help="Draw descendants of collapsed nodes too.",
)
def render(mapfile, out_path, dpi, include_hidden):
    """Render a saved map to a figure file."""
    from .render import render_map_figure

    m = load(mapfile)
    render_map_figure(m, out_path, dpi=dpi, include_hidden=include_hidden)
    click.echo(f"rendered {out_path}", err=True)
    return 0


@cli.command()
@click.option("--addr", default="127.0.0.1:8000", show_default=True)
@click.option(
    "--store",
    "store_dir",
    type=click.Path(path_type=Path),
    default=Path("nodemind_maps"),
    show_default=True,
    help="Directory for persisted map documents.",
)
@_provider_options
def serve(addr, store_dir, provider_kind, script_path, base_url, credential_env,
          model, config_path):
    """Run the HTTP service until interrupted."""
    import uvicorn

    from .api import create_app

    provider = _make_provider(provider_kind, script_path, base_url, credential_env)
    config = load_config(config_path)
    host, _, port_text = addr.partition(":")
    try:
        port = int(port_text or "8000")
    except ValueError:
        raise click.UsageError(f"bad --addr {addr!r}")
    app = create_app(
        provider,
        config,
        store_dir=store_dir,
        params=CompletionParams(model=model),
    )
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="warning")
    except SystemExit:  # uvicorn raises on startup failure (e.g. bind error)
        return 1
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and map engine errors onto the exit-code contract."""
    try:
        result = cli.main(args=argv, prog_name="nodemind", standalone_mode=False)
        return result if isinstance(result, int) else 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except err.GenerationMalformed as exc:
        click.echo(f"error: malformed generation: {exc}", err=True)
        if exc.raw:
            click.echo(exc.raw, err=True)
        return 2
    except (
        err.EmptyInput,
        err.NoHeadings,
        err.MultipleRoots,
        err.OrphanEntry,
    ) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except (ProviderError, err.ScriptExhausted) as exc:
        click.echo(f"error: provider failure: {exc}", err=True)
        return 3
    except (err.RedundantContent, err.NoExamples) as exc:
        click.echo(f"error: {exc}", err=True)
        return 4
    except err.EngineError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
