import logging
import sys

import click

from protodiag.commands import evaluate, experiment, export_features, generate, permute_labels, train
from protodiag.config import PROJECT_NAME
from protodiag.utils.banner import display_banner
from protodiag.utils.logging import disable_all_logging, get_logger, set_global_logging_level

logger = get_logger(__name__)


@click.group()
@click.option(
    "--verbose",
    "-v",
    is_flag=True,
    default=False,
    help="Enable verbose logging",
)
@click.option(
    "--quiet",
    "-q",
    is_flag=True,
    default=False,
    help="Disable all logs",
)
@click.pass_context
def cli(ctx: click.Context, verbose: bool, quiet: bool) -> None:
    """Few-shot domain adaptation for vibration-based bearing fault diagnosis"""
    # Store global options in context
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["quiet"] = quiet

    # Finish setting up logging with args
    if verbose:
        set_global_logging_level(logging.DEBUG)
        logger.debug("Verbose mode enabled")

    if quiet:
        disable_all_logging()

    # Display banner on stderr
    if not quiet:
        display_banner()


# Register subcommands
cli.add_command(generate)
cli.add_command(train)
cli.add_command(evaluate)
cli.add_command(export_features)
cli.add_command(permute_labels)
cli.add_command(experiment)


def run_cli(argv: list[str] | None = None) -> int:
    """Runs the CLI and returns its exit code instead of exiting the interpreter."""
    try:
        cli.main(args=argv, prog_name=PROJECT_NAME, standalone_mode=True)
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else 1
    return 0


if __name__ == "__main__":
    sys.exit(run_cli())
