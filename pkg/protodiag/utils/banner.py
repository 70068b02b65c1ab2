import click
import pyfiglet

from protodiag.config import PROJECT_NAME


def display_banner(font: str = "slant") -> None:
    """
    Prints the ASCII banner on stderr so stdout only carries run summaries.
    """
    banner = pyfiglet.figlet_format(PROJECT_NAME.upper(), font=font)
    click.echo(banner, err=True)
