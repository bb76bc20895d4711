"""
Terminal rendering for accum-lab.

Everything here writes to stderr: stdout is reserved for the JSON report, so
human summaries never mix with machine output.
"""
import logging

from rich.align import Align
from rich.box import DOUBLE, ROUNDED
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

console = Console(stderr=True)


def setup_logging(level: str = "WARNING") -> None:
    """Route library logging through rich on the stderr console."""
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True, show_path=False)],
        force=True,
    )


def print_banner(title: str = "accum-lab", subtitle: str = "accumulation points of step sequences", description: str = ""):
    """Print the run banner

    Args:
        title (str): Main title
        subtitle (str): One-line description of the subcommand
        description (str): Extra line, e.g. the seed
    """
    content = f"[bold magenta]{title}[/bold magenta]\n[cyan]{subtitle}[/cyan]"
    if description:
        content += f"\n[green]{description}[/green]"
    console.print(Panel(Align.center(content), box=DOUBLE, style="bold purple", padding=(0, 2)))


def print_step(step_name: str, emoji: str = "🔄"):
    console.print(Panel(f"{emoji} [bold blue]{step_name.upper()}[/bold blue]", box=ROUNDED, style="bold blue"))


def print_success(message: str):
    console.print(f"✅ [bold green]{message}[/bold green]")


def print_warning(message: str):
    console.print(f"⚠️  [bold yellow]{message}[/bold yellow]")


def print_error(message: str):
    console.print(f"❌ [bold red]{message}[/bold red]")


def print_info(message: str):
    console.print(f"ℹ️  [bold cyan]{message}[/bold cyan]")


def create_table(title: str, headers: list[str], rows: list[list], style: str = "blue") -> Table:
    """Create a rich table

    Args:
        title (str): Table title
        headers (list): Column headers
        rows (list): Row data, each row a list of cells
        style (str): Column colour
    """
    table = Table(title=f"[bold {style}]{title}[/bold {style}]", box=ROUNDED)
    for header in headers:
        table.add_column(header, style=style, justify="left")
    for row in rows:
        table.add_row(*[str(cell) for cell in row])
    return table


def print_table(title: str, headers: list[str], rows: list[list], style: str = "blue"):
    console.print(create_table(title, headers, rows, style))


def print_status_panel(title: str, status_items: dict, style: str = "green"):
    """Print key-value pairs in a panel

    Args:
        title (str): Panel title
        status_items (dict): Items to show, in order
        style (str): Panel colour
    """
    content = "\n".join(f"[bold]{key}:[/bold] {value}" for key, value in status_items.items())
    console.print(Panel(content, title=f"[bold {style}]{title}[/bold {style}]", box=ROUNDED, style=style))


__all__ = [
    "console",
    "setup_logging",
    "print_banner",
    "print_step",
    "print_success",
    "print_warning",
    "print_error",
    "print_info",
    "create_table",
    "print_table",
    "print_status_panel",
]
