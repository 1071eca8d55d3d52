"""Console output shared by agents and core modules."""

from rich.console import Console

# Log lines go to stderr so --json output on stdout stays machine readable
err_console = Console(stderr=True, highlight=False)

_LEVEL_STYLES = {
    "DEBUG": "dim",
    "INFO": "blue",
    "WARNING": "yellow",
    "ERROR": "bold red",
}


def log(name: str, message: str, level: str = "INFO") -> None:
    """Print a ``[LEVEL] name: message`` line."""
    style = _LEVEL_STYLES.get(level, "")
    err_console.print(f"[{level}] {name}: {message}", style=style, markup=False)
