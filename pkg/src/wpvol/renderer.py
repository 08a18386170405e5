"""Rich terminal rendering for curves, correlators, volumes, tables and check reports."""

from __future__ import annotations

from rich.console import Console
from rich.markup import escape
from rich.table import Table
from rich.text import Text

from wpvol.checks import CheckReport
from wpvol.config import KEYS, Settings
from wpvol.curves import SpectralCurve
from wpvol.models import Correlator, VolumePolynomial

console = Console()
err_console = Console(stderr=True)


def render_error(message: str) -> None:
    err_console.print(f"[red]Error: {escape(message)}[/red]")


def render_saved(path) -> None:
    console.print(f"Saved to {path}", style="dim")


def render_curve(curve: SpectralCurve, max_terms: int = 6) -> None:
    title = Text()
    title.append(curve.curve_id, style="bold cyan")
    title.append(f"  edge={curve.edge_class}  order={curve.order}  density_sign={curve.density_sign:+d}", style="dim")
    console.print(title)
    table = Table(show_header=True, header_style="bold")
    table.add_column("z^k", justify="right")
    table.add_column("coefficient")
    for k, c in list(curve.y_series.items())[:max_terms]:
        table.add_row(str(k), c.pretty())
    console.print(table)


def render_correlator(w: Correlator) -> None:
    console.print(Text(f"ω_({w.key.g},{w.key.n}) on {w.key.curve}", style="bold cyan"))
    if not w.terms:
        console.print("  0", style="dim")
        return
    table = Table(show_header=True, header_style="bold")
    table.add_column("k")
    table.add_column("coefficient of ∏ dz_i / z_i^(2k_i+2)")
    for ks, c in sorted(w.terms.items()):
        table.add_row(",".join(map(str, ks)), c.pretty())
    console.print(table)


def render_volume(V: VolumePolynomial, value=None) -> None:
    line = Text()
    line.append(f"V_({V.g},{V.n})", style="bold cyan")
    line.append(f" [{V.convention}] = ", style="dim")
    line.append(V.pretty())
    console.print(line)
    if value is not None:
        console.print(f"     = {value}", style="dim")


def render_table(header: list[str], rows: list[list], title: str = "") -> None:
    table = Table(title=title or None, show_header=True, header_style="bold")
    for name in header:
        table.add_column(name, justify="right")
    for row in rows:
        table.add_row(*[str(x) for x in row])
    console.print(table)


def render_settings(settings: Settings, source: str) -> None:
    console.print(f"Resolved configuration ({source}):")
    console.print()
    resolved = settings.resolved()
    for key in sorted(KEYS):
        console.print(f"  {key}: [bold]{resolved[key]}[/bold]")
        console.print(f"    {KEYS[key]['description']}", style="dim")


def render_check_report(report: CheckReport) -> None:
    table = Table(title=f"check --suite {report.suite}", show_header=True, header_style="bold")
    table.add_column("#", justify="right")
    table.add_column("criterion")
    table.add_column("result")
    for c in report.criteria:
        status = "[green]pass[/green]" if c.passed else "[red]FAIL[/red]"
        table.add_row(str(c.id), c.name, status)
    console.print(table)
    for c in report.failed():
        console.print(f"[red]{c.name}[/red]: {c.detail}")
