"""CLI entry point for wpvol."""

from __future__ import annotations

import functools
import logging
from fractions import Fraction
from pathlib import Path

import click
import mpmath
from rich.console import Console
from rich.logging import RichHandler

from wpvol import __version__, checks, gravity, renderer
from wpvol.config import FORMATS, Settings, load_settings
from wpvol.curves import DensityParams, default_order, density_of_states, make_curve
from wpvol.errors import CheckFailedError, InvalidArgumentError, WpvolError
from wpvol.matrixlab import ensembles, stats
from wpvol.matrixlab.metropolis import ChainParams
from wpvol.models import CorrelatorKey
from wpvol.recursion import RecursionEngine
from wpvol.storage import atomic_write_text, csv_text, dumps

CURVE_ALIASES = {"bosonic": "jt", "jt": "jt", "super": "jt-super", "jt-super": "jt-super", "airy": "airy"}
CURVE_CHOICE = click.Choice(sorted(CURVE_ALIASES))


def _setup_logging(verbose: bool) -> None:
    handler = RichHandler(console=Console(stderr=True), show_time=False, show_path=False)
    log = logging.getLogger("wpvol")
    log.handlers[:] = [handler]
    log.setLevel(logging.DEBUG if verbose else logging.WARNING)
    log.propagate = False


def handles_errors(func):
    """Map library and file-system errors to a red message and an exit code."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except WpvolError as e:
            renderer.render_error(str(e))
            raise SystemExit(e.exit_code)
        except OSError as e:
            renderer.render_error(str(e))
            raise SystemExit(1)

    return wrapper


def _settings(ctx: click.Context, **overrides) -> Settings:
    return ctx.obj["settings"].replace(**overrides)


def _meta(settings: Settings, command: str, args: dict) -> dict:
    return {
        "tool": "wpvol",
        "version": __version__,
        "config": settings.resolved(),
        "command": {"name": command, "args": args},
    }


def _csv_comments(meta: dict) -> dict:
    comments = {"tool": meta["tool"], "version": meta["version"], "command": meta["command"]["name"]}
    comments.update({k: v for k, v in sorted(meta["command"]["args"].items())})
    comments.update(meta["config"])
    return comments


def _in_output_dir(settings: Settings, path: Path | None) -> Path | None:
    """Relative artifact paths are taken under OUTPUT_DIR."""
    if path is None or path.is_absolute():
        return path
    return Path(settings.output_dir) / path


def _emit(text: str, out: Path | None, settings: Settings) -> None:
    out = _in_output_dir(settings, out)
    if out is None:
        click.echo(text, nl=False)
    else:
        atomic_write_text(out, text)
        renderer.render_saved(out)


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidArgumentError(f"{what} must be a comma-separated list of numbers, got {text!r}") from None
    if not values:
        raise InvalidArgumentError(f"{what} is empty")
    return values


def _require_positive(values: list[float], what: str) -> None:
    bad = [v for v in values if not v > 0]
    if bad:
        raise InvalidArgumentError(f"{what} must be positive, got {bad}")


def _parse_slope(slope: str | None) -> Fraction | None:
    if slope is None:
        return None
    try:
        return Fraction(slope)
    except (ValueError, ZeroDivisionError):
        raise InvalidArgumentError(f"--slope must be a rational such as 1/2, got {slope!r}") from None


def _engine(settings: Settings, curve: str, slope: str | None, g: int, n: int) -> RecursionEngine:
    if g > settings.max_genus:
        raise InvalidArgumentError(f"genus {g} exceeds MAX_GENUS={settings.max_genus}")
    CorrelatorKey(g, n, curve)
    order = settings.curve_order or default_order(settings.max_genus, g, n)
    return RecursionEngine(make_curve(CURVE_ALIASES[curve], order, _parse_slope(slope)))


def _with_memo(engine: RecursionEngine, memo: Path | None, compute, settings: Settings):
    memo = _in_output_dir(settings, memo)
    if memo is not None and memo.exists():
        engine.load(memo)
    result = compute()
    if memo is not None:
        engine.save(memo)
    return result


def _table_text(settings: Settings, meta: dict, header: list[str], rows: list[list]) -> str:
    if settings.format == "csv":
        return csv_text(header, rows, _csv_comments(meta))
    data = dict(meta)
    data["columns"] = header
    data["rows"] = rows
    return dumps(data)


@click.group()
@click.version_option(__version__, package_name="wpvol")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="Flat KEY=value file overriding the packaged defaults.")
@click.option("-v", "--verbose", is_flag=True, default=False, help="Debug logging on stderr.")
@click.pass_context
@handles_errors
def cli(ctx, config_path: Path | None, verbose: bool):
    """wpvol - Weil-Petersson volumes, JT gravity closed forms and a random-matrix lab."""
    _setup_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["settings"] = load_settings(config_path)
    ctx.obj["config_source"] = str(config_path) if config_path else "defaults"


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------


@cli.command("config")
@click.pass_context
def show_config(ctx):
    """Show the resolved configuration."""
    renderer.render_settings(ctx.obj["settings"], ctx.obj["config_source"])


# ---------------------------------------------------------------------------
# exact recursion
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--curve", type=CURVE_CHOICE, default="bosonic", show_default=True)
@click.option("--slope", default=None, help="Airy slope as a rational, e.g. 1/2.")
@click.option("--g", "g", type=int, required=True, help="Genus.")
@click.option("--n", "n", type=int, required=True, help="Number of boundaries.")
@click.option("--eval", "eval_b", default=None, help="Comma-separated boundary lengths to evaluate at.")
@click.option("--convention", type=click.Choice(["jt", "mirzakhani"]), default=None)
@click.option("--order", type=int, default=None, help="Curve truncation order (overrides CURVE_ORDER).")
@click.option("--memo", type=click.Path(path_type=Path), default=None, help="Memo file to load and update.")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Artifact path (default stdout).")
@click.pass_context
@handles_errors
def volumes(ctx, curve, slope, g, n, eval_b, convention, order, memo, out):
    """Exact volume polynomial V_{g,n}(b)."""
    settings = _settings(ctx, convention=convention, curve_order=order)
    b = _parse_floats(eval_b, "--eval") if eval_b else None
    engine = _engine(settings, curve, slope, g, n)
    w = _with_memo(engine, memo, lambda: engine.compute_correlator(g, n), settings)
    V = gravity.volume_from_correlator(w, settings.convention)
    meta = _meta(settings, "volumes", {"curve": engine.curve_id, "g": g, "n": n, "eval": b})
    data = dict(meta)
    data["volume"] = V.to_json()
    data["pretty"] = V.pretty()
    if b is not None:
        data["value"] = mpmath.nstr(gravity.evaluate_volume(V, b, settings.precision), settings.precision)
    _emit(dumps(data), out, settings)
    if out is not None:
        renderer.render_volume(V, data.get("value"))


@cli.command()
@click.option("--curve", type=CURVE_CHOICE, default="bosonic", show_default=True)
@click.option("--slope", default=None, help="Airy slope as a rational, e.g. 1/2.")
@click.option("--g", "g", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--order", type=int, default=None)
@click.option("--memo", type=click.Path(path_type=Path), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
@handles_errors
def correlators(ctx, curve, slope, g, n, order, memo, out):
    """Exact correlator omega_{g,n} as coefficients of prod dz_i / z_i^(2k_i+2)."""
    settings = _settings(ctx, curve_order=order)
    engine = _engine(settings, curve, slope, g, n)
    w = _with_memo(engine, memo, lambda: engine.compute_correlator(g, n), settings)
    data = _meta(settings, "correlators", {"curve": engine.curve_id, "g": g, "n": n})
    data["correlator"] = w.to_json()
    data["pretty"] = {",".join(map(str, ks)): c.pretty() for ks, c in sorted(w.terms.items())}
    _emit(dumps(data), out, settings)
    if out is not None:
        renderer.render_correlator(w)


@cli.command("dump-curve")
@click.option("--curve", type=CURVE_CHOICE, default="bosonic", show_default=True)
@click.option("--slope", default=None)
@click.option("--order", type=int, default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
@handles_errors
def dump_curve(ctx, curve, slope, order, out):
    """Exact series of y(z) for a spectral curve."""
    settings = _settings(ctx, curve_order=order)
    spectral = make_curve(
        CURVE_ALIASES[curve],
        settings.curve_order or default_order(settings.max_genus),
        _parse_slope(slope),
    )
    data = _meta(settings, "dump-curve", {"curve": spectral.curve_id})
    data["curve"] = {
        "id": spectral.curve_id,
        "edge_class": spectral.edge_class,
        "density_sign": spectral.density_sign,
        "order": spectral.order,
        "terms": [{"k": k, "coeff": c.to_json(), "pretty": c.pretty()} for k, c in spectral.y_series.items()],
    }
    _emit(dumps(data), out, settings)
    if out is not None:
        renderer.render_curve(spectral)


@cli.group()
def memo():
    """Manage persisted correlator memo files."""


@memo.command("save")
@click.argument("path", type=click.Path(path_type=Path))
@click.option("--curve", type=CURVE_CHOICE, default="bosonic", show_default=True)
@click.option("--slope", default=None)
@click.option("--max-euler", type=int, default=4, show_default=True, help="Compute every (g, n) with 2g-2+n up to this.")
@click.pass_context
@handles_errors
def memo_save(ctx, path, curve, slope, max_euler):
    """Compute correlators and save them to PATH."""
    settings = ctx.obj["settings"]
    if max_euler < 1:
        raise InvalidArgumentError(f"--max-euler must be at least 1, got {max_euler}")
    targets = checks.stable_range(max_euler)
    g_top = max(g for g, _ in targets)
    engine = _engine(settings.replace(max_genus=max(settings.max_genus, g_top)), curve, slope, g_top, 1)
    engine.compute_many(targets, settings.mc_workers)
    path = engine.save(_in_output_dir(settings, path))
    renderer.console.print(f"Saved {len(engine.cached())} correlators for {engine.curve_id} to {path}")


@memo.command("load")
@click.argument("path", type=click.Path(path_type=Path))
@click.option("--curve", type=CURVE_CHOICE, default="bosonic", show_default=True)
@click.option("--slope", default=None)
@click.pass_context
@handles_errors
def memo_load(ctx, path, curve, slope):
    """Validate a memo file against a curve and list its entries."""
    settings = ctx.obj["settings"]
    engine = _engine(settings, curve, slope, 0, 3)
    path = _in_output_dir(settings, path)
    count = engine.load(path)
    renderer.console.print(f"{count} correlators for {engine.curve_id}:")
    for w in engine.cached():
        renderer.console.print(f"  ω_({w.key.g},{w.key.n})  {len(w.terms)} terms", style="dim")


@memo.command("clear")
@click.argument("path", type=click.Path(path_type=Path))
@click.pass_context
@handles_errors
def memo_clear(ctx, path):
    """Delete a memo file."""
    path = _in_output_dir(ctx.obj["settings"], path)
    if path.exists():
        path.unlink()
        renderer.console.print(f"Removed {path}")
    else:
        renderer.console.print(f"No memo file at {path}", style="dim")


# ---------------------------------------------------------------------------
# gravity
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--curve", type=CURVE_CHOICE, default="bosonic", show_default=True)
@click.option("--slope", default=None, help="Airy slope as a rational, e.g. 1/2.")
@click.option("--grid", "grid", required=True, help="Comma-separated energies E > 0.")
@click.option("--S", "S", type=float, default=0.0, show_default=True, help="Entropy S.")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
@handles_errors
def density(ctx, curve, slope, grid, S, fmt, out):
    """Disc density of states rho(E)."""
    settings = _settings(ctx, format=fmt)
    energies = _parse_floats(grid, "--grid")
    _require_positive(energies, "energies")
    name = CURVE_ALIASES[curve]
    label = name
    if name == "jt-super":
        values = [gravity.super_disc_density(E, S) for E in energies]
    else:
        spectral = make_curve(name, 3, _parse_slope(slope))
        label = spectral.curve_id
        params = DensityParams(S)
        values = [density_of_states(spectral, E, params) for E in energies]
    with mpmath.workdps(settings.precision):
        rows = [[repr(E), mpmath.nstr(v, settings.precision)] for E, v in zip(energies, values)]
    meta = _meta(settings, "density", {"curve": label, "S": S})
    _emit(_table_text(settings, meta, ["E", "rho"], rows), out, settings)
    if out is not None:
        renderer.render_table(["E", "rho"], rows, f"{label} density, S={S}")


def _parse_mode(mode: str) -> tuple[str, int | None]:
    if mode in ("disc", "super-disc", "expansion"):
        return mode, None
    if mode.startswith("g="):
        try:
            g = int(mode[2:])
        except ValueError:
            g = -1
        if g >= 1:
            return "genus", g
    raise InvalidArgumentError(f"--mode must be disc, super-disc, expansion or g=K with K >= 1, got {mode!r}")


@cli.command()
@click.option("--mode", default="disc", show_default=True, help="disc, super-disc, g=K or expansion.")
@click.option("--curve", type=click.Choice(["bosonic", "jt", "super", "jt-super"]), default="bosonic", show_default=True,
              help="Curve for disc, g=K and expansion.")
@click.option("--beta", "betas", required=True, help="Comma-separated temperatures beta > 0.")
@click.option("--S", "S", type=float, default=0.0, show_default=True)
@click.option("--g-max", type=int, default=None, help="Highest genus for --mode expansion (default MAX_GENUS).")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
@handles_errors
def partition(ctx, mode, curve, betas, S, g_max, fmt, out):
    """Partition functions Z(beta): disc, super disc, one genus, or the genus expansion."""
    settings = _settings(ctx, format=fmt)
    kind, g = _parse_mode(mode)
    name = CURVE_ALIASES[curve]
    if kind == "disc" and name == "jt-super":
        kind = "super-disc"
    grid = _parse_floats(betas, "--beta")
    _require_positive(grid, "temperatures")
    top = g if kind == "genus" else (g_max if g_max is not None else settings.max_genus)
    if kind in ("genus", "expansion") and top > settings.max_genus:
        raise InvalidArgumentError(f"genus {top} exceeds MAX_GENUS={settings.max_genus}")
    engine = None
    if kind in ("genus", "expansion"):
        order = settings.curve_order or default_order(settings.max_genus, max(top, 1), 1)
        engine = RecursionEngine(make_curve(name, order))

    digits = settings.precision
    with mpmath.workdps(digits):
        if kind == "disc":
            header = ["beta", "Z"]
            rows = [[repr(b), mpmath.nstr(gravity.disc_partition(b, S), digits)] for b in grid]
        elif kind == "super-disc":
            header = ["beta", "Z"]
            rows = [[repr(b), mpmath.nstr(gravity.super_disc_partition(b, S), digits)] for b in grid]
        elif kind == "genus":
            header = ["beta", "Z"]
            rows = [[repr(b), mpmath.nstr(gravity.genus_partition_via_gluing(g, b, S, engine), digits)] for b in grid]
        else:
            header = ["beta", "disc"] + [f"g={k}" for k in range(1, top + 1)] + ["total"]
            rows = []
            for b in grid:
                expansion = gravity.genus_expansion(b, S, top, engine)
                rows.append([repr(b)] + [mpmath.nstr(v, digits) for _, v in expansion.contributions] + [mpmath.nstr(expansion.total, digits)])
    meta = _meta(settings, "partition", {"mode": mode, "curve": name, "S": S, "g_max": top if kind == "expansion" else None})
    _emit(_table_text(settings, meta, header, rows), out, settings)
    if out is not None:
        renderer.render_table(header, rows, f"Z(beta), {mode}")


@cli.command()
@click.option("--b", "lengths", default=None, help="Comma-separated geodesic lengths b >= 0.")
@click.option("--beta", type=float, required=True, help="Temperature of the asymptotic boundary.")
@click.option("--double", "beta2", default=None, help="Comma-separated second temperatures: double trumpet Z_{0,2}.")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
@handles_errors
def trumpet(ctx, lengths, beta, beta2, fmt, out):
    """Trumpet Theta(b; beta), or the double trumpet with --double."""
    settings = _settings(ctx, format=fmt)
    digits = settings.precision
    with mpmath.workdps(digits):
        if beta2 is not None:
            second = _parse_floats(beta2, "--double")
            header = ["beta1", "beta2", "Z02"]
            rows = [[repr(beta), repr(b2), mpmath.nstr(gravity.double_trumpet(beta, b2), digits)] for b2 in second]
        else:
            if lengths is None:
                raise InvalidArgumentError("trumpet needs --b or --double")
            bs = _parse_floats(lengths, "--b")
            header = ["b", "theta"]
            rows = [[repr(b), mpmath.nstr(gravity.trumpet(b, beta), digits)] for b in bs]
    meta = _meta(settings, "trumpet", {"beta": beta, "double": beta2 is not None})
    _emit(_table_text(settings, meta, header, rows), out, settings)
    if out is not None:
        renderer.render_table(header, rows, f"trumpet, beta={beta}")


# ---------------------------------------------------------------------------
# matrix lab
# ---------------------------------------------------------------------------


def _default_reference(config: ensembles.EnsembleConfig) -> str | None:
    if config.kind == ensembles.GAUSSIAN:
        return "semicircle"
    if config.is_gaussian_susy and config.nu == 0:
        return "marchenko-pastur"
    return None


@cli.command()
@click.option("--kind", type=click.Choice(sorted(ensembles.KIND_ALIASES) + list(ensembles.KINDS)), default="gue", show_default=True)
@click.option("--N", "N", type=int, required=True, help="Matrix size.")
@click.option("--potential", default=None, help="Coefficients of T from the constant term up, e.g. 0,0,0,0,1.")
@click.option("--nu", type=int, default=0, show_default=True, help="Index of the susy block.")
@click.option("--seed", type=int, default=None)
@click.option("--draws", type=int, default=None)
@click.option("--burn-in", type=int, default=None)
@click.option("--steps", type=int, default=None, help="Sweeps between recorded draws.")
@click.option("--step-size", type=float, default=None)
@click.option("--chains", type=int, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--solver", type=click.Choice(["lapack", "ql"]), default="lapack", show_default=True)
@click.option("--bins", type=int, default=None)
@click.option("--reference", default=None, help="Reference density for the histogram (default by kind).")
@click.option("--hist-out", type=click.Path(path_type=Path), default=None, help="Histogram CSV path.")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
@handles_errors
def mc(ctx, kind, N, potential, nu, seed, draws, burn_in, steps, step_size, chains, workers, solver, bins, reference, hist_out, fmt, out):
    """Sample a finite-N ensemble and export eigenvalues (one row per draw)."""
    settings = _settings(
        ctx,
        seed=seed,
        mc_draws=draws,
        mc_burn_in=burn_in,
        mc_steps_thin=steps,
        mc_step_size=step_size,
        mc_chains=chains,
        mc_workers=workers,
        hist_bins=bins,
        format=fmt,
    )
    config = ensembles.EnsembleConfig(
        N=N,
        kind=ensembles.parse_kind(kind),
        potential=ensembles.parse_potential(potential) if potential else (),
        nu=nu,
        seed=settings.seed,
        draws=settings.mc_draws,
        chain=ChainParams(settings.mc_steps_thin, settings.mc_burn_in, settings.mc_step_size),
        chains=settings.mc_chains,
        solver=solver,
    )
    batch = ensembles.sample(config, settings.mc_workers)
    meta = _meta(settings, "mc", config.to_json())
    if settings.format == "csv":
        text = batch.to_csv(_csv_comments(meta))
    else:
        text = dumps(batch.to_json(meta))
    _emit(text, out, settings)

    reference = reference or _default_reference(config)
    h = stats.histogram_and_stats(batch.pooled(), reference, settings.hist_bins)
    hist_out = _in_output_dir(settings, hist_out)
    if hist_out is not None:
        atomic_write_text(hist_out, h.to_csv(_csv_comments(meta)))
        renderer.render_saved(hist_out)
    if out is not None:
        summary = h.summary()
        summary["acceptance_rate"] = batch.acceptance_rate
        renderer.render_table(["statistic", "value"], [[k, v] for k, v in summary.items()], f"{config.kind}, N={N}")


# ---------------------------------------------------------------------------
# acceptance
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--suite", type=click.Choice(checks.SUITES), default="fast", show_default=True)
@click.option("--golden", type=click.Path(path_type=Path), default=None, help="Golden volume file (default packaged).")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Report path (default stdout).")
@click.pass_context
@handles_errors
def check(ctx, suite, golden, out):
    """Run the acceptance criteria; exit 1 if any fails."""
    settings = ctx.obj["settings"]
    report = checks.run_suite(suite, settings, golden)
    _emit(dumps(report.to_json(checks.report_meta(settings))), out, settings)
    if out is not None:
        renderer.render_check_report(report)
    if not report.passed:
        names = ", ".join(f"{c.id}:{c.name}" for c in report.failed())
        raise CheckFailedError(f"failed criteria: {names}")


if __name__ == "__main__":
    cli()
