"""``uniformize`` command line driver.

Exit codes: 0 when every gated check passes, 1 when any check fails,
2 on usage or configuration errors.
"""
from __future__ import annotations

import os
import sys

import click

from . import kernels
from .config import ConfigError, RunConfig, format_config, load_config, parse_config
from .deformation import DeformationParams, DeformedSpace, check_diameter, check_harnack
from .experiments import (
    SWEEP_VALUE,
    SuiteResult,
    build_report,
    origin_of,
    radius_sweep,
    run_suite,
    write_report,
)
from .generators import generate
from .graph import GraphError, format_graph, read_graph, write_graph
from .metric import estimate_delta
from .records import PASS, CheckRecord
from .uniformity import GH_H_LIMIT

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class Context:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg


def _floats(text: str | None):
    if text is None:
        return None
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma separated numbers, got {text!r}") from None


def _ints(text: str | None):
    if text is None:
        return None
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma separated integers, got {text!r}") from None


def _usage_error(msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(EXIT_USAGE)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="flat key = value config file")
@click.option("--set", "sets", multiple=True, metavar="KEY=VALUE", help="override one config key (repeatable)")
@click.option("--eps", help="comma separated epsilon list")
@click.option("--h", "h", type=float, help="arc shortness parameter h")
@click.option("--seed", type=int)
@click.option("--threads", type=int, help="cap on compiled-kernel threads")
@click.option("--out", type=click.Path(file_okay=False), help="output directory")
@click.pass_context
def main(ctx, config_path, sets, eps, h, seed, threads, out):
    """Deform truncated hyperbolic graphs and verify the uniformization estimates."""
    try:
        cfg = load_config(config_path) if config_path else RunConfig()
        if sets:
            cfg = parse_config("\n".join(sets), base=cfg)
        cfg = cfg.with_overrides(eps=_floats(eps), h=h, seed=seed, threads=threads, out=out)
    except ConfigError as exc:
        _usage_error(str(exc))
    kernels.set_threads(cfg.threads)
    ctx.obj = Context(cfg)


def _load(cfg: RunConfig, graph_path: str | None):
    try:
        if graph_path:
            return read_graph(graph_path)
        return generate(cfg.generator_spec())
    except (GraphError, ValueError, OSError) as exc:
        _usage_error(str(exc))


def _finish(command: str, cfg: RunConfig, report: dict, csv=None) -> None:
    paths = write_report(cfg.out, command, report, csv)
    s = report["summary"]
    click.echo(f"{command}: {s['PASS']} pass, {s['FAIL']} fail, {s['SKIPPED']} skipped, {s['INFO']} info")
    for p in paths:
        click.echo(f"  wrote {p}")
    sys.exit(EXIT_FAIL if s["FAIL"] else EXIT_OK)


def _echo_records(records) -> None:
    for r in records:
        flags = f"  [{', '.join(r.flags)}]" if r.flags else ""
        click.echo(f"  {r.status:<7} {r.name}{flags}")


def _run(command: str, cfg: RunConfig, g, checks, sweep: tuple[str, ...] = (), radii=None) -> None:
    runs, csv, extra = [], {}, []
    try:
        for e in cfg.eps:
            res = run_suite(g, cfg, e, checks=checks)
            runs.append(res)
            csv.update({f"{k}_eps{e!r}": v for k, v in res.csv.items()})
            click.echo(f"eps = {e!r}")
            _echo_records(res.records)
        if radii:
            for what in sweep:
                for e in cfg.eps:
                    rec = radius_sweep(cfg, radii, e, what)
                    extra.append(rec)
            click.echo("radius sweeps")
            _echo_records(extra)
    except ValueError as exc:
        _usage_error(str(exc))
    _finish(command, cfg, build_report(command, cfg, g, runs, extra), csv)


graph_arg = click.argument("graph", required=False, type=click.Path(exists=True, dir_okay=False))
radii_opt = click.option("--radii", help="comma separated truncation radii for a stability sweep")


@main.command()
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="graph file (default <out>/graph.txt)")
@click.pass_obj
def gen(obj: Context, output):
    """Generate the configured space and write it as an edge list."""
    cfg = obj.cfg
    g = _load(cfg, None)
    path = output or os.path.join(cfg.out, "graph.txt")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    write_graph(g, path)
    click.echo(f"{g.n} nodes, {len(g.edges)} edges, frontier {len(g.frontier)} -> {path}")


@main.command()
@graph_arg
@click.option("--mode", type=click.Choice(["global", "base"]), default="global", show_default=True)
@click.option("--force", is_flag=True, help="lift the block-size limit of the global scan")
@click.pass_obj
def delta(obj: Context, graph, mode, force):
    """Four-point hyperbolicity constant of a graph."""
    cfg = obj.cfg
    g = _load(cfg, graph)
    try:
        rep = estimate_delta(g, mode, base=origin_of(g, cfg), force=force)
    except ValueError as exc:
        _usage_error(str(exc))
    click.echo(f"delta_{mode} = {rep.delta!r}")
    rec = CheckRecord("hyperbolicity", PASS, rep.to_dict(), rep.witness or rep.base_witness)
    _finish("delta", cfg, build_report("delta", cfg, g, extra=[rec]))


@main.command()
@graph_arg
@click.pass_obj
def deform(obj: Context, graph):
    """Write deformed edge lists (with a density block) for every eps."""
    cfg = obj.cfg
    g = _load(cfg, graph)
    os.makedirs(cfg.out, exist_ok=True)
    runs = []
    for e in cfg.eps:
        try:
            ds = DeformedSpace(g, DeformationParams(e, cfg.h, cfg.quadrature))
        except ValueError as exc:
            _usage_error(str(exc))
        path = os.path.join(cfg.out, f"deformed_eps{e!r}.txt")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_graph(ds.deformed, density=ds.density))
        click.echo(f"eps = {e!r} -> {path}")
        runs.append(SuiteResult(e, [check_harnack(ds), check_diameter(ds)]))
    _finish("deform", cfg, build_report("deform", cfg, g, runs))


@main.command("verify-uniform")
@graph_arg
@radii_opt
@click.pass_obj
def verify_uniform_cmd(obj: Context, graph, radii):
    """Uniformity constants (quasiconvexity and double cone) along shortest arcs."""
    cfg = obj.cfg
    _run("verify-uniform", cfg, _load(cfg, graph), ("uniformity",), ("uniformity",), _ints(radii))


@main.command("verify-gh")
@graph_arg
@radii_opt
@click.pass_obj
def verify_gh_cmd(obj: Context, graph, radii):
    """Gehring-Hayman ratios l_eps(arc) / d_eps."""
    cfg = obj.cfg
    if cfg.h >= GH_H_LIMIT:
        _usage_error(f"h = {cfg.h!r} must be < 1/13")
    _run("verify-gh", cfg, _load(cfg, graph), ("gehring-hayman",), ("gehring-hayman",), _ints(radii))


@main.command("boundary-compare")
@graph_arg
@radii_opt
@click.pass_obj
def boundary_compare_cmd(obj: Context, graph, radii):
    """Roads, product-distance estimate, metametric sandwich and boundary quasi-isometry."""
    cfg = obj.cfg
    checks = ("delta", "roads", "product-distance", "sandwich", "quasi-isometry", "gromov-cauchy")
    _run("boundary-compare", cfg, _load(cfg, graph), checks, ("product-distance", "quasi-isometry"),
         _ints(radii))


@main.command("verify-all")
@graph_arg
@radii_opt
@click.pass_obj
def verify_all_cmd(obj: Context, graph, radii):
    """Every enabled check (config key ``checks``) at every eps."""
    cfg = obj.cfg
    _run("verify-all", cfg, _load(cfg, graph), cfg.checks, tuple(SWEEP_VALUE), _ints(radii))


@main.command("show-config")
@click.pass_obj
def show_config(obj: Context):
    """Print the effective configuration in config-file syntax."""
    click.echo(format_config(obj.cfg), nl=False)

