"""
Purpose: Command-line entry point. Reads experiment documents, sweeps one
parameter over a grid, runs the requested bound at every grid point and
writes one record per point as CSV or JSON. The ``reproduce`` command
regenerates the data behind the reference curves.
"""
# Import essential libraries
import copy
import csv
import hashlib
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field, replace
from os import getenv

import click
from colorama import Fore, Style
from dotenv import load_dotenv

from custom_exceptions import (ConfigurationError, InfeasibleError,
                               PhotonSdpError, SolverFailure)
from entropy import (EntropyTask, gauss_radau, solve_min_entropy,
                     solve_shannon)
from moments import build_relaxation, spec_from_dict
from scenarios import (BpskConfig, bpsk_behavior, bpsk_scenario,
                       bpsk_threshold, check_document, document_to_dict,
                       load_document, poisson_photon_model)
from sdpcore import SolverConfig, Status, witness_upper_bound
from seesaw import SeesawConfig, model_to_dict, seesaw_witness
from threads import map_bounded

load_dotenv()  # Import solver settings

log = logging.getLogger(__name__)

VERSION = "0.3.0"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INFEASIBLE = 2

# Pinning exactly at a computed maximum can be infeasible by solver noise
OPTIMAL_SLACK = 1e-7

COMMANDS = ("witness", "minentropy", "shannon", "seesaw", "bpsk-table",
            "quadrature", "reproduce")
AXES = ("omega", "alpha2", "witness_value", "m")
TARGETS = ("fig-disc", "fig-bpsk", "truncated-mean")

# Relaxations behind the reference curves
DISC_RELAXATION = {"level": 1,
                   "extras": ["r*M", "r*r", "s*r", "s*M", "r*M*s", "M*r*s"],
                   "localizing": ["1", "r", "M"]}
SHANNON_RELAXATION = {"level": 2, "localizing_level": 1}
BPSK_RELAXATION = {"level": 2, "extras": ["r*r*r", "s*M*r"],
                   "localizing_level": 1}


##############################################################################
                            #   Run configuration   #
##############################################################################


@dataclass(frozen=True)
class RunConfig:
    """
    Everything one invocation needs.

    :param command: One of COMMANDS.
    :param document: Path of the experiment document, when the command uses
        one.
    :param sweep: (axis, grid values) or None for a single point.
    :param output: Output path, stdout when None.
    :param fmt: ``csv`` or ``json``.
    :param solver: Solver settings.
    :param seed: Seed of every stochastic step.
    :param options: Command-specific options (bins, m, states, target...).
    """
    command: str
    document: str = None
    sweep: tuple = None
    output: str = None
    fmt: str = "csv"
    solver: SolverConfig = field(default_factory=SolverConfig)
    seed: int = 0
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {self.command!r}",
                                     "command")
        if self.fmt not in ("csv", "json"):
            raise ConfigurationError(f"unknown format {self.fmt!r}", "format")
        if self.sweep is not None:
            axis, values = self.sweep
            if axis not in AXES:
                raise ConfigurationError(
                    f"unknown axis {axis!r} (expected one of "
                    f"{', '.join(AXES)})", "sweep")
            _check_grid(values)


def parse_grid(text):
    """
    Parses an inclusive ``start:stop:step`` grid, a comma list or a single
    number. Points are start + k * step for integer k, never accumulated.

    :param text: The grid text.
    :type text: str
    :return: The grid values.
    :rtype: tuple
    """
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step == 0 or not all(map(math.isfinite, (start, stop, step))):
                raise ConfigurationError(f"bad step in {text!r}", "sweep")
            count = math.floor((stop - start) / step + 1e-9)
            if count < 0:
                raise ConfigurationError(
                    f"step of {text!r} points away from stop", "sweep")
            values = tuple(round(start + k * step, 12)
                           for k in range(count + 1))
        else:
            values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ConfigurationError(f"cannot parse grid {text!r}", "sweep")
    _check_grid(values)
    return values


def _check_grid(values):
    if not values:
        raise ConfigurationError("grid is empty", "sweep")
    if not all(math.isfinite(v) for v in values):
        raise ConfigurationError("grid values must be finite", "sweep")
    steps = [b - a for a, b in zip(values, values[1:])]
    if steps and not (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
        raise ConfigurationError("grid must be strictly monotone", "sweep")


def _int_list(text):
    try:
        return tuple(int(part) for part in str(text).split(","))
    except ValueError:
        raise ConfigurationError(f"expected a comma list of integers, got "
                                 f"{text!r}")


def config_hash(echo):
    """SHA-256 of the canonical JSON form of a record's input echo."""
    canonical = json.dumps(echo, sort_keys=True, separators=(",", ":"),
                           default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


##############################################################################
                            #   Sweep axes   #
##############################################################################


def apply_axis(data, axis, value):
    """
    Returns a copy of a raw experiment document with ``axis`` set to
    ``value``.

    :param data: The parsed document.
    :type data: dict
    :param axis: One of AXES.
    :type axis: str
    :param value: The grid value.
    :type value: float
    :return: The modified document.
    :rtype: dict
    """
    data = copy.deepcopy(data)
    photon = data.setdefault("photon", {})
    if axis == "omega":
        if photon.get("variant") != "bounds":
            raise ConfigurationError("sweeping omega needs the bounds "
                                     "variant", "photon.variant")
        photon["omega"] = value
    elif axis == "alpha2":
        if photon.get("variant") != "poisson":
            raise ConfigurationError("sweeping alpha2 needs the poisson "
                                     "variant", "photon.variant")
        photon["alpha2"] = value
    elif axis == "witness_value":
        data["witness_value"] = value
    elif axis == "m":
        data.setdefault("quadrature", {})["m"] = int(value)
    else:
        raise ConfigurationError(f"unknown axis {axis!r}", "sweep")
    return data


##############################################################################
                            #   Point evaluation   #
##############################################################################


def _raise_for(solution):
    if solution.status is Status.INFEASIBLE:
        raise InfeasibleError("Relaxation is infeasible")
    if not solution.optimal:
        raise SolverFailure(f"Solver ended with status "
                            f"{solution.status.value}", solution.diagnostics)


def _witness_bound(doc, spec, cfg):
    if doc.witness is None:
        raise ConfigurationError("this command needs a witness", "witness")
    rel = build_relaxation(spec, doc.scenario, doc.photon)
    solution = witness_upper_bound(rel, doc.witness, cfg)
    _raise_for(solution)
    return solution.objective_value, rel


def _task(doc, spec, cfg, m=None):
    """EntropyTask of a document, resolving an ``optimal`` witness value."""
    value = doc.witness_value
    if doc.behavior is None and value in (None, "optimal"):
        bound, _ = _witness_bound(doc, spec, cfg)
        value = min(1.0, max(0.0, bound - OPTIMAL_SLACK))
        log.debug("Pinning %s at its optimum %.10f", doc.witness.name, value)
    m = m or int(doc.quadrature.get("m", 8))
    return EntropyTask(doc.scenario, doc.photon, target=doc.target,
                       behavior=doc.behavior,
                       witness=None if doc.behavior is not None
                       else doc.witness,
                       witness_value=None if doc.behavior is not None
                       else value,
                       quadrature=gauss_radau(m), relaxation=spec,
                       name=doc.name)


def _point_witness(doc, config):
    spec = spec_from_dict(doc.relaxation, doc.scenario)
    bound, rel = _witness_bound(doc, spec, config.solver)
    return [{"witness": doc.witness.name, "upper_bound": bound,
             "n_vars": rel.n_vars,
             "blocks": list(rel.block_sizes())}]


def _point_minentropy(doc, config):
    spec = spec_from_dict(doc.relaxation, doc.scenario)
    task = _task(doc, spec, config.solver)
    result = solve_min_entropy(task, config.solver)
    return [dict(result.as_record(), witness_value=task.witness_value)]


def _point_shannon(doc, config):
    spec = spec_from_dict(doc.relaxation, doc.scenario)
    m = None if config.sweep and config.sweep[0] == "m" else \
        config.options.get("m")
    task = _task(doc, spec, config.solver, m)
    result = solve_shannon(task, config.solver)
    return [dict(result.as_record(), witness_value=task.witness_value)]


def _point_seesaw(doc, config):
    if doc.witness is None:
        raise ConfigurationError("the seesaw needs a witness", "witness")
    section = doc.seesaw
    cfg = SeesawConfig(dimension=section.get("dimension"),
                       restarts=int(section.get("restarts", 20)),
                       max_iters=int(section.get("max_iters", 200)),
                       tolerance=float(section.get("tolerance", 1e-9)),
                       seed=config.seed, solver=config.solver)
    value, model = seesaw_witness(doc.scenario, doc.photon, doc.witness, cfg)
    model_out = config.options.get("model_out")
    if model_out:
        with open(model_out, "w", encoding="utf-8") as handle:
            json.dump(model_to_dict(model), handle, indent=2)
    return [{"witness": doc.witness.name, "lower_bound": value,
             "dimension": model.dimension, "restarts": cfg.restarts}]


def _point_bpsk_table(options):
    bins = int(options.get("bins", 2))
    alpha2 = float(options["alpha2"])
    cfg = BpskConfig.from_mean_photon(alpha2, bins)
    behavior = bpsk_behavior(cfg)
    threshold = bpsk_threshold(cfg.alpha) if bins > 2 else None
    return [{"alpha2": alpha2, "bins": bins, "x1": threshold, "b": b,
             "x": x, "p": behavior.p(b, x, 1)}
            for x in (1, 2) for b in range(1, bins + 1)]


def _point_quadrature(options):
    rule = gauss_radau(int(options["m"]))
    taus = dict(zip(rule.used, rule.tau))
    return [{"m": rule.m, "i": i + 1, "node": t, "weight": w,
             "tau": taus.get(i), "c_m": rule.c_m}
            for i, (t, w) in enumerate(zip(rule.nodes, rule.weights))]


##############################################################################
                            #   Reproduction targets   #
##############################################################################


def _document(n_x, n_trunc, photon, witness, relaxation, name):
    """Discrimination-style document pinned at the optimal witness value."""
    return {"name": name,
            "scenario": {"n_x": n_x, "outcomes": [n_x], "n_trunc": n_trunc},
            "photon": photon,
            "witness": {"kind": witness},
            "witness_value": "optimal",
            "relaxation": relaxation}


def _point_fig_disc(options, config):
    n_x, n_trunc, alpha2 = options["n_x"], options["n_trunc"], \
        options["alpha2"]
    data = _document(n_x, n_trunc, {"variant": "poisson", "alpha2": alpha2,
                                    "model": "pins"},
                     witness="discrimination", relaxation=DISC_RELAXATION,
                     name=f"disc{n_x}")
    doc = check_document(data)
    spec = spec_from_dict(doc.relaxation, doc.scenario)
    bound, _ = _witness_bound(doc, spec, config.solver)
    min_entropy = solve_min_entropy(_task(doc, spec, config.solver),
                                    config.solver)
    shannon_doc = replace(doc, relaxation=dict(SHANNON_RELAXATION,
                                               extras=DISC_RELAXATION[
                                                   "extras"]))
    shannon_spec = spec_from_dict(shannon_doc.relaxation, doc.scenario)
    shannon = solve_shannon(_task(shannon_doc, shannon_spec, config.solver,
                                  options["m"]), config.solver)
    return [{"n_x": n_x, "n_trunc": n_trunc, "alpha2": alpha2,
             "witness": bound, "minentropy_bits": min_entropy.bits,
             "shannon_bits": shannon.bits, "m": options["m"]}]


def _point_fig_bpsk(options, config):
    bins, alpha2, m = options["bins"], options["alpha2"], options["m"]
    scenario = bpsk_scenario(bins)
    behavior = bpsk_behavior(BpskConfig.from_mean_photon(alpha2, bins))
    photon = poisson_photon_model(alpha2, 2, 0, "bounds")
    spec = spec_from_dict(BPSK_RELAXATION, scenario)
    task = EntropyTask(scenario, photon, behavior=behavior,
                       quadrature=gauss_radau(m), relaxation=spec,
                       name=f"bpsk{bins}")
    shannon = solve_shannon(task, config.solver)
    min_entropy = solve_min_entropy(task, config.solver)
    return [{"alpha2": alpha2, "bins": bins, "m": m,
             "shannon_bits": shannon.bits,
             "minentropy_bits": min_entropy.bits}]


def _point_truncated_mean(options, config):
    alpha2, model, leakage = options["alpha2"], options["model"], \
        options["leakage"]
    data = _document(3, 2, {"variant": "poisson", "alpha2": alpha2,
                            "model": model, "leakage": leakage},
                     witness="discrimination",
                     relaxation=dict(SHANNON_RELAXATION,
                                     extras=DISC_RELAXATION["extras"]),
                     name=f"disc3-{model}")
    doc = check_document(data)
    spec = spec_from_dict(doc.relaxation, doc.scenario)
    task = _task(doc, spec, config.solver, options["m"])
    shannon = solve_shannon(task, config.solver)
    return [{"alpha2": alpha2, "model": model,
             "leakage": leakage if model == "truncated_mean" else None,
             "witness": task.witness_value, "shannon_bits": shannon.bits,
             "m": options["m"]}]


def _reproduce_points(config):
    """Grid points of a reproduction target as (options, evaluator)."""
    options = config.options
    target = options.get("target")
    m = int(options.get("m", 8))
    alpha2_grid = parse_grid(options.get("alpha2", "0.02:0.5:0.02"))
    if target == "fig-disc":
        return [dict(n_x=n_x, n_trunc=n_trunc, alpha2=a2, m=m)
                for n_x in _int_list(options.get("states", "2,3,4"))
                for n_trunc in _int_list(options.get("n_trunc", "0,1,2"))
                for a2 in alpha2_grid], _point_fig_disc
    if target == "fig-bpsk":
        return [dict(bins=bins, alpha2=a2, m=m)
                for bins in _int_list(options.get("bins", "2,4,8"))
                for a2 in alpha2_grid], _point_fig_bpsk
    if target == "truncated-mean":
        variants = (("truncated_mean", "zero"), ("truncated_mean", "poisson"),
                    ("bounds", "poisson"))
        return [dict(alpha2=a2, model=model, leakage=leakage, m=m)
                for a2 in alpha2_grid for model, leakage in variants], \
            _point_truncated_mean
    raise ConfigurationError(f"unknown target {target!r} (expected one of "
                             f"{', '.join(TARGETS)})", "target")


##############################################################################
                            #   Records   #
##############################################################################


_DOCUMENT_POINTS = {"witness": _point_witness,
                    "minentropy": _point_minentropy,
                    "shannon": _point_shannon,
                    "seesaw": _point_seesaw}


def _solver_echo(config):
    cfg = config.solver
    return {"solver": cfg.solver, "tolerance": cfg.tolerance,
            "max_iters": cfg.max_iters, "seed": config.seed}


def _plan(config):
    """
    Expands the run into (echo, evaluator) pairs in grid order. The echo is
    the fully resolved input of the point.
    """
    axis, grid = config.sweep if config.sweep else (None, (None,))
    plan = []

    if config.command in _DOCUMENT_POINTS:
        if not config.document:
            raise ConfigurationError("this command needs --scenario")
        raw = load_document(config.document).raw
        evaluate = _DOCUMENT_POINTS[config.command]
        for value in grid:
            data = apply_axis(raw, axis, value) if axis else raw
            doc = check_document(data)
            echo = dict(document_to_dict(doc), command=config.command,
                        **_solver_echo(config))
            if config.options.get("m") and config.command == "shannon":
                echo["quadrature"] = {"m": int(config.options["m"])}
            plan.append((echo, axis, value,
                         lambda d=doc: evaluate(d, config)))
        return plan

    if config.command == "reproduce":
        points, evaluate = _reproduce_points(config)
        for options in points:
            echo = dict(options, command="reproduce",
                        target=config.options["target"],
                        **_solver_echo(config))
            plan.append((echo, None, None,
                         lambda o=options: evaluate(o, config)))
        return plan

    key = "alpha2" if config.command == "bpsk-table" else "m"
    if axis not in (None, key):
        raise ConfigurationError(f"{config.command} sweeps only {key}",
                                 "sweep")
    evaluate = _point_bpsk_table if key == "alpha2" else _point_quadrature
    for value in grid:
        options = dict(config.options)
        if value is not None:
            options[key] = value
        if key not in options:
            raise ConfigurationError(f"missing --{key}", key)
        echo = dict(options, command=config.command)
        plan.append((echo, axis, value, lambda o=options: evaluate(o)))
    return plan


def _evaluate(echo, axis, value, evaluate):
    """Runs one grid point; infeasible and failed solves become statuses."""
    started = time.time()
    status = Status.OPTIMAL.value
    try:
        rows = evaluate()
    except InfeasibleError as exc:
        log.error("%sInfeasible point%s %s=%s: %s", Fore.RED, Style.RESET_ALL,
                  axis, value, exc)
        rows, status = [{}], Status.INFEASIBLE.value
    except SolverFailure as exc:
        log.error("%sSolver failure%s %s=%s: %s", Fore.RED, Style.RESET_ALL,
                  axis, value, exc)
        rows, status = [{}], "solver_failure"
    elapsed = round(time.time() - started, 3)

    digest = config_hash(echo)
    records = []
    for row in rows:
        record = {"command": echo["command"], "version": VERSION,
                  "config_hash": digest, "status": status}
        if axis:
            record[axis] = value
        record.update(row)
        record["wall_clock"] = elapsed
        record["input"] = echo
        records.append(record)
    return records


def _cell(value):
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True, separators=(",", ":"),
                          default=str)
    return "" if value is None else value


def format_records(records, fmt):
    """
    CSV with the union of the record keys in first-seen order, or a JSON
    array.
    """
    if fmt == "json":
        return json.dumps(records, indent=2, default=str) + "\n"
    columns = list(dict.fromkeys(key for r in records for key in r))
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow({key: _cell(record.get(key)) for key in columns})
    return buffer.getvalue()


def run(config):
    """
    Executes a command over its sweep grid and writes the records.

    :param config: The run configuration.
    :type config: RunConfig
    :return: 0 when every point succeeded, 2 when some point was infeasible,
        1 on configuration or solver errors.
    :rtype: int
    """
    start_time = time.time()
    try:
        plan = _plan(config)
        log.info("Running %s%s%s over %s point(s)", Fore.CYAN,
                 config.command, Style.RESET_ALL, len(plan))
        chunks = map_bounded(_evaluate, plan, config.solver.threads)
    except PhotonSdpError as exc:
        log.error("%s%s%s", Fore.RED, exc, Style.RESET_ALL)
        return EXIT_FAILURE

    records = [record for chunk in chunks for record in chunk]
    text = format_records(records, config.fmt)
    try:
        if config.output:
            with open(config.output, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            click.echo(text, nl=False)
    except OSError as exc:
        log.error("%sCannot write %s: %s%s", Fore.RED, config.output,
                  exc.strerror, Style.RESET_ALL)
        return EXIT_FAILURE

    statuses = {r["status"] for r in records}
    elapsed_time = time.time() - start_time
    log.info("Time to execute: %.2fs", elapsed_time)
    if "solver_failure" in statuses:
        return EXIT_FAILURE
    if Status.INFEASIBLE.value in statuses:
        return EXIT_INFEASIBLE
    return EXIT_OK


def validate(path):
    """
    Schema and cross-field checks of a document without solving.

    :param path: Document path.
    :type path: str
    :return: Exit code and diagnostic lines.
    :rtype: tuple
    """
    try:
        doc = load_document(path)
        spec = spec_from_dict(doc.relaxation, doc.scenario)
        rel = build_relaxation(spec, doc.scenario, doc.photon)
    except PhotonSdpError as exc:
        return EXIT_FAILURE, [f"error: {exc}"]
    lines = ["ok",
             f"scenario: n_x={doc.scenario.n_x} "
             f"outcomes={list(doc.scenario.outcomes)} "
             f"n_trunc={doc.scenario.n_trunc}",
             f"blocks: {list(rel.block_sizes())}",
             f"variables: {rel.n_vars}",
             f"constraints: {len(rel.constraints)}"]
    return EXIT_OK, lines


##############################################################################
                            #   Command line   #
##############################################################################


def _setup_logging(level):
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(levelname)s: %(message)s"
    )

    # Mute non-essential logging from the solver stack
    logging.getLogger("cvxpy").setLevel(logging.WARNING)
    logging.getLogger("clarabel").setLevel(logging.WARNING)


def _sweep(values):
    if not values:
        return None
    axis, grid = values
    return axis, parse_grid(grid)


def _common(func):
    options = [
        click.option("--output", "-o", default=None,
                     help="Output file, stdout when omitted."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                     default="csv", show_default=True),
        click.option("--sweep", nargs=2, default=None,
                     metavar="AXIS GRID",
                     help="Axis (omega, alpha2, witness_value, m) and grid "
                          "start:stop:step."),
        click.option("--seed", type=int, default=0, show_default=True),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _finish(ctx, command, document=None, output=None, fmt="csv", sweep=None,
            seed=0, **options):
    try:
        config = RunConfig(command, document=document, sweep=_sweep(sweep),
                           output=output, fmt=fmt,
                           solver=replace(ctx.obj["solver"], seed=seed),
                           seed=seed,
                           options={k: v for k, v in options.items()
                                    if v is not None})
    except PhotonSdpError as exc:
        log.error("%s%s%s", Fore.RED, exc, Style.RESET_ALL)
        ctx.exit(EXIT_FAILURE)
    ctx.exit(run(config))


@click.group()
@click.option("--solver", default=None, help="cvxpy solver name.")
@click.option("--tolerance", type=float, default=None)
@click.option("--max-iters", type=int, default=None)
@click.option("--threads", type=int, default=None,
              help="Concurrent grid points and node solves.")
@click.option("--log-level", default=None,
              help="DEBUG, INFO, WARNING or ERROR.")
@click.version_option(VERSION)
@click.pass_context
def main(ctx, solver, tolerance, max_iters, threads, log_level):
    """Photon-number constrained prepare-and-measure bounds."""
    _setup_logging(log_level or getenv("PHOTONSDP_LOG_LEVEL", "INFO"))
    ctx.ensure_object(dict)
    try:
        ctx.obj["solver"] = SolverConfig.from_env(
            solver=solver.upper() if solver else None, tolerance=tolerance,
            max_iters=max_iters, threads=threads)
    except ValueError as exc:
        log.error("%sBad PHOTONSDP_* setting: %s%s", Fore.RED, exc,
                  Style.RESET_ALL)
        ctx.exit(EXIT_FAILURE)


@main.command()
@click.option("--scenario", "document", required=True,
              type=click.Path(dir_okay=False))
@_common
@click.pass_context
def witness(ctx, **kwargs):
    """Upper bound on the document's witness."""
    _finish(ctx, "witness", **kwargs)


@main.command()
@click.option("--scenario", "document", required=True,
              type=click.Path(dir_okay=False))
@_common
@click.pass_context
def minentropy(ctx, **kwargs):
    """Certified min-entropy of the target outcome."""
    _finish(ctx, "minentropy", **kwargs)


@main.command()
@click.option("--scenario", "document", required=True,
              type=click.Path(dir_okay=False))
@click.option("--m", type=int, default=None,
              help="Quadrature nodes, overriding the document.")
@_common
@click.pass_context
def shannon(ctx, **kwargs):
    """Certified Shannon entropy of the target outcome."""
    _finish(ctx, "shannon", **kwargs)


@main.command()
@click.option("--scenario", "document", required=True,
              type=click.Path(dir_okay=False))
@click.option("--model-out", default=None,
              help="Write the best model of the last point as JSON.")
@_common
@click.pass_context
def seesaw(ctx, **kwargs):
    """Seesaw lower bound on the document's witness."""
    _finish(ctx, "seesaw", **kwargs)


@main.command("bpsk-table")
@click.option("--alpha2", type=float, default=None)
@click.option("--bins", type=click.Choice(["2", "4", "8"]), default="2",
              show_default=True)
@_common
@click.pass_context
def bpsk_table(ctx, **kwargs):
    """Homodyne statistics of the BPSK states."""
    _finish(ctx, "bpsk-table", **kwargs)


@main.command()
@click.option("--m", type=int, default=None)
@_common
@click.pass_context
def quadrature(ctx, **kwargs):
    """Gauss-Radau nodes and weights on (0, 1]."""
    _finish(ctx, "quadrature", **kwargs)


@main.command()
@click.argument("target", type=click.Choice(TARGETS))
@click.option("--alpha2", default=None, help="Grid start:stop:step.")
@click.option("--bins", default=None, help="Comma list, fig-bpsk.")
@click.option("--states", default=None, help="Comma list, fig-disc.")
@click.option("--n-trunc", "n_trunc", default=None,
              help="Comma list, fig-disc.")
@click.option("--m", type=int, default=8, show_default=True)
@_common
@click.pass_context
def reproduce(ctx, **kwargs):
    """Data behind the reference curves."""
    _finish(ctx, "reproduce", **kwargs)


@main.command("validate")
@click.argument("path", type=click.Path(dir_okay=False))
@click.pass_context
def validate_command(ctx, path):
    """Checks a document without solving."""
    code, lines = validate(path)
    for line in lines:
        if code == EXIT_OK:
            click.echo(line)
        else:
            click.echo(f"{Fore.RED}{line}{Style.RESET_ALL}", err=True)
    ctx.exit(code)


if __name__ == "__main__":
    main()
