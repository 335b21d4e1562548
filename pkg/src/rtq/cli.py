"""Command-line front end: ``rtq <kind> --config <file.json> [--out <file.csv>] [--compare]``.

Exit codes: 0 on success, 2 for an invalid configuration (the diagnostic names
the offending field or JSON line), 3 for a domain error (the diagnostic starts
with ``error[<name>]`` where ``<name>`` is the stable error code).
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Any, Mapping

import jsonschema
import numpy as np

from . import __version__
from . import battery as battery_mod
from . import thermo_efficiency as te
from .bogoliubov import evolve, evolve_perturbative, generator_transform
from .errors import RTQError
from .fock_oracle import (
    DEFAULT_TRUNCATION,
    build_oracle_state,
    oracle_covariance,
    oracle_entropy,
    oracle_evolve,
    oracle_mode_number,
)
from .gaussian_core import (
    ModePartition,
    SqueezeSpec,
    make_state,
    mode_number,
    reduce,
    von_neumann_entropy,
)
from .gw_scenario import GWScenario, gw_transform, xi_parameter
from .io import ResultTable, config_digest, matrix_from_json, series_from_dict

KINDS = ("efficiency", "battery", "gw", "oracle-check")
COMPARE_COLUMNS = ("scenario_id", "h", "xi", "eta_closed", "eta_general", "abs_diff", "method")
ORACLE_COLUMNS = ("scenario_id", "quantity", "gaussian", "oracle", "abs_diff", "truncation")


class ConfigError(Exception):
    """Invalid configuration; ``where`` names the field or JSON line."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


def _reject_constant(name: str):
    raise ValueError(f"non-finite number {name} is not allowed")


def load_config(path: str) -> dict:
    """Read and schema-validate a JSON configuration file.

    Raises:
        ConfigError: On unreadable files, JSON syntax errors (with line and
            column), non-finite numbers or schema violations (with field path).
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        config = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    except ValueError as exc:
        raise ConfigError("config", str(exc)) from None
    validate_config(config)
    return config


def _schema() -> dict:
    return json.loads(resources.files("rtq").joinpath("schema/config.schema.json").read_text(encoding="utf-8"))


def _field_path(path) -> str:
    return ".".join(str(p) for p in path) or "config"


def _lookup(config: Mapping, dotted: str):
    node: Any = config
    for key in dotted.split("."):
        if isinstance(node, Mapping) and key in node:
            node = node[key]
        elif isinstance(node, list) and key.isdigit() and int(key) < len(node):
            node = node[int(key)]
        else:
            raise KeyError(dotted)
    return node


def _assign(config: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node: Any = config
    for key in keys[:-1]:
        node = node[int(key)] if isinstance(node, list) else node[key]
    last = keys[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value


def _declared_integer(dotted: str) -> bool:
    """Whether the schema declares the parameter at ``dotted`` as an integer."""
    schema = _schema()
    node = schema
    for key in dotted.split("."):
        node = node.get("properties", {}).get(key)
        if node is None:
            return False
        if "$ref" in node:
            node = schema["$defs"][node["$ref"].rsplit("/", 1)[-1]]
    return node.get("type") == "integer"


def validate_config(config) -> None:
    """Schema plus cross-field checks; raises :class:`ConfigError`."""
    validator = jsonschema.Draft202012Validator(_schema())
    error = jsonschema.exceptions.best_match(validator.iter_errors(config))
    if error is not None:
        raise ConfigError(_field_path(error.absolute_path), error.message)
    part = config.get("partition")
    if part is not None:
        try:
            ModePartition(part["system"], part.get("environment", ()))
        except ValueError as exc:
            raise ConfigError("partition", str(exc).removeprefix("partition: ")) from None
    sweep = config.get("sweep")
    if sweep is not None:
        name = sweep["parameter"]
        if name == "sweep" or name.startswith("sweep."):
            raise ConfigError("sweep.parameter", "cannot sweep the sweep block itself")
        try:
            current = _lookup(config, name)
        except KeyError:
            raise ConfigError("sweep.parameter", f"{name!r} does not name an existing parameter") from None
        if isinstance(current, bool) or not isinstance(current, (int, float)):
            raise ConfigError("sweep.parameter", f"{name!r} is not a numeric parameter")
        if sweep.get("scale", "linear") == "log" and (sweep["min"] <= 0 or sweep["max"] <= 0):
            raise ConfigError("sweep", "log sweeps need positive min and max")


def sweep_values(sweep: Mapping) -> np.ndarray:
    """Axis values in order; ``log`` spacing is geometric."""
    if sweep.get("scale", "linear") == "log":
        return np.geomspace(sweep["min"], sweep["max"], sweep["steps"])
    return np.linspace(sweep["min"], sweep["max"], sweep["steps"])


def thread_count() -> int:
    """Worker threads for sweeps, capped by ``RTQ_THREADS`` when set."""
    default = os.cpu_count() or 1
    raw = os.environ.get("RTQ_THREADS")
    if not raw:
        return default
    try:
        cap = int(raw)
    except ValueError:
        return default
    return max(1, min(cap, default))


# --- building library objects from a config -------------------------------


@dataclass
class _Setup:
    n_modes: int
    xi: float
    part: ModePartition | None
    squeeze: SqueezeSpec | None
    state_xi: float


def _config_xi(config: Mapping) -> float:
    thermal = config.get("thermal")
    if not thermal:
        return 0.0
    if "xi" in thermal:
        return float(thermal["xi"])
    return xi_parameter(thermal["temperature_nK"] * 1e-9, thermal["length_um"] * 1e-6, thermal["sound_speed_mps"]).xi


def _squeeze_spec(config: Mapping, part: ModePartition | None) -> SqueezeSpec | None:
    family = config.get("state_family", "passive")
    if family == "passive":
        return None
    block = config.get("squeeze")
    if block is None:
        raise ConfigError("squeeze", f"state_family {family!r} needs a squeeze block")
    if "modes" in block:
        modes = tuple(block["modes"])
    elif part is not None:
        modes = tuple(sorted(part.system))
    else:
        raise ConfigError("squeeze.modes", "cannot infer the squeezed modes")
    kind = "single_mode" if family == "sms" else "two_mode"
    try:
        return SqueezeSpec(kind, block["r"], block.get("theta", 0.0), modes)
    except ValueError as exc:
        raise ConfigError("squeeze", str(exc)) from None


def _setup(config: Mapping, n_modes: int, default_initial: str, default_system=None) -> _Setup:
    part = None if default_system is None else ModePartition.from_system(default_system, n_modes)
    if "partition" in config:
        block = config["partition"]
        part = ModePartition(block["system"], block.get("environment", ()))
        if part.count != n_modes:
            raise ConfigError("partition", f"covers {part.count} modes but the series has {n_modes}")
    squeeze = _squeeze_spec(config, part)
    if squeeze is not None and max(squeeze.modes) > n_modes:
        raise ConfigError("squeeze.modes", f"mode index outside 1..{n_modes}")
    xi = _config_xi(config)
    initial = config.get("initial_state", default_initial)
    return _Setup(n_modes, xi, part, squeeze, 0.0 if initial == "vacuum" else xi)


def _closed_form(config: Mapping, series, setup: _Setup, scenario_id: str) -> te.ThermoReport:
    family = config.get("state_family", "passive")
    if family == "passive":
        return te.efficiency_passive(series, setup.part, setup.xi, scenario_id=scenario_id)
    if family == "sms":
        return te.efficiency_sms(series, setup.part, setup.squeeze, setup.xi, scenario_id=scenario_id)
    pair = tuple(sorted(setup.part.system))
    if len(pair) != 2 or tuple(sorted(setup.squeeze.modes)) != pair:
        raise ConfigError("partition", "the two-mode-squeezed closed form needs S to be exactly the squeezed pair")
    return te.efficiency_tms(series, pair, setup.squeeze.r, setup.squeeze.theta, setup.xi, scenario_id=scenario_id)


def _series_and_setup(config: Mapping):
    if config["kind"] == "gw":
        block = config["gw"]
        scenario = GWScenario(
            epsilon=float(block["epsilon"]),
            tau=float(block["tau"]),
            pair=tuple(block["pair"]),
            omega_drive=block.get("omega_drive"),
        )
        n_modes = block.get("n_modes")
        if n_modes is None:
            n_modes = _partition_size(config) if "partition" in config else max(scenario.pair)
        if n_modes < max(scenario.pair):
            raise ConfigError("gw.n_modes", f"{n_modes} modes do not contain the pair {scenario.pair}")
        series = gw_transform(scenario, n_modes)
        return series, _setup(config, n_modes, "vacuum", scenario.pair)
    try:
        series = series_from_dict(config["series"], h=config.get("h"))
    except (KeyError, ValueError) as exc:
        raise ConfigError("series", str(exc)) from None
    return series, _setup(config, series.n_modes, "thermal", range(1, series.n_modes + 1))


def _partition_size(config: Mapping) -> int:
    block = config["partition"]
    return len(block["system"]) + len(block.get("environment", ()))


def _efficiency_rows(config: Mapping, compare: bool) -> list:
    scenario_id = config.get("scenario_id", "")
    series, setup = _series_and_setup(config)
    default_entropy = "perturbative" if (compare or config["kind"] == "gw") else "exact"
    entropy = config.get("entropy", default_entropy)
    closed = _closed_form(config, series, setup, scenario_id) if compare else None
    initial = make_state(setup.n_modes, setup.state_xi, setup.squeeze)
    perturbed = evolve_perturbative(initial, series)
    general = te.efficiency_perturbed(perturbed, setup.part, setup.xi, entropy=entropy, scenario_id=scenario_id)
    if compare:
        return [[scenario_id, series.h, setup.xi, closed.eta, general.eta, abs(closed.eta - general.eta), closed.method]]
    return [general.csv_row()]


def _battery_rows(config: Mapping) -> list:
    try:
        series = series_from_dict(config["series"], h=config.get("h"))
    except (KeyError, ValueError) as exc:
        raise ConfigError("series", str(exc)) from None
    xi = _config_xi(config)
    n = int(config["battery"]["mode"])
    if n > series.n_modes:
        raise ConfigError("battery.mode", f"mode {n} outside 1..{series.n_modes}")
    dec = battery_mod.reduced_state_decomposition(series, xi, n)
    report = battery_mod.cycle_bound(dec.a_n, n, xi, series.h, b_n=dec.b_n)
    return [report.csv_row()]


def _oracle_rows(config: Mapping) -> list:
    scenario_id = config.get("scenario_id", "")
    n = int(config["n_modes"])
    setup = _setup(config, n, "thermal")
    block = config.get("oracle", {})
    d = int(block.get("truncation", DEFAULT_TRUNCATION))
    gaussian = make_state(n, setup.state_xi, setup.squeeze)
    oracle = build_oracle_state(n, setup.state_xi, setup.squeeze, d)
    gen = block.get("generator")
    if gen is not None:
        zeros = [[0.0] * n for _ in range(n)]
        a_mat = matrix_from_json(gen.get("A", zeros), "oracle.generator.A")
        b_mat = matrix_from_json(gen.get("B", zeros), "oracle.generator.B")
        if a_mat.shape != (n, n) or b_mat.shape != (n, n):
            raise ConfigError("oracle.generator", f"generator blocks must be {n}x{n}")
        gaussian = evolve(gaussian, generator_transform(a_mat, b_mat))
        oracle = oracle_evolve(oracle, a_mat, b_mat)
    cov = oracle_covariance(oracle)
    rows = []

    def add(name, g, o):
        rows.append([scenario_id, name, float(g), float(o), abs(float(g) - float(o)), d])

    for i in range(n):
        for j in range(i, n):
            add(f"u_{i + 1}{j + 1}_re", gaussian.u[i, j].real, cov.u[i, j].real)
            add(f"u_{i + 1}{j + 1}_im", gaussian.u[i, j].imag, cov.u[i, j].imag)
            add(f"v_{i + 1}{j + 1}_re", gaussian.v[i, j].real, cov.v[i, j].real)
            add(f"v_{i + 1}{j + 1}_im", gaussian.v[i, j].imag, cov.v[i, j].imag)
    for k in range(1, n + 1):
        add(f"mode_number_{k}", mode_number(gaussian, k), oracle_mode_number(oracle, k))
        add(f"entropy_{k}", von_neumann_entropy(reduce(gaussian, [k])), oracle_entropy(oracle, [k]))
    add("entropy_total", von_neumann_entropy(gaussian), oracle_entropy(oracle))
    return rows


def _columns(kind: str, compare: bool) -> tuple:
    if kind == "battery":
        return battery_mod.CSV_COLUMNS
    if kind == "oracle-check":
        return ORACLE_COLUMNS
    return COMPARE_COLUMNS if compare else te.CSV_COLUMNS


def _evaluate(config: Mapping, compare: bool) -> list:
    kind = config["kind"]
    if kind == "battery":
        return _battery_rows(config)
    if kind == "oracle-check":
        return _oracle_rows(config)
    return _efficiency_rows(config, compare)


def run_scenario(config: Mapping, compare: bool = False, threads: int | None = None) -> ResultTable:
    """Evaluate a validated configuration, sweeping if requested.

    Sweep points run concurrently but rows are written in axis order, with the
    axis value as the first column, headed ``sweep:<parameter>``.

    Args:
        config: Parsed configuration (see :func:`load_config`).
        compare: Emit closed-form versus general-pipeline efficiencies.
        threads: Worker count; defaults to :func:`thread_count`.

    Returns:
        The :class:`ResultTable`.
    """
    if compare and config["kind"] not in ("efficiency", "gw"):
        raise ConfigError("kind", f"--compare is only available for efficiency and gw, not {config['kind']!r}")
    columns = _columns(config["kind"], compare)
    digest = config_digest(config)
    sweep = config.get("sweep")
    if sweep is None:
        return ResultTable(columns, _evaluate(config, compare), digest)

    values = sweep_values(sweep)
    name = sweep["parameter"]
    integral = _declared_integer(name)
    points = []
    for value in values:
        point = copy.deepcopy(config)
        point.pop("sweep")
        _assign(point, name, int(round(value)) if integral else float(value))
        points.append(point)
    workers = thread_count() if threads is None else max(1, int(threads))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda p: _evaluate(p, compare), points))
    rows = []
    for point, point_rows in zip(points, results):
        value = _lookup(point, name)
        rows.extend([value, *row] for row in point_rows)
    return ResultTable((f"sweep:{name}", *columns), rows, digest)


def _summary(kind: str, table: ResultTable, compare: bool) -> str:
    lines = [f"rtq {kind}: {len(table.rows)} row(s)"]
    if compare and table.rows:
        worst = max(table.column("abs_diff"))
        lines.append(f"  max |eta_closed - eta_general| = {worst:.3e}")
    elif kind in ("efficiency", "gw") and table.rows:
        etas = [v for v in table.column("eta") if v is not None]
        lines.append(f"  eta in [{min(etas):.6g}, {max(etas):.6g}]")
    elif kind == "battery" and table.rows:
        lines.append(f"  max W_c/k_BT bound = {max(table.column('w_c_bound_over_kbt')):.6g}")
    elif kind == "oracle-check" and table.rows:
        lines.append(f"  max |gaussian - oracle| = {max(table.column('abs_diff')):.3e}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rtq", description="Thermodynamic performance of Bogoliubov-transformed cavity fields.")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--config", required=True, help="JSON scenario file")
    parser.add_argument("--out", help="CSV output path (stdout if omitted)")
    parser.add_argument("--compare", action="store_true", help="closed-form vs general-pipeline efficiency")
    parser.add_argument("--version", action="version", version=f"rtq {__version__}")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if config["kind"] != args.kind:
            raise ConfigError("kind", f"config declares {config['kind']!r} but {args.kind!r} was requested")
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            table = run_scenario(config, compare=args.compare)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RTQError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        # remaining ValueErrors come from constructors rejecting config values
        print(f"config error: value: {exc}", file=sys.stderr)
        return 2
    text = table.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(_summary(args.kind, table, args.compare), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
