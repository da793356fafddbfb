"""Batch front door: config-driven runs, sweeps, and the self-audit.

Four subcommands::

    ottocat discrete   --config run.ini [--output rows.csv]
    ottocat continuous --config run.ini [--output rows.csv]
    ottocat sweep      --config run.ini [--output rows.csv] [--threads N]
    ottocat verify     [--seed N] [--points N] [--output report.txt]

Configs are flat UTF-8 ``key = value`` files with sections (see the
README for the full schema).  Unknown sections, keys, or column names
are hard errors: a config that does not parse cleanly never half-runs.

Every data subcommand emits the same CSV column contract (header row,
comma separated, floats with 17 significant digits, LF line endings,
``NA`` for fields that are undefined or not computed by that
subcommand).  Sweep rows are computed as independent tasks on a worker
pool and sorted by (sweep value, engine) before writing, so the bytes do
not depend on scheduling or thread count.

Exit codes: 0 success, 1 failed verification check, 2 usage or config
error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import analytic, continuous, discrete
from . import verify as verify_mod
from .engine_spec import BathParams, EngineSpec, SwapPair
from .engine_spec import validate as validate_spec
from .mapping import EngineFamily, equivalence_from_parts

__all__ = [
    "COLUMNS",
    "ConfigError",
    "CheckFailure",
    "load_config",
    "load_custom_spec",
    "cmd_discrete",
    "cmd_continuous",
    "cmd_sweep",
    "cmd_verify",
    "main",
]

FAMILY_KINDS = ("otto", "qubit_catalyst")

#: The CSV column contract, in emission order.  Inputs are echoed first,
#: then per-pair flows and rates, per-cycle and per-time energetics, the
#: bridge quantities, and the residual bundle.
COLUMNS = (
    "engine",
    "eta",
    "beta_h",
    "beta_c",
    "omega_h",
    "omega_c",
    "tau_eq_h",
    "tau_eq_c",
    "g",
    "delta_p_1",
    "delta_p_2",
    "current_1",
    "current_2",
    "q_hot",
    "q_cold",
    "work",
    "j_hot",
    "j_cold",
    "power",
    "eta_discrete",
    "eta_continuous",
    "tau",
    "tau_spread",
    "zeta",
    "kappa",
    "clausius_discrete",
    "clausius_continuous",
    "entropy_production",
    "catalyst_residual",
    "first_law_residual",
    "int_vanish_hot",
    "int_vanish_cold",
    "catalysis_residual_max",
    "regime_discrete",
    "regime_continuous",
)

#: Wiring tolerance: every emitted steady-state efficiency must match the
#: family's design efficiency.
ETA_WIRING_TOL = 1e-9


class ConfigError(Exception):
    """Unusable configuration: unknown keys, bad values, missing files."""


class CheckFailure(Exception):
    """A verification invariant failed while producing output."""


# ---------------------------------------------------------------------------
# config ingestion


@dataclass(frozen=True)
class FixedParams:
    """The dimensionless working point shared by all family engines."""

    beta_h_omega_h: float
    beta_c_over_beta_h: float
    g_tau_eq: float | None
    tau_eq: float
    omega_h: float
    eta: float | None


@dataclass(frozen=True)
class SweepAxis:
    parameter: str
    start: float
    stop: float
    points: int


@dataclass(frozen=True)
class RunConfig:
    engines: tuple[str, ...]
    seed: int
    fixed: FixedParams | None
    sweep: SweepAxis | None
    columns: tuple[str, ...]


_ALLOWED_KEYS = {
    "run": {"engine", "seed"},
    "fixed": {
        "beta_h_omega_h",
        "beta_c_over_beta_h",
        "g_tau_eq",
        "tau_eq",
        "omega_h",
        "eta",
    },
    "sweep": {"parameter", "start", "stop", "points"},
    "output": {"columns"},
}


def _read_ini(path: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep keys as written; the schema is lowercase
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle, source=path)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return parser


def _check_known_keys(parser: configparser.ConfigParser, allowed: dict) -> None:
    for section in parser.sections():
        if section not in allowed:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in allowed[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")


def _get_float(section: configparser.SectionProxy, key: str) -> float:
    try:
        value = float(section[key])
    except ValueError:
        raise ConfigError(
            f"key '{key}' in section [{section.name}] is not a number: "
            f"{section[key]!r}"
        ) from None
    if not math.isfinite(value):
        raise ConfigError(f"key '{key}' in section [{section.name}] must be finite")
    return value


def _require(section: configparser.SectionProxy, key: str) -> None:
    if key not in section:
        raise ConfigError(f"missing key '{key}' in section [{section.name}]")


def load_config(path: str, command: str) -> RunConfig:
    """Parse and validate a run config for one of the data subcommands."""
    parser = _read_ini(path)
    _check_known_keys(parser, _ALLOWED_KEYS)

    if "run" not in parser or "engine" not in parser["run"]:
        raise ConfigError("missing key 'engine' in section [run]")
    engines = tuple(
        token.strip() for token in parser["run"]["engine"].split(",") if token.strip()
    )
    if not engines:
        raise ConfigError("key 'engine' in section [run] names no engines")
    if len(set(engines)) != len(engines):
        raise ConfigError("duplicate engine in section [run]")

    seed = 0
    if "seed" in parser["run"]:
        try:
            seed = int(parser["run"]["seed"])
        except ValueError:
            raise ConfigError("key 'seed' in section [run] is not an integer") from None
        if seed < 0:
            raise ConfigError("key 'seed' in section [run] must be >= 0")

    is_family = [token in FAMILY_KINDS for token in engines]
    if any(is_family) and not all(is_family):
        raise ConfigError(
            "cannot mix built-in engines with custom spec files in one run"
        )
    custom = not all(is_family)

    sweep = None
    if command == "sweep":
        if custom:
            raise ConfigError(
                "sweep requires built-in engines (otto, qubit_catalyst); "
                "custom spec files run via the discrete/continuous subcommands"
            )
        if "sweep" not in parser:
            raise ConfigError("missing section [sweep]")
        section = parser["sweep"]
        for key in ("parameter", "start", "stop", "points"):
            _require(section, key)
        parameter = section["parameter"].strip()
        if parameter not in ("eta", "g_tau_eq"):
            raise ConfigError(
                f"sweep parameter must be 'eta' or 'g_tau_eq', got {parameter!r}"
            )
        start = _get_float(section, "start")
        stop = _get_float(section, "stop")
        try:
            points = int(section["points"])
        except ValueError:
            raise ConfigError("key 'points' in section [sweep] is not an integer") from None
        if points < 1:
            raise ConfigError(f"sweep needs at least one point, got {points}")
        if not start <= stop:
            raise ConfigError(f"sweep range is empty: start {start} > stop {stop}")
        if parameter == "eta" and not (0.0 < start and stop < 1.0):
            raise ConfigError("eta sweep range must lie inside (0, 1)")
        if parameter == "g_tau_eq" and not 0.0 < start:
            raise ConfigError("g_tau_eq sweep range must be positive")
        sweep = SweepAxis(parameter=parameter, start=start, stop=stop, points=points)
    elif "sweep" in parser:
        raise ConfigError(
            f"section [sweep] is only valid for the sweep subcommand, not {command}"
        )

    fixed = None
    if custom:
        if "fixed" in parser:
            raise ConfigError(
                "section [fixed] does not apply to custom spec files; "
                "the spec file carries all parameters"
            )
    else:
        if "fixed" not in parser:
            raise ConfigError("missing section [fixed]")
        section = parser["fixed"]
        for key in ("beta_h_omega_h", "beta_c_over_beta_h", "tau_eq"):
            _require(section, key)
        beta_h_omega_h = _get_float(section, "beta_h_omega_h")
        beta_c_over_beta_h = _get_float(section, "beta_c_over_beta_h")
        tau_eq = _get_float(section, "tau_eq")
        omega_h = _get_float(section, "omega_h") if "omega_h" in section else 1.0
        for name, value in (
            ("beta_h_omega_h", beta_h_omega_h),
            ("beta_c_over_beta_h", beta_c_over_beta_h),
            ("tau_eq", tau_eq),
            ("omega_h", omega_h),
        ):
            if value <= 0.0:
                raise ConfigError(f"key '{name}' must be positive, got {value}")
        if beta_c_over_beta_h <= 1.0:
            raise ConfigError(
                "beta_c_over_beta_h must exceed 1 (the cold bath must be colder)"
            )

        sweeping_g = sweep is not None and sweep.parameter == "g_tau_eq"
        g_tau_eq = None
        if sweeping_g:
            if "g_tau_eq" in section:
                raise ConfigError(
                    "g_tau_eq is being swept; remove it from section [fixed]"
                )
        else:
            _require(section, "g_tau_eq")
            g_tau_eq = _get_float(section, "g_tau_eq")
            if g_tau_eq <= 0.0:
                raise ConfigError(f"key 'g_tau_eq' must be positive, got {g_tau_eq}")

        sweeping_eta = sweep is not None and sweep.parameter == "eta"
        eta = None
        if sweeping_eta:
            if "eta" in section:
                raise ConfigError("eta is being swept; remove it from section [fixed]")
        else:
            _require(section, "eta")
            eta = _get_float(section, "eta")
            if not 0.0 < eta < 1.0:
                raise ConfigError(f"key 'eta' must lie in (0, 1), got {eta}")

        fixed = FixedParams(
            beta_h_omega_h=beta_h_omega_h,
            beta_c_over_beta_h=beta_c_over_beta_h,
            g_tau_eq=g_tau_eq,
            tau_eq=tau_eq,
            omega_h=omega_h,
            eta=eta,
        )

    columns = COLUMNS
    if "output" in parser and "columns" in parser["output"]:
        requested = tuple(
            token.strip()
            for token in parser["output"]["columns"].split(",")
            if token.strip()
        )
        if not requested:
            raise ConfigError("key 'columns' in section [output] names no columns")
        for name in requested:
            if name not in COLUMNS:
                raise ConfigError(f"unknown column '{name}' in section [output]")
        columns = requested

    return RunConfig(
        engines=engines, seed=seed, fixed=fixed, sweep=sweep, columns=columns
    )


_CUSTOM_BATH_KEYS = {"beta", "omega", "tau_eq", "gamma_minus"}


def load_custom_spec(path: str) -> EngineSpec:
    """Build an :class:`EngineSpec` from a standalone spec file.

    Schema: ``[engine]`` with ``catalyst_dim``; ``[hot]`` and ``[cold]``
    with ``beta``, ``omega``, and exactly one of ``tau_eq`` or
    ``gamma_minus``; one ``[swap_N]`` per pair (numbered from 1) with
    flat level indices ``u``, ``d`` and coupling ``g``.
    """
    parser = _read_ini(path)
    sections = set(parser.sections())
    n_swaps = 0
    while f"swap_{n_swaps + 1}" in sections:
        n_swaps += 1
    allowed = {
        "engine": {"catalyst_dim"},
        "hot": _CUSTOM_BATH_KEYS,
        "cold": _CUSTOM_BATH_KEYS,
    }
    for i in range(1, n_swaps + 1):
        allowed[f"swap_{i}"] = {"u", "d", "g"}
    _check_known_keys(parser, allowed)
    for name in ("engine", "hot", "cold"):
        if name not in sections:
            raise ConfigError(f"missing section [{name}] in spec file {path}")
    if n_swaps == 0:
        raise ConfigError(f"spec file {path} defines no [swap_1] section")

    try:
        catalyst_dim = int(parser["engine"].get("catalyst_dim", "1"))
    except ValueError:
        raise ConfigError("key 'catalyst_dim' is not an integer") from None

    def bath(section_name: str) -> BathParams:
        section = parser[section_name]
        for key in ("beta", "omega"):
            _require(section, key)
        beta = _get_float(section, "beta")
        omega = _get_float(section, "omega")
        has_tau = "tau_eq" in section
        has_gamma = "gamma_minus" in section
        if has_tau == has_gamma:
            raise ConfigError(
                f"section [{section_name}] needs exactly one of 'tau_eq' or "
                f"'gamma_minus'"
            )
        try:
            if has_tau:
                return BathParams.from_relaxation_time(
                    beta, omega, _get_float(section, "tau_eq")
                )
            return BathParams.from_damping(
                beta, omega, _get_float(section, "gamma_minus")
            )
        except ValueError as exc:
            raise ConfigError(f"section [{section_name}]: {exc}") from None

    hot = bath("hot")
    cold = bath("cold")
    swaps = []
    for i in range(1, n_swaps + 1):
        section = parser[f"swap_{i}"]
        for key in ("u", "d", "g"):
            _require(section, key)
        try:
            u = int(section["u"])
            d = int(section["d"])
        except ValueError:
            raise ConfigError(f"section [swap_{i}]: 'u' and 'd' must be integers") from None
        try:
            swaps.append(SwapPair(u=u, d=d, g=_get_float(section, "g")))
        except ValueError as exc:
            raise ConfigError(f"section [swap_{i}]: {exc}") from None

    try:
        spec = EngineSpec(catalyst_dim=catalyst_dim, hot=hot, cold=cold, swaps=tuple(swaps))
    except ValueError as exc:
        raise ConfigError(f"spec file {path}: {exc}") from None
    problems = validate_spec(spec)
    if problems:
        raise ConfigError(f"spec file {path}: " + "; ".join(problems))
    return spec


# ---------------------------------------------------------------------------
# row assembly


def _family(kind: str, fixed: FixedParams, g_tau_eq: float) -> EngineFamily:
    beta_h = fixed.beta_h_omega_h / fixed.omega_h
    return EngineFamily(
        kind=kind,
        beta_h=beta_h,
        beta_c=beta_h * fixed.beta_c_over_beta_h,
        omega_h=fixed.omega_h,
        tau_eq=fixed.tau_eq,
        g=g_tau_eq / fixed.tau_eq,
    )


def _family_breakdown(kind: str, spec: EngineSpec) -> analytic.TauBreakdown:
    g = spec.swaps[0].g
    if kind == "otto":
        return analytic.otto_tau(spec.hot.big_gamma, spec.cold.big_gamma, g)
    constants = analytic.rate_constants(
        spec.hot.gamma_plus,
        spec.hot.gamma_minus,
        spec.cold.gamma_plus,
        spec.cold.gamma_minus,
    )
    return analytic.cat_tau(
        constants, g, spec.hot.gibbs_factor, spec.cold.gibbs_factor
    )


def build_row(
    engine_token: str,
    spec: EngineSpec,
    eta: float | None,
    mode: str,
) -> dict[str, object]:
    """One ResultRow: echoed inputs plus whatever ``mode`` computes.

    ``mode`` is ``"discrete"``, ``"continuous"``, or ``"both"``; fields
    the mode does not compute stay ``None`` and serialize as ``NA``.
    """
    row: dict[str, object] = dict.fromkeys(COLUMNS)
    row["engine"] = engine_token
    row["eta"] = eta
    row["beta_h"] = spec.hot.beta
    row["beta_c"] = spec.cold.beta
    row["omega_h"] = spec.hot.omega
    row["omega_c"] = spec.cold.omega
    row["tau_eq_h"] = spec.hot.tau_eq
    row["tau_eq_c"] = spec.cold.tau_eq
    couplings = {pair.g for pair in spec.swaps}
    row["g"] = couplings.pop() if len(couplings) == 1 else None

    if engine_token in FAMILY_KINDS:
        breakdown = _family_breakdown(engine_token, spec)
        row["zeta"] = breakdown.zeta
        row["kappa"] = breakdown.kappa

    cycle = None
    if mode in ("discrete", "both"):
        cycle = discrete.run_cycle(spec)
        row["delta_p_1"] = cycle.delta_p[0]
        if len(cycle.delta_p) > 1:
            row["delta_p_2"] = cycle.delta_p[1]
        row["q_hot"] = cycle.q_hot
        row["q_cold"] = cycle.q_cold
        row["work"] = cycle.work
        row["eta_discrete"] = cycle.efficiency
        row["clausius_discrete"] = cycle.clausius_margin
        row["catalyst_residual"] = cycle.catalyst_residual
        row["regime_discrete"] = cycle.regime

    report = None
    if mode in ("continuous", "both"):
        report = continuous.steady_state_report(spec)
        row["current_1"] = report.currents[0]
        if len(report.currents) > 1:
            row["current_2"] = report.currents[1]
        row["j_hot"] = report.j_hot
        row["j_cold"] = report.j_cold
        row["power"] = report.power
        row["eta_continuous"] = report.efficiency
        row["clausius_continuous"] = report.clausius_margin
        row["entropy_production"] = continuous.entropy_production_rate(
            spec, report.rho_ss
        )
        row["first_law_residual"] = report.first_law_residual
        row["int_vanish_hot"] = report.int_vanish_residuals[0]
        row["int_vanish_cold"] = report.int_vanish_residuals[1]
        row["catalysis_residual_max"] = max(
            abs(x) for x in report.catalysis_residuals
        )
        row["regime_continuous"] = report.regime
        if engine_token in FAMILY_KINDS and eta is not None:
            if report.efficiency is None or abs(report.efficiency - eta) > ETA_WIRING_TOL:
                raise CheckFailure(
                    f"emitted steady-state efficiency {report.efficiency!r} does "
                    f"not match the design efficiency {eta!r} of {engine_token}"
                )

    if mode == "both":
        bridge = equivalence_from_parts(spec, cycle, report)
        row["tau"] = bridge.tau
        row["tau_spread"] = bridge.tau_uniform_residual

    return row


def _format_cell(value: object) -> str:
    if value is None:
        return "NA"
    if isinstance(value, str):
        return value
    number = float(value)
    if math.isnan(number):
        raise CheckFailure("refusing to emit NaN; a computed quantity is invalid")
    return f"{number:.17g}"


def _write_csv(rows: list[dict[str, object]], columns: tuple[str, ...], output: str | None) -> None:
    def emit(handle) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row[name]) for name in columns])

    if output is None:
        emit(sys.stdout)
    else:
        with open(output, "w", encoding="utf-8", newline="") as handle:
            emit(handle)


# ---------------------------------------------------------------------------
# subcommands


def _point_rows(config: RunConfig, mode: str) -> list[dict[str, object]]:
    rows = []
    for token in config.engines:
        if token in FAMILY_KINDS:
            fixed = config.fixed
            family = _family(token, fixed, fixed.g_tau_eq)
            rows.append(build_row(token, family.spec_at(fixed.eta), fixed.eta, mode))
        else:
            rows.append(build_row(token, load_custom_spec(token), None, mode))
    return rows


def cmd_discrete(config: RunConfig, output: str | None = None) -> int:
    """One two-stroke cycle per configured engine."""
    _write_csv(_point_rows(config, "discrete"), config.columns, output)
    return 0


def cmd_continuous(config: RunConfig, output: str | None = None) -> int:
    """One steady-state solve per configured engine."""
    _write_csv(_point_rows(config, "continuous"), config.columns, output)
    return 0


def _sweep_values(axis: SweepAxis) -> list[float]:
    if axis.points == 1:
        return [axis.start]
    step = (axis.stop - axis.start) / (axis.points - 1)
    return [axis.start + i * step for i in range(axis.points)]


def cmd_sweep(config: RunConfig, output: str | None = None, threads: int = 0) -> int:
    """Both-picture rows over the swept parameter, deterministically ordered."""
    axis = config.sweep
    fixed = config.fixed
    tasks = [
        (value, token) for value in _sweep_values(axis) for token in config.engines
    ]

    def compute(task: tuple[float, str]) -> tuple[float, str, dict[str, object]]:
        value, token = task
        if axis.parameter == "eta":
            family = _family(token, fixed, fixed.g_tau_eq)
            eta = value
        else:
            family = _family(token, fixed, value)
            eta = fixed.eta
        return value, token, build_row(token, family.spec_at(eta), eta, "both")

    max_workers = threads if threads > 0 else (os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(compute, tasks))
    results.sort(key=lambda item: (item[0], item[1]))
    _write_csv([row for _, _, row in results], config.columns, output)
    return 0


def cmd_verify(seed: int, n_points: int, output: str | None = None) -> int:
    """Run the oracle suite; exit 0 only if every check passes."""
    if n_points < 1:
        raise ConfigError(f"--points must be >= 1, got {n_points}")
    results = verify_mod.run_suite(seed=seed, n_points=n_points)
    text = verify_mod.format_report(results, seed, n_points)
    if output is None:
        print(text)
    else:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ottocat",
        description=(
            "Two-stroke and autonomous quantum Otto machines with qubit "
            "catalysts: single runs, sweeps, and the self-audit suite."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("discrete", "run one two-stroke cycle per engine"),
        ("continuous", "solve one steady state per engine"),
        ("sweep", "sweep a parameter and emit both-picture rows"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--output", default=None, metavar="PATH")
        if name == "sweep":
            p.add_argument(
                "--threads",
                type=int,
                default=0,
                help="worker threads (0 = one per CPU)",
            )
    v = sub.add_parser("verify", help="run the oracle suite")
    v.add_argument("--seed", type=int, default=1234)
    v.add_argument("--points", type=int, default=100, metavar="N")
    v.add_argument("--output", default=None, metavar="PATH")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.seed, args.points, args.output)
        config = load_config(args.config, args.command)
        if args.command == "discrete":
            return cmd_discrete(config, args.output)
        if args.command == "continuous":
            return cmd_continuous(config, args.output)
        return cmd_sweep(config, args.output, args.threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
