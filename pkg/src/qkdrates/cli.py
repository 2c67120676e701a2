"""Command-line front end.

Subcommands: ``rate`` (single operating point), ``threshold`` (bit error
rate thresholds), ``sweep`` (distance sweep CSV), ``simulate`` (Monte Carlo
vs analytic comparison), ``decoy`` (decoy-state recovery check).

Configuration is an INI file with sections ``[protocol]``, ``[source]``,
``[link]``, ``[detector]``, ``[simulation]``; every key is optional and CLI
flags override file values.  Exit codes: 0 success, 1 check or inversion
failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import io
import math
import sys
from dataclasses import dataclass

from .keyrate import (
    rate_alice,
    rate_bob,
    rate_gllp,
    rate_improved,
    rate_shor_preskill,
    threshold_bit_error,
)
from .protocols import get_protocol
from .scenario import (
    DecoyInversionError,
    DetectorModel,
    LinkModel,
    Scenario,
    SourceModel,
    breakdown,
    distance_sweep,
    transmittance,
)
from .simulator import (
    EveKind,
    EveModel,
    compare_to_analytic,
    recover_single_photon_rates,
    run_simulation,
    simulate_decoy_run,
    tally_csv,
)

__all__ = ["RunConfig", "ConfigError", "load_config", "main"]

SWEEP_HEADER = "length_km,eta,p_c,p_sq,p_mq,p_dk,omega0,omega1,e_x,rate_old,rate_new"


class ConfigError(ValueError):
    """Invalid configuration value; message names the offending field."""


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters with figure-reproducing defaults."""

    protocol: str = "bb84"
    source_kind: str = "single-photon"
    mean_photon_number: float = 0.5
    mu_values: tuple[float, ...] = (0.1, 0.5)
    attenuation_db_per_km: float = 0.2
    length_km: float = 50.0
    length_min_km: float = 0.0
    length_max_km: float = 400.0
    length_step_km: float = 1.0
    e_x_sq: float = 0.01
    dark_count_prob: float = 1e-6
    analytic_dark_count_prob: float | None = None
    n_pulses: int = 1_000_000
    seed: int = 1
    eve: str = "none"

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        parser["protocol"] = {"name": self.protocol}
        parser["source"] = {
            "kind": self.source_kind,
            "mean_photon_number": repr(self.mean_photon_number),
            "mu_values": ", ".join(repr(m) for m in self.mu_values),
        }
        parser["link"] = {
            "attenuation_db_per_km": repr(self.attenuation_db_per_km),
            "length_km": repr(self.length_km),
            "length_min_km": repr(self.length_min_km),
            "length_max_km": repr(self.length_max_km),
            "length_step_km": repr(self.length_step_km),
            "e_x_sq": repr(self.e_x_sq),
        }
        detector = {"dark_count_prob": repr(self.dark_count_prob)}
        if self.analytic_dark_count_prob is not None:
            detector["analytic_dark_count_prob"] = repr(self.analytic_dark_count_prob)
        parser["detector"] = detector
        parser["simulation"] = {
            "n_pulses": str(self.n_pulses),
            "seed": str(self.seed),
            "eve": self.eve,
        }
        buffer = io.StringIO()
        parser.write(buffer)
        return buffer.getvalue()


def _parse_mu_values(text: str) -> tuple[float, ...]:
    values = tuple(float(part) for part in text.split(",") if part.strip())
    if not values:
        raise ValueError("empty list")
    return values


_SCHEMA = {
    ("protocol", "name"): ("protocol", str),
    ("source", "kind"): ("source_kind", str),
    ("source", "mean_photon_number"): ("mean_photon_number", float),
    ("source", "mu_values"): ("mu_values", _parse_mu_values),
    ("link", "attenuation_db_per_km"): ("attenuation_db_per_km", float),
    ("link", "length_km"): ("length_km", float),
    ("link", "length_min_km"): ("length_min_km", float),
    ("link", "length_max_km"): ("length_max_km", float),
    ("link", "length_step_km"): ("length_step_km", float),
    ("link", "e_x_sq"): ("e_x_sq", float),
    ("detector", "dark_count_prob"): ("dark_count_prob", float),
    ("detector", "analytic_dark_count_prob"): ("analytic_dark_count_prob", float),
    ("simulation", "n_pulses"): ("n_pulses", int),
    ("simulation", "seed"): ("seed", int),
    ("simulation", "eve"): ("eve", str),
}


def load_config(source: str, from_path: bool = True) -> RunConfig:
    """Parse an INI config file (or literal text) into a RunConfig."""
    parser = configparser.ConfigParser()
    try:
        if from_path:
            with open(source, encoding="utf-8") as handle:
                parser.read_file(handle)
        else:
            parser.read_string(source)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}") from exc

    overrides = {}
    for section in parser.sections():
        for key, raw in parser[section].items():
            try:
                field, convert = _SCHEMA[(section, key)]
            except KeyError:
                raise ConfigError(f"unknown config key [{section}] {key}") from None
            try:
                overrides[field] = convert(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc
    return dataclasses.replace(RunConfig(), **overrides)


def config_scenario(
    cfg: RunConfig,
    length_km: float | None = None,
    dark_count_prob: float | None = None,
) -> Scenario:
    """Build and validate the Scenario described by a config."""
    try:
        protocol = get_protocol(cfg.protocol)
    except ValueError as exc:
        raise ConfigError(f"protocol: {exc}") from exc
    if cfg.source_kind == "single-photon":
        source = SourceModel.single_photon()
    elif cfg.source_kind == "poissonian":
        try:
            source = SourceModel.poissonian(cfg.mean_photon_number)
        except ValueError as exc:
            raise ConfigError(f"mean_photon_number: {exc}") from exc
    else:
        raise ConfigError(
            f"source kind must be 'single-photon' or 'poissonian', got {cfg.source_kind!r}"
        )
    try:
        link = LinkModel(
            attenuation_db_per_km=cfg.attenuation_db_per_km,
            length_km=cfg.length_km if length_km is None else length_km,
        )
        detector = DetectorModel(
            dark_count_prob=cfg.dark_count_prob
            if dark_count_prob is None
            else dark_count_prob,
            detector_count=protocol.detector_count,
        )
        return Scenario(
            protocol=protocol,
            source=source,
            link=link,
            detector=detector,
            e_x_sq=cfg.e_x_sq,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_eve(cfg: RunConfig) -> EveModel:
    try:
        return EveModel(kind=EveKind(cfg.eve))
    except ValueError:
        raise ConfigError(
            f"eve must be 'none' or 'intercept-resend', got {cfg.eve!r}"
        ) from None


def _fmt(value: float) -> str:
    """CSV number formatting: 10 significant digits."""
    return f"{value:.10g}"


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def cmd_rate(cfg: RunConfig, out_path: str | None) -> int:
    scn = config_scenario(cfg)
    b = breakdown(scn)
    spec = scn.protocol
    lines = [
        f"protocol        {spec.name}",
        f"source          {cfg.source_kind}",
        f"length_km       {cfg.length_km:.4g}",
        f"eta             {transmittance(scn.link):.4g}",
        f"p_c             {b.p_c:.4g}",
        f"p_sq            {b.p_sq:.4g}",
        f"p_mq            {b.p_mq:.4g}",
        f"p_dk            {b.p_dk:.4g}",
        f"omega0          {b.omega0:.4g}",
        f"omega1          {b.omega1:.4g}",
        f"e_x             {b.e_x:.4g}",
        f"e_x_sq          {b.e_x_sq:.4g}",
        f"rate_shor_preskill {rate_shor_preskill(b.p_c, b.e_x, spec):.4g}",
        f"rate_gllp          {rate_gllp(b, spec):.4g}",
        f"rate_bob           {rate_bob(b, spec):.4g}",
        f"rate_alice         {rate_alice(b, spec):.4g}",
        f"rate_improved      {rate_improved(b, spec):.4g}",
    ]
    _emit("\n".join(lines) + "\n", out_path)
    return 0


def cmd_threshold(cfg: RunConfig, values: list[float], out_path: str | None) -> int:
    try:
        spec = get_protocol(cfg.protocol)
    except ValueError as exc:
        raise ConfigError(f"protocol: {exc}") from exc
    lines = ["protocol,e_x_sq,threshold"]
    for e_x_sq in values:
        try:
            threshold = threshold_bit_error(spec, e_x_sq)
        except ValueError as exc:
            raise ConfigError(f"e_x_sq: {exc}") from exc
        rendered = "none" if threshold is None else _fmt(threshold)
        lines.append(f"{spec.name},{_fmt(e_x_sq)},{rendered}")
    _emit("\n".join(lines) + "\n", out_path)
    return 0


def cmd_sweep(cfg: RunConfig, out_path: str | None) -> int:
    scn = config_scenario(cfg)
    try:
        rows = distance_sweep(
            scn, cfg.length_min_km, cfg.length_max_km, cfg.length_step_km
        )
    except ValueError as exc:
        raise ConfigError(f"length range: {exc}") from exc
    lines = [SWEEP_HEADER]
    for row in rows:
        b = row.breakdown
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    row.length_km,
                    row.eta,
                    b.p_c,
                    b.p_sq,
                    b.p_mq,
                    b.p_dk,
                    b.omega0,
                    b.omega1,
                    b.e_x,
                    row.rate_old,
                    row.rate_new,
                )
            )
        )
    _emit("\n".join(lines) + "\n", out_path)
    return 0


def cmd_simulate(
    cfg: RunConfig,
    out_path: str | None,
    workers: int = 1,
    tally_out: str | None = None,
) -> int:
    scn = config_scenario(cfg)
    analytic_scn = config_scenario(cfg, dark_count_prob=cfg.analytic_dark_count_prob)
    eve = config_eve(cfg)
    stats = run_simulation(
        scn, eve, n_pulses=cfg.n_pulses, seed=cfg.seed, workers=workers
    )
    if tally_out is not None:
        _emit(tally_csv(stats), tally_out)
    comparisons = compare_to_analytic(stats, analytic_scn)
    lines = [
        f"pulses {cfg.n_pulses}  seed {cfg.seed}  protocol {scn.protocol.name}",
        f"{'field':8} {'empirical':>14} {'analytic':>14} {'z':>10}",
    ]
    for row in comparisons:
        z_text = "inf" if math.isinf(row.z) else f"{row.z:.4g}"
        lines.append(
            f"{row.name:8} {row.empirical:14.6e} {row.analytic:14.6e} {z_text:>10}"
        )
    ok = all(abs(row.z) <= 3.0 for row in comparisons)
    lines.append("agreement: " + ("PASS (all |z| <= 3)" if ok else "FAIL (|z| > 3)"))
    _emit("\n".join(lines) + "\n", out_path)
    return 0 if ok else 1


def cmd_decoy(cfg: RunConfig, out_path: str | None, workers: int = 1) -> int:
    if cfg.source_kind != "poissonian":
        cfg = dataclasses.replace(cfg, source_kind="poissonian")
    scn = config_scenario(cfg)
    mu_values = list(cfg.mu_values)
    if cfg.mean_photon_number not in mu_values:
        mu_values.append(cfg.mean_photon_number)
    runs = simulate_decoy_run(
        scn, mu_values, n_pulses=cfg.n_pulses, seed=cfg.seed, workers=workers
    )
    signal_stats = runs[cfg.mean_photon_number]
    try:
        recovery = recover_single_photon_rates(signal_stats, scn)
    except DecoyInversionError as exc:
        _emit(f"decoy inversion failed: {exc}\n", out_path)
        return 1
    truth = breakdown(scn)
    lines = [
        f"decoy run: mu values {', '.join(_fmt(m) for m in mu_values)}  "
        f"signal mu {_fmt(cfg.mean_photon_number)}  pulses {cfg.n_pulses}",
        f"{'quantity':8} {'recovered':>14} {'stderr':>12} {'true':>14}",
        f"{'p_sq':8} {recovery.p_sq:14.6e} {recovery.p_sq_se:12.4e} {truth.p_sq:14.6e}",
        f"{'e_x_sq':8} {recovery.e_x_sq:14.6e} {recovery.e_x_sq_se:12.4e} "
        f"{truth.e_x_sq:14.6e}",
    ]
    _emit("\n".join(lines) + "\n", out_path)
    return 0


def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--protocol", help="bb84 | six-state | pbc00")
    parser.add_argument("--source-kind", help="single-photon | poissonian")
    parser.add_argument("--mean-photon-number", type=float)
    parser.add_argument("--attenuation-db-per-km", type=float)
    parser.add_argument("--length-km", type=float)
    parser.add_argument("--e-x-sq", type=float)
    parser.add_argument("--dark-count-prob", type=float)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file path")
    common.add_argument("--seed", type=int, help="simulation seed")
    common.add_argument("--out", help="write output to file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="qkdrates",
        description="Key generation rates, thresholds, and Monte Carlo checks "
        "for BB84, six-state, and PBC00.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_rate = sub.add_parser("rate", parents=[common], help="rates at one length")
    _add_scenario_flags(p_rate)

    p_thr = sub.add_parser("threshold", parents=[common], help="error thresholds")
    p_thr.add_argument("--protocol", help="bb84 | six-state | pbc00")
    p_thr.add_argument(
        "e_x_sq_values",
        nargs="*",
        type=float,
        default=[0.0, 0.01, 0.1],
        help="intrinsic bit error rates (default: 0 0.01 0.1)",
    )

    p_sweep = sub.add_parser("sweep", parents=[common], help="distance sweep CSV")
    _add_scenario_flags(p_sweep)
    p_sweep.add_argument("--length-min-km", type=float)
    p_sweep.add_argument("--length-max-km", type=float)
    p_sweep.add_argument("--length-step-km", type=float)

    p_sim = sub.add_parser(
        "simulate", parents=[common], help="Monte Carlo vs analytic check"
    )
    _add_scenario_flags(p_sim)
    p_sim.add_argument("--n-pulses", type=int)
    p_sim.add_argument("--eve", help="none | intercept-resend")
    p_sim.add_argument(
        "--analytic-dark-count-prob",
        type=float,
        help="compare against an analytic model with a different dark count "
        "probability (diagnostic)",
    )
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument(
        "--tally-out", help="also write raw per-category tallies as CSV"
    )

    p_decoy = sub.add_parser(
        "decoy", parents=[common], help="decoy-state recovery check"
    )
    _add_scenario_flags(p_decoy)
    p_decoy.add_argument("--n-pulses", type=int)
    p_decoy.add_argument(
        "--mu-values", help="comma-separated decoy mean photon numbers"
    )
    p_decoy.add_argument("--workers", type=int, default=1)

    return parser


_FLAG_FIELDS = (
    "protocol",
    "source_kind",
    "mean_photon_number",
    "attenuation_db_per_km",
    "length_km",
    "e_x_sq",
    "dark_count_prob",
    "length_min_km",
    "length_max_km",
    "length_step_km",
    "n_pulses",
    "seed",
    "eve",
    "analytic_dark_count_prob",
)


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    for field in _FLAG_FIELDS:
        value = getattr(args, field, None)
        if value is not None:
            overrides[field] = value
    if getattr(args, "mu_values", None) is not None:
        try:
            overrides["mu_values"] = _parse_mu_values(args.mu_values)
        except ValueError:
            raise ConfigError(f"bad --mu-values: {args.mu_values!r}") from None
    return dataclasses.replace(cfg, **overrides)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.command == "rate":
            return cmd_rate(cfg, args.out)
        if args.command == "threshold":
            return cmd_threshold(cfg, args.e_x_sq_values, args.out)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out)
        if args.command == "simulate":
            return cmd_simulate(
                cfg, args.out, workers=args.workers, tally_out=args.tally_out
            )
        if args.command == "decoy":
            return cmd_decoy(cfg, args.out, workers=args.workers)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
