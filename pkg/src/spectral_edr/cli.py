"""Command-line front end: figure data, verdicts and the stochastic cross-check.

Exit codes: 0 success/PASS, 1 inequality or validation failure, 2 config
error, 3 I/O error.  Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import edr, filters, model, oracle, sweep

log = logging.getLogger("spectral_edr")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

SPECTRA_HEADER = ["x", "s_eps_t", "s_eta_t", "branciard_lhs", "heisenberg_lhs", "ozawa_lhs", "chi_t", "rhs"]
BOUNDARY_HEADER = ["s_eps_t", "heisenberg", "ozawa", "branciard"]

DEFAULT_RHO = 0.3
DEFAULT_X_GRID = {"min": 0.1, "max": 3.0, "count": 500, "spacing": "linear"}
DEFAULT_BOUNDARY_GRID = {"min": 1e-3, "max": 10.0, "count": 400, "spacing": "log"}
FIG2_SIGMAS = [{"times_opt": 0.2}, "auto", {"times_opt": 20.0}]


class ConfigError(Exception):
    pass


def load_schema():
    return json.loads(resources.files(__package__).joinpath("config_schema.json").read_text())


@dataclass
class RunConfig:
    """Validated configuration with every default filled in."""

    rho: float
    sigma_specs: list
    x_grid: dict
    raw: dict = field(default_factory=dict)
    physical: model.PhysicalParams | None = None

    @property
    def sigma_opt(self) -> float:
        return sweep.closed_form_sigma_opt(self.rho)

    def resolve_sigma(self, spec) -> float:
        if spec == "auto":
            return self.sigma_opt
        if isinstance(spec, dict):
            return spec["times_opt"] * self.sigma_opt
        return float(spec)

    @property
    def sigmas(self) -> list:
        return [self.resolve_sigma(s) for s in self.sigma_specs]

    def grid(self, spec=None):
        return make_grid(spec or self.x_grid)

    def block(self, name) -> dict:
        return self.raw.get(name, {})

    def metadata(self) -> dict:
        meta = {
            "rho": self.rho,
            "sigma_opt_closed_form": self.sigma_opt,
            "sigmas": [
                {"spec": s, "sigma": self.resolve_sigma(s)} for s in self.sigma_specs
            ],
        }
        if self.physical is not None:
            meta["physical"] = asdict(self.physical)
            meta["implied"] = {"rho": self.physical.rho, "sigma": self.physical.sigma}
        return meta


def make_grid(spec):
    lo, hi, count = spec["min"], spec["max"], spec["count"]
    if count < 1:
        raise ConfigError("grid must contain at least one point")
    if count > 1 and not lo < hi:
        raise ConfigError("grid min must be smaller than max")
    if spec.get("spacing", "linear") == "log":
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def parse_config(raw: dict, default_sigmas=("auto",)) -> RunConfig:
    try:
        jsonschema.validate(raw, load_schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from None

    physical = None
    if "physical" in raw:
        if "rho" in raw or any(k in raw for k in ("sigma", "sigmas")):
            raise ConfigError("give either 'physical' or 'rho'/'sigma', not both")
        try:
            physical = model.PhysicalParams(**raw["physical"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        rho, sigma_specs = physical.rho, [physical.sigma]
    else:
        rho = raw.get("rho", DEFAULT_RHO)
        if "sigmas" in raw:
            sigma_specs = list(raw["sigmas"])
        elif "sigma" in raw:
            sigma_specs = [raw["sigma"]]
        else:
            sigma_specs = list(default_sigmas)

    grid = dict(DEFAULT_X_GRID, **raw.get("x_grid", {}))
    cfg = RunConfig(rho=rho, sigma_specs=sigma_specs, x_grid=grid, raw=raw, physical=physical)
    cfg.grid()  # surfaces grid errors before any computation
    return cfg


def fmt(value) -> str:
    """Shortest repr that round-trips; empty for NaN (undefined cells)."""
    value = float(value)
    return "" if math.isnan(value) else repr(value)


def write_csv(stream, header, rows):
    writer = csv.writer(stream, delimiter=",", lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def spectra_rows(rho, sigma, grid):
    result = sweep.frequency_sweep(rho, sigma, grid)
    for r in result.rows:
        yield (
            r.x,
            r.spectra.s_eps_t,
            r.spectra.s_eta_t,
            r.branciard.lhs,
            r.heisenberg.lhs,
            r.ozawa.lhs,
            r.spectra.chi_t,
            r.branciard.rhs,
        )


def _rows_as_json(header, rows):
    return [dict(zip(header, (None if math.isnan(float(v)) else float(v) for v in row))) for row in rows]


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _emit_report(report, out):
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        _write_text(out, text + "\n")
    print(text)


def cmd_spectra(cfg: RunConfig, out, fmt_name):
    out = out or "spectra"
    os.makedirs(out, exist_ok=True)
    grid = cfg.grid()
    meta = cfg.metadata()
    meta["x_grid"] = cfg.x_grid
    meta["regime_thresholds"] = {
        "error_dominated": f"s_eps_t > {sweep.ERROR_DOMINATED_RATIO} s_eta_t at x=1",
        "back_action_dominated": f"s_eps_t < {sweep.BACKACTION_DOMINATED_RATIO} s_eta_t at x=1",
        "note": "presentation conventions, not physical thresholds",
    }
    files = []
    for i, entry in enumerate(meta["sigmas"]):
        rows = list(spectra_rows(cfg.rho, entry["sigma"], grid))
        name = f"spectra_sigma{i}.{fmt_name}"
        path = os.path.join(out, name)
        if fmt_name == "csv":
            buf = io.StringIO()
            write_csv(buf, SPECTRA_HEADER, rows)
            _write_text(path, buf.getvalue())
        else:
            _write_text(path, json.dumps({"rows": _rows_as_json(SPECTRA_HEADER, rows)}, indent=1) + "\n")
        entry["file"] = name
        entry["regime"] = sweep.classify_regime(cfg.rho, entry["sigma"])
        files.append(path)
    _write_text(os.path.join(out, "metadata.json"), json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(json.dumps({"files": files, **meta}, indent=2, sort_keys=True))
    return EXIT_OK


def boundary_rows(grid):
    cols = [edr.boundary_values(kind, grid) for kind in ("heisenberg", "ozawa", "branciard")]
    return [(s, *(c[i] for c in cols)) for i, s in enumerate(grid)]


def cmd_boundaries(cfg: RunConfig, out, fmt_name):
    spec = dict(DEFAULT_BOUNDARY_GRID, **cfg.block("boundaries").get("s_eps_t_grid", {}))
    rows = boundary_rows(make_grid(spec))
    if fmt_name == "csv":
        buf = io.StringIO()
        write_csv(buf, BOUNDARY_HEADER, rows)
        text = buf.getvalue()
    else:
        text = json.dumps({"chi_t": 1.0, "rows": _rows_as_json(BOUNDARY_HEADER, rows)}, indent=1) + "\n"
    if out:
        _write_text(out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_optimize(cfg: RunConfig, out, fmt_name):
    opts = cfg.block("optimize")
    x_eval = opts.get("x_eval", 1.0)
    opt = sweep.optimize_sigma(
        cfg.rho,
        x_eval=x_eval,
        bracket=tuple(opts.get("bracket", (1e-4, 1.0))),
        tol=opts.get("tol", 1e-10),
        objective=opts.get("objective", "resonance"),
        grid=cfg.grid(),
    )
    d = float(model.pole_product(x_eval, cfg.rho))
    regime_specs = opts.get("regime_sigmas", FIG2_SIGMAS)
    regimes = []
    for spec in regime_specs:
        s = cfg.resolve_sigma(spec)
        ns = model.normalized_point(model.DimensionlessParams(1.0, cfg.rho, s))
        regimes.append(
            {"spec": spec, "sigma": s, "ratio": ns.s_eps_t / ns.s_eta_t, "regime": sweep.classify_regime(cfg.rho, s)}
        )
    report = {
        "rho": cfg.rho,
        "x_eval": x_eval,
        "objective": opt.objective,
        "sigma_opt_numeric": opt.sigma_opt_numeric,
        "sigma_opt_closed_form": opt.sigma_opt_closed_form,
        "sigma_rel_err": abs(opt.sigma_opt_numeric / opt.sigma_opt_closed_form - 1.0),
        "min_lhs": opt.min_lhs,
        # A/sigma + B*sigma at x_eval has minimum sqrt(2 d)/(rho x)
        "min_lhs_closed_form": math.sqrt(2.0 * d) / (cfg.rho * x_eval),
        "floor": math.sqrt(2.0),
        "floor_gap": opt.floor_gap,
        "regimes": regimes,
        "regime_thresholds": {"error_dominated": sweep.ERROR_DOMINATED_RATIO,
                              "back_action_dominated": sweep.BACKACTION_DOMINATED_RATIO},
    }
    if cfg.physical is not None:
        report["implied"] = {"rho": cfg.physical.rho, "sigma": cfg.physical.sigma}
    _emit_report(report, out)
    return EXIT_OK


def _verdict_row(x, v: edr.InequalityVerdict):
    return {"x": x, "kind": v.kind, "lhs": v.lhs, "rhs": v.rhs, "margin": v.margin}


def check_sigma(rho, sigma, grid):
    result = sweep.frequency_sweep(rho, sigma, grid)
    failures = {"ozawa": [], "branciard": [], "robertson": [], "ozawa_unnormalized": [], "branciard_unnormalized": []}
    hur = []
    min_b = (math.inf, None)
    for row in result.rows:
        for kind in ("ozawa", "branciard", "robertson"):
            v = getattr(row, kind)
            if not v.satisfied:
                failures[kind].append(_verdict_row(row.x, v))
        sp = model.error_disturbance_spectra(model.DimensionlessParams(row.x, rho, sigma))
        for kind, fn in (("ozawa_unnormalized", edr.spectral_ozawa_unnormalized),
                         ("branciard_unnormalized", edr.spectral_branciard_unnormalized)):
            v = fn(sp)
            if not v.satisfied:
                failures[kind].append(_verdict_row(row.x, v))
        if not row.heisenberg.satisfied:
            hur.append(row.x)
        if row.branciard.margin < min_b[0]:
            min_b = (row.branciard.margin, row.x)
    probe = model.probe_spectra(sigma)
    bragg = edr.braginsky_check(probe[0], probe[1], probe[2], chi=-1.0)
    if not bragg.satisfied:
        failures["braginsky"] = [_verdict_row(None, bragg)]
    return {
        "sigma": sigma,
        "n_points": len(result.rows),
        "failures": {k: v for k, v in failures.items() if v},
        "heisenberg_violations": {
            "count": len(hur),
            "x_min": min(hur) if hur else None,
            "x_max": max(hur) if hur else None,
            "bins": hur,
        },
        "min_branciard_margin": {"margin": min_b[0], "x": min_b[1]},
        "braginsky_margin": bragg.margin,
        "passed": not any(failures.values()),
    }


def check_injected(entry):
    ns = model.NormalizedSpectra(entry["s_eps_t"], entry["s_eta_t"], entry["chi_t"])
    rows = []
    for kind in ("ozawa", "branciard", "robertson"):
        try:
            v = edr.VERDICTS[kind](ns)
        except edr.RobertsonViolation as exc:
            rows.append({"x": entry.get("x"), "kind": kind, "error": str(exc)})
            continue
        if not v.satisfied:
            rows.append(_verdict_row(entry.get("x"), v))
    return {"point": entry, "failures": rows, "passed": not rows}


def cmd_check(cfg: RunConfig, out, fmt_name):
    grid = cfg.grid()
    block = cfg.block("check")
    filt = None
    if "filter" in block:
        try:
            filt = filters.FilterSpec(**block["filter"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    per_sigma = [check_sigma(cfg.rho, s, grid) for s in cfg.sigmas]
    injected = [check_injected(e) for e in block.get("inject", [])]
    report = {**cfg.metadata(), "results": per_sigma, "injected": injected}
    if filt is not None:
        fv = [filters.filtered_ozawa(filt, cfg.rho, s) for s in cfg.sigmas]
        report["filtered_ozawa"] = [
            {"sigma": s, "lhs": v.lhs, "rhs": v.rhs, "margin": v.margin, "satisfied": v.satisfied}
            for s, v in zip(cfg.sigmas, fv)
        ]
    passed = (
        all(r["passed"] for r in per_sigma)
        and all(r["passed"] for r in injected)
        and all(r["satisfied"] for r in report.get("filtered_ozawa", []))
    )
    report["passed"] = passed
    _emit_report(report, out)
    return EXIT_OK if passed else EXIT_FAIL


def simulation_config(block, seed_override=None) -> oracle.SimulationConfig:
    welch = oracle.WelchConfig(**block.get("welch", {}))
    kwargs = {k: block[k] for k in ("dt", "n_samples", "n_realizations", "seed", "edge_discard", "workers") if k in block}
    if seed_override is not None:
        kwargs["seed"] = seed_override
    return oracle.SimulationConfig(welch=welch, **kwargs)


def _dump_series(directory, rho, sigma, config, s_f0q0, tag):
    os.makedirs(directory, exist_ok=True)
    f0, q0 = oracle.probe_series(rho, sigma, config, config.rng(0), s_f0q0)
    n_ts, d_ts = oracle.chain_response(f0, q0, rho)
    for name, ts in (("f0", f0), ("q0", q0), ("n", n_ts), ("d", d_ts)):
        oracle.write_series(os.path.join(directory, f"{tag}_{name}.f64"), ts)


def cmd_oracle(cfg: RunConfig, out, fmt_name, seed=None):
    block = cfg.block("oracle")
    try:
        config = simulation_config(block, seed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    band = tuple(block.get("band", (0.5, 1.5)))
    s_f0q0 = block.get("s_f0q0", 0.0)
    reports = []
    for i, sigma in enumerate(cfg.sigmas):
        log.info("oracle run rho=%g sigma=%g seed=%d", cfg.rho, sigma, config.seed)
        try:
            r = oracle.cross_validate(cfg.rho, sigma, band=band, config=config, s_f0q0=s_f0q0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        reports.append(r.as_dict())
        if "dump" in block:
            _dump_series(block["dump"], cfg.rho, sigma, config, s_f0q0, f"sigma{i}")
    passed = all(r["passed"] for r in reports)
    report = {
        **cfg.metadata(),
        "seed": config.seed,
        "config": asdict(config),
        "results": reports,
        "low_confidence": any(r["low_confidence"] for r in reports),
        "passed": passed,
    }
    _emit_report(report, out)
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {
    "spectra": (cmd_spectra, FIG2_SIGMAS, ("csv", "json")),
    "boundaries": (cmd_boundaries, ("auto",), ("csv", "json")),
    "optimize": (cmd_optimize, ("auto",), ("json",)),
    "check": (cmd_check, FIG2_SIGMAS, ("json",)),
    "oracle": (cmd_oracle, ("auto",), ("json",)),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="spectral-edr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output path (directory for 'spectra')")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed", type=int, help="RNG seed, overrides the config")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    fn, default_sigmas, formats = COMMANDS[args.command]

    raw = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            log.error("cannot read config: %s", exc)
            return EXIT_IO
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            log.error("config is not valid JSON: %s", exc)
            return EXIT_CONFIG
    try:
        cfg = parse_config(raw, default_sigmas)
        output = raw.get("output", {})
        fmt_name = args.format or output.get("format") or formats[0]
        if fmt_name not in formats:
            raise ConfigError(f"'{args.command}' emits {'/'.join(formats)}, not {fmt_name}")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        out = args.out or output.get("path")
        if args.command == "oracle":
            return fn(cfg, out, fmt_name, seed=args.seed)
        return fn(cfg, out, fmt_name)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (ValueError, sweep.BracketError) as exc:
        log.error("invalid parameters: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
