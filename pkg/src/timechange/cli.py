"""Command-line front end.

Usage::

    timechange --config run.yaml [--seed N] [--out DIR] [--quiet]

Exit codes: 0 success (or PASS), 1 validation FAIL, 2 config error, 3 numeric error.
The output directory is, in order of precedence, ``--out``, the
``TIMECHANGE_OUT_DIR`` environment variable, then ``output.path`` in the config.
"""
import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import generator, pricing, validation
from .config import ConfigError, _num, _num_list, load_config
from .errors import TimeChangeError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
OUT_ENV = "TIMECHANGE_OUT_DIR"


def _fmt(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v) + 0.0, ".17g")


def _table(header, rows, fmt):
    if fmt == "json":
        return json.dumps([dict(zip(header, (float(v) for v in r))) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _simulate(cfg):
    n = int(_num(cfg.numeric, "n_paths", 100, positive=True))
    grid = _num_list(cfg.numeric, "grid", [0.0, 1.0])
    sim = cfg.model.simulate(grid, n, cfg.seed, cfg.eps)
    rows = [(p, t, sim.z[p, j], sim.y[p, j]) for p in range(n) for j, t in enumerate(grid)]
    return _table(["path_id", "t", "Z", "Y"], rows, cfg.output_format), EXIT_OK, f"{n} paths"


def _charfn(cfg):
    t = _num(cfg.numeric, "t", 1.0, positive=True)
    u = _num_list(cfg.numeric, "u", [1.0])
    curve = np.atleast_1d(np.asarray(cfg.model.char_exponent_curve(t, u), dtype=complex))
    ex = np.exp(curve)
    rows = [(ui, c.real, c.imag, e.real, e.imag) for ui, c, e in zip(u, curve, ex)]
    header = ["u", "re_curve", "im_curve", "re_cf", "im_cf"]
    return _table(header, rows, cfg.output_format), EXIT_OK, f"{len(u)} points at t={t:g}"


def _triplet(cfg):
    s_grid = _num_list(cfg.numeric, "s", [1.0])
    rows = []
    for s in s_grid:
        tr = cfg.model.local_triplet(float(s))
        rows.append((s, tr.drift, tr.variance, tr.jumps.mass_outside()))
    return (_table(["s", "drift", "variance", "jump_mass_above_1"], rows, cfg.output_format),
            EXIT_OK, f"{len(rows)} times")


def _generator_check(cfg):
    probe = cfg.numeric.get("probe", "gaussian")
    if probe not in generator.PROBES:
        raise ConfigError(f"unknown probe '{probe}'")
    tf = generator.PROBES[probe]()
    rep = generator.convergence_report(
        cfg.model, tf, _num(cfg.numeric, "s", 1.0, nonneg=True), _num(cfg.numeric, "x", 0.0),
        _num_list(cfg.numeric, "t_list", [0.1, 0.05, 0.025]),
        int(_num(cfg.numeric, "n_paths", 10 ** 5, positive=True)), cfg.seed, cfg.eps)
    text = rep.to_csv() if cfg.output_format == "csv" else rep.to_json() + "\n"
    return text, EXIT_OK if rep.passed else EXIT_FAIL, rep.to_text()


def _validate(cfg):
    t = _num(cfg.numeric, "t", 1.0, positive=True)
    t0 = cfg.model.clock.domain_start
    times = _num_list(cfg.numeric, "times", [t0, t0 + 0.5 * t, t0 + t])
    rep = validation.run_suite(
        cfg.model, t, _num_list(cfg.numeric, "u", [-2.0, -1.0, 1.0, 2.0]), times,
        int(_num(cfg.numeric, "n_paths", 10 ** 4, positive=True)), cfg.seed, cfg.eps)
    return rep.to_json() + "\n", EXIT_OK if rep.passed else EXIT_FAIL, rep.to_text()


def _price(cfg):
    m = cfg.market
    market = pricing.MarketSpec(_num(m, "spot", positive=True), _num(m, "rate", 0.0),
                                _num(m, "maturity", positive=True),
                                tuple(_num_list(m, "strikes")))
    kind = m.get("kind", "call")
    if kind not in ("call", "put"):
        raise ConfigError("'market.kind' must be 'call' or 'put'")
    model = pricing.RiskNeutralModel.from_timechanged(cfg.model, market)
    prices = pricing.cos_price(model, kind=kind, L=_num(cfg.numeric, "L", 10.0, positive=True),
                               M=int(_num(cfg.numeric, "M", 1024, positive=True)))
    rows = list(zip(market.strikes, prices))
    return _table(["strike", "price"], rows, cfg.output_format), EXIT_OK, f"{len(rows)} strikes"


ACTIONS = {"simulate": _simulate, "charfn": _charfn, "triplet": _triplet,
           "generator-check": _generator_check, "validate": _validate, "price": _price}


def build_parser():
    p = argparse.ArgumentParser(prog="timechange",
                                description="Lévy processes on additive clocks.")
    p.add_argument("--config", required=True, help="YAML run configuration")
    p.add_argument("--seed", type=int, default=None, help="override numeric.seed")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--quiet", action="store_true", help="no summary on stdout")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text, code, summary = ACTIONS[cfg.action](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TimeChangeError, ArithmeticError, ValueError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out_dir = args.out or os.environ.get(OUT_ENV) or cfg.output_path
    os.makedirs(out_dir, exist_ok=True)
    ext = "json" if cfg.action == "validate" else cfg.output_format
    path = os.path.join(out_dir, f"{cfg.action}.{ext}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    if not args.quiet:
        print(summary)
        print(f"wrote {path}")
    return code


if __name__ == "__main__":
    sys.exit(main())
