"""Command-line front end.

Subcommands: ``discriminant``, ``spectrum``, ``weyl``, ``verify``, ``toda``,
``onegap-check``. Exit codes: 0 success, 1 verification failure (or
unresolved spectrum), 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import bracket, onegap, spectrum, toda, weyl
from .dirac import monodromy_batch
from .errors import SpectralError
from .potential import Potential, make_plane_wave

SCHEMA = "v1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITES = ("rpb", "ah", "popd", "ffm", "field", "toda")


class ConfigError(Exception):
    pass


PRESETS = {
    "zero": lambda: Potential.zero(np.pi),
    "one-gap": lambda: make_plane_wave(0.5, 1, np.pi),
    "two-mode": lambda: Potential(np.pi, [-2, 1], [0.3, 0.4j]),
}


@dataclass
class RunConfig:
    """All tunables of a run; JSON config files and flags override these defaults."""

    potential: dict | str = "one-gap"
    grid: int = 512
    tol: float = 1e-10
    lambda_range: tuple = (-4.5, 4.5)
    samples: int | None = None
    resolution: int = 16
    taus: tuple = (20.0, 40.0, 80.0)  # in units of 1/l
    format: str = "json"
    seed: int = 0
    x: float = 0.0
    lam: tuple = (0.5, 0.3)
    sheet: str = "plus"
    x_samples: int = 33
    pairs: int = 4
    toda_sizes: tuple = (2, 3, 4, 6)
    toda_state: dict | None = None
    field_z: float = 0.5

    def validate(self):
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.grid < 64:
            raise ConfigError("grid must be at least 64")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if len(self.lambda_range) != 2 or self.lambda_range[1] < self.lambda_range[0]:
            raise ConfigError("lambda_range must be [a, b] with a <= b")
        if self.sheet not in ("plus", "minus"):
            raise ConfigError("sheet must be plus or minus")
        return self


def load_potential(spec) -> Potential:
    if isinstance(spec, dict):
        return Potential.from_dict(spec)
    if isinstance(spec, str):
        if spec in PRESETS:
            return PRESETS[spec]()
        text = spec.strip()
        if text.startswith("{"):
            return Potential.from_json(text)
        path = Path(spec)
        if path.exists():
            return Potential.from_json(path.read_text())
    raise ConfigError(f"cannot interpret potential {spec!r}")


def _parse_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def build_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file {path} not found")
        data = _parse_json(path.read_text(), str(path))
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
        cfg = replace(cfg, **{k: tuple(v) if isinstance(v, list) else v for k, v in data.items()})
    overrides = {
        "potential": args.potential, "format": args.format, "seed": args.seed, "tol": args.tol,
        "grid": args.grid,
    }
    for k in ("range", "samples", "lam", "sheet", "x", "pairs"):
        v = getattr(args, k, None)
        if v is not None:
            overrides["lambda_range" if k == "range" else k] = tuple(v) if isinstance(v, list) else v
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg.validate()


def _threads() -> int:
    raw = os.environ.get("SPECTRAL_BRACKET_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ConfigError("SPECTRAL_BRACKET_THREADS must be an integer") from exc


def _ordered_map(fn, items):
    """Parallel map with results in input order."""
    items = list(items)
    n = min(_threads(), len(items))
    if n <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _enc(v):
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        if not np.isfinite(v):
            return "inf"
        return {"re": v.real, "im": v.imag}
    if isinstance(v, np.ndarray):
        return _enc(v.tolist())
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, dict):
        return {str(k): _enc(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_enc(x) for x in v]
    return v


def dump_json(obj) -> str:
    return json.dumps(_enc({"schema": SCHEMA, **obj}), sort_keys=True, indent=2) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


# commands -------------------------------------------------------------------

def cmd_discriminant(cfg: RunConfig):
    pot = load_potential(cfg.potential)
    a, b = cfg.lambda_range
    if b <= a:
        lams = np.empty(0)
    else:
        n = cfg.samples or int(np.ceil((b - a) * pot.l / np.pi * cfg.resolution)) + 1
        lams = np.linspace(a, b, n)
    if len(lams):
        d, dd = spectrum.discriminant_batch(pot, lams, order=1, tol=cfg.tol)
    else:
        d = dd = np.empty(0, complex)
    header = ["lambda", "Delta_re", "Delta_im", "dDelta_re", "dDelta_im"]
    rows = [(float(x), float(v.real), float(v.imag), float(g.real), float(g.imag))
            for x, v, g in zip(lams, d, dd)]
    if cfg.format == "csv":
        return dump_csv(header, rows), EXIT_OK
    return dump_json({"command": "discriminant", "columns": header, "rows": rows}), EXIT_OK


def cmd_spectrum(cfg: RunConfig):
    pot = load_potential(cfg.potential)
    rep = spectrum.periodic_spectrum(pot, cfg.lambda_range, cfg.resolution, tol=cfg.tol)
    code = EXIT_FAIL if rep.unresolved else EXIT_OK
    if cfg.format == "csv":
        rows = [(p.lam, "periodic", p.classification, p.delta, p.d_delta) for p in rep.periodic_points]
        rows += [(p.lam, "antiperiodic", p.classification, p.delta, p.d_delta) for p in rep.antiperiodic_points]
        rows.sort(key=lambda r: r[0])
        return dump_csv(["lambda", "type", "classification", "Delta", "dDelta"], rows), code
    return dump_json({"command": "spectrum", "report": rep.to_dict()}), code


def cmd_weyl(cfg: RunConfig):
    pot = load_potential(cfg.potential)
    lam = complex(*cfg.lam)
    Q = spectrum.floquet_multiplier(pot, lam, cfg.sheet, tol=cfg.tol)
    xs = np.linspace(-pot.l, pot.l, cfg.x_samples)
    vals = _ordered_map(lambda x: weyl.weyl_function(pot, float(x), Q, tol=cfg.tol), xs)
    rows = []
    for x, v in zip(xs, vals):
        X = v.X if np.isfinite(v.X) else complex(np.inf, 0)
        rows.append((float(x), float(X.real), float(X.imag), float(v.A.real), float(v.A.imag),
                     float(v.consistency_residual)))
    header = ["x", "X_re", "X_im", "A_re", "A_im", "consistency_residual"]
    if cfg.format == "csv":
        return dump_csv(header, rows), EXIT_OK
    return dump_json({"command": "weyl", "lambda": lam, "w": Q.w, "sheet": cfg.sheet,
                      "columns": header, "rows": rows}), EXIT_OK


def _random_lambda(rng):
    im = rng.uniform(0.15, 1.0) * rng.choice([-1, 1])
    return complex(rng.uniform(-2.0, 2.0), im)


def _random_point(pot, rng, tol):
    while True:
        lam = _random_lambda(rng)
        try:
            return spectrum.floquet_multiplier(pot, lam, str(rng.choice(["plus", "minus"])), tol=tol)
        except SpectralError:
            continue


def _records(vs):
    return [v.to_dict() for v in vs]


def suite_rpb(pot, cfg, rng):
    pairs = [(_random_lambda(rng), _random_lambda(rng)) for _ in range(cfg.pairs)]
    res = _ordered_map(lambda ab: bracket.verify_rpb(pot, ab[0], ab[1], x=cfg.x, grid_size=cfg.grid,
                                                     tol=cfg.tol), pairs)
    return [r for vs in res for r in _records(vs)]


def suite_ah(pot, cfg, rng):
    pairs = [(_random_point(pot, rng, cfg.tol), _random_point(pot, rng, cfg.tol)) for _ in range(cfg.pairs)]

    def run(qp):
        q, p = qp
        return [bracket.verify_deformed_ah(pot, cfg.x, q, p, cfg.grid, cfg.tol),
                bracket.verify_A_bracket(pot, cfg.x, q, p, cfg.grid, cfg.tol)]

    out = [r for vs in _ordered_map(run, pairs) for r in _records(vs)]
    out.append(bracket.verify_ah_degeneration(pot, cfg.x, 10.0 / pot.l, cfg.grid, cfg.tol).to_dict())
    return out


def suite_popd(pot, cfg, rng):
    pairs = [(_random_point(pot, rng, cfg.tol), _random_point(pot, rng, cfg.tol)) for _ in range(cfg.pairs)]
    res = _ordered_map(lambda qp: bracket.verify_popd(pot, cfg.x, qp[0], qp[1], cfg.grid, cfg.tol), pairs)
    return [r for vs in res for r in _records(vs)]


def suite_ffm(pot, cfg, rng):
    rep = spectrum.periodic_spectrum(pot, cfg.lambda_range, cfg.resolution, tol=cfg.tol)
    if not rep.gaps:
        return []
    out = bracket.verify_canonical(pot, cfg.x, rep, cfg.grid, cfg.tol)
    return _records(out["checks"])


def suite_field(pot, cfg, rng):
    f = lambda y: np.exp(-4.0 * (y - cfg.field_z) ** 2)  # noqa: E731
    taus = [t / pot.l for t in cfg.taus]
    res = _ordered_map(lambda t: bracket.verify_field_brackets(pot, cfg.field_z, f, t, tol=cfg.tol), taus)
    out = []
    for r in res:
        out.append({"name": "field measurement", "tau": r.tau, **r.to_dict(),
                    "distance_to_i": abs(r.ratio_cross - 1j), "distance_to_2i": abs(r.ratio_cross - 2j),
                    "passed": True})
    for a, b in zip(res[:-1], res[1:]):
        if a.r_pp == 0 and b.r_pp == 0:
            ratio, ok = None, True
        else:
            ratio = abs(a.r_pp) / abs(b.r_pp)
            ok = abs(ratio - 2.0) <= 0.4
        out.append({"name": "field r_pp halving", "taus": [a.tau, b.tau], "ratio": ratio, "passed": ok})
    return out


def suite_toda(pot, cfg, rng):
    out = []
    states = [toda.TodaState.from_dict(cfg.toda_state)] if cfg.toda_state else [
        toda.TodaState.random(rng, n) for n in cfg.toda_sizes]
    for s in states:
        out.append(toda_report(s, rng))
    return out


def toda_report(s, rng, n_pairs: int = 3) -> dict:
    data = toda.toda_spectral_data(s)
    mah = []
    for _ in range(n_pairs):
        lam, mu = _random_lambda(rng), _random_lambda(rng)
        r = toda.verify_mah(s, lam, mu)
        mah.append({"lambda": lam, "mu": mu, **r})
    mu = _random_lambda(rng)
    cas = abs(toda.casimir_bracket(s, mu))
    flowed = toda.toda_flow_step(s, 0.01, 1000)
    drift = float(np.max(np.abs(toda.toda_spectral_data(flowed).eigenvalues - data.eigenvalues)))
    rho_sum = float(np.sum(data.residues))
    passed = (abs(rho_sum - 1) <= 1e-12 and all(m["residual"] <= 1e-5 for m in mah)
              and cas <= 1e-8 and drift <= 1e-8)
    return {"name": "toda", "state": s.to_dict(), "eigenvalues": data.eigenvalues, "residues": data.residues,
            "rho_sum_error": abs(rho_sum - 1), "mah": mah, "casimir": cas, "flow_spectrum_drift": drift,
            "passed": passed}


SUITE_FUNCS = {"rpb": suite_rpb, "ah": suite_ah, "popd": suite_popd, "ffm": suite_ffm,
               "field": suite_field, "toda": suite_toda}


def cmd_verify(cfg: RunConfig, which: str):
    pot = load_potential(cfg.potential)
    names = SUITES if which == "all" else (which,)
    report = {}
    ok = True
    for name in names:
        rng = np.random.default_rng([cfg.seed, SUITES.index(name)])
        try:
            recs = SUITE_FUNCS[name](pot, cfg, rng)
        except SpectralError as exc:
            recs = [{"name": name, "error": f"{type(exc).__name__}: {exc}", "passed": False}]
        report[name] = recs
        ok &= all(r.get("passed", False) for r in recs)
    code = EXIT_OK if ok else EXIT_FAIL
    return dump_json({"command": "verify", "which": which, "potential": pot.to_dict(),
                      "passed": ok, "suites": report}), code


def cmd_toda(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    recs = suite_toda(None, cfg, rng)
    ok = all(r["passed"] for r in recs)
    return dump_json({"command": "toda", "passed": ok, "states": recs}), EXIT_OK if ok else EXIT_FAIL


def onegap_check(pot: Potential, tol: float = 1e-10, n_grid: int = 16) -> dict:
    """Numeric modules against the plane-wave closed forms."""
    curve = onegap.OneGapCurve.from_potential(pot)
    l, a, eta = curve.l, curve.alpha, curve.eta
    checks = {}
    # discriminant at the gap centre and at off-axis points
    lams = np.array([a, a + 0.3 + 0.4j, a - 1.1 - 0.2j])
    d = spectrum.discriminant_batch(pot, lams, order=0, tol=tol)[0]
    checks["discriminant"] = float(np.max(np.abs(d - onegap.discriminant_closed(curve, lams))))
    rep = spectrum.periodic_spectrum(pot, (a - eta - 3.5, a + eta + 3.5), tol=tol)
    checks["gap"] = float(max(abs(rep.gaps[0][0] - (a - eta)), abs(rep.gaps[0][1] - (a + eta)))
                          if len(rep.gaps) == 1 else np.inf)
    # Weyl function on an (x, z) grid
    xs = np.linspace(-l, l, n_grid, endpoint=False)
    rng = np.random.default_rng(7)
    zs = a + (eta / 2) * (1.3 + rng.uniform(0, 1.5, n_grid)) * np.exp(1j * rng.uniform(0.2, 2.9, n_grid))
    zs[::2] = a + (eta ** 2 / 4) / (zs[::2] - a)  # half the points on sheet minus
    worst = 0.0
    for z in zs:
        lam = onegap.uniformize(curve, z)[0]
        w = onegap.multiplier_z(curve, z)
        Q = spectrum.CurvePoint(lam, w, -l)
        for x in xs:
            m = monodromy_batch(pot, [lam], x=float(x), tol=tol)[0][0]
            X = weyl.weyl_from_monodromy(m, Q, float(x)).X
            worst = max(worst, abs(X - onegap.closed_weyl(curve, float(x), z)) / (1 + abs(X)))
    checks["weyl_grid"] = worst
    # divisor motion against the phase law
    ys = np.linspace(-l, l, 9) + 0.137 * l  # keep the divisor off the gap edges
    dev = 0.0
    for y in ys:
        g = spectrum.divisor(pot, float(y), rep, tol=tol)[0]
        zg = onegap.z_from_curve_point(curve, g.lam.real, g.w) - a
        dev = max(dev, abs(np.angle(zg * np.exp(-1j * onegap.divisor_phase(curve, y)))),
                  abs(abs(zg) - eta / 2))
    checks["divisor_phase_law"] = dev
    limits = {"discriminant": 1e-7, "gap": 1e-8, "weyl_grid": 1e-7, "divisor_phase_law": 1e-6}
    return {k: {"value": v, "limit": limits[k], "passed": v <= limits[k]} for k, v in checks.items()}


def cmd_onegap_check(cfg: RunConfig):
    pot = load_potential(cfg.potential)
    if len(pot.modes) != 1:
        raise ConfigError("onegap-check needs a plane-wave potential")
    checks = onegap_check(pot, cfg.tol)
    ok = all(c["passed"] for c in checks.values())
    return dump_json({"command": "onegap-check", "potential": pot.to_dict(), "checks": checks,
                      "passed": ok}), EXIT_OK if ok else EXIT_FAIL


# argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--potential", help="preset name, inline JSON descriptor or path")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--grid", type=int)

    p = argparse.ArgumentParser(prog="spectral-bracket", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    d = sub.add_parser("discriminant", parents=[common], help="scan Delta along a real interval")
    d.add_argument("--range", type=float, nargs=2, metavar=("A", "B"))
    d.add_argument("--samples", type=int)
    s = sub.add_parser("spectrum", parents=[common], help="periodic/antiperiodic spectrum and gaps")
    s.add_argument("--range", type=float, nargs=2, metavar=("A", "B"))
    w = sub.add_parser("weyl", parents=[common], help="sample X(x, Q) along one period")
    w.add_argument("--lam", type=float, nargs=2, metavar=("RE", "IM"))
    w.add_argument("--sheet", choices=["plus", "minus"])
    v = sub.add_parser("verify", parents=[common], help="run bracket verification suites")
    v.add_argument("--which", choices=list(SUITES) + ["all"], default="all")
    v.add_argument("--range", type=float, nargs=2, metavar=("A", "B"))
    v.add_argument("--x", type=float)
    v.add_argument("--pairs", type=int)
    sub.add_parser("toda", parents=[common], help="open Toda lattice checks")
    sub.add_parser("onegap-check", parents=[common], help="numeric vs closed form for a plane wave")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        cfg = build_config(args)
        if args.command == "discriminant":
            text, code = cmd_discriminant(cfg)
        elif args.command == "spectrum":
            text, code = cmd_spectrum(cfg)
        elif args.command == "weyl":
            text, code = cmd_weyl(cfg)
        elif args.command == "verify":
            text, code = cmd_verify(cfg, args.which)
        elif args.command == "toda":
            text, code = cmd_toda(cfg)
        else:
            text, code = cmd_onegap_check(cfg)
    except (ConfigError, ValueError, KeyError, TypeError) as exc:
        print(f"spectral-bracket: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpectralError as exc:
        print(f"spectral-bracket: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
