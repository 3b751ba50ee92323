"""Command line entry point: run verification experiments and write JSON reports."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import biell, heis, numlat, scrollgeo, theta
from .ellcurve import EllipticCurve

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# reports

@dataclass
class Check:
    name: str
    anchor: str
    expected: object
    observed: object
    tolerance: object
    passed: bool


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add(self, name, anchor, expected, observed, tolerance=None, passed=None):
        if passed is None:
            passed = expected == observed
        self.checks.append(Check(name, anchor, expected, observed, tolerance, bool(passed)))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"command": self.command, "config": self.config, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks], "data": self.data,
                "wall_time": self.wall_time}


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def write_report(report: Report, out: Path | None) -> Path | None:
    if out is None:
        return None
    out.mkdir(parents=True, exist_ok=True)
    path = out / "report.json"
    path.write_text(json.dumps(_jsonable(report.as_dict()), indent=2, default=str))
    return path


# --------------------------------------------------------------------------
# configuration

DEFAULTS = {
    "n": None,
    "tau_e": [0.1, 1.0],
    "t": [0.2, 0.1, 0.05],
    "pi": 1,
    "pj": 2,
    "samples": None,
    "rank_tol": scrollgeo.DEFAULT_RANK_TOL,
    "min_gap": scrollgeo.DEFAULT_MIN_GAP,
    "seed": 0,
    "out": None,
    "d_range": None,
    "twist": None,
}

COMMAND_N = {
    "verify-lattice": list(range(5, 17)),
    "verify-heisenberg": [6, 8, 10, 12, 14, 16],
    "scrolls": [5],
    "union": [5],
    "smooth-family": [8],
}


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file: {e}") from e
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update({k.replace("-", "_"): v for k, v in loaded.items()})
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["n"] is None:
        cfg["n"] = COMMAND_N[args.command]
    validate_config(args.command, cfg)
    return cfg


def validate_config(command: str, cfg: dict):
    ns = cfg["n"]
    if isinstance(ns, int):
        ns = [ns]
    if not isinstance(ns, list) or not ns or not all(isinstance(x, int) for x in ns):
        raise ConfigError("n must be an integer or a list of integers")
    cfg["n"] = ns
    if any(x < 5 for x in ns):
        raise ConfigError("n must be at least 5")
    if command == "verify-heisenberg" and any(x % 2 for x in ns):
        raise ConfigError("the 2-torsion commutator needs even n")
    if command == "smooth-family" and any(x % 2 or x < 6 for x in ns):
        raise ConfigError("the bielliptic family needs even n >= 6")
    if command in ("scrolls", "union") and any(x > 9 for x in ns):
        raise ConfigError("sampling runs are limited to n <= 9")
    tau = cfg["tau_e"]
    if not (isinstance(tau, (list, tuple)) and len(tau) == 2):
        raise ConfigError("tau_e must be two reals")
    if not float(tau[1]) > 0:
        raise ConfigError("Im tau_e must be positive")
    cfg["tau_e"] = [float(tau[0]), float(tau[1])]
    for key in ("pi", "pj"):
        if cfg[key] not in (1, 2, 3):
            raise ConfigError(f"{key} must be 1, 2 or 3")
    if command in ("union", "smooth-family") and cfg["pi"] == cfg["pj"]:
        raise ConfigError("pi and pj must differ")
    try:
        ts = [complex(t) if not isinstance(t, list) else complex(*t) for t in cfg["t"]]
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad t value: {e}") from e
    cfg["t"] = [[t.real, t.imag] for t in ts]
    if command == "smooth-family":
        for t in ts:
            try:
                biell.check_t(t)
            except biell.FamilyError as e:
                raise ConfigError(str(e)) from e
        if any(abs(b) >= abs(a) for a, b in zip(ts, ts[1:])):
            raise ConfigError("t values must decrease in modulus")
    if cfg["samples"] is not None and cfg["samples"] < 1:
        raise ConfigError("samples must be positive")
    if not 0 < cfg["rank_tol"] < 1:
        raise ConfigError("rank_tol must lie in (0, 1)")
    if cfg["d_range"] is not None and (len(cfg["d_range"]) < 1 or min(cfg["d_range"]) < 2):
        raise ConfigError("d_range entries must be >= 2")
    if cfg["seed"] is None:
        raise ConfigError("a seed is required")


def _curve(cfg) -> EllipticCurve:
    return EllipticCurve(complex(*cfg["tau_e"]))


def _torsion(cfg, key):
    return _curve(cfg).two_torsion()[cfg[key] - 1]


def _ts(cfg):
    return [complex(*t) for t in cfg["t"]]


# --------------------------------------------------------------------------
# commands

def cmd_verify_lattice(cfg: dict) -> Report:
    rep = Report("verify-lattice", cfg)
    rng = np.random.default_rng(cfg["seed"])
    bases = [EllipticCurve(complex(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 2.0))) for _ in range(3)]
    for n in cfg["n"]:
        row = numlat.lattice_row(n)
        rep.add(f"H^2 n={n}", "hyperplane self-intersection on the scroll", n, row.h_squared)
        rep.add(f"chi(H) n={n}", "Riemann-Roch for the hyperplane class", n, row.chi_h)
        rep.add(f"chi(Q) n={n}", "Euler characteristic of the normal quotient Q", n * n, row.chi_q)
        rep.add(f"chi(Q(-F)) n={n}", "Euler characteristic of Q twisted by the bisection", 0, row.chi_q_twisted)
        rep.add(f"whitney n={n}", "normal bundle sequences are Whitney-consistent", True, row.whitney_ok)
        for k, base in enumerate(bases):
            for idx in range(3):
                m = numlat.RuledModel.for_degree(n, base, idx)
                fr = numlat.verify_formula_suite(m)
                failed = [c.name for c in fr.checks if not c.passed]
                rep.add(f"formula suite n={n} base={k} P={idx + 1}",
                        "line bundle identities on the ruled model", [], failed)
        exp, cross = numlat.hilbert_dimension_crosscheck(n)
        rep.add(f"expected dimension n={n}", "h0(N) via chi(N) + h0 of the double-curve twist",
                n * n if n % 2 else n * n + 1, exp, passed=(exp == cross == (n * n if n % 2 else n * n + 1)))
        if n % 2 == 0:
            b = numlat.bielliptic_numbers(n)
            rep.add(f"bielliptic n={n}", "(H^2, H.A, H.B, chi(H)) on the bielliptic surface",
                    [2 * n, n, 4, n], list(b.as_tuple()))
    return rep


def cmd_verify_heisenberg(cfg: dict) -> Report:
    rep = Report("verify-heisenberg", cfg)
    tau_e = complex(*cfg["tau_e"])
    E = EllipticCurve(tau_e)
    p1, p2, _ = E.two_torsion()
    rng = np.random.default_rng(cfg["seed"])
    for n in cfg["n"]:
        sign = heis.GroupActionSpec.from_points(n, p1, p2).commutator_sign
        expected = 1 if n % 4 == 0 else -1
        rep.add(f"commutator n={n}", "sign of the commutator of lifted 2-torsion translations", expected, sign)
        space = theta.EmbeddedCurve(n, theta.ThetaParams(tau_e)).space
        grid = space.sample_points(6 * n, rng)
        a1, _ = space.action_matrix(1, (p1.a, p1.b), grid)
        a2, _ = space.action_matrix(1, (p2.a, p2.b), grid)
        C = a1 @ a2 @ np.linalg.inv(a1) @ np.linalg.inv(a2)
        dev = float(np.abs(C - expected * np.eye(n)).max())
        rep.add(f"curve commutator n={n}", "commutator of translation actions on theta coordinates",
                expected, complex(C[0, 0]), 1e-8, passed=dev < 1e-8)
    return rep


def _degree_check(rep: Report, name: str, anchor: str, cloud, expected: int, d_range, cfg):
    prof = []
    try:
        deg = scrollgeo.estimate_degree(cloud, d_range, 2, cfg["rank_tol"], cfg["min_gap"], profile_out=prof)
        rep.add(name, anchor, expected, deg)
    except scrollgeo.DegreeInstabilityError as e:
        rep.add(name, anchor, expected, {"second_differences": e.differences}, passed=False)
        prof = [e.profile]
    if prof:
        rep.data.setdefault("profiles", {})[name] = prof[0].as_dict()


def _save(cloud, cfg, name, rep):
    if cfg["out"]:
        csv, side = scrollgeo.save_cloud(cloud, Path(cfg["out"]) / f"{name}.csv")
        rep.data.setdefault("artifacts", []).append(str(csv))


def _count(cfg, n, d_range):
    return cfg["samples"] or scrollgeo.default_sample_count(n, max(d_range) + 1)


def cmd_scrolls(cfg: dict) -> Report:
    rep = Report("scrolls", cfg)
    d_range = cfg["d_range"] or [2, 3, 4]
    for n in cfg["n"]:
        curve = theta.EmbeddedCurve(n, theta.ThetaParams(complex(*cfg["tau_e"])))
        p = _torsion(cfg, "pi")
        count = _count(cfg, n, d_range)
        cl = scrollgeo.sample_translation_scroll(curve, p, count, cfg["seed"])
        _degree_check(rep, f"scroll degree n={n}", "the 2-torsion translation scroll has degree n",
                      cl, n, d_range, cfg)
        _save(cl, cfg, f"scroll_n{n}", rep)
        tau = curve.tau
        gen = scrollgeo.sample_translation_scroll(curve, 0.2 + 0.13 * tau, count, cfg["seed"] + 1)
        _degree_check(rep, f"generic scroll degree n={n}",
                      "a translation scroll by a non-torsion point has degree 2n", gen, 2 * n, d_range, cfg)
        _save(gen, cfg, f"generic_scroll_n{n}", rep)
    return rep


def cmd_union(cfg: dict) -> Report:
    rep = Report("union", cfg)
    d_range = cfg["d_range"] or [2, 3, 4]
    for n in cfg["n"]:
        curve = theta.EmbeddedCurve(n, theta.ThetaParams(complex(*cfg["tau_e"])))
        pi, pj = _torsion(cfg, "pi"), _torsion(cfg, "pj")
        count = _count(cfg, n, d_range)
        cl = scrollgeo.build_union(curve, pi, pj, count, cfg["seed"])
        _degree_check(rep, f"union degree n={n}", "the union of two scrolls has degree 2n",
                      cl, 2 * n, d_range, cfg)
        _save(cl, cfg, f"union_n{n}", rep)
        e_cloud = scrollgeo.sample_curve(curve, 200, cfg["seed"] + 7)
        for label, p in (("i", pi), ("j", pj)):
            res, k = double_curve_residual(curve, p, cfg["seed"] + 11, cfg, e_cloud)
            rep.add(f"double curve on X_{label} n={n}", "the curve E lies on each scroll of the union",
                    0.0, res, 1e-8, passed=(k > 0 and res < 1e-8))
    return rep


def double_curve_residual(curve, p, seed, cfg, e_cloud=None) -> tuple[float, int]:
    """Residual of the lowest-degree forms of S(E, p) on samples of E, and the number of forms."""
    n = curve.n
    d = 3 if n == 5 else 2
    scroll = scrollgeo.sample_translation_scroll(curve, p, scrollgeo.default_sample_count(n, d), seed)
    forms = scrollgeo.interpolate_ideal(scroll, d, cfg["rank_tol"], cfg["min_gap"])
    e_cloud = e_cloud or scrollgeo.sample_curve(curve, 200, seed + 1)
    return forms.residual(e_cloud.points), forms.count


def cmd_smooth_family(cfg: dict) -> Report:
    rep = Report("smooth-family", cfg)
    ts = _ts(cfg)
    for n in cfg["n"]:
        fc = biell.FamilyConfig(n, complex(*cfg["tau_e"]), _torsion(cfg, "pi"), _torsion(cfg, "pj"),
                                tuple(ts), cfg["samples"], cfg["seed"], cfg["twist"],
                                cfg["rank_tol"], cfg["min_gap"])
        t0 = ts[0]
        space = biell.build_sections(fc, t0)
        rep.add(f"commutator n={n}", "lifted G-action commutes after the twist", 1,
                space.commutator_scalar, 1e-8, passed=space.commutes)
        if n % 4 == 2:
            neg = biell.build_sections(fc, t0, twist=False)
            rep.add(f"negative control n={n}", "without the twist the lifts anticommute", -1,
                    neg.commutator_scalar, 1e-8, passed=neg.anticommutes)
        inv = biell.invariant_sections(space)
        rep.add(f"invariant dimension n={n}", "h0 of the descended bundle equals n", n, inv.dim)
        rep.add(f"projector idempotent n={n}", "averaging projector", 0.0, inv.idempotency_error, 1e-10,
                passed=inv.idempotency_error < 1e-10)
        inv_res = biell.invariance_residual(inv, fc, seed=cfg["seed"])
        rep.add(f"G-invariance n={n}", "invariant sections are constant on G-orbits", 0.0, inv_res, 1e-9,
                passed=inv_res < 1e-9)
        window = biell.degree_window(n)
        count = cfg["samples"] or scrollgeo.default_sample_count(n, window[-1] + 1)
        cloud = biell.embed_bielliptic(fc, t0, count, cfg["seed"], inv=inv)
        _save(cloud, cfg, f"bielliptic_n{n}", rep)
        h1 = scrollgeo.hilbert_function(cloud, 1, cfg["rank_tol"], cfg["min_gap"])
        rep.add(f"linear normality n={n}", "the bielliptic surface is linearly normal", n, h1)
        _degree_check(rep, f"bielliptic degree n={n}", "the bielliptic surface has degree 2n",
                      cloud, 2 * n, window, cfg)
        deg = biell.degeneration_experiment(fc, ts)
        rep.data.setdefault("degeneration", {})[str(n)] = deg.as_dict()
        rep.add(f"flatness proxy n={n}", "h(1), h(2) of Z_t constant and equal to those of Z0",
                [deg.z0_h1, deg.z0_h2], [[r.h1, r.h2] for r in deg.rows], passed=deg.hilbert_constant)
        rep.add(f"residual monotone n={n}", "Z0 equations approach zero on Z_t as t -> 0",
                "decreasing", [r.residual_rms for r in deg.rows], passed=deg.residual_monotone)
        rep.add(f"residual halving n={n}", "residual shrinks at least 2x per halving of |t|",
                ">= 2", deg.residual_ratios, 2.0, passed=deg.halving_factor_ok(2.0))
    return rep


COMMANDS = {
    "verify-lattice": cmd_verify_lattice,
    "verify-heisenberg": cmd_verify_heisenberg,
    "scrolls": cmd_scrolls,
    "union": cmd_union,
    "smooth-family": cmd_smooth_family,
}


# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ellscroll", description="Elliptic scroll and bielliptic degeneration experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON file with option values; flags override it")
        s.add_argument("--n", type=int, nargs="+")
        s.add_argument("--tau-e", dest="tau_e", type=float, nargs=2, metavar=("RE", "IM"))
        s.add_argument("--t", type=str, action="append", help="family parameter (repeatable), e.g. 0.1 or 0.1+0.02j")
        s.add_argument("--pi", type=int, choices=(1, 2, 3))
        s.add_argument("--pj", type=int, choices=(1, 2, 3))
        s.add_argument("--samples", type=int)
        s.add_argument("--rank-tol", dest="rank_tol", type=float)
        s.add_argument("--min-gap", dest="min_gap", type=float)
        s.add_argument("--d-range", dest="d_range", type=int, nargs="+")
        s.add_argument("--twist", dest="twist", action="store_true", default=None)
        s.add_argument("--no-twist", dest="twist", action="store_false")
        s.add_argument("--seed", type=int)
        s.add_argument("--out", type=str)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    start = time.perf_counter()
    try:
        rep = COMMANDS[args.command](cfg)
    except (scrollgeo.NumericalStabilityError, theta.ThetaError) as e:
        print(f"numerical stability error: {e}", file=sys.stderr)
        rep = Report(args.command, cfg)
        rep.data["error"] = str(e)
        rep.wall_time = time.perf_counter() - start
        write_report(rep, Path(cfg["out"]) if cfg["out"] else None)
        return EXIT_NUMERIC
    rep.wall_time = time.perf_counter() - start
    path = write_report(rep, Path(cfg["out"]) if cfg["out"] else None)
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: expected {c.expected}, observed {c.observed}")
    if path:
        print(f"report written to {path}")
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
