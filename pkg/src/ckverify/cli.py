"""Command-line harness.

Subcommands
-----------
verify-identities
    Exterior-algebra oracle, Kaehler identities and Weitzenboeck formulas on a chart.
verify-solution
    Build a special pair or Hermitian Killing instance and run its residual checks.
profile
    Emit the momentum-profile CSV and the maximal-domain case tag.

Exit codes are 0 (all checks pass), 1 (a check failed) and 2 (configuration
error).  Settings are resolved as command-line flags over config-file values
over defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .calabi import BaseGeometry, CalabiChart, build_calabi_chart, chart_battery, lift_checks
from .geometry import flat_chart, form_jet, fubini_study_chart
from .oracle import exterior_oracle_suite
from .profiles import (MomentumProfile, ProfileError, maximal_domain, positivity_domain, profile_csv,
                       profile_ode_check)
from .report import format_table, reports_to_json
from .residuals import (calabi_structure_battery, derived_identity_battery, einstein_check,
                        einstein_cone_battery, hermitian_killing_check, kahler_identity_suite,
                        pair_invariant_checks, special_form_check, weitzenbock_suite)
from .solutions import (calabi_pair, cone_pair, lifted_toric_hk, product_pair, product_pair2,
                        solution_descriptor, toric_hk)

__all__ = ["RunConfig", "ConfigError", "load_config", "run", "main"]

SUBCOMMANDS = ("verify-identities", "verify-solution", "profile")
FAMILIES = ("cone", "product", "product2", "calabi", "toric", "lifted")
CHARTS = ("flat", "fs", "calabi")
BASES = ("flat", "fs")


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""


@dataclass
class RunConfig:
    """All settings of one run; JSON config files use these field names."""

    subcommand: str = "verify-identities"
    m: int = 3
    family: str = "cone"
    base: str = "flat"
    C1: float = 1.0
    k: float = 0.0
    lam: float = 1.0
    zmin: float | None = None
    zmax: float | None = None
    n_points: int | None = None
    seed: int = 0
    tol: float | None = None
    jet_order: int = 3
    report: str | None = None
    chart: str = "flat"

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"subcommand must be one of {SUBCOMMANDS}, got {self.subcommand!r}")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.chart not in CHARTS:
            raise ConfigError(f"chart must be one of {CHARTS}, got {self.chart!r}")
        if self.base not in BASES:
            raise ConfigError(f"base must be one of {BASES}, got {self.base!r}")
        if int(self.m) != self.m or self.m < self._min_m():
            raise ConfigError(f"m must be an integer >= {self._min_m()} here, got {self.m}")
        if self.lam <= 0:
            raise ConfigError(f"lambda must be positive, got {self.lam}")
        if self.C1 == 0 and self.k == 0:
            raise ConfigError("C1 = k = 0 is degenerate: the momentum profile vanishes identically")
        if (self.zmin is None) != (self.zmax is None):
            raise ConfigError("zmin and zmax must be given together")
        if self.zmin is not None and not (0 < self.zmin < self.zmax):
            raise ConfigError(f"z-interval must satisfy 0 < zmin < zmax, got [{self.zmin}, {self.zmax}]")
        if self.n_points is not None and self.n_points < 1:
            raise ConfigError("points must be >= 1")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tolerance must be positive")
        if not 3 <= self.jet_order <= 6:
            raise ConfigError(f"jet order must lie in 3..6, got {self.jet_order}")
        if self._needs_calabi():
            if self.base == "flat" and self.k != 0:
                raise ConfigError("the flat base has Einstein constant k = 0")
            if self.base == "fs" and self.k <= 0:
                raise ConfigError("the Fubini-Study base needs k > 0")
            zmin, zmax = self.z_interval()
            try:
                MomentumProfile(self.m, self.C1, self.k, zmin, zmax)
            except ProfileError as exc:
                raise ConfigError(str(exc)) from None

    def _min_m(self) -> int:
        # special pairs live in dimension >= 3; plain charts only need m >= 1
        if self._needs_calabi() or (self.subcommand == "verify-solution" and self.family != "toric"):
            return 3
        return 1

    def _needs_calabi(self) -> bool:
        if self.subcommand == "verify-identities":
            return self.chart == "calabi"
        return self.subcommand == "verify-solution" and self.family in ("calabi", "lifted")

    def z_interval(self):
        """The configured interval, else ``[1, 2]`` when the profile is positive there,
        else an interval inside the positivity set of ``X``."""
        if self.zmin is not None:
            return self.zmin, self.zmax
        return auto_z_interval(self.m, self.C1, self.k)


def auto_z_interval(m: int, C1: float, k: float):
    zs = np.linspace(1.0, 2.0, 201)
    if np.all(zs * (C1 * zs ** m + 2.0 * k / m) > 0):
        return 1.0, 2.0
    if C1 == 0 or (C1 < 0 and k <= 0):
        raise ConfigError(f"X(z) = z (C1 z^m + 2k/m) is nowhere positive for C1={C1}, k={k}")
    zstar = (abs(2.0 * k / (m * C1))) ** (1.0 / m)
    if C1 < 0:
        return 0.25 * zstar, 0.9 * zstar
    return 1.1 * zstar, 2.2 * zstar


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ckverify", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        # default=None everywhere so unset flags do not override the config file
        p.add_argument("--family", choices=FAMILIES, default=None)
        p.add_argument("--base", choices=BASES, default=None)
        p.add_argument("--chart", choices=CHARTS, default=None)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--C1", type=float, default=None)
        p.add_argument("--k", type=float, default=None)
        p.add_argument("--lambda", dest="lam", type=float, default=None)
        p.add_argument("--zmin", type=float, default=None)
        p.add_argument("--zmax", type=float, default=None)
        p.add_argument("--points", dest="n_points", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--jet-order", dest="jet_order", type=int, default=None)
        p.add_argument("--report", default=None, help="write the JSON report here")
        p.add_argument("--config", default=None, help="JSON file with RunConfig fields")
    return parser


def load_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    names = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"unknown config fields {unknown}")
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(load_config(args.config))
    for f in dataclasses.fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    values["subcommand"] = args.subcommand
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# subcommands


def _pts(cfg: RunConfig, default: int) -> int:
    return cfg.n_points if cfg.n_points is not None else default


def _tol(cfg: RunConfig, default: float) -> float:
    return cfg.tol if cfg.tol is not None else default


def _calabi_chart(cfg: RunConfig) -> CalabiChart:
    zmin, zmax = cfg.z_interval()
    base = BaseGeometry(cfg.base, cfg.m - 1, cfg.k)
    return build_calabi_chart(base, MomentumProfile(cfg.m, cfg.C1, cfg.k), zmin, zmax, lam=cfg.lam)


def _plain_chart(cfg: RunConfig, kind: str):
    if kind == "flat":
        return flat_chart(cfg.m)
    # scaled Fubini-Study with Einstein constant k when k > 0
    scale = (cfg.m + 1) / cfg.k if cfg.k > 0 else 1.5
    return fubini_study_chart(cfg.m, scale, 0.8)


def cmd_verify_identities(cfg: RunConfig):
    chart = _calabi_chart(cfg) if cfg.chart == "calabi" else _plain_chart(cfg, cfg.chart)
    reports = exterior_oracle_suite(seed=cfg.seed)
    if cfg.chart != "calabi":
        reports.append(einstein_check(chart, n_points=_pts(cfg, 20), seed=cfg.seed, tol=_tol(cfg, 1e-8)))
    n = _pts(cfg, 50)
    reports += kahler_identity_suite(chart, n, cfg.seed, _tol(cfg, 1e-7))
    reports += weitzenbock_suite(chart, n, cfg.seed, _tol(cfg, 1e-7))
    return reports, {"chart": chart.descriptor}


def cmd_verify_solution(cfg: RunConfig):
    fam = cfg.family
    seed, order = cfg.seed, cfg.jet_order
    reports = []
    if fam in ("toric", "lifted"):
        if fam == "toric":
            inst = toric_hk(_plain_chart(cfg, "fs" if cfg.chart == "fs" else "flat"), cfg.m)
            tol = _tol(cfg, 1e-8 if cfg.chart != "fs" else 1e-7)
        else:
            chart = _calabi_chart(cfg)
            inst = lifted_toric_hk(chart, cfg.m - 1)
            tol = _tol(cfg, 1e-6)
            gamma = _base_test_form(chart)
            reports += lift_checks(chart, gamma, 0 if cfg.base == "flat" else 1,
                                   _pts(cfg, 10), seed, _tol(cfg, 1e-6))
        reports.append(hermitian_killing_check(inst.tau, _pts(cfg, 50), seed, tol, order=order))
        return reports, {"solution": _jsonable(solution_descriptor(inst))}

    if fam in ("calabi",):
        chart = _calabi_chart(cfg)
        pair = calabi_pair(chart)
        tol_sp = _tol(cfg, 1e-6 if cfg.base == "flat" else 1e-5)
    else:
        pair = {"cone": cone_pair, "product": product_pair, "product2": product_pair2}[fam](cfg.m)
        tol_sp = _tol(cfg, 1e-8)
    reports.append(special_form_check(pair, _pts(cfg, 100 if fam != "calabi" else 50), seed, tol_sp,
                                      order=order))
    nb = _pts(cfg, 10)
    reports += pair_invariant_checks(pair, nb, seed, tol_prim=_tol(cfg, 1e-8), tol_tau=_tol(cfg, 1e-6))
    reports += derived_identity_battery(pair, nb, seed, tol=_tol(cfg, 1e-6), tol_order5=_tol(cfg, 1e-5))
    if fam == "cone":
        reports += einstein_cone_battery(pair, nb, seed, _tol(cfg, 1e-7))
    if fam == "calabi":
        reports += chart_battery(pair.chart, nb, seed, _tol(cfg, 1e-7), _tol(cfg, 1e-6))
        reports += calabi_structure_battery(pair, nb, seed, _tol(cfg, 1e-6), _tol(cfg, 1e-5))
    return reports, {"solution": _jsonable(solution_descriptor(pair))}


def _base_test_form(chart: CalabiChart):
    """A non-holomorphic ``(0, 1)`` base form for the lift checks."""

    def gamma(c):
        return form_jet(c, [(c.z[0] * c.zb[1 % chart.base.n] + 0.3 * c.zb[0] ** 2, (), (1,))])

    return gamma


def cmd_profile(cfg: RunConfig):
    dom = maximal_domain(cfg.C1, cfg.k, cfg.lam)
    pos = positivity_domain(cfg.C1, cfg.k, cfg.lam)
    zmin, zmax = cfg.z_interval()
    prof = MomentumProfile(cfg.m, cfg.C1, cfg.k, zmin, zmax)
    zs = np.linspace(zmin, zmax, _pts(cfg, 11))
    csv_text = profile_csv(prof, zs)
    reports = profile_ode_check(prof, zmin, zmax, seed=cfg.seed)
    extra = {"domain": dom.to_dict(), "positivity_domain": pos.to_dict(), "z_interval": [zmin, zmax]}
    return reports, extra, csv_text


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def run(cfg: RunConfig, out=None, err=None) -> int:
    """Execute a validated config; returns the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    csv_text = None
    if cfg.subcommand == "verify-identities":
        reports, extra = cmd_verify_identities(cfg)
    elif cfg.subcommand == "verify-solution":
        reports, extra = cmd_verify_solution(cfg)
    else:
        reports, extra, csv_text = cmd_profile(cfg)
    doc_extra = {"subcommand": cfg.subcommand, "config": _jsonable(dataclasses.asdict(cfg))}
    doc_extra.update(_jsonable(extra))
    text = reports_to_json(reports, doc_extra)
    if cfg.report:
        Path(cfg.report).write_text(text + "\n")
    if csv_text is not None:
        out.write(csv_text)
        d = extra["domain"]
        err.write(f"maximal domain: case {d['case']}, {d['tag']}, a={d['a']}\n")
        err.write(format_table(reports) + "\n")
    else:
        out.write(format_table(reports) + "\n")
    ok = all(r.passed for r in reports)
    (out if csv_text is None else err).write(("all checks passed" if ok else "some checks FAILED") + "\n")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        cfg = resolve_config(args)
    except (ConfigError, ProfileError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except (ConfigError, ProfileError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
