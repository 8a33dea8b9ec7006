"""Configuration-driven driver for the verification suites.

Exit status: 0 when every check passes, 1 when any check fails, 2 for an
invalid configuration or command line.
"""
from __future__ import annotations

import argparse
import copy
import hashlib
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bgroup import check_group_axioms, check_lattice_product
from .currentalg import Session, all_triples, check_antisymmetry, jacobi_report, undeformed_limit_report
from .errors import ConfigError, UdwzwError
from .liealg import LieAlgebraData, UOperator, build_algebra, check_cartan_weyl
from .loops import is_power_of_two
from .numlab import (TangentVector, assemble, closedness_residual, derivative_convergence, flow_check,
                     random_loop, random_point, verify_current_brackets, verify_loop_group_bracket,
                     verify_symmetry_relations)
from .numlab.kernel import verify_orbit_kernel
from .reduction import (GaugeSubalgebraSpec, block_upsilon, check_subalgebra, check_u_compatibility,
                        first_class_check, make_constraints, sample_locus)
from .report import FAIL, PASS, SKIPPED, VerificationReport

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2
SUITES = ("algebra", "bracket", "bgroup", "constraints", "numlab")

DEFAULT_CONFIG = {
    "algebra": {"series": "A", "rank": 2},
    "k": 3,
    "U": {"theta": "1/4", "plane": [0, 1]},
    "gauge": None,
    "cutoffs": {"N_alg": 1, "N_t": 8, "N_b": 2, "n_check": 2},
    "lattice": {"M": 64},
    "locus": {"newton_tol": 1e-10, "max_iter": 50},
    "bgroup": {"samples": 10},
    "flow": {"T": 0.01, "dt": 1e-3},
    "precision_bits": 128,
    "tolerances": {
        "numeric_bracket": 1e-6,
        "symmetry": 1e-5,
        "loop_group_bracket": 1e-5,
        "derivative_slope": 0.1,
        "closedness": 1e-6,
        "flow_drift": 1e-8,
        "flow_derivative": 1e-5,
        "tangency": 1e-7,
        "kernel": 1e-6,
    },
    "seed": 0,
}

SCHEMA = {
    "algebra.series": "string; only 'A' is supported",
    "algebra.rank": "integer >= 1",
    "k": "positive integer level",
    "U": "rank x rank skew matrix of rationals written as strings 'p/q', "
         "or {'theta': 'p/q', 'plane': [a, b]} for a rotation in the (H^a, H^b) plane",
    "gauge": "null, {'upsilon': [positive root indices]} or {'block': size}",
    "cutoffs.N_alg": "mode cutoff for symbolic bracket and constraint checks",
    "cutoffs.N_t": "mode cutoff of the truncated tangent space",
    "cutoffs.N_b": "mode cutoff of random B-group elements",
    "cutoffs.n_check": "largest |mode| of numerically checked current brackets",
    "lattice.M": "number of lattice points, a power of two",
    "locus.newton_tol": "Newton tolerance of the locus sampler",
    "locus.max_iter": "Newton iteration cap of the locus sampler",
    "bgroup.samples": "random elements per B-group check",
    "flow.T": "integration time of the flow check",
    "flow.dt": "RK4 step",
    "precision_bits": "mpmath working precision for exact-to-float evaluation",
    "tolerances.<name>": "override one numerical tolerance; names as in the defaults",
    "seed": "integer seed for every random draw",
}


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _rational(x, where: str, errors: list[str]) -> Fraction | None:
    if isinstance(x, bool) or isinstance(x, float):
        errors.append(f"{where}: write rationals as strings 'p/q', got {x!r}")
        return None
    try:
        return Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError):
        errors.append(f"{where}: not a rational number: {x!r}")
        return None


def _positive_int(x, where: str, errors: list[str]) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x <= 0:
        errors.append(f"{where}: must be a positive integer, got {x!r}")
        return 1
    return x


def _positive_float(x, where: str, errors: list[str]) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not x > 0:
        errors.append(f"{where}: must be a positive number, got {x!r}")
        return 1.0
    return float(x)


@dataclass
class RunConfig:
    raw: dict
    data: LieAlgebraData
    k: int
    U: UOperator
    upsilon: tuple | None
    N_alg: int
    N_t: int
    N_b: int
    n_check: int
    M: int
    newton_tol: float
    max_iter: int
    samples: int
    T: float
    dt: float
    precision_bits: int
    tolerances: dict
    seed: int

    @classmethod
    def from_dict(cls, cfg: dict) -> "RunConfig":
        """Validate a merged config; raises ConfigError listing every bad field."""
        errors: list[str] = []
        alg = cfg.get("algebra") or {}
        series = alg.get("series")
        rank = _positive_int(alg.get("rank"), "algebra.rank", errors)
        data = None
        if series != "A":
            errors.append(f"algebra.series: only 'A' is supported, got {series!r}")
        elif not errors:
            data = build_algebra("A", rank)
        k = _positive_int(cfg.get("k"), "k", errors)

        U = None
        spec_U = cfg.get("U")
        if isinstance(spec_U, dict):
            theta = _rational(spec_U.get("theta"), "U.theta", errors)
            plane = spec_U.get("plane", [0, 1])
            if (not isinstance(plane, list) or len(plane) != 2
                    or not all(isinstance(i, int) and 0 <= i < rank for i in plane)
                    or plane[0] == plane[1]):
                errors.append(f"U.plane: need two distinct Cartan indices below {rank}, got {plane!r}")
            elif theta is not None:
                U = UOperator.rotation(rank, theta, tuple(plane))
        elif isinstance(spec_U, list):
            if len(spec_U) != rank or any(not isinstance(r, list) or len(r) != rank for r in spec_U):
                errors.append(f"U: must be a {rank}x{rank} matrix")
            else:
                m = [[_rational(x, f"U[{i}][{j}]", errors) for j, x in enumerate(row)]
                     for i, row in enumerate(spec_U)]
                if not any(x is None for row in m for x in row):
                    bad = [f"U[{i}][{j}]={m[i][j]} vs U[{j}][{i}]={m[j][i]}"
                           for i in range(rank) for j in range(i, rank) if m[i][j] != -m[j][i]]
                    if bad:
                        errors.append("U: not skew-symmetric at " + "; ".join(bad))
                    else:
                        U = UOperator(m)
        elif spec_U is None:
            U = UOperator.zero(rank)
        else:
            errors.append(f"U: expected a matrix or a rotation spec, got {spec_U!r}")

        upsilon = None
        gauge = cfg.get("gauge")
        if gauge is not None and data is not None:
            if isinstance(gauge, dict) and "block" in gauge:
                size = gauge["block"]
                if not isinstance(size, int) or not 2 <= size <= rank + 1:
                    errors.append(f"gauge.block: need an integer in [2, {rank + 1}], got {size!r}")
                else:
                    upsilon = block_upsilon(data, size)
            elif isinstance(gauge, dict) and isinstance(gauge.get("upsilon"), list):
                ups = gauge["upsilon"]
                bad = [i for i in ups if not isinstance(i, int) or not 0 <= i < data.n_pos]
                if bad or not ups:
                    errors.append(f"gauge.upsilon: indices must lie in [0, {data.n_pos}), got {ups!r}")
                else:
                    upsilon = tuple(ups)
            else:
                errors.append(f"gauge: expected {{'upsilon': [...]}} or {{'block': n}}, got {gauge!r}")

        cut = cfg.get("cutoffs") or {}
        N_alg = _positive_int(cut.get("N_alg"), "cutoffs.N_alg", errors)
        N_t = _positive_int(cut.get("N_t"), "cutoffs.N_t", errors)
        N_b = _positive_int(cut.get("N_b"), "cutoffs.N_b", errors)
        n_check = _positive_int(cut.get("n_check"), "cutoffs.n_check", errors)
        if 2 * n_check > N_t:
            errors.append(f"cutoffs.n_check: 2*n_check={2 * n_check} exceeds N_t={N_t}")
        M = _positive_int((cfg.get("lattice") or {}).get("M"), "lattice.M", errors)
        if not is_power_of_two(M):
            errors.append(f"lattice.M: must be a power of two, got {M}")
        elif M < 4 * N_t:
            errors.append(f"lattice.M: {M} does not resolve N_t={N_t}; need M >= {4 * N_t}")
        locus = cfg.get("locus") or {}
        newton_tol = _positive_float(locus.get("newton_tol"), "locus.newton_tol", errors)
        max_iter = _positive_int(locus.get("max_iter"), "locus.max_iter", errors)
        samples = _positive_int((cfg.get("bgroup") or {}).get("samples"), "bgroup.samples", errors)
        flow = cfg.get("flow") or {}
        T = _positive_float(flow.get("T"), "flow.T", errors)
        dt = _positive_float(flow.get("dt"), "flow.dt", errors)
        prec = _positive_int(cfg.get("precision_bits"), "precision_bits", errors)
        if prec < 53:
            errors.append(f"precision_bits: need at least 53, got {prec}")
        tols = cfg.get("tolerances") or {}
        unknown = sorted(set(tols) - set(DEFAULT_CONFIG["tolerances"]))
        if unknown:
            errors.append("tolerances: unknown names " + ", ".join(unknown))
        tols = {name: _positive_float(tols.get(name), f"tolerances.{name}", errors)
                for name in DEFAULT_CONFIG["tolerances"]}
        seed = cfg.get("seed")
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            errors.append(f"seed: must be a non-negative integer, got {seed!r}")
        if errors:
            raise ConfigError("\n".join(errors))
        return cls(cfg, data, k, U, upsilon, N_alg, N_t, N_b, n_check, M, newton_tol, max_iter,
                   samples, T, dt, prec, tols, seed)


def load_config(path: str | None, seed: int | None = None, precision: int | None = None) -> RunConfig:
    over = {}
    if path is not None:
        try:
            over = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON in {path}: {exc}") from None
        if not isinstance(over, dict):
            raise ConfigError("config: top level must be a JSON object")
    cfg = _merge(DEFAULT_CONFIG, over)
    if seed is not None:
        cfg["seed"] = seed
    if precision is not None:
        cfg["precision_bits"] = precision
    return RunConfig.from_dict(cfg)


# ---- suites ----------------------------------------------------------------


def suite_algebra(rc: RunConfig) -> list[VerificationReport]:
    return [check_cartan_weyl(rc.data)]


def suite_bracket(rc: RunConfig) -> list[VerificationReport]:
    s = Session(rc.data, rc.U, n_alg=3 * rc.N_alg)
    gens = s.generators(rc.N_alg)
    return [check_antisymmetry(s, gens), jacobi_report(s, all_triples(gens)),
            undeformed_limit_report(rc.data, rc.N_alg)]


def suite_bgroup(rc: RunConfig) -> list[VerificationReport]:
    return [check_group_axioms(rc.data, rc.U, rc.N_b, rc.samples, seed=rc.seed),
            check_lattice_product(rc.data, rc.U, rc.N_b, rc.samples, seed=rc.seed,
                                  prec=rc.precision_bits)]


def suite_constraints(rc: RunConfig) -> list[VerificationReport]:
    if rc.upsilon is None:
        rep = VerificationReport("constraints")
        rep.skip("first_class", "no gauge subalgebra configured")
        return [rep]
    spec = GaugeSubalgebraSpec(rc.data, rc.upsilon)
    cs = make_constraints(spec, rc.U, rc.N_alg, allow_incompatible=True)
    return [check_subalgebra(spec), check_u_compatibility(spec, rc.U), first_class_check(cs)]


def suite_numlab(rc: RunConfig) -> list[VerificationReport]:
    d, k, U = rc.data, rc.k, rc.U
    tol = rc.tolerances
    rng = np.random.default_rng(rc.seed)
    p = random_point(d, rc.M, rng)
    sd = assemble(p, U.numeric(), k, rc.N_t)
    out = [verify_current_brackets(p, U, k, rc.N_t, n_max=rc.n_check, tol=tol["numeric_bracket"], sd=sd),
           verify_symmetry_relations(p, U, k, rc.N_t, tol=tol["symmetry"], sd=sd),
           verify_loop_group_bracket(p, U, k, rc.N_t, tol=tol["loop_group_bracket"], sd=sd)]

    geo = VerificationReport(f"form_geometry[{d.name}]")
    big = TangentVector(random_loop(d, rc.M, rng, 10.0, decay=0), random_loop(d, rc.M, rng, 10.0, decay=0))
    fit = derivative_convergence(p, big, k)
    geo.add("derivative_slope", abs(fit.slope - 2.0), tol["derivative_slope"],
            [f"fitted slope {fit.slope:.4f}"])
    vs = [TangentVector(random_loop(d, rc.M, rng, 1.0), random_loop(d, rc.M, rng, 1.0)) for _ in range(3)]
    geo.add("closedness", closedness_residual(p, *vs, U.numeric(), k), tol["closedness"])
    out.append(geo)

    out.append(flow_check(p, U, k, rc.N_t, T=rc.T, dt=rc.dt, drift_tol=tol["flow_drift"],
                          deriv_tol=tol["flow_derivative"]))
    if rc.upsilon is None:
        rep = VerificationReport("orbit_kernel")
        rep.skip("orbit_kernel", "no gauge subalgebra configured")
        out.append(rep)
    else:
        spec = GaugeSubalgebraSpec(d, rc.upsilon)
        if not check_u_compatibility(spec, U).passed:
            rep = VerificationReport("orbit_kernel")
            rep.skip("orbit_kernel", "U is incompatible with the gauge subalgebra")
            out.append(rep)
        else:
            sample = sample_locus(spec, U, k, rc.M, rc.seed, newton_tol=rc.newton_tol,
                                  max_iter=rc.max_iter)
            out.append(verify_orbit_kernel(spec, U, k, M=rc.M, seed=rc.seed, sample=sample,
                                           tangency_tol=tol["tangency"], kernel_tol=tol["kernel"]))
    return out


SUITE_FUNCS = {
    "algebra": suite_algebra,
    "bracket": suite_bracket,
    "bgroup": suite_bgroup,
    "constraints": suite_constraints,
    "numlab": suite_numlab,
}


def run(rc: RunConfig, suites) -> dict:
    """Run the named suites; returns the report payload."""
    params_hash = hashlib.sha256(json.dumps(rc.raw, sort_keys=True).encode()).hexdigest()[:16]
    rows = []
    for name in suites:
        try:
            reports = SUITE_FUNCS[name](rc)
        except UdwzwError as exc:
            rep = VerificationReport(name)
            rep.add("suite_error", 0.0, 0.0, [f"{type(exc).__name__}: {exc}"], status=FAIL)
            reports = [rep]
        for rep in reports:
            rep.stamp(rc.raw)
            for r in rep.results:
                rows.append({"suite": name, "report": rep.name, **r.as_dict(), "details": r.details})
    counts = {s: sum(r["status"] == s for r in rows) for s in (PASS, FAIL, SKIPPED)}
    return {"config": rc.raw, "params_hash": params_hash, "suites": list(suites),
            "counts": counts, "passed": counts[FAIL] == 0, "checks": rows}


def summary_table(payload: dict) -> str:
    rows = payload["checks"]
    names = [f"{r['report']}:{r['check']}" for r in rows]
    width = max((len(n) for n in names), default=5)
    lines = [f"{'check':<{width}}  {'residual':>12}  {'tolerance':>10}  status"]
    for n, r in zip(names, rows):
        lines.append(f"{n:<{width}}  {r['max_residual']:>12.3e}  {r['tolerance']:>10.1e}  {r['status']}")
    c = payload["counts"]
    lines.append(f"{c[PASS]} passed, {c[FAIL]} failed, {c[SKIPPED]} skipped")
    return "\n".join(lines)


def write_outputs(payload: dict, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    # json.dumps writes floats as shortest round-trip reprs, so reruns are byte-identical
    (out / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    (out / "summary.txt").write_text(summary_table(payload) + "\n")


COMMANDS = {
    "check-algebra": ("algebra",),
    "check-bracket": ("bracket",),
    "check-bgroup": ("bgroup",),
    "check-constraints": ("constraints",),
    "check-numlab": ("numlab",),
    "run-all": None,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="udwzw", description="Verification suites for the u-deformed WZW model.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file; missing keys take defaults")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--precision", type=int, metavar="BITS", help="override precision_bits")
        sp.add_argument("--out", default=".", metavar="DIR", help="directory for report.json and summary.txt")
        if name == "run-all":
            sp.add_argument("--suite", choices=SUITES + ("all",), default="all")
    sub.add_parser("print-config-schema")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "print-config-schema":
        print(json.dumps({"fields": SCHEMA, "defaults": DEFAULT_CONFIG}, indent=2))
        return EXIT_OK
    try:
        rc = load_config(args.config, args.seed, args.precision)
    except ConfigError as exc:
        print("invalid configuration:", file=sys.stderr)
        for line in str(exc).splitlines():
            print(f"  {line}", file=sys.stderr)
        return EXIT_CONFIG
    suites = COMMANDS[args.command]
    if suites is None:
        suites = SUITES if args.suite == "all" else (args.suite,)
    payload = run(rc, suites)
    write_outputs(payload, Path(args.out))
    print(summary_table(payload))
    return EXIT_OK if payload["passed"] else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
