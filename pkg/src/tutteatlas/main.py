"""Main entry point for the tutte-atlas command line."""

from __future__ import annotations

import argparse
import asyncio
import csv
import hashlib
import io
import json
import logging
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Any, NoReturn

import numpy as np

from tutteatlas.config import Config, RuntimeConfig
from tutteatlas.eigen import (
    Branch,
    DominanceTerm,
    classify_dominance,
    pressure,
    pressure_error,
    pressure_limit,
    theorem3_region_check,
    verify_beraha_factorization,
)
from tutteatlas.errors import ComputationError, TutteAtlasError, ValidationError
from tutteatlas.exact_poly import Rational, ZPoly, symmetric_to_z
from tutteatlas.graph_families import (
    FamilyId,
    build_family_graph,
    family_poly,
    family_zpoly,
    spectral_form,
)
from tutteatlas.limit_sets import Plane, family_limit_set, z_to_v
from tutteatlas.plotting import (
    fmt,
    limit_set_data,
    render,
    replot,
    write_output,
    zero_set_data,
)
from tutteatlas.roots import ConvergenceRunner, NewtonRatio, RootSet, exact_q, find_roots
from tutteatlas.tutte_oracle import Multigraph, TutteOracle

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
COUNTEREXAMPLE_Q = 16
BERAHA_TOLERANCE = 1e-6


def setup_logging(runtime: RuntimeConfig) -> None:
    """Log to stderr (stdout carries data) and optionally to a file."""
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if runtime.log_file:
        handlers.append(logging.FileHandler(runtime.log_file))
    logging.basicConfig(level=runtime.log_level, format=LOG_FORMAT, handlers=handlers, force=True)


# ---------------------------------------------------------------------------
# Argument parsing


def parse_q(text: str) -> Rational | float:
    """'16' and '3/2' stay exact; '2.5' is a float."""
    text = text.strip()
    try:
        if "." in text or "e" in text.lower():
            return float(text)
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"invalid q value {text!r}") from e


def parse_complex(text: str) -> complex:
    """'re,im' or a complex literal such as '5+2i'."""
    try:
        if "," in text:
            re, im = text.split(",")
            return complex(float(re), float(im))
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid complex number {text!r}") from e


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid integer list {text!r}") from e


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from e


def parse_grid(text: str) -> tuple[np.ndarray, np.ndarray]:
    """'re0:re1:steps,im0:im1:steps' into two coordinate vectors."""
    try:
        axes = []
        for part in text.split(","):
            lo, hi, steps = part.split(":")
            axes.append(np.linspace(float(lo), float(hi), int(steps)))
        re_axis, im_axis = axes
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}") from e
    return re_axis, im_axis


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with status 1 and name the offending flag."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="tutte-atlas",
        description="Tutte polynomials of self-dual families, their zeros and limit sets",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    def add_output(p: argparse.ArgumentParser, choices: Sequence[str]) -> None:
        p.add_argument("--out", choices=list(choices), default=choices[0], dest="output_format")
        p.add_argument("--output", default=None, help="file to write (default: stdout)")

    p = sub.add_parser("family", help="exact family polynomial")
    p.add_argument("--id", required=True, type=FamilyId, choices=list(FamilyId), dest="family")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--q", type=parse_q)
    p.add_argument("--format", choices=["xy", "z", "json"], default="xy", dest="output_format")
    p.add_argument("--output", default=None)

    p = sub.add_parser("oracle", help="Tutte polynomial of a graph file by deletion-contraction")
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=["xy", "json"], default="xy", dest="output_format")
    p.add_argument("--output", default=None)

    p = sub.add_parser("zeros", help="zeros of a family polynomial")
    p.add_argument("--family", required=True, type=FamilyId, choices=list(FamilyId))
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--q", required=True, type=parse_q)
    p.add_argument("--plane", type=Plane, choices=list(Plane), default=Plane.Z)
    p.add_argument("--positive-re", action="store_true")
    add_output(p, ["csv", "json", "svg"])

    p = sub.add_parser("limitset", help="sampled limiting zero set")
    p.add_argument("--family", required=True, type=FamilyId, choices=list(FamilyId))
    p.add_argument("--q", required=True, type=parse_q)
    p.add_argument("--plane", type=Plane, choices=list(Plane), default=Plane.Z)
    p.add_argument("--samples", type=int)
    add_output(p, ["csv", "svg", "json"])

    p = sub.add_parser("dominance", help="dominance verdicts on a grid")
    p.add_argument("--q", required=True, type=parse_q)
    p.add_argument("--pairs", required=True, type=parse_float_list)
    p.add_argument("--grid", required=True, type=parse_grid)
    add_output(p, ["csv"])

    p = sub.add_parser("pressure", help="finite-n pressure against its limit")
    p.add_argument("--family", required=True, type=FamilyId, choices=list(FamilyId))
    p.add_argument("--q", required=True, type=parse_q)
    p.add_argument("--z", required=True, type=parse_complex)
    p.add_argument("--n", required=True, type=parse_int_list, dest="n_values")
    add_output(p, ["csv", "json"])

    p = sub.add_parser("convergence", help="distance of zeros to the limit set, per n")
    p.add_argument("--family", required=True, type=FamilyId, choices=list(FamilyId))
    p.add_argument("--q", required=True, type=parse_q)
    p.add_argument("--n", required=True, type=parse_int_list, dest="n_list")
    p.add_argument("--plane", type=Plane, choices=list(Plane), default=Plane.Z)
    p.add_argument("--window", type=float, default=None, help="ignore points beyond this modulus")
    add_output(p, ["csv", "json"])

    p = sub.add_parser("verify-counterexample", help="refutation check on the 4-vertex graph")
    p.add_argument("--q", type=parse_q, default=Fraction(COUNTEREXAMPLE_Q))
    p.add_argument("--output", default=None)

    p = sub.add_parser("verify-beraha", help="strip polynomial factorization residual")
    p.add_argument("--width", type=int, choices=[2, 3], required=True)
    p.add_argument("--q", type=parse_q, default=2.5)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--output", default=None)

    p = sub.add_parser("replot", help="rebuild an SVG from emitted CSV/JSON files")
    p.add_argument("--input", required=True, nargs="+", dest="inputs")
    p.add_argument("--output", default=None)

    return parser


# ---------------------------------------------------------------------------
# Run configuration


@dataclass
class RunConfig:
    """Parsed command plus the environment configuration it runs under."""

    command: str
    config: Config
    family: FamilyId | None = None
    n: int = 0
    q: Rational | float | None = None
    plane: Plane = Plane.Z
    output_format: str = "csv"
    output: str | None = None
    options: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace, config: Config) -> RunConfig:
        values = dict(vars(args))
        known = {
            name: values.pop(name)
            for name in ("family", "n", "q", "plane", "output_format", "output")
            if name in values
        }
        command = values.pop("command")
        return cls(command=command, config=config, options=values, **known)

    @property
    def q_float(self) -> float:
        if self.q is None:
            raise ValidationError(f"{self.command} needs --q")
        return float(self.q)

    def seed(self) -> int:
        """Root-finder seed: the configured one, else a hash of this run."""
        if self.config.roots.seed is not None:
            return self.config.roots.seed
        key = json.dumps(
            [self.command, str(self.family), self.n, str(self.q), str(self.plane), self.options],
            sort_keys=True,
            default=str,
        )
        return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


# ---------------------------------------------------------------------------
# Subcommands


def _family_roots(cfg: RunConfig, family: FamilyId, n: int, q: Rational | float) -> RootSet:
    polynomial = family_zpoly(family, n, exact_q(q))
    evaluator: NewtonRatio | None = None
    if family is not FamilyId.COUNTEREXAMPLE and float(q) > 1:
        evaluator = partial(spectral_form(family, float(q)).newton_ratio, n)

    return find_roots(
        polynomial,
        max_sweeps=cfg.config.roots.max_sweeps,
        cluster_tolerance=cfg.config.roots.cluster_tolerance,
        seed=cfg.seed(),
        evaluator=evaluator,
    )


def cmd_family(cfg: RunConfig) -> str:
    assert cfg.family is not None
    poly = family_poly(cfg.family, cfg.n)
    if cfg.output_format == "xy":
        return f"{poly}\n"
    if cfg.output_format == "z":
        if cfg.q is None:
            raise ValidationError("--format z needs --q")
        return f"{family_zpoly(cfg.family, cfg.n, exact_q(cfg.q))}\n"
    payload: dict[str, Any] = {"family": str(cfg.family), "n": cfg.n, "xy": poly.to_json()}
    if cfg.q is not None:
        payload["q"] = str(cfg.q)
        payload["z"] = family_zpoly(cfg.family, cfg.n, exact_q(cfg.q)).to_json()
    return json.dumps(payload, indent=2) + "\n"


def cmd_oracle(cfg: RunConfig) -> str:
    graph = Multigraph.load(cfg.options["graph"])
    oracle = TutteOracle(max_edges=cfg.config.oracle.max_edges)
    poly = oracle.tutte(graph)
    logger.info(f"oracle cache holds {oracle.cache_size} subgraphs")
    if cfg.output_format == "json":
        return json.dumps({"graph": graph.to_json(), "xy": poly.to_json()}, indent=2) + "\n"
    return f"{poly}\n"


def cmd_zeros(cfg: RunConfig) -> str:
    assert cfg.family is not None and cfg.q is not None
    rs = _family_roots(cfg, cfg.family, cfg.n, cfg.q)
    data = zero_set_data(rs, cfg.plane, cfg.q_float, positive_re=cfg.options["positive_re"])
    text = render(data, cfg.output_format)
    if not rs.converged:
        # emit the partial result, then fail with status 2
        write_output(text, cfg.output, sys.stdout)
        rs.raise_for_convergence()
    return text


def cmd_limitset(cfg: RunConfig) -> str:
    assert cfg.family is not None
    samples = cfg.options.get("samples") or cfg.config.sampling.min_samples
    curves = family_limit_set(
        cfg.family, cfg.q_float, cfg.plane, samples=samples, d_max=cfg.config.sampling.max_imag
    )
    return render(limit_set_data(curves, samples), cfg.output_format)


def cmd_dominance(cfg: RunConfig) -> str:
    q = cfg.q_float
    pairs: list[float] = cfg.options["pairs"]
    if not pairs:
        raise ValidationError("--pairs needs at least one value")
    terms = [DominanceTerm(a, branch) for a in pairs for branch in Branch]
    a_l, a_u = min(pairs), max(pairs)
    re_axis, im_axis = cfg.options["grid"]

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["re", "im", "verdict", "a", "branch", "margin", "region"])
    for im in im_axis:
        for re in re_axis:
            z = complex(float(re), float(im))
            verdict = classify_dominance(z, terms, q, cfg.config.eigen.tie_tolerance)
            if verdict.is_unique:
                term = terms[verdict.index]
                a, branch = fmt(term.a), str(term.branch)
            else:
                a = ";".join(fmt(terms[k].a) for k in verdict.indices)
                branch = ";".join(str(terms[k].branch) for k in verdict.indices)
            region = theorem3_region_check(z, a_l, a_u, q)
            writer.writerow(
                [fmt(z.real), fmt(z.imag), verdict.kind, a, branch, fmt(verdict.margin), region]
            )
    return buffer.getvalue()


def cmd_pressure(cfg: RunConfig) -> str:
    assert cfg.family is not None
    form = spectral_form(cfg.family, cfg.q_float)
    z: complex = cfg.options["z"]
    limit = pressure_limit(form, z, cfg.config.eigen.tie_tolerance)
    rows = []
    for n in cfg.options["n_values"]:
        value = pressure(form, n, z)
        error = pressure_error(form, n, z, cfg.config.eigen.tie_tolerance)
        rows.append((n, value, error))

    if cfg.output_format == "json":
        payload = {
            "family": str(cfg.family),
            "q": cfg.q_float,
            "z": [z.real, z.imag],
            "limit": [limit.real, limit.imag],
            "rows": [
                {"n": n, "pressure": [v.real, v.imag], "error": e} for n, v, e in rows
            ],
        }
        return json.dumps(payload, indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", "re", "im", "limit_re", "limit_im", "error"])
    for n, value, error in rows:
        writer.writerow(
            [n, fmt(value.real), fmt(value.imag), fmt(limit.real), fmt(limit.imag), fmt(error)]
        )
    return buffer.getvalue()


def cmd_convergence(cfg: RunConfig) -> str:
    assert cfg.family is not None and cfg.q is not None
    runner = ConvergenceRunner(
        cfg.family,
        cfg.q,
        cfg.plane,
        samples=max(cfg.config.sampling.min_samples, 2048),
        d_max=cfg.config.sampling.max_imag,
        max_sweeps=cfg.config.roots.max_sweeps,
        seed=cfg.seed(),
        threads=cfg.config.runtime.threads,
        window=cfg.options["window"],
    )
    report = asyncio.run(runner.report_async(cfg.options["n_list"]))

    if cfg.output_format == "json":
        payload = {
            "family": str(report.family),
            "q": report.q,
            "plane": str(report.plane),
            "rows": [
                {
                    "n": row.n,
                    "root_count": row.root_count,
                    "max_distance": row.max_distance,
                    "mean_distance": row.mean_distance,
                    "converged": row.converged,
                    "isolated": [[p.real, p.imag] for p in row.isolated],
                    "outside": row.outside,
                }
                for row in report.rows
            ],
        }
        return json.dumps(payload, indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", "root_count", "max_distance", "mean_distance", "converged", "isolated"])
    for row in report.rows:
        writer.writerow(
            [
                row.n,
                row.root_count,
                fmt(row.max_distance),
                fmt(row.mean_distance),
                row.converged,
                len(row.isolated),
            ]
        )
    return buffer.getvalue()


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class CounterexampleReport:
    """Outcome of the counterexample pipeline; ``failed_stage`` names a crashed stage."""

    q: Rational | float
    polynomial: ZPoly | None = None
    roots: tuple[complex, ...] = ()
    v_points: tuple[complex, ...] = ()
    checks: list[Check] = field(default_factory=list)
    failed_stage: str | None = None

    @property
    def passed(self) -> bool:
        return self.failed_stage is None and bool(self.checks) and all(
            c.passed for c in self.checks
        )

    def format(self) -> str:
        lines = [f"counterexample check at q = {self.q}"]
        if self.polynomial is not None:
            lines.append(f"polynomial: {self.polynomial}")
        for r in self.roots:
            lines.append(f"root z = {fmt(r.real)} {fmt(r.imag)}i")
        for v in self.v_points:
            lines.append(f"v = {fmt(v.real)} {fmt(v.imag)}i, |v| - 1 = {fmt(abs(v) - 1)}")
        for c in self.checks:
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        if self.failed_stage is not None:
            lines.append(f"[FAIL] stage {self.failed_stage} raised an error")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"


def cmd_verify_counterexample(
    q: Rational | float = COUNTEREXAMPLE_Q, config: Config | None = None
) -> CounterexampleReport:
    """Build the 4-vertex graph, restrict to z at q, and test where its zeros land in v."""
    report = CounterexampleReport(q=q)
    max_edges = config.oracle.max_edges if config else 64
    stage = "oracle"
    try:
        graph = build_family_graph(FamilyId.COUNTEREXAMPLE, max_edges=max_edges)
        tutte = TutteOracle(max_edges=max_edges).tutte(graph)
        report.checks.append(
            Check(
                "oracle matches recurrence",
                tutte == family_poly(FamilyId.COUNTEREXAMPLE),
                f"T(C) = {tutte}",
            )
        )

        stage = "reduction"
        polynomial = symmetric_to_z(tutte, exact_q(q))
        report.polynomial = polynomial

        stage = "roots"
        rs = find_roots(
            polynomial,
            max_sweeps=config.roots.max_sweeps if config else 1000,
            seed=config.roots.seed if config and config.roots.seed is not None else 0,
        )
        rs.raise_for_convergence()
        report.roots = rs.roots
        real = rs.real_roots()
        complex_roots = [r for r in rs.roots if r not in real]
        report.checks.append(
            Check("exactly one real root", len(real) == 1, f"{len(real)} real roots")
        )
        report.checks.append(
            Check(
                "complex roots have Re(z) > 0",
                bool(complex_roots) and all(r.real > 0 for r in complex_roots),
                ", ".join(fmt(r.real) for r in complex_roots) or "none",
            )
        )

        stage = "v-map"
        v_points = tuple(v for r in complex_roots for v in z_to_v(r, float(q)) if v.real > 0)
        report.v_points = v_points
        report.checks.append(
            Check(
                "Re(v) > 0 preimages are off the unit circle",
                bool(v_points) and all(abs(abs(v) - 1) > 0.01 for v in v_points),
                ", ".join(fmt(abs(abs(v) - 1)) for v in v_points) or "none",
            )
        )
    except TutteAtlasError as e:
        logger.exception(f"counterexample pipeline failed in stage {stage}: {e}")
        report.failed_stage = stage
    return report


def cmd_verify_beraha(cfg: RunConfig) -> str:
    width: int = cfg.options["width"]
    rng = np.random.default_rng(cfg.seed())
    count: int = cfg.options["samples"]
    zs = rng.uniform(-6, 6, count) + 1j * rng.uniform(0.1, 6, count)
    zs = np.where(rng.random(count) < 0.5, zs, zs.conjugate())
    residual = verify_beraha_factorization(width, [complex(z) for z in zs], cfg.q_float)
    passed = residual < BERAHA_TOLERANCE
    text = f"strip width {width}, q = {cfg.q}: max residual {fmt(residual)}\n"
    text += "PASS\n" if passed else "FAIL\n"
    if not passed:
        write_output(text, cfg.output, sys.stdout)
        raise ComputationError(
            f"strip width {width} residual {residual:.3g} above {BERAHA_TOLERANCE}"
        )
    return text


def cmd_replot(cfg: RunConfig) -> str:
    return replot(cfg.options["inputs"])


_COMMANDS: dict[str, Callable[[RunConfig], str]] = {
    "family": cmd_family,
    "oracle": cmd_oracle,
    "zeros": cmd_zeros,
    "limitset": cmd_limitset,
    "dominance": cmd_dominance,
    "pressure": cmd_pressure,
    "convergence": cmd_convergence,
    "verify-beraha": cmd_verify_beraha,
    "replot": cmd_replot,
}


def cmd_dispatch(cfg: RunConfig) -> int:
    """Route to the subcommand; 0 on success, 1 on bad input, 2 on a numeric failure."""
    try:
        if cfg.command == "verify-counterexample":
            assert cfg.q is not None
            report = cmd_verify_counterexample(cfg.q, cfg.config)
            write_output(report.format(), cfg.output, sys.stdout)
            return 0 if report.passed else 2
        if cfg.family is FamilyId.COUNTEREXAMPLE and cfg.command in {
            "limitset",
            "pressure",
            "convergence",
        }:
            raise ValidationError(f"{cfg.command} is undefined for the counterexample graph")
        text = _COMMANDS[cfg.command](cfg)
        write_output(text, cfg.output, sys.stdout)
        return 0
    except ValidationError as e:
        logger.error(f"invalid input: {e}")
        return 1
    except ComputationError as e:
        logger.error(f"computation failed: {e}")
        return 2
    except OSError as e:
        logger.error(f"cannot read or write a file: {e}")
        return 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = Config.load()
    except ValueError as e:
        print(f"tutte-atlas: configuration error: {e}", file=sys.stderr)
        return 1
    setup_logging(config.runtime)
    cfg = RunConfig.from_args(args, config)
    logger.debug(f"running {cfg.command} with {cfg.options}")
    return cmd_dispatch(cfg)


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
