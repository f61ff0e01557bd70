"""Command-line front end.

Exit codes:
    0  result produced
    1  selfcheck ran but some check failed, or an unexpected error
    2  bad command-line usage
    3  malformed JSON input
    4  invalid graph or charges
    5  size cap or other resource limit exceeded
    6  argument outside the mathematical domain
    7  evaluation at a pole
    8  Monte Carlo refused: infinite variance
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import __version__
from .chromatic import chromatic_polynomial
from .errors import GraphInputError, GraphZetaError
from .gas import ChargeDistribution, hypothesis_check, phase_transition_check, substitute_charges
from .graph import Graph
from .oracle import mc_partition_estimate
from .selfcheck import run_selfcheck
from .thermo import (StarGasSpec, free_energy_per_particle, grand_canonical, mean_energy,
                     star_partition)
from .zeta import dumps, to_latex, with_prime, zeta

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_JSON = 0, 1, 2, 3


class MalformedJSON(GraphZetaError):
    exit_code = EXIT_JSON


@dataclass
class RunManifest:
    command: str
    input_digest: str
    tool_version: str
    seeds: list
    wall_time_s: float | None
    output_digest: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def load_graph(path: str) -> tuple[Graph, list | None, bytes]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise GraphInputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedJSON(f"{path}: not valid JSON ({exc})") from exc
    return parse_graph(data) + (raw,)


def parse_graph(data) -> tuple[Graph, list | None]:
    if not isinstance(data, dict) or "vertices" not in data:
        raise GraphInputError('graph JSON must be an object with "vertices" and "edges"')
    n = data["vertices"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise GraphInputError('"vertices" must be a non-negative integer')
    edges = data.get("edges", [])
    if not isinstance(edges, list) or not all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e) for e in edges):
        raise GraphInputError('"edges" must be a list of [u, v] integer pairs')
    g = Graph.from_edges(n, edges)
    charges = data.get("charges")
    if charges is not None and (not isinstance(charges, list) or len(charges) != n):
        raise GraphInputError('"charges" must list one value per vertex')
    return g, charges


def _number(text: str):
    text = text.strip()
    try:
        return Fraction(text) if "." not in text and "e" not in text.lower() else float(text)
    except ValueError as exc:
        raise GraphInputError(f"cannot parse number {text!r}") from exc


def parse_exponents(text: str):
    """A single value, a comma list, or a JSON list/object keyed by edge id."""
    text = text.strip()
    if text.startswith("[") or text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedJSON(f"--exponents: {exc}") from exc
        if isinstance(data, dict):
            return {int(k): _number(str(v)) for k, v in data.items()}
        return [_number(str(v)) for v in data]
    parts = text.split(",")
    return _number(parts[0]) if len(parts) == 1 else [_number(x) for x in parts]


def _jsonable_number(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return x


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_zeta(args, g: Graph) -> str:
    z = zeta(g, max_vertices=args.max_vertices)
    if args.prime is not None:
        z = with_prime(z, args.prime)
    if args.format == "latex":
        return to_latex(z) + "\n"
    return dumps(z) + "\n"


def cmd_gas(args, g: Graph, charges) -> str:
    if charges is None:
        raise GraphInputError('gas needs "charges" in the graph file')
    if args.prime is None:
        raise GraphInputError("gas needs --prime")
    e = ChargeDistribution(tuple(charges))
    z = zeta(g, max_vertices=args.max_vertices)
    verdict = phase_transition_check(g, args.prime, e, z)
    out = verdict.to_dict()
    out.update(hypothesis_check(g, e).to_dict())
    if args.beta is not None:
        rat = verdict.partition_function
        if rat is None:
            rat = substitute_charges(z, g, e, args.prime)
        out["Z_beta"] = _jsonable_number(rat(_number(args.beta)))
    return _dump(out)


def cmd_oracle(args, g: Graph) -> str:
    if args.prime is None:
        raise GraphInputError("oracle needs --prime")
    est = mc_partition_estimate(g, args.prime, parse_exponents(args.exponents), args.samples,
                                args.seed, workers=args.workers)
    return _dump(est.to_dict())


def cmd_thermo(args) -> str:
    p = args.prime if args.prime is not None else 2
    beta = _number(args.beta) if args.beta is not None else Fraction(0)
    spec = StarGasSpec(args.M, args.k, p, beta)
    out = {"M": args.M, "k": args.k, "p": p, "beta": _jsonable_number(beta),
           "Z_Mk": _jsonable_number(star_partition(spec))}
    b = float(beta)
    if 0 <= b < 1:
        rho = args.rho if args.rho is not None else args.M / p**args.k
        out["rho"] = rho
        out["beta_f"] = free_energy_per_particle(rho, p, b)
        out["mean_energy"] = mean_energy(p, b)
        gc = grand_canonical(p, args.k, b, args.X if args.X is not None else 0.0)
        out["grand_canonical_pole"] = {"X2": gc.pole_X2, "radius": gc.radius}
        if args.X is not None:
            out["grand_canonical"] = gc.value
    else:
        out["beta_f"] = out["mean_energy"] = out["grand_canonical_pole"] = None
    return _dump(out)


def cmd_chromatic(args, g: Graph) -> str:
    chi = chromatic_polynomial(g)
    return _dump({"coefficients": list(chi.coefficients), "polynomial": str(chi)})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphzeta",
                                     description="Local zeta functions of graphs and p-adic Coulomb gases.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph=True):
        if graph:
            p.add_argument("--graph", required=True, help="graph JSON file")
        p.add_argument("--prime", type=int)
        p.add_argument("--out", help="write the result here (atomically) instead of stdout")
        p.add_argument("--manifest", help="write the run manifest here instead of stderr")
        p.add_argument("--record-time", action="store_true",
                       help="store wall time in the manifest (breaks byte-identical reruns)")
        p.add_argument("--max-vertices", type=int, default=None)

    p = sub.add_parser("zeta", help="exact zeta function")
    common(p)
    p.add_argument("--format", choices=("json", "latex"), default="json")

    p = sub.add_parser("gas", help="convergence interval and phase transition")
    common(p)
    p.add_argument("--beta", help="also evaluate Z at this beta")

    p = sub.add_parser("oracle", help="Monte Carlo estimate of the integral")
    common(p)
    p.add_argument("--exponents", default="1")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("thermo", help="neutral star gas thermodynamics")
    common(p, graph=False)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--beta")
    p.add_argument("--X", type=float)
    p.add_argument("--rho", type=float)

    p = sub.add_parser("chromatic", help="chromatic polynomial")
    common(p)

    p = sub.add_parser("selfcheck", help="run the closed-form regression suite")
    common(p, graph=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20000)
    return parser


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _input_digest(args, raw: bytes | None) -> str:
    skip = {"out", "manifest", "record_time", "graph"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    blob = json.dumps(params, sort_keys=True, default=str).encode()
    if raw is not None:
        blob += b"\0" + raw
    return _sha256(blob)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    raw = None
    code = EXIT_OK
    try:
        if args.command == "thermo":
            text = cmd_thermo(args)
        elif args.command == "selfcheck":
            report = run_selfcheck(args.seed, args.samples)
            text = _dump(report)
            if not report["passed"]:
                code = EXIT_FAIL
        else:
            g, charges, raw = load_graph(args.graph)
            if args.command == "zeta":
                text = cmd_zeta(args, g)
            elif args.command == "gas":
                text = cmd_gas(args, g, charges)
            elif args.command == "oracle":
                text = cmd_oracle(args, g)
            else:
                text = cmd_chromatic(args, g)
    except GraphZetaError as exc:
        print(f"graphzeta {args.command}: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", EXIT_FAIL)

    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    seeds = [args.seed] if hasattr(args, "seed") else []
    manifest = RunManifest(args.command, _input_digest(args, raw), __version__, seeds,
                           round(time.perf_counter() - start, 6) if args.record_time else None,
                           _sha256(text.encode()))
    if args.manifest:
        write_atomic(args.manifest, manifest.to_json())
    else:
        sys.stderr.write(manifest.to_json())
    return code


def main() -> None:
    sys.exit(run())
