"""Command-line driver: generate instances, select, verify, benchmark.

Exit codes: 0 success, 1 premise violated, 2 verification failure,
3 scale guard exceeded, 4 I/O, schema or usage error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .engine import RBound, select
from .errors import (
    EquatorSingularity,
    PremiseViolated,
    ScaleLimit,
    SchemaError,
    VerificationFailed,
)
from .oracles import RandomSource
from .pipeline import select_spherical
from .workbench import (
    DEFAULT_SAMPLES,
    canonical_json,
    gen_euclid,
    gen_sphere,
    load_certificate,
    load_instance,
    run_selection,
    save_text,
    verify,
)

EXIT_OK = 0
EXIT_PREMISE = 1
EXIT_VERIFY = 2
EXIT_SCALE = 3
EXIT_IO = 4

SOUTHERN_MIX = (0.0, 0.3, 0.5)


class _Parser(argparse.ArgumentParser):
    # usage errors share the I/O exit code; 2 is reserved for failed verification
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _emit(args, payload, text):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _cmd_gen(args):
    if args.kind == "euclid":
        inst = gen_euclid(args.dim, args.n, args.seed)
    else:
        if args.rho is None:
            raise ValueError("gen sphere needs --rho")
        inst = gen_sphere(args.dim, args.n, args.rho, args.seed, args.southern_fraction)
    text = inst.dumps()
    if args.output:
        save_text(args.output, text)
    else:
        sys.stdout.write(text)
        return EXIT_OK
    _emit(args, {"output": args.output, "digest": inst.digest(), "n": len(inst.points)},
          f"wrote {args.output} ({len(inst.points)} points, {inst.digest()})")
    return EXIT_OK


def _cmd_select(args):
    inst, digest = load_instance(args.input)
    want = "euclidean" if args.kind == "euclid" else "spherical"
    if inst.kind != want:
        raise SchemaError(f"{args.input} holds a {inst.kind} instance, expected {want}")
    cfile = run_selection(inst, digest, args.method, args.samples)
    save_text(args.output, cfile.dumps())
    cert = cfile.certificate
    status = cfile.verification["status"]
    if inst.kind == "euclidean":
        summary = f"radius {cert.achieved_radius:.6g}"
    else:
        summary = (f"case {cert.case_tag}, cap {cert.achieved_cap:.6g} "
                   f"(certified {cert.certified_cap:.6g})")
    _emit(args, {"output": args.output, "indices": list(cert.indices), "verification": status},
          f"selected {list(cert.indices)}: {summary}; verification {status}")
    return EXIT_OK if status == "passed" else EXIT_VERIFY


def _cmd_verify(args):
    inst, digest = load_instance(args.instance)
    cfile = load_certificate(args.certificate)
    report = verify(inst, cfile, digest, args.samples)
    lines = [f"verification {report['status']}"] + [f"  - {f}" for f in report["failures"]]
    _emit(args, report, "\n".join(lines))
    return EXIT_OK if report["status"] == "passed" else EXIT_VERIFY


def _trial_seed(seed, stream):
    return int(RandomSource(seed, stream).generator().integers(2**63))


def bench_report(dims, trials, seed, method="exact"):
    """Empirical minima of the selection radii against the known bracket.

    Each trial draws its instance parameters and generator seed from its own
    ``RandomSource`` stream, so a report depends only on its arguments.
    """
    out = {"seed": seed, "trials": trials, "method": method, "dimensions": []}
    for d in dims:
        radii, ratios, cases = [], [], {}
        for t in range(trials):
            rng = RandomSource(seed, 2 * t).generator()
            n = int(rng.integers(2 * d, 2 * d + 5))
            inst = gen_euclid(d, n, _trial_seed(seed, 2 * t))
            radii.append(select(inst.array, method).achieved_radius)

            rng = RandomSource(seed, 2 * t + 1).generator()
            n = int(rng.integers(2 * d + 2, 2 * d + 7))
            rho = float(rng.uniform(0.1, 1.0))
            frac = SOUTHERN_MIX[t % len(SOUTHERN_MIX)]
            inst = gen_sphere(d, n, rho, _trial_seed(seed, 2 * t + 1), frac)
            cert = select_spherical(inst.array, rho, method)
            ratios.append(cert.achieved_cap / rho)
            cases[cert.case_tag] = cases.get(cert.case_tag, 0) + 1
        bound = RBound(d)
        out["dimensions"].append({
            "dim": d,
            "bracket": [bound.lower, bound.upper],
            "min_achieved_radius": min(radii),
            "min_cap_ratio": min(ratios),
            "cases": dict(sorted(cases.items())),
        })
    return out


def _cmd_bench(args):
    try:
        dims = [int(x) for x in args.dims.split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"--dims must be comma-separated integers, got {args.dims!r}") from None
    if not dims or any(d < 2 for d in dims):
        raise ValueError("--dims needs dimensions >= 2")
    if args.trials < 1:
        raise ValueError("--trials must be at least 1")
    report = bench_report(dims, args.trials, args.seed, args.method)
    if args.report:
        save_text(args.report, canonical_json(report))
    lines = []
    for row in report["dimensions"]:
        lo, hi = row["bracket"]
        lines.append(
            f"d={row['dim']}: min radius {row['min_achieved_radius']:.6g} "
            f"(bracket [{lo:.6g}, {hi:.6g}]), min cap/rho {row['min_cap_ratio']:.6g}"
        )
    _emit(args, report, "\n".join(lines))
    return EXIT_OK


def build_parser():
    p = _Parser(prog="qsteinitz", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("kind", choices=("euclid", "sphere"))
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--rho", type=float, help="premise cap radius (sphere)")
    g.add_argument("--southern-fraction", type=float, default=0.0)
    g.add_argument("-o", "--output", help="output file (stdout if omitted)")
    g.set_defaults(func=_cmd_gen)

    s = sub.add_parser("select", help="select points and write a certificate")
    s.add_argument("kind", choices=("euclid", "sphere"))
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--method", choices=("auto", "exact", "greedy"), default="auto")
    s.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                   help="Monte-Carlo samples for the attached verification")
    s.set_defaults(func=_cmd_select)

    v = sub.add_parser("verify", help="re-verify a certificate against its instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--certificate", required=True)
    v.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    v.set_defaults(func=_cmd_verify)

    b = sub.add_parser("bench", help="empirical selection radii per dimension")
    b.add_argument("--dims", default="2,3")
    b.add_argument("--trials", type=int, default=20)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--method", choices=("exact", "greedy"), default="exact")
    b.add_argument("--report", help="write the report JSON here")
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PremiseViolated, EquatorSingularity) as exc:
        print(f"premise violated: {exc}", file=sys.stderr)
        return EXIT_PREMISE
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ScaleLimit as exc:
        print(f"scale limit: {exc}", file=sys.stderr)
        return EXIT_SCALE
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
