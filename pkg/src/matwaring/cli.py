"""Command-line front end.

Subcommands:
    decompose POLY MATRIX.json   write a decomposition certificate
    verify CERT.json             independently re-check a certificate
    classify POLY N              probabilistic polynomial classification
    search-image POLY N          randomized witness search

Exit codes: 0 success, 1 verification failure, 2 parse/input error,
3 polynomial not generic, 4 search budget exhausted, 5 residual failure.
"""

import argparse
import sys
from dataclasses import dataclass, field

from .config import CLASSIFY_SAMPLES, CLASSIFY_TOL, DEFAULT_BUDGET, DEFAULT_TOLS
from .errors import (
    BudgetExhaustedError,
    MatWaringError,
    NotGenericError,
    ParseError,
    PreconditionUnmetError,
    ResidualTooLargeError,
)
from .freealg import classify, parse
from .linalg import fro, project_traceless
from .serialize import (
    dumps_canonical,
    load_json,
    matrix_from_json,
    matrix_to_json,
    save_certificate,
)
from .verify import verify_certificate
from .waring import (
    GOAL_DISTINCT_EIGS,
    GOAL_MULTIPLICITY_HALF,
    GOAL_NONZERO_TRACE,
    _is_prime,
    five_term_express,
    image_search,
    two_term_decompose,
    waring_express,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_NOT_GENERIC = 3
EXIT_BUDGET = 4
EXIT_RESIDUAL = 5

_TOL_FLAGS = ("gap", "hollow", "split", "cert", "end", "rank")


@dataclass
class RunConfig:
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    out: str = "certificate.json"
    overrides: dict = field(default_factory=dict)

    def tolerances(self):
        return DEFAULT_TOLS.with_overrides(
            **{f"{k}_tol": v for k, v in self.overrides.items()}
        )


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    for name in _TOL_FLAGS:
        parser.add_argument(f"--tol-{name}", type=float, default=None,
                            metavar="X", help=f"override {name}_tol")


def _config_from(args):
    cfg = RunConfig(seed=args.seed, budget=args.budget,
                    out=getattr(args, "out", "certificate.json"))
    for name in _TOL_FLAGS:
        value = getattr(args, f"tol_{name.replace('-', '_')}")
        if value is not None:
            if value <= 0:
                raise ValueError(f"--tol-{name} must be positive")
            cfg.overrides[name] = value
    return cfg


def build_parser():
    parser = argparse.ArgumentParser(
        prog="matwaring",
        description="Waring-type decompositions of matrices through "
                    "noncommutative polynomial images, with verifiable "
                    "certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="decompose a matrix through f")
    p.add_argument("poly", help="polynomial text, e.g. '[X1,X2]'")
    p.add_argument("matrix", help="target matrix JSON file")
    p.add_argument("--mode", choices=["four", "two", "five", "auto"],
                   default="auto")
    p.add_argument("--out", default="certificate.json")
    _add_common(p)

    p = sub.add_parser("verify", help="re-verify a certificate file")
    p.add_argument("certificate")

    p = sub.add_parser("classify", help="classify a polynomial on M_n(C)")
    p.add_argument("poly")
    p.add_argument("n", type=int)
    p.add_argument("--samples", type=int, default=CLASSIFY_SAMPLES)
    p.add_argument("--tol", type=float, default=CLASSIFY_TOL)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("search-image", help="find an image point meeting a goal")
    p.add_argument("poly")
    p.add_argument("n", type=int)
    p.add_argument("--goal",
                   choices=[GOAL_MULTIPLICITY_HALF, GOAL_DISTINCT_EIGS,
                            GOAL_NONZERO_TRACE],
                   default=GOAL_MULTIPLICITY_HALF)
    p.add_argument("--out", default="witness.json")
    _add_common(p)

    return parser


def cmd_decompose(args):
    cfg = _config_from(args)
    tols = cfg.tolerances()
    f = parse(args.poly)
    A = matrix_from_json(load_json(args.matrix))
    n = A.shape[0]

    mode = args.mode
    if mode == "auto":
        trace_mag = abs(complex(A.trace()))
        if trace_mag > tols.hollow_tol * max(fro(A), 1e-300):
            print(f"warning: target has trace {trace_mag:.3e}; "
                  "projecting onto trace zero", file=sys.stderr)
            A = project_traceless(A)
        mode = "two" if (_is_prime(n) or f.is_multilinear()) else "four"
    elif mode in ("four", "two"):
        trace_mag = abs(complex(A.trace()))
        if trace_mag > tols.hollow_tol * max(fro(A), 1e-300):
            print(f"error: mode {mode!r} needs a trace-zero target "
                  f"(trace magnitude {trace_mag:.3e})", file=sys.stderr)
            return EXIT_PARSE

    if mode == "two":
        cert = two_term_decompose(f, A, cfg.budget, cfg.seed, tols)
    elif mode == "five":
        cert = five_term_express(f, A, cfg.budget, cfg.seed, tols)
    else:
        cert = waring_express(f, A, cfg.budget, cfg.seed, tols)

    save_certificate(args.out, cert, tols, seed=cfg.seed, budget=cfg.budget)
    print(f"{cert.mode} certificate written to {args.out} "
          f"(residual {cert.residual:.3e})")
    return EXIT_OK


def cmd_verify(args):
    doc = load_json(args.certificate)
    failures = verify_certificate(doc)
    if failures:
        print(f"FAIL: {failures[0]}")
        for extra in failures[1:]:
            print(f"      {extra}")
        return EXIT_VERIFY_FAILED
    print(f"OK: {doc['mode']} certificate verifies "
          f"(n={doc['n']}, residual bound {doc['residual_bound']:.3e})")
    return EXIT_OK


def cmd_classify(args):
    f = parse(args.poly)
    verdict = classify(f, args.n, samples=args.samples, tol=args.tol,
                       seed=args.seed)
    print(f"{verdict.describe()} (n={verdict.n}, samples={verdict.samples}, "
          f"tol={verdict.tolerance:g})")
    return EXIT_OK


def cmd_search_image(args):
    cfg = _config_from(args)
    tols = cfg.tolerances()
    f = parse(args.poly)
    image, mats = image_search(f, args.n, args.goal, cfg.budget, cfg.seed, tols)
    doc = {
        "format": "image-witness",
        "polynomial": f.to_string(),
        "goal": args.goal,
        "seed": cfg.seed,
        "image": matrix_to_json(image),
        "args": [matrix_to_json(a) for a in mats],
    }
    with open(args.out, "w") as fh:
        fh.write(dumps_canonical(doc))
    print(f"witness written to {args.out}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "decompose": cmd_decompose,
        "verify": cmd_verify,
        "classify": cmd_classify,
        "search-image": cmd_search_image,
    }
    try:
        return handlers[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FileNotFoundError, ValueError, KeyError,
            PreconditionUnmetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotGenericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_GENERIC
    except BudgetExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ResidualTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESIDUAL
    except MatWaringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESIDUAL


if __name__ == "__main__":
    sys.exit(main())
