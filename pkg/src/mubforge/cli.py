"""Command-line entry point: mubforge <command> [options]."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import catalog, fileio
from .analysis import (
    MUVectorSet,
    Triplet,
    classify_orbits,
    collect,
    extend_triplet,
    third_bases,
)
from .catalog import FamilyId
from .linalg import STRUCTURAL_TOL, hadamard_basis, is_hadamard
from .solver import SolverConfig
from .sweep import SweepSpec, export_csv, read_csv, render_bitmap, run_sweep, symmetry_validate

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

ISOLATED = {FamilyId.TAO6: True}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _params(text: str | None) -> tuple[float, ...]:
    if not text:
        return ()
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"malformed --params {text!r}; expected comma-separated reals") from None


def _family(name: str) -> FamilyId:
    try:
        return FamilyId.parse(name)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("MUBFORGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"MUBFORGE_THREADS={env!r} is not an integer") from None
    return 1


def _config(args) -> SolverConfig:
    return SolverConfig(max_iterations=args.max_iterations, rng_seed=args.rng)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _pair_from_meta(meta: dict[str, str]):
    fam = _family(meta.get("family", "F"))
    params = _params(meta.get("params", ""))
    d = int(meta.get("d", 6))
    return (np.eye(d), hadamard_basis(catalog.build(fam, params, d)))


def _load_set(path) -> MUVectorSet:
    vectors, hits, meta = fileio.read_vectors(path)
    pair = _pair_from_meta(meta) if "family" in meta else (np.eye(vectors.shape[1]),)
    vs = MUVectorSet.empty(pair)
    for v, h in zip(vectors, hits):
        vs.add(v, h)
    return vs


def cmd_catalog(args) -> int:
    fam = _family(args.family)
    m = catalog.build(fam, _params(args.params), args.d)
    payload = {"family": fam.value, "params": list(_params(args.params)), "d": m.shape[0],
               "matrix": [[fileio.format_complex(z) for z in row] for row in m]}
    text = fileio.matrix_to_csv(m).rstrip("\n")
    if args.verify:
        had = is_hadamard(m, STRUCTURAL_TOL)
        isolated = ISOLATED.get(fam, fam is FamilyId.FOURIER and _is_prime(m.shape[0]))
        payload.update(hadamard=had, isolated=isolated)
        text += f"\nHadamard: {str(had).lower()}, isolated: {str(isolated).lower()}"
    if args.out:
        fileio.write_matrix(args.out, m)
    _emit(args, payload, text)
    return EXIT_OK


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % k for k in range(2, int(n**0.5) + 1))


def cmd_mu_search(args) -> int:
    fam = _family(args.family)
    params = _params(args.params)
    h = catalog.build(fam, params, args.d)
    pair = (np.eye(h.shape[0]), hadamard_basis(h))
    vs = collect(pair, args.seeds, _config(args), _threads(args), early_stop=not args.no_early_stop)
    if args.out:
        meta = {"family": fam.value, "params": ",".join(repr(p) for p in params), "d": h.shape[0]}
        fileio.write_vectors(args.out, vs.vectors, vs.hits, meta)
    payload = {"n_vectors": len(vs), "n_seeds": vs.n_seeds, "n_converged": vs.n_converged,
               "n_stalled": vs.n_stalled, "hits": vs.hits}
    _emit(args, payload, f"{len(vs)} distinct vectors ({vs.n_converged} of {vs.n_seeds} seeds converged)")
    return EXIT_OK


def cmd_triplets(args) -> int:
    vs = _load_set(args.input)
    if len(vs.bases) < 2:
        raise UsageError(f"{args.input} does not name its generating pair (# family=... metadata)")
    bases = third_bases(vs, args.ortho_tol)
    if args.out:
        fileio.write_triplets(args.out, [(*vs.bases, b) for b in bases])
    _emit(args, {"n_vectors": len(vs), "n_third_bases": len(bases)},
          f"{len(bases)} third bases from {len(vs)} vectors")
    return EXIT_OK


def cmd_extend(args) -> int:
    triplets = fileio.read_triplets(args.triplet)
    rows = []
    for k, (b1, b2, b3) in enumerate(triplets):
        try:
            t = Triplet((b1, b2), b3)
        except ValueError as e:
            raise UsageError(f"{args.triplet}: triplet {k}: {e}") from None
        ext = extend_triplet(t, args.seeds, _config(args), _threads(args))
        rows.append({"triplet": k, "n_vectors": len(ext), "n_converged": ext.n_converged, "n_seeds": ext.n_seeds})
    text = "\n".join(f"triplet {r['triplet']}: {r['n_vectors']} vectors MU to all three bases" for r in rows)
    _emit(args, {"triplets": rows}, text or "no triplets in file")
    return EXIT_OK


def cmd_orbits(args) -> int:
    vs = _load_set(args.input)
    part = classify_orbits(vs)
    _emit(args, {"sizes": part.sizes, "closed": part.closed, "orbits": part.orbits},
          f"orbit sizes: {part.sizes}" + ("" if part.closed else " (set not closed under displacements)"))
    return EXIT_OK


def cmd_sweep(args) -> int:
    fam = _family(args.family)
    fixed = []
    for item in args.fix or []:
        k, _, v = item.partition("=")
        try:
            fixed.append((int(k) - 1, float(v)))
        except ValueError:
            raise UsageError(f"malformed --fix {item!r}; expected INDEX=VALUE") from None
    mode, res = ("random", args.random) if args.random else ("grid", args.grid)
    try:
        spec = SweepSpec(fam, mode, res, args.seeds_per_point, _config(args), tuple(fixed),
                         args.reduced, args.extend_seeds)
    except ValueError as e:
        raise UsageError(str(e)) from None
    progress = None
    if args.verbose:
        progress = lambda r: print(",".join(f"{p:.6g}" for p in r.params),
                                   "skipped" if r.skipped else r.n_third_bases, file=sys.stderr)
    records = run_sweep(spec, _threads(args), progress)
    if args.out:
        export_csv(records, args.out)
    if args.bitmap:
        render_bitmap(records, args.bitmap)
    found = sum(r.triplet_found for r in records)
    ext = sum(r.extension_found for r in records)
    skipped = sum(r.skipped for r in records)
    _emit(args, {"n_points": len(records), "n_triplet": found, "n_extension": ext, "n_skipped": skipped},
          f"{len(records)} points: {found} with a triplet, {ext} extended, {skipped} skipped")
    return EXIT_OK


def cmd_symmetry_check(args) -> int:
    records = read_csv(args.input)
    try:
        rep = symmetry_validate(records, _family(args.family))
    except ValueError as e:
        raise UsageError(str(e)) from None
    text = "\n".join(f"{k}: {rep.mismatches[k]}/{rep.compared[k]} mismatched" for k in rep.compared)
    _emit(args, {"mismatches": rep.mismatches, "compared": rep.compared, "worst": rep.worst}, text)
    return EXIT_OK


def cmd_equivalence(args) -> int:
    a, b = fileio.read_matrix(args.a), fileio.read_matrix(args.b)
    w = catalog.equivalence_witness(a, b, args.tol)
    payload = {"equivalent": w is not None}
    if w is not None:
        payload["residual"] = float(np.max(np.abs(w.apply(b) - a)))
    _emit(args, payload, f"equivalent: {str(w is not None).lower()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a single JSON document")
    common.add_argument("--rng", type=int, default=0, help="seed for all randomness")
    common.add_argument("--threads", type=int, default=None, help="worker processes (env MUBFORGE_THREADS)")
    common.add_argument("--max-iterations", type=int, default=10_000)
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="mubforge", description="Mutually unbiased bases from complex Hadamard pairs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("catalog", parents=[common], help="print a catalog matrix")
    c.add_argument("--family", required=True)
    c.add_argument("--params", default="")
    c.add_argument("--d", type=int, default=6)
    c.add_argument("--verify", action="store_true")
    c.add_argument("--out")
    c.set_defaults(func=cmd_catalog)

    c = sub.add_parser("mu-search", parents=[common], help="vectors MU to {I, H}")
    c.add_argument("--family", required=True)
    c.add_argument("--params", default="")
    c.add_argument("--d", type=int, default=6)
    c.add_argument("--seeds", type=int, default=5000)
    c.add_argument("--no-early-stop", action="store_true")
    c.add_argument("--out")
    c.set_defaults(func=cmd_mu_search)

    c = sub.add_parser("triplets", parents=[common], help="third bases from a vector file")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--ortho-tol", type=float, default=1e-8)
    c.add_argument("--out")
    c.set_defaults(func=cmd_triplets)

    c = sub.add_parser("extend", parents=[common], help="search vectors MU to each triplet in a file")
    c.add_argument("--triplet", required=True)
    c.add_argument("--seeds", type=int, default=10_000)
    c.set_defaults(func=cmd_extend)

    c = sub.add_parser("orbits", parents=[common], help="displacement orbits of a vector file")
    c.add_argument("--in", dest="input", required=True)
    c.set_defaults(func=cmd_orbits)

    c = sub.add_parser("sweep", parents=[common], help="triplet existence scan over a family")
    c.add_argument("--family", required=True)
    g = c.add_mutually_exclusive_group()
    g.add_argument("--grid", type=int, default=64)
    g.add_argument("--random", type=int)
    c.add_argument("--seeds-per-point", type=int, default=200)
    c.add_argument("--extend-seeds", type=int, default=200)
    c.add_argument("--fix", action="append", metavar="INDEX=VALUE", help="hold a parameter (1-based) fixed")
    c.add_argument("--reduced", action="store_true", help="K2 fundamental triangle only")
    c.add_argument("--out")
    c.add_argument("--bitmap")
    c.set_defaults(func=cmd_sweep)

    c = sub.add_parser("symmetry-check", parents=[common], help="symmetry mismatches of a K2 scan")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--family", default="K2")
    c.set_defaults(func=cmd_symmetry_check)

    c = sub.add_parser("equivalence", parents=[common], help="Hadamard equivalence of two matrix files")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--tol", type=float, default=1e-8)
    c.set_defaults(func=cmd_equivalence)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "threads", None) is not None and args.threads < 1:
            raise UsageError("--threads must be positive")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except (catalog.SingularParameterError, catalog.ParameterRangeError) as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (catalog.CatalogError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (np.linalg.LinAlgError, FloatingPointError) as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
