"""Command line front end.

One JSON document per invocation, printed to stdout or written to
--out; CSV is an opt-in projection for scan results.  Output is
deterministic: fixed field order, floats rendered with 17 significant
digits.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import mpmath

from .anomaly import (AnomalyError, SubgroupLattice,
                      classify_2x4_same_shape, classify_2x4_two_shapes,
                      classify_codim2_containment, jacobian_rank,
                      normalize_subgroup)
from .acceptance import run_acceptance
from .manifold import DescriptorError, load_manifold
from .relations import (AlgebraicNumber, RelationError, cusp_symmetry_test,
                        height, multiplicative_independence,
                        pvol_independence)
from .series import SeriesError
from .solver import (FillingCoefficient, SolverError, SolverOptions,
                     scan_products, solve_filling)
from .tube import (TubeError, TubeSpec, appendix_rigidity_replay,
                   boundary_modulus, reduce_modulus, tube_volume)
from .volume import VolumeError, pseudo_volume

PRECISION_ENV = "DEHNFILL_PRECISION"

DOMAIN_ERRORS = (DescriptorError, SeriesError, SolverError, VolumeError,
                 RelationError, AnomalyError, TubeError,
                 ValueError, ZeroDivisionError, OSError)


# ----------------------------------------------------------------------
# deterministic JSON


def _render(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format(obj, ".17g"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for k, item in enumerate(obj):
            if k:
                out.append(", ")
            _render(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for k, (key, val) in enumerate(obj.items()):
            if k:
                out.append(", ")
            out.append(json.dumps(str(key)) + ": ")
            _render(val, out)
        out.append("}")
    else:
        out.append(json.dumps(str(obj)))


def render_json(obj):
    out = []
    _render(obj, out)
    return "".join(out)


def emit(obj, path=None):
    text = render_json(obj) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# argument helpers


def parse_complex_pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 're,im', got {text!r}")
    return complex(float(parts[0]), float(parts[1]))


def parse_int_matrix(text):
    rows = []
    for chunk in text.split(";"):
        rows.append(tuple(int(x) for x in chunk.split(",")))
    return tuple(rows)


def _pair(z):
    return [float(z.real), float(z.imag)]


class RunConfig:
    """Effective options: flag value, else config file, else default."""

    DEFAULTS = {"precision": 50, "tol": 1e-12, "collision_tol": 1e-9,
                "bound": 10 ** 4, "parallelism": 1, "out": None, "csv": None}

    def __init__(self, args):
        file_values = {}
        if getattr(args, "config", None):
            with open(args.config) as fh:
                file_values = json.load(fh)
            if not isinstance(file_values, dict):
                raise ValueError("config file must hold a JSON object")
        env_prec = os.environ.get(PRECISION_ENV)
        self._values = dict(self.DEFAULTS)
        if env_prec is not None:
            self._values["precision"] = int(env_prec)
        for key in self.DEFAULTS:
            if key in file_values:
                self._values[key] = file_values[key]
            flag = getattr(args, key, None)
            if flag is not None:
                self._values[key] = flag
        if self._values["tol"] <= 0 or self._values["collision_tol"] <= 0:
            raise ValueError("tolerances must be positive")
        if self._values["parallelism"] < 1:
            raise ValueError("parallelism must be at least 1")

    def __getattr__(self, name):
        try:
            return self._values[name]
        except KeyError:
            raise AttributeError(name)


# ----------------------------------------------------------------------
# subcommand handlers


def _load(args, cfg, dps=None):
    return load_manifold(args.manifold, dps=dps)


def cmd_solve(args, cfg):
    desc = _load(args, cfg)
    coeff = FillingCoefficient.parse(args.filling)
    opts = SolverOptions(tol=cfg.tol)
    sol = solve_filling(desc, coeff, opts)
    emit(sol.as_dict(), cfg.out)
    return 0


def cmd_scan(args, cfg):
    desc = _load(args, cfg)
    exponents = tuple(int(x) for x in args.exponents.split(","))
    report = scan_products(desc, (args.min, args.max), exponents,
                           cfg.collision_tol, parallelism=cfg.parallelism)
    if cfg.csv:
        _write_scan_csv(desc, report, exponents, cfg)
    emit(report.as_dict(), cfg.out)
    return 0


def _write_scan_csv(desc, report, exponents, cfg):
    # re-solve per tuple: the report keeps only the aggregate
    opts = SolverOptions(tol=cfg.tol)
    header = []
    for i in range(desc.n):
        header += [f"p_{i + 1}", f"q_{i + 1}"]
    header += ["Re(prod)", "Im(prod)"]
    from .solver import enumerate_slopes, holonomy_product
    slopes = enumerate_slopes(*report.norm_range)
    import itertools
    with open(cfg.csv, "w") as fh:
        fh.write(",".join(header) + "\n")
        for combo in itertools.product(slopes, repeat=desc.n):
            try:
                sol = solve_filling(desc, FillingCoefficient(combo), opts)
            except SolverError:
                continue
            prod = holonomy_product(sol, exponents)
            cells = [str(x) for pair in combo for x in pair]
            cells += [format(float(prod.real), ".17g"),
                      format(float(prod.imag), ".17g")]
            fh.write(",".join(cells) + "\n")


def cmd_pvol(args, cfg):
    desc = _load(args, cfg)
    sol = solve_filling(desc, FillingCoefficient.parse(args.filling),
                        SolverOptions(tol=cfg.tol))
    pv = pseudo_volume(desc, sol)
    emit({"pvol": _pair(pv.value), "unreduced": _pair(pv.unreduced)}, cfg.out)
    return 0


def cmd_relations_mult(args, cfg):
    prec = args.prec if args.prec is not None else cfg.precision
    desc = _load(args, cfg, dps=prec + 10)
    sol = solve_filling(desc, FillingCoefficient.parse(args.filling),
                        SolverOptions(tol=mpmath.mpf(10) ** (-(prec + 5))))
    rel = multiplicative_independence(sol, bound=cfg.bound, precision=prec)
    emit(rel.as_dict(), cfg.out)
    return 0


def cmd_relations_pvol(args, cfg):
    prec = args.prec if args.prec is not None else cfg.precision
    desc = _load(args, cfg, dps=prec + 10)
    with open(args.fillings) as fh:
        data = json.load(fh)
    texts = data["fillings"] if isinstance(data, dict) else data
    opts = SolverOptions(tol=mpmath.mpf(10) ** (-(prec + 5)))
    pvols = []
    for text in texts:
        sol = solve_filling(desc, FillingCoefficient.parse(text), opts)
        pvols.append(pseudo_volume(desc, sol).unreduced)
    res = pvol_independence(pvols, bound=cfg.bound, precision=prec)
    emit(res.as_dict(), cfg.out)
    return 0


def cmd_symmetry(args, cfg):
    res = cusp_symmetry_test(parse_complex_pair(args.tau_i),
                             parse_complex_pair(args.tau_j),
                             bound=cfg.bound, precision=cfg.precision)
    emit(res.as_dict(), cfg.out)
    return 0


def cmd_height(args, cfg):
    coeffs = tuple(int(x) for x in args.minpoly.split(","))
    root = parse_complex_pair(args.root) if args.root else None
    alpha = AlgebraicNumber(coeffs, root)
    h = height(alpha, dps=cfg.precision)
    emit({"minpoly": list(coeffs), "degree": alpha.degree, "height": h},
         cfg.out)
    return 0


def cmd_classify(args, cfg):
    matrix = parse_int_matrix(args.matrix)
    if len(matrix) != 2 or any(len(r) != 4 for r in matrix):
        raise ValueError("classify expects a 2x4 integer matrix")
    tau = parse_complex_pair(args.tau)
    if args.tau2:
        cls = classify_2x4_two_shapes(matrix, tau,
                                      parse_complex_pair(args.tau2))
    else:
        cls = classify_2x4_same_shape(matrix, tau)
    emit(cls.as_dict(), cfg.out)
    return 0


def cmd_anomalous(args, cfg):
    desc = _load(args, cfg)
    with open(args.lattice) as fh:
        data = json.load(fh)
    lattice = SubgroupLattice(
        rows=tuple(tuple(int(x) for x in row) for row in data["rows"]),
        offsets=tuple(int(m) for m in data.get("offsets",
                                               [0] * len(data["rows"]))))
    normalized, report = normalize_subgroup(lattice)
    taus = [complex(t) for t in desc.taus]
    rank = jacobian_rank(normalized, taus)
    out = {
        "rows": [list(r) for r in normalized.rows],
        "already_through_identity": report.already_through_identity,
        "dropped_row": (list(report.dropped_row)
                        if report.dropped_row else None),
        "clearing_factors": report.clearing_factors,
        "jacobian_rank": rank,
        "anomalous": rank < normalized.k,
    }
    if normalized.k == 2 and rank == 1:
        pairing = [(i, j) for i in range(desc.n) for j in range(i + 1, desc.n)
                   if abs(taus[i] - taus[j]) <= 1e-12]
        potential = (desc.potential
                     if desc.potential.is_product_of_identical() else None)
        verdict = classify_codim2_containment(normalized, taus, pairing,
                                              potential)
        out["containment"] = verdict.as_dict()
    emit(out, cfg.out)
    return 0


def cmd_tube_volume(args, cfg):
    spec = TubeSpec(parse_complex_pair(args.length), args.radius)
    emit({"length": _pair(spec.complex_length), "radius": spec.radius,
          "volume": tube_volume(spec)}, cfg.out)
    return 0


def cmd_tube_modulus(args, cfg):
    spec = TubeSpec(parse_complex_pair(args.length), args.radius)
    modulus = boundary_modulus(spec)
    out = {"modulus": _pair(modulus.tau), "reduced": False}
    if args.reduce:
        reduced, matrix, word = reduce_modulus(modulus.tau)
        out = {"modulus": _pair(reduced.tau), "reduced": True,
               "matrix": list(matrix),
               "word": [f"{g}^{k}" for g, k in word]}
    emit(out, cfg.out)
    return 0


def cmd_tube_replay(args, cfg):
    desc = _load(args, cfg)
    replay = appendix_rigidity_replay(
        desc, FillingCoefficient.parse(args.f1),
        FillingCoefficient.parse(args.f2), args.cusp_volume,
        convention=args.convention)
    emit(replay.as_dict(), cfg.out)
    return 0


def cmd_verify_all(args, cfg):
    names = args.criteria.split(",") if args.criteria else None
    report = run_acceptance(names)
    emit(report, cfg.out)
    return 0 if report["all_passed"] else 1


# ----------------------------------------------------------------------
# parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dehnfill",
        description="Dehn filling holonomies, pseudo volumes, integer "
                    "relations, anomalous-subgroup tools and tube geometry.")
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--precision", type=int,
                        help=f"working decimal digits (env {PRECISION_ENV})")
    parser.add_argument("--out", help="write the JSON result to this path")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one filling coefficient")
    p.add_argument("--manifold", required=True)
    p.add_argument("--filling", required=True)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("scan", help="holonomy-product collision scan")
    p.add_argument("--manifold", required=True)
    p.add_argument("--min", type=int, required=True)
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--exponents", required=True)
    p.add_argument("--tol", dest="collision_tol", type=float)
    p.add_argument("--csv", help="write per-tuple products to this CSV path")
    p.add_argument("--parallelism", type=int)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("pvol", help="pseudo complex volume of a filling")
    p.add_argument("--manifold", required=True)
    p.add_argument("--filling", required=True)
    p.set_defaults(func=cmd_pvol)

    p = sub.add_parser("relations", help="integer relation searches")
    rsub = p.add_subparsers(dest="relations_command", required=True)
    q = rsub.add_parser("mult-indep",
                        help="relations among log holonomies mod 2 pi i")
    q.add_argument("--manifold", required=True)
    q.add_argument("--filling", required=True)
    q.add_argument("--bound", type=int)
    q.add_argument("--prec", type=int)
    q.set_defaults(func=cmd_relations_mult)
    q = rsub.add_parser("pvol",
                        help="relations among pseudo volumes mod i pi^2")
    q.add_argument("--manifold", required=True)
    q.add_argument("--fillings", required=True,
                   help="JSON file listing filling strings")
    q.add_argument("--bound", type=int)
    q.add_argument("--prec", type=int)
    q.set_defaults(func=cmd_relations_pvol)

    p = sub.add_parser("symmetry", help="integer Mobius map between shapes")
    p.add_argument("--tau-i", dest="tau_i", required=True)
    p.add_argument("--tau-j", dest="tau_j", required=True)
    p.add_argument("--bound", type=int)
    p.set_defaults(func=cmd_symmetry)

    p = sub.add_parser("height", help="Weil height from a minimal polynomial")
    p.add_argument("--minpoly", required=True,
                   help="integer coefficients, leading first")
    p.add_argument("--root", help="re,im approximation of the root meant")
    p.set_defaults(func=cmd_height)

    p = sub.add_parser("classify", help="2x4 block rank classification")
    p.add_argument("--matrix", required=True)
    p.add_argument("--tau", required=True)
    p.add_argument("--tau2")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("anomalous",
                       help="normalize a subgroup lattice and classify it")
    p.add_argument("--manifold", required=True)
    p.add_argument("--lattice", required=True)
    p.set_defaults(func=cmd_anomalous)

    p = sub.add_parser("tube", help="tube geometry")
    tsub = p.add_subparsers(dest="tube_command", required=True)
    q = tsub.add_parser("volume")
    q.add_argument("--length", required=True)
    q.add_argument("--radius", type=float, required=True)
    q.set_defaults(func=cmd_tube_volume)
    q = tsub.add_parser("modulus")
    q.add_argument("--length", required=True)
    q.add_argument("--radius", type=float, required=True)
    q.add_argument("--reduce", action="store_true")
    q.set_defaults(func=cmd_tube_modulus)
    q = tsub.add_parser("replay")
    q.add_argument("--manifold", required=True)
    q.add_argument("--f1", required=True)
    q.add_argument("--f2", required=True)
    q.add_argument("--cusp-volume", dest="cusp_volume", type=float,
                   required=True)
    q.add_argument("--convention", default="derivative",
                   choices=("derivative", "eigenvalue"))
    q.set_defaults(func=cmd_tube_replay)

    p = sub.add_parser("verify-all", help="run the acceptance suite")
    p.add_argument("--criteria", help="comma separated subset, e.g. A1,A2")
    p.set_defaults(func=cmd_verify_all)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args)
        return args.func(args, cfg)
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
