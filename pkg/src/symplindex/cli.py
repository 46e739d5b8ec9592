"""Batch command-line front end: JSON job in, JSON report out.

Exit codes: ``0`` success (verification commands carry ``"check": "pass"``
or ``"fail"``), ``2`` malformed or invalid input, ``3`` numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from ._config import get_tolerances, tolerances
from .maslov import LagrangianPairPath, NoTransversalFound, maslov_index
from .morse_oracle import (IndexFormData, IntegrationError, MeshNotStabilized, verify_iteration_corollary,
                           verify_mod2_corollary)
from .relations import LinearRelation, Splitting, parts, relation_norms, verify_appendix_estimates
from .spgroup import (NoEigenGap, NotSymplectic, NotTriangular, SymplecticPath, f_value, iterate,
                      maslov_type_index, mod2_index, path_from_identity, splitting_numbers)
from .subspace import Subspace, decode_matrix
from .symplectic import SymplecticSpace
from .triangular import StructureError, TriangularPath, is_diagonal, maslov_diagonal, maslov_triangular

__all__ = ["main", "run", "COMMANDS", "InputError", "load_schema"]

COMMANDS = ("maslov", "triangular", "maslov-type", "splitting", "iterate", "mod2", "morse", "relations")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

_NUMERIC_ERRORS = (NoTransversalFound, MeshNotStabilized, IntegrationError, NoEigenGap, np.linalg.LinAlgError)


class InputError(ValueError):
    """Input that does not parse or does not validate."""


def load_schema(command: str) -> dict:
    text = resources.files("symplindex").joinpath("schemas", f"{command}.input.json").read_text()
    return json.loads(text)


def _validate(command: str, obj) -> None:
    try:
        jsonschema.validate(obj, load_schema(command))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"schema error at {where}: {exc.message}") from None


def _clean(obj):
    """Plain JSON types; integral numpy scalars become ints."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def _check(ok: bool) -> str:
    return "pass" if ok else "fail"


def _scalar(v) -> complex:
    if isinstance(v, list):
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def _space_for(obj: dict, dim: int, m: np.ndarray) -> SymplecticSpace:
    if "space" in obj:
        return SymplecticSpace.from_json(obj["space"])
    return SymplecticSpace.standard(dim // 2, "complex" if np.iscomplexobj(m) and np.abs(m.imag).max() > 0 else "real")


def _real_if_possible(m: np.ndarray) -> np.ndarray:
    return m.real if np.abs(m.imag).max(initial=0.0) == 0.0 else m


# commands -------------------------------------------------------------------

def _cmd_maslov(obj: dict, args) -> dict:
    path = LagrangianPairPath.from_json(obj)
    res = maslov_index(path, method=obj.get("method", "local"))
    return {"mas_plus": res.mas_plus, "mas_minus": res.mas_minus, "nullities": res.nullities,
            "intersection_dims": res.intersection_dims, "params": res.params,
            "charts": [list(c) for c in res.charts], "nullity_consistent": res.nullity_consistent}


def _cmd_triangular(obj: dict, args) -> dict:
    tp = TriangularPath.from_json(obj)
    tri = maslov_triangular(tp)
    gen = maslov_index(tp.path)
    out = {"mas_plus": tri.mas_plus, "mas_minus": tri.mas_minus,
           "q_start": list(tri.q_start), "q_end": list(tri.q_end),
           "dim_A_and_B_start": tri.ab_start, "dim_A_and_B_end": tri.ab_end,
           "nullities": tri.nullities, "intersection_dims": tri.intersection_dims, "params": tri.params,
           "engine": {"mas_plus": gen.mas_plus, "mas_minus": gen.mas_minus, "nullities": gen.nullities}}
    ok = (tri.mas_plus, tri.mas_minus) == (gen.mas_plus, gen.mas_minus) and tri.nullity_consistent
    p = tp.path
    if all(is_diagonal(p.lams[i], tp.x, tp.y) and is_diagonal(p.mus[i], tp.x, tp.y) for i in range(len(p))):
        dg = maslov_diagonal(tp)
        out["diagonal"] = {"half_difference": list(dg.half_difference), "x_form": list(dg.x_form),
                           "y_form": list(dg.y_form), "consistent": dg.consistent}
        ok = ok and dg.consistent and tuple(dg.half_difference) == (tri.mas_plus, tri.mas_minus)
    out["check"] = _check(ok)
    return out


def _cmd_maslov_type(obj: dict, args) -> dict:
    path = SymplecticPath.from_json(obj)
    w = Subspace.from_json(obj["W"]) if "W" in obj else None
    res = maslov_type_index(path, w)
    return {"i_plus": res.i_plus, "i_minus": res.i_minus, "nullities": res.nullities, "params": res.params}


def _cmd_splitting(obj: dict, args) -> dict:
    m = _real_if_possible(decode_matrix(obj["M"]))
    space = _space_for(obj, m.shape[0], m)
    zs = obj["z"]
    # a list of pairs is a list of scalars; anything else is one scalar
    if not (isinstance(zs, list) and all(isinstance(v, list) for v in zs)):
        zs = [zs]
    block = dict(obj.get("splitting", {}))
    for key in ("X", "Y"):
        if key in obj:
            block[key] = obj[key]
    x = Subspace.from_json(block["X"]) if "X" in block else None
    y = Subspace.from_json(block["Y"]) if "Y" in block else None
    method = args.method or block.get("method", "oracle")
    methods = ("oracle", "formula") if method == "both" else (method,)
    rows, ok = [], True
    for z in zs:
        zc = _scalar(z)
        row = {"z": [zc.real, zc.imag]}
        reps = {}
        for meth in methods:
            rep = splitting_numbers(space, m, zc, meth, x, y)
            reps[meth] = rep
            row[meth] = {"S_plus": rep.s_minus_pair[0], "S_minus": rep.s_minus_pair[1],
                         "S_plus_plus": rep.s_plus_pair[0], "S_minus_plus": rep.s_plus_pair[1],
                         "nullity": rep.nullity}
        if len(reps) == 2:
            same = all(row["oracle"][key] == row["formula"][key]
                       for key in ("S_plus", "S_minus", "S_plus_plus", "S_minus_plus"))
            row["match"] = same
            ok = ok and same
        rows.append(row)
    out = {"method": method, "values": rows}
    if method == "both":
        out["check"] = _check(ok)
    return out


def _cmd_iterate(obj: dict, args) -> dict:
    path = SymplecticPath.from_json(obj["path"])
    p = _real_if_possible(decode_matrix(obj["P"]))
    x = Subspace.from_json(obj["X"]) if "X" in obj else None
    y = Subspace.from_json(obj["Y"]) if "Y" in obj else None
    rep = iterate(path, p, int(obj["k"]), x, y)
    out = rep.to_json()
    ok = rep.frame_identity
    if rep.closed_form is not None:
        # f(k, P, I) from its closed form against the pieces evaluation
        direct = f_value(path_from_identity(path.space, p), np.eye(path.space.dim), rep.k)
        out["closed_form_direct"] = direct
        out["closed_form_holds"] = direct == rep.closed_form
        out["power_closed_form_holds"] = {k: v <= 1e-10 for k, v in rep.power_error.items()}
        ok = ok and direct == rep.closed_form and rep.power_error["printed"] <= 1e-10
    out["check"] = _check(ok)
    return out


def _cmd_mod2(obj: dict, args) -> dict:
    path = SymplecticPath.from_json(obj)
    rep = mod2_index(path)
    out = rep.to_json()
    out["check"] = _check(rep.parity_holds and rep.sign_holds)
    return out


def _cmd_morse(obj: dict, args) -> dict:
    data = IndexFormData.from_json(obj)
    mesh = args.mesh or 16
    k = args.k if args.k is not None else int(obj.get("k", 1))
    if k < 1:
        raise InputError("k must be a positive integer")
    it = verify_iteration_corollary(data, k, mesh=mesh)
    out = {"k": k, "n": data.n, "field": data.field, "iteration": it.to_json()}
    ok = it.holds
    if data.field == "real":
        m2 = verify_mod2_corollary(data, mesh=mesh)
        out["parity"] = m2.to_json()
        ok = ok and m2.holds
    out["check"] = _check(ok)
    return out


def _parts_json(rel: LinearRelation) -> dict:
    pt = parts(rel)
    return {"dim": rel.dim, "dom": pt.dom.dim, "ran": pt.ran.dim, "ker": pt.ker.dim,
            "indeterminacy": pt.indeterminacy.dim}


def _cmd_relations(obj: dict, args) -> dict:
    m = LinearRelation.from_json(obj["M"])
    gram = obj.get("gram")
    split = Splitting(m.x_dim, m.y_dim, _real_if_possible(decode_matrix(gram)) if gram is not None else None)
    nm = relation_norms(m, split)
    out = {"M": {**_parts_json(m), "a": nm.a, "norm": nm.norm}}
    if "N" in obj:
        n = LinearRelation.from_json(obj["N"])
        nn = relation_norms(n, split)
        out["N"] = {**_parts_json(n), "a": nn.a, "norm": nn.norm}
        rng = np.random.default_rng(args.seed)
        rep = verify_appendix_estimates(m, n, split, s=obj.get("s"), t=obj.get("t"), rng=rng)
        out["estimates"] = rep.to_json()
        out["check"] = _check(rep.holds)
    return out


_HANDLERS = {
    "maslov": _cmd_maslov,
    "triangular": _cmd_triangular,
    "maslov-type": _cmd_maslov_type,
    "splitting": _cmd_splitting,
    "iterate": _cmd_iterate,
    "mod2": _cmd_mod2,
    "morse": _cmd_morse,
    "relations": _cmd_relations,
}


# driver -----------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="input JSON file ('-' for stdin)")
    common.add_argument("-o", "--output", default="-", help="report file (default stdout)")
    common.add_argument("--tol-rank", type=float, help="relative singular-value cutoff")
    common.add_argument("--tol-eig", type=float, help="eigenvalue cutoff factor")
    common.add_argument("--refine-depth", type=int, help="maximum bisection depth of path refinement")
    common.add_argument("--mesh", type=int, help="initial Galerkin mesh (elements per unit length)")
    common.add_argument("--seed", type=int, default=0, help="seed of randomized searches")
    common.add_argument("--no-meta", action="store_true", help="omit wall time and version")
    parser = argparse.ArgumentParser(prog="symplindex", description="Index computations on JSON jobs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "splitting":
            sp.add_argument("--method", choices=("oracle", "formula", "both"),
                            help="splitting-number engine (default: input 'splitting.method' or oracle)")
        if name == "morse":
            sp.add_argument("--k", type=int, help="iteration number (default: input 'k' or 1)")
    return parser


def run(command: str, text: str, args: argparse.Namespace) -> tuple[int, dict]:
    """Execute one job on the raw input text; returns ``(exit code, report)``."""
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    report: dict = {"command": command, "input_sha256": digest}
    overrides = {}
    if args.tol_rank is not None:
        overrides["rank"] = args.tol_rank
    if args.tol_eig is not None:
        overrides["eig"] = args.tol_eig
    if args.refine_depth is not None:
        overrides["refine_depth"] = args.refine_depth
    start = time.perf_counter()
    with tolerances(**overrides):
        tol = get_tolerances()
        report["tolerances"] = {"rank": tol.rank, "eig": tol.eig, "sp": tol.sp, "refine_depth": tol.refine_depth}
        try:
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as exc:
                raise InputError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
            _validate(command, obj)
            result = _HANDLERS[command](obj, args)
        except InputError as exc:
            report["error"] = {"kind": "input", "message": str(exc)}
            return EXIT_INPUT, report
        except _NUMERIC_ERRORS as exc:
            report["error"] = {"kind": "numerical", "type": type(exc).__name__, "message": str(exc)}
            return EXIT_NUMERIC, report
        except (ValueError, KeyError, NotSymplectic, NotTriangular, StructureError) as exc:
            report["error"] = {"kind": "input", "type": type(exc).__name__, "message": str(exc)}
            return EXIT_INPUT, report
    if "check" in result:
        report["check"] = result.pop("check")
    report["result"] = result
    if not args.no_meta:
        report["meta"] = {"wall_time_s": time.perf_counter() - start, "version": __version__}
    return EXIT_OK, report


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            print(json.dumps({"command": args.command, "error": {"kind": "input", "message": str(exc)}}),
                  file=sys.stderr)
            return EXIT_INPUT
    code, report = run(args.command, text, args)
    payload = json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"
    if args.output == "-":
        sys.stdout.write(payload)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(payload)
    if code != EXIT_OK:
        print(report["error"]["message"], file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
