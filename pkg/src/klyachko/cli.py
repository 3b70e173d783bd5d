"""Command line front end.

Files are UTF-8 JSON. A fan file has ``dim``, ``rays`` and ``max_cones``; a
bundle file has ``rank`` and either ``filtrations`` (ray -> list of
``[index, rows]``) or, for rank 2, ``triples`` (ray -> ``[i1, i2, row]``).
Rays may be keyed by string indices or listed in order.

Exit codes: 0 success, 1 internal error, 2 mathematical failure, 3 parse
error, 4 validation error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Any

from ._matrix import content
from .coxring import fine_degree_class, irrelevant_ideal, sigma_hat_monomial, _chow
from .errors import (
    DimensionError,
    KlyachkoError,
    MathematicalFailure,
    ParseError,
    PreconditionError,
    UnsupportedDimension,
    ValidationError,
)
from .euler import (
    EulerResolution,
    Rank2Bundle,
    _monomial_matrix,
    build_euler_resolution,
    verify_resolution,
)
from .families import (
    Filtration,
    KlyachkoData,
    Subspace,
    check_compatibility,
    check_torsion_free,
    global_sections,
    multifiltration_from_data,
    sections_box,
    validate_multifiltration,
    window_from_multifiltration,
)
from .fan import Cone, Fan, is_complete, is_smooth, semigroup_basis

log = logging.getLogger("klyachko")

EXIT_OK, EXIT_INTERNAL, EXIT_MATH, EXIT_PARSE, EXIT_VALIDATION = range(5)


# --------------------------------------------------------------------------
# rationals


def fmt_q(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def json_q(x):
    """Integers stay JSON numbers; other rationals become ``"p/q"`` strings."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else fmt_q(x)


def parse_q(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError(f"{where}: expected an integer or a 'p/q' string, got {value!r}")


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


def _list(value, where: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected a list, got {type(value).__name__}")
    return value


# --------------------------------------------------------------------------
# files


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def fan_from_dict(doc: Any, source: str = "<fan>") -> Fan:
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be an object")
    for key in ("dim", "rays", "max_cones"):
        if key not in doc:
            raise ParseError(f"{source}: missing field '{key}'")
    dim = _int(doc["dim"], f"{source}: dim")
    rays = []
    for k, ray in enumerate(_list(doc["rays"], f"{source}: rays")):
        vec = tuple(_int(x, f"{source}: rays[{k}]") for x in _list(ray, f"{source}: rays[{k}]"))
        g = content(vec)
        if g > 1:
            fixed = tuple(x // g for x in vec)
            log.warning("%s: rays[%d] %s is not primitive, using %s", source, k, list(vec), list(fixed))
            vec = fixed
        rays.append(vec)
    cones = []
    for k, c in enumerate(_list(doc["max_cones"], f"{source}: max_cones")):
        cones.append(Cone(tuple(_int(i, f"{source}: max_cones[{k}]") for i in _list(c, f"{source}: max_cones[{k}]"))))
    try:
        return Fan(dim, tuple(rays), tuple(cones))
    except (ValidationError, DimensionError, PreconditionError, UnsupportedDimension) as exc:
        raise ValidationError(f"{source}: {exc}") from exc


def parse_fan(path: str) -> Fan:
    return fan_from_dict(_load_json(path), path)


def _per_ray(value, nrays: int, where: str) -> list:
    if isinstance(value, list):
        items = list(enumerate(value))
    elif isinstance(value, dict):
        items = []
        for key, v in value.items():
            try:
                items.append((int(key), v))
            except ValueError:
                raise ParseError(f"{where}: ray key {key!r} is not an integer") from None
    else:
        raise ParseError(f"{where}: expected a list or an object keyed by ray index")
    out = [None] * nrays
    for k, v in items:
        if not 0 <= k < nrays:
            raise ValidationError(f"{where}: ray index {k} out of range (fan has {nrays} rays)")
        out[k] = v
    missing = [k for k, v in enumerate(out) if v is None]
    if missing:
        raise ValidationError(f"{where}: no data for ray(s) {missing}")
    return out


def _row(value, r: int, where: str) -> tuple[Fraction, ...]:
    row = tuple(parse_q(x, where) for x in _list(value, where))
    if len(row) != r:
        raise ValidationError(f"{where}: row has length {len(row)}, rank is {r}")
    return row


def bundle_from_dict(doc: Any, fan: Fan, source: str = "<bundle>") -> KlyachkoData | Rank2Bundle:
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be an object")
    if "rank" not in doc:
        raise ParseError(f"{source}: missing field 'rank'")
    r = _int(doc["rank"], f"{source}: rank")
    if r < 1:
        raise ValidationError(f"{source}: rank must be positive")
    if ("filtrations" in doc) == ("triples" in doc):
        raise ParseError(f"{source}: exactly one of 'filtrations' or 'triples' is required")
    try:
        if "triples" in doc:
            if r != 2:
                raise ValidationError(f"{source}: triples require rank 2")
            triples = []
            for k, t in enumerate(_per_ray(doc["triples"], fan.nrays, f"{source}: triples")):
                where = f"{source}: triples[{k}]"
                t = _list(t, where)
                if len(t) != 3:
                    raise ParseError(f"{where}: expected [i1, i2, row]")
                row = _row(t[2], 2, where)
                if not any(row):
                    raise ValidationError(f"{where}: zero vector does not span a line")
                triples.append((_int(t[0], where), _int(t[1], where), Subspace.span([row], 2)))
            return Rank2Bundle(tuple(triples))
        filts = []
        for k, steps in enumerate(_per_ray(doc["filtrations"], fan.nrays, f"{source}: filtrations")):
            where = f"{source}: filtrations[{k}]"
            gens = []
            for s, step in enumerate(_list(steps, where)):
                step = _list(step, f"{where}[{s}]")
                if len(step) != 2:
                    raise ParseError(f"{where}[{s}]: expected [index, rows]")
                rows = [_row(x, r, f"{where}[{s}]") for x in _list(step[1], f"{where}[{s}]")]
                gens.append((_int(step[0], f"{where}[{s}]"), Subspace.span(rows, r) if rows else Subspace.zero(r)))
            filts.append(Filtration.from_generators(r, gens))
        return KlyachkoData(r, tuple(filts))
    except (ValidationError, DimensionError) as exc:
        if str(exc).startswith(source):
            raise
        raise ValidationError(f"{source}: {exc}") from exc


def parse_bundle(path: str, fan: Fan) -> KlyachkoData | Rank2Bundle:
    return bundle_from_dict(_load_json(path), fan, path)


def emit_fan(fan: Fan) -> dict:
    return fan.to_dict()


def _rows(s: Subspace) -> list:
    return [[json_q(x) for x in row] for row in s.basis]


def emit_bundle(b: KlyachkoData | Rank2Bundle) -> dict:
    if isinstance(b, Rank2Bundle):
        return {"rank": 2, "triples": [[i1, i2, _rows(line)[0]] for i1, i2, line in b.triples]}
    return {
        "rank": b.rank,
        "filtrations": [[[i, _rows(s)] for i, s in f.jumps] for f in b.filtrations],
    }


def as_klyachko(b: KlyachkoData | Rank2Bundle) -> KlyachkoData:
    return b.to_klyachko() if isinstance(b, Rank2Bundle) else b


def as_rank2(b: KlyachkoData | Rank2Bundle) -> Rank2Bundle:
    if isinstance(b, Rank2Bundle):
        return b
    return Rank2Bundle.from_klyachko(b)


# --------------------------------------------------------------------------
# flags


def parse_box(text: str, dim: int) -> tuple[tuple[int, int], ...]:
    parts = [p.strip() for p in text.split(",")]
    box = []
    for p in parts:
        lo, sep, hi = p.partition("..")
        try:
            if not sep:
                raise ValueError
            box.append((int(lo), int(hi)))
        except ValueError:
            raise ParseError(f"--box: cannot read range {p!r}, expected a..b") from None
    if len(box) == 1:
        box = box * dim
    if len(box) != dim:
        raise ParseError(f"--box: {len(box)} ranges given, fan has dimension {dim}")
    if any(lo > hi for lo, hi in box):
        raise ParseError("--box: empty range")
    return tuple(box)


def parse_cone(text: str, fan: Fan) -> Cone:
    text = text.strip()
    try:
        idx = tuple(int(x) for x in text.split(",")) if text else ()
    except ValueError:
        raise ParseError(f"--cone: cannot read index list {text!r}") from None
    for i in idx:
        if not 0 <= i < fan.nrays:
            raise ValidationError(f"--cone: ray index {i} out of range (fan has {fan.nrays} rays)")
    try:
        return fan.require(Cone(idx))
    except PreconditionError as exc:
        raise ValidationError(f"--cone: {exc}") from exc


def _cones(args, fan: Fan) -> list[Cone]:
    return [parse_cone(args.cone, fan)] if args.cone is not None else list(fan.max_cones)


# --------------------------------------------------------------------------
# reports


def _plain(value):
    """Recursively convert to JSON-friendly values with rationals as p/q."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, Fraction)):
        return json_q(value)
    if isinstance(value, Subspace):
        return _rows(value)
    if isinstance(value, Cone):
        return list(value.rays)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return str(value)


def _text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "n/a"
    if isinstance(value, (int, Fraction)):
        return fmt_q(value)
    if isinstance(value, Subspace):
        return str(value)
    if isinstance(value, Cone):
        return str(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_text(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_text(v)}" for k, v in value.items()) + "}"
    return str(value)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_plain(report), indent=2, sort_keys=True) + "\n"
    lines = []
    for key, value in report.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{key}:")
            for item in value:
                lines.append("  - " + "; ".join(f"{k}: {_text(v)}" for k, v in item.items()))
        else:
            lines.append(f"{key}: {_text(value)}")
    return "\n".join(lines) + "\n"


def _complete(fan: Fan):
    try:
        return is_complete(fan)
    except UnsupportedDimension:
        return None


def _matrix_text(mat) -> list:
    return [list(row) for row in mat]


# --------------------------------------------------------------------------
# commands


def cmd_fan_info(args) -> dict:
    fan = parse_fan(args.fan)
    chow = _chow(fan)
    return {
        "dim": fan.dim,
        "rays": [list(r) for r in fan.rays],
        "max_cones": list(fan.max_cones),
        "smooth": is_smooth(fan),
        "complete": _complete(fan),
        "chow": chow.describe(),
        "divisor_classes": [list(c) for c in chow.class_of],
    }


def cmd_fan_dual(args) -> dict:
    fan = parse_fan(args.fan)
    cones = []
    for c in _cones(args, fan):
        d = fan.dual_cone(c)
        cones.append(
            {
                "cone": c,
                "inequalities": [list(v) for v in d.inequalities],
                "rays": [list(v) for v in d.rays],
                "lineality": [list(v) for v in d.lineality],
            }
        )
    return {"dim": fan.dim, "duals": cones}


def cmd_fan_faces(args) -> dict:
    fan = parse_fan(args.fan)
    return {
        "dim": fan.dim,
        "faces": [{"cone": c, "faces": list(fan.faces(c))} for c in _cones(args, fan)],
    }


def cmd_cox_info(args) -> dict:
    fan = parse_fan(args.fan)
    chow = _chow(fan)
    n = fan.nrays
    return {
        "variables": [f"x{i}" for i in range(n)],
        "chow": chow.describe(),
        "degrees": [list(fine_degree_class(fan, [int(i == k) for i in range(n)])) for k in range(n)],
        "irrelevant_ideal": [str(m) for m in irrelevant_ideal(fan)],
        "sigma_hat": [{"cone": c, "monomial": str(sigma_hat_monomial(fan, c))} for c in fan.max_cones],
    }


def cmd_sheaf_check(args) -> dict:
    fan = parse_fan(args.fan)
    data = as_klyachko(parse_bundle(args.bundle, fan))
    cones = []
    all_ok = True
    for c in _cones(args, fan):
        entry: dict = {"cone": c}
        try:
            semigroup_basis(fan, c)
        except PreconditionError:
            entry["smooth"] = False
            all_ok = False
            cones.append(entry)
            continue
        rep = validate_multifiltration(multifiltration_from_data(fan, data, c))
        comp = check_compatibility(fan, data, c)
        entry["multifiltration"] = rep.ok
        entry["compatible"] = comp.compatible
        if comp.decomposition is not None:
            entry["decomposition"] = {",".join(map(str, k)): v for k, v in sorted(comp.decomposition.items())}
        all_ok = all_ok and rep.ok and comp.compatible
        cones.append(entry)
    return {"rank": data.rank, "bundle": all_ok, "cones": cones}


def cmd_sheaf_sections(args) -> dict:
    fan = parse_fan(args.fan)
    data = as_klyachko(parse_bundle(args.bundle, fan))
    box = parse_box(args.box, fan.dim) if args.box else sections_box(fan, data)
    pieces = global_sections(fan, data, box) if box is not None else {}
    return {
        "box": [f"{lo}..{hi}" for lo, hi in box] if box is not None else [],
        "characters": len(pieces),
        "total_dim": sum(s.dim for s in pieces.values()),
        "pieces": [{"m": list(m), "dim": s.dim, "basis": s} for m, s in sorted(pieces.items())],
    }


def cmd_sheaf_window(args) -> dict:
    fan = parse_fan(args.fan)
    data = as_klyachko(parse_bundle(args.bundle, fan))
    cone = parse_cone(args.cone, fan) if args.cone is not None else fan.max_cones[0]
    box = parse_box(args.box or "-2..2", fan.dim)
    mf = multifiltration_from_data(fan, data, cone)
    w = window_from_multifiltration(fan, mf, box)
    return {
        "cone": cone,
        "box": [f"{lo}..{hi}" for lo, hi in box],
        "steps": [list(s) for s in w.steps],
        "torsion_free": check_torsion_free(w),
        "spaces": [{"m": list(m), "dim": s.dim, "basis": s} for m, s in sorted(w.spaces.items())],
    }


def _resolution_report(fan: Fan, res: EulerResolution, rep) -> dict:
    mm = res.monomial_matrix
    rows, cols = mm.shape
    return {
        "twist": list(res.twist),
        "exponents": list(res.exponents),
        "coeff_matrix": _matrix_text(res.coeff_matrix),
        "monomial_matrix": [[mm.entry_str(i, j) for j in range(cols)] for i in range(rows)],
        "checks": dict(rep.checks),
        "basis_change": rep.details.get("basis_change"),
        "verification": "PASS" if rep.ok else "FAIL",
    }


def cmd_euler_resolve(args) -> tuple[dict, int]:
    fan = parse_fan(args.fan)
    b = as_rank2(parse_bundle(args.bundle, fan))
    res = build_euler_resolution(fan, b)
    return _resolution_report(fan, res, res.report), EXIT_OK if res.report.ok else EXIT_MATH


def _read_resolution(path: str, fan: Fan) -> EulerResolution:
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    for key in ("twist", "exponents", "coeff_matrix"):
        if key not in doc:
            raise ParseError(f"{path}: missing field '{key}'")
    twist = tuple(_int(x, f"{path}: twist") for x in _list(doc["twist"], f"{path}: twist"))
    exps = tuple(_int(x, f"{path}: exponents") for x in _list(doc["exponents"], f"{path}: exponents"))
    coeffs = tuple(
        tuple(parse_q(x, f"{path}: coeff_matrix") for x in _list(row, f"{path}: coeff_matrix"))
        for row in _list(doc["coeff_matrix"], f"{path}: coeff_matrix")
    )
    if len(exps) != fan.nrays or len(coeffs) != fan.nrays:
        raise ValidationError(f"{path}: resolution does not match the {fan.nrays} rays of the fan")
    if any(len(row) != len(coeffs[0]) for row in coeffs):
        raise ValidationError(f"{path}: ragged coeff_matrix")
    if any(e < 0 for e in exps):
        raise ValidationError(f"{path}: negative exponent")
    return EulerResolution(twist, exps, coeffs, _monomial_matrix(coeffs, exps))


def cmd_euler_verify(args) -> tuple[dict, int]:
    fan = parse_fan(args.fan)
    b = as_rank2(parse_bundle(args.bundle, fan))
    res = _read_resolution(args.resolution, fan) if args.resolution else build_euler_resolution(fan, b)
    rep = verify_resolution(fan, b, res)
    out = _resolution_report(fan, res, rep)
    return out, EXIT_OK if rep.ok else EXIT_MATH


COMMANDS = {
    ("fan", "info"): cmd_fan_info,
    ("fan", "dual"): cmd_fan_dual,
    ("fan", "faces"): cmd_fan_faces,
    ("cox", "info"): cmd_cox_info,
    ("sheaf", "check"): cmd_sheaf_check,
    ("sheaf", "sections"): cmd_sheaf_sections,
    ("sheaf", "window"): cmd_sheaf_window,
    ("euler", "resolve"): cmd_euler_resolve,
    ("euler", "verify"): cmd_euler_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="klyachko", description="Toric fans, equivariant sheaves and Euler resolutions.")
    groups = parser.add_subparsers(dest="group", required=True)

    def add(group, name, bundle=False, box=False, cone=False, resolution=False):
        p = group.add_parser(name)
        p.add_argument("fan", help="fan file (JSON)")
        if bundle:
            p.add_argument("bundle", help="bundle file (JSON)")
        if box:
            p.add_argument("--box", help="degree box a..b[,a..b]")
        if cone:
            p.add_argument("--cone", help="comma separated ray indices of a cone")
        if resolution:
            p.add_argument("--resolution", help="resolution file (JSON output of 'euler resolve')")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.set_defaults(command=name)

    fan = groups.add_parser("fan").add_subparsers(dest="command", required=True)
    add(fan, "info")
    add(fan, "dual", cone=True)
    add(fan, "faces", cone=True)
    cox = groups.add_parser("cox").add_subparsers(dest="command", required=True)
    add(cox, "info")
    sheaf = groups.add_parser("sheaf").add_subparsers(dest="command", required=True)
    add(sheaf, "check", bundle=True, cone=True)
    add(sheaf, "sections", bundle=True, box=True)
    add(sheaf, "window", bundle=True, box=True, cone=True)
    euler = groups.add_parser("euler").add_subparsers(dest="command", required=True)
    add(euler, "resolve", bundle=True)
    add(euler, "verify", bundle=True, resolution=True)
    return parser


def _join_values(argv: list[str]) -> list[str]:
    # let '--box -3..3' through: argparse would take '-3..3' for an option
    out, it = [], iter(argv)
    for a in it:
        if a in ("--box", "--cone"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    argv = _join_values(list(sys.argv[1:] if argv is None else argv))
    out = out or sys.stdout
    err = err or sys.stderr
    handler = logging.StreamHandler(err)
    handler.setFormatter(logging.Formatter("warning: %(message)s"))
    log.addHandler(handler)
    log.propagate = False
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:
            return EXIT_OK if exc.code == 0 else EXIT_PARSE
        try:
            result = COMMANDS[(args.group, args.command)](args)
            report, code = result if isinstance(result, tuple) else (result, EXIT_OK)
        except MathematicalFailure as exc:
            report, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_MATH
        except ParseError as exc:
            print(f"error: {exc}", file=err)
            return EXIT_PARSE
        except (ValidationError, DimensionError, PreconditionError, UnsupportedDimension) as exc:
            print(f"error: {exc}", file=err)
            return EXIT_VALIDATION
        except KlyachkoError as exc:
            print(f"error: {exc}", file=err)
            return EXIT_INTERNAL
        out.write(render(report, args.format))
        return code
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_INTERNAL
    finally:
        log.removeHandler(handler)


def main() -> None:
    sys.exit(run())
