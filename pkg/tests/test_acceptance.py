"""The eleven acceptance criteria, one test each.

Every test records a PASS/FAIL line; ``conftest.py`` prints them at the end
of the run, and running this file directly prints them too.
"""
from __future__ import annotations

import itertools
import json
import os
import random
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from klyachko.coxring import Monomial, cox_module_window, linebundle_filtrations
from klyachko.errors import GenericityViolation, SplitCase
from klyachko.euler import Rank2Bundle, build_euler_resolution, cokernel_filtrations, normalize_twist
from klyachko.families import (
    Filtration,
    KlyachkoData,
    check_compatibility,
    check_torsion_free,
    eval_filtration,
    global_sections,
    join_all,
    multifiltration_from_data,
    orbit_closure_window,
    window_from_multifiltration,
)
from klyachko.fan import (
    Cone,
    affine_plane,
    affine_space,
    dual_of,
    faces,
    hirzebruch,
    product_p1_p1,
    projective_plane,
    semigroup_leq,
)
from klyachko.lattice import chow_presentation, smith_normal_form

from ._support import (
    facet_normals,
    gcd_of_minors,
    laplace_det,
    line_of,
    prim,
    random_flag,
    random_generic_bundle,
    random_smooth_complete_fan,
    random_vector,
)

RESULTS: dict[int, tuple[bool, str]] = {}
CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def record(number: int, title: str, check) -> None:
    try:
        detail = check()
        RESULTS[number] = (True, f"{title}: {detail}")
    except AssertionError as exc:
        RESULTS[number] = (False, f"{title}: {exc or 'assertion failed'}")
        raise


def summary_lines() -> list[str]:
    return [f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {text}" for n, (ok, text) in sorted(RESULTS.items())]


# 1 -------------------------------------------------------------------------


def _chow():
    p2 = chow_presentation(projective_plane())
    assert p2.describe() == "Z" and {abs(c[0]) for c in p2.class_of} == {1}, p2
    for fan in (product_p1_p1(), hirzebruch(1)):
        pres = chow_presentation(fan)
        assert pres.free_rank == 2 and not pres.invariant_factors, pres
    assert chow_presentation(affine_plane()).describe() == "0"
    # hand-checked SNF diagonals of the ray matrices
    assert smith_normal_form([[1, 0], [0, 1], [-1, -1]]).invariants == (1, 1)
    assert smith_normal_form([[1, 0], [0, 1], [-1, 1], [0, -1]]).invariants == (1, 1)
    return "P2 -> Z (classes 1,1,1), P1xP1 and F1 -> Z^2, affine plane -> 0"


def test_criterion_01_chow_groups():
    record(1, "Chow groups", _chow)


# 2 -------------------------------------------------------------------------


def _sections():
    fan = projective_plane()
    for d in range(11):
        pieces = global_sections(fan, linebundle_filtrations(fan, (0, 0, d)), ((-2, d + 2), (-2, d + 2)))
        brute = sum(1 for a in range(d + 1) for b in range(d + 1) if a + b <= d)
        total = sum(s.dim for s in pieces.values())
        assert total == brute == (d + 1) * (d + 2) // 2, (d, total, brute)
    return "h0(O(d)) = (d+1)(d+2)/2 for d = 0..10"


def test_criterion_02_line_bundle_sections():
    record(2, "Sections of line bundles", _sections)


# 3 -------------------------------------------------------------------------


def _apply(g, v):
    return (g[0][0] * v[0] + g[0][1] * v[1], g[1][0] * v[0] + g[1][1] * v[1])


def _check_round_trip(fan, b):
    n = fan.nrays
    res = build_euler_resolution(fan, b)
    coeffs = res.coeff_matrix
    assert len(coeffs[0]) == n - 2
    # rank n-2: some maximal minor is nonzero
    assert any(
        laplace_det([list(row) for k, row in enumerate(coeffs) if k not in pair]) != 0
        for pair in itertools.combinations(range(n), 2)
    )
    for c in fan.two_cones():
        assert laplace_det([list(row) for k, row in enumerate(coeffs) if k not in c.rays]) != 0, c
    cok = cokernel_filtrations(fan, res)
    nb = normalize_twist(b)[1]
    g = res.report.details["basis_change"]
    assert laplace_det([list(r) for r in g]) != 0
    for (c1, c2, cl), (b1, b2, bl) in zip(cok.triples, nb.triples):
        assert (c1, c2) == (b1, b2) == (b1, 0)
        assert line_of(_apply(g, cl.basis[0])) == line_of(bl.basis[0])
    return res


def _euler():
    rng = random.Random(20240)
    named = [projective_plane(), product_p1_p1(), hirzebruch(1), hirzebruch(2)]
    for fan in named:
        _check_round_trip(fan, Rank2Bundle.from_rows([(-1, 0, r) for r in fan.rays]))
        for _ in range(3):
            _check_round_trip(fan, random_generic_bundle(rng, fan))
    sizes = []
    for _ in range(60):
        fan = random_smooth_complete_fan(rng, 8)
        sizes.append(fan.nrays)
        _check_round_trip(fan, random_generic_bundle(rng, fan))
    assert max(sizes) <= 8
    return f"4 named surfaces + 60 random fans (n = {min(sizes)}..{max(sizes)}), exact GL2 match"


def test_criterion_03_euler_round_trip():
    record(3, "Euler resolution round trip", _euler)


# 4 -------------------------------------------------------------------------


def _negative():
    fan = projective_plane()
    equal = Rank2Bundle.from_rows([(-1, 0, (1, 0)), (-1, 0, (2, 0)), (-1, 0, (1, 1))])
    split = Rank2Bundle.from_rows([(-1, 0, (1, 0)), (3, 3, (0, 1)), (-1, 0, (1, 1))])
    messages = []
    for b, exc in ((equal, GenericityViolation), (split, SplitCase)):
        seen = []
        for _ in range(2):
            with pytest.raises(exc) as info:
                build_euler_resolution(fan, b)
            seen.append(str(info.value))
        assert seen[0] == seen[1]
        messages.append(exc.__name__)
    return " and ".join(messages) + " raised deterministically"


def test_criterion_04_negative_hypotheses():
    record(4, "Negative hypotheses", _negative)


# 5 -------------------------------------------------------------------------


def _involution():
    rng = random.Random(55)
    count2 = 0
    while count2 < 200:
        u, v = random_vector(rng, 2, 9), random_vector(rng, 2, 9)
        if u[0] * v[1] - u[1] * v[0] == 0:
            continue
        gens = {prim(u), prim(v)}
        d = dual_of(list(gens), 2)
        assert set(d.rays) == facet_normals(list(gens))
        assert set(dual_of(list(d.rays), 2).rays) == gens
        count2 += 1
    count3 = 0
    while count3 < 50:
        vs = [random_vector(rng, 3, 4) for _ in range(3)]
        if laplace_det([list(v) for v in vs]) == 0:
            continue
        gens = {prim(v) for v in vs}
        d = dual_of(list(gens), 3)
        assert set(d.rays) == facet_normals(list(gens))
        assert set(dual_of(list(d.rays), 3).rays) == gens
        count3 += 1
    return f"{count2} random 2D cones and {count3} random 3D simplicial cones"


def test_criterion_05_dual_involution():
    record(5, "Dual-cone involution", _involution)


# 6 -------------------------------------------------------------------------


def _preorder():
    rng = random.Random(66)
    witness = None
    total = 0
    for fan in (projective_plane(), hirzebruch(1)):
        for _ in range(500):
            sigma = rng.choice(list(fan.cones))
            m, m2, m3 = (random_vector(rng, 2, 4) for _ in range(3))
            leq = lambda a, b, c=sigma: semigroup_leq(fan, c, a, b).less_or_equal  # noqa: E731
            assert leq(m, m)  # (i) reflexive
            if leq(m, m2) and leq(m2, m3):
                assert leq(m, m3)  # (ii) transitive
            # (iii) equivalence is exactly "difference orthogonal to sigma"
            both = leq(m, m2) and leq(m2, m)
            diff = [a - b for a, b in zip(m, m2)]
            assert both == all(sum(x * y for x, y in zip(diff, fan.rays[i])) == 0 for i in sigma.rays)
            # (iv) comparisons survive passing to a face
            if leq(m, m2):
                assert all(semigroup_leq(fan, t, m, m2).less_or_equal for t in faces(fan, sigma))
            if len(sigma.rays) == 2:
                assert not both or m == m2  # antisymmetry
            elif both and m != m2:
                witness = (sigma, m, m2)
            total += 1
    ray = Cone.of(0)
    fan = projective_plane()
    a, b = (0, 5), (0, -5)
    assert semigroup_leq(fan, ray, a, b).less_or_equal and semigroup_leq(fan, ray, b, a).less_or_equal
    assert witness is not None
    return f"{total} samples; antisymmetry fails on lower-dimensional cones, e.g. {witness[0]} {witness[1]} ~ {witness[2]}"


def test_criterion_06_preorder_axioms():
    record(6, "Preorder axioms", _preorder)


# 7 -------------------------------------------------------------------------


def _reconstruction_holds(fan, data, sigma, decomposition):
    for k, i in enumerate(sigma.rays):
        f = data.filtrations[i]
        for j in f.indices:
            total = join_all((s for idx, s in decomposition.items() if idx[k] <= j), data.rank)
            if total != eval_filtration(f, j):
                return False
    return True


def _compatibility():
    rng = random.Random(77)
    fan = affine_plane()
    q = Cone.of(0, 1)
    for t in range(100):
        r = 3 if t % 2 else 4
        data = KlyachkoData(r, tuple(Filtration.from_generators(r, random_flag(rng, r)) for _ in range(2)))
        res = check_compatibility(fan, data, q)
        assert res.compatible and _reconstruction_holds(fan, data, q, res.decomposition)
    cube = affine_space(3)
    sigma = Cone.of(0, 1, 2)
    m3 = KlyachkoData(
        2, tuple(Filtration.from_generators(2, [(0, [l]), (1, [(1, 0), (0, 1)])]) for l in ((1, 0), (0, 1), (1, 1)))
    )
    assert not check_compatibility(cube, m3, sigma).compatible
    for _ in range(20):
        data = linebundle_filtrations(cube, [rng.randint(-4, 4) for _ in range(3)])
        res = check_compatibility(cube, data, sigma)
        assert res.compatible and _reconstruction_holds(cube, data, sigma, res.decomposition)
    return "100 two-flag instances compatible with exact reconstruction; M3 incompatible; rank 1 compatible"


def test_criterion_07_compatibility():
    record(7, "Compatibility decision", _compatibility)


# 8 -------------------------------------------------------------------------


def _snf():
    count = 0
    for a, b, c, d in itertools.product(range(-3, 4), repeat=4):
        mat = [[a, b], [c, d]]
        snf = smith_normal_form(mat)
        u, dd, v = snf.left, snf.diag, snf.right
        prod = [[sum(u[i][k] * mat[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
        prod = [[sum(prod[i][k] * v[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
        assert prod == [list(r) for r in dd], mat
        assert abs(laplace_det([list(r) for r in u])) == 1 and abs(laplace_det([list(r) for r in v])) == 1
        assert dd[0][1] == dd[1][0] == 0 and dd[0][0] >= 0 and dd[1][1] >= 0
        d1, d2 = dd[0][0], dd[1][1]
        assert (d1 == 0 and d2 == 0) or (d1 != 0 and d2 % d1 == 0)
        assert d1 == gcd_of_minors(mat, 1) and d1 * d2 == abs(laplace_det(mat))
        count += 1
    return f"all {count} 2x2 matrices with entries in [-3, 3]"


def test_criterion_08_snf():
    record(8, "SNF correctness", _snf)


# 9 -------------------------------------------------------------------------


def _torsion():
    q = Cone.of(0, 1)
    assert not check_torsion_free(orbit_closure_window(affine_plane(), q, ((-1, 2), (-1, 2))))
    rng = random.Random(99)
    count = 0
    for _ in range(15):
        fan = random_smooth_complete_fan(rng, 6)
        r = rng.randint(1, 3)
        data = KlyachkoData(r, tuple(Filtration.from_generators(r, random_flag(rng, r)) for _ in range(fan.nrays)))
        for sigma in fan.cones:
            w = window_from_multifiltration(fan, multifiltration_from_data(fan, data, sigma), ((-2, 2), (-2, 2)))
            assert check_torsion_free(w)
            count += 1
    return f"closed-orbit window has torsion; {count} multifiltration windows torsion free"


def test_criterion_09_torsion_detection():
    record(9, "Torsion detection", _torsion)


# 10 ------------------------------------------------------------------------


def _consistency():
    rng = random.Random(1010)
    count = 0
    for _ in range(40):
        fan = random_smooth_complete_fan(rng, 7)
        shift = tuple(rng.randint(-3, 3) for _ in range(fan.nrays))
        sigma = rng.choice(list(fan.cones))
        box = tuple((lo, lo + rng.randint(0, 4)) for lo in (rng.randint(-4, 1) for _ in range(2)))
        a = cox_module_window(fan, [Monomial.one(fan.nrays)], shift, sigma, box)
        mf = multifiltration_from_data(fan, linebundle_filtrations(fan, shift), sigma)
        b = window_from_multifiltration(fan, mf, box)
        assert a.spaces == b.spaces, (fan, shift, sigma, box)
        assert a.maps == b.maps and a.steps == b.steps
        count += 1
    return f"{count} random (fan, shift, cone, box) windows identical"


def test_criterion_10_cox_window_consistency():
    record(10, "Cox window vs line bundle window", _consistency)


# 11 ------------------------------------------------------------------------

_CORPUS_RUN = r"""
import io, json, sys
from pathlib import Path
from klyachko.cli import run
corpus = Path(sys.argv[1])
fans = sorted(p for p in corpus.glob('*.json') if 'dim' in json.loads(p.read_text()))
bundles = sorted(p for p in corpus.glob('*.json') if 'rank' in json.loads(p.read_text()))
for fan in fans:
    for fmt in ('text', 'json'):
        for cmd in (['fan', 'info'], ['fan', 'dual'], ['fan', 'faces'], ['cox', 'info']):
            out, err = io.StringIO(), io.StringIO()
            code = run(cmd + [str(fan), '--format', fmt], out=out, err=err)
            sys.stdout.write(f'## {cmd} {fan.name} {fmt} -> {code}\n' + out.getvalue() + err.getvalue())
        for b in bundles:
            for cmd in (['sheaf', 'check'], ['sheaf', 'sections'], ['sheaf', 'window', '--box', '-1..1'],
                        ['euler', 'resolve'], ['euler', 'verify']):
                out, err = io.StringIO(), io.StringIO()
                code = run(cmd[:2] + [str(fan), str(b)] + cmd[2:] + ['--format', fmt], out=out, err=err)
                sys.stdout.write(f'## {cmd} {fan.name} {b.name} {fmt} -> {code}\n' + out.getvalue() + err.getvalue())
"""


def _determinism():
    from klyachko.cli import bundle_from_dict, emit_bundle, emit_fan, fan_from_dict, parse_bundle, parse_fan

    outputs = []
    for seed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run(
            [sys.executable, "-c", _CORPUS_RUN, str(CORPUS)], capture_output=True, env=env, check=True
        )
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1], "reports differ between runs"
    reports = outputs[0].count(b"## ")
    trips = 0
    docs = {p: json.loads(p.read_text()) for p in CORPUS.glob("*.json")}
    fans = {p: parse_fan(str(p)) for p, d in docs.items() if "dim" in d}
    for fp, fan in fans.items():
        assert fan_from_dict(emit_fan(fan)) == fan
        trips += 1
        for bp, d in docs.items():
            if "rank" not in d:
                continue
            try:
                b = parse_bundle(str(bp), fan)
            except Exception:
                continue  # bundle written for a different fan
            assert bundle_from_dict(emit_bundle(b), fan) == b
            assert emit_bundle(bundle_from_dict(emit_bundle(b), fan)) == emit_bundle(b)
            trips += 1
    return f"{reports} reports byte-identical across two processes; {trips} parse/emit round trips"


def test_criterion_11_cli_determinism():
    record(11, "CLI determinism", _determinism)


if __name__ == "__main__":
    checks = [
        (1, "Chow groups", _chow),
        (2, "Sections of line bundles", _sections),
        (3, "Euler resolution round trip", _euler),
        (4, "Negative hypotheses", _negative),
        (5, "Dual-cone involution", _involution),
        (6, "Preorder axioms", _preorder),
        (7, "Compatibility decision", _compatibility),
        (8, "SNF correctness", _snf),
        (9, "Torsion detection", _torsion),
        (10, "Cox window vs line bundle window", _consistency),
        (11, "CLI determinism", _determinism),
    ]
    for n, title, fn in checks:
        try:
            record(n, title, fn)
        except AssertionError:
            pass
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
