"""Acceptance suite: one test per criterion, zero tolerance throughout.

Each test records a PASS/FAIL line that is printed in the pytest summary.
"""

import json
import time
from math import gcd

import pytest

from qdesign import cli, designs, family, groups
from qdesign.curves import CurveSpec, affine_count_naive, certify_all
from qdesign.family import FamilySpec
from qdesign.field import field_new


def grid(max_q):
    for p in (2, 3, 5, 7):
        m = 2
        while p**m <= max_q:
            for ell in range(1, m):
                yield FamilySpec(p, m, ell)
            m += 1


def test_criterion_01_bluher_agreement(criterion):
    t0 = time.perf_counter()
    bad = []
    n = 0
    for spec in grid(2401):
        if not spec.coprime:
            continue
        n += 1
        rep = family.bluher_bruteforce(spec)
        if rep.brute_forced != family.bluher_predicted(spec):
            bad.append((spec.p, spec.m, spec.ell, rep.brute_forced))
    secs = time.perf_counter() - t0
    ok = not bad and secs < 60
    assert criterion(1, ok, f"{n} coprime specs, q <= 2401, mismatches={bad[:3]}, {secs:.1f}s")
    assert n > 0


def test_criterion_02_image_set_sizes(criterion):
    t0 = time.perf_counter()
    bad = []
    n = 0
    for spec in grid(2401):
        n += 1
        size = len(family.image_set(spec))
        if size != spec.q - family.rootless_count(spec):
            bad.append(("complement", spec))
        if spec.coprime and size != family.predicted_k(spec):
            bad.append(("closed form", spec))
    secs = time.perf_counter() - t0
    ok = not bad and secs < 60
    assert criterion(2, ok, f"{n} specs incl. gcd != 1, mismatches={bad[:3]}, {secs:.1f}s")


def _exact(spec, k=None):
    k = k or len(family.image_set(spec))
    structure = designs.build_structure(spec.field, spec.power_map(), k)
    return designs.verify_t_design(structure, 2, "exact", force=True)


def test_criterion_03_design_gf27(criterion):
    t0 = time.perf_counter()
    rep = _exact(FamilySpec(3, 3, 2))
    secs = time.perf_counter() - t0
    got = (rep.is_design, rep.v, rep.k, rep.lam, rep.b)
    ok = got == (True, 27, 17, 136, 351) and secs < 1
    assert criterion(3, ok, f"(p,l,m)=(3,2,3): {rep.describe()}, {secs:.2f}s")


def test_criterion_04_design_gf243(criterion):
    t0 = time.perf_counter()
    rep = _exact(FamilySpec(3, 5, 2))
    secs = time.perf_counter() - t0
    got = (rep.is_design, rep.v, rep.k, rep.lam, rep.b)
    ok = got == (True, 243, 152, 11476, 29403) and secs < 60
    assert criterion(4, ok, f"(p,l,m)=(3,2,5): {rep.describe()}, {secs:.1f}s")


@pytest.mark.slow
def test_criterion_05_theorem_range_gf512(criterion):
    t0 = time.perf_counter()
    spec = FamilySpec(2, 9, 1)
    rep = _exact(spec)
    secs = time.perf_counter() - t0
    got = (rep.is_design, rep.v, rep.k, rep.lam, rep.b)
    ok = (got == (True, 512, 341, 115940, 261632) and secs < 900
          and family.range_flag(spec) == family.THEOREM1)
    assert criterion(5, ok, f"(p,l,m)=(2,1,9): {rep.describe()}, {secs:.1f}s")


def test_criterion_06_negative_control(criterion):
    t0 = time.perf_counter()
    spec = FamilySpec(5, 2, 1)
    rep = _exact(spec, k=15)
    secs = time.perf_counter() - t0
    ok = (rep.is_design is False and family.range_flag(spec) == family.NEGATIVE_CONTROL
          and secs < 1)
    assert criterion(6, ok, f"(p,l,m)=(5,1,2), k=15: {rep.describe()}, "
                            f"counterexample={rep.counterexample}, {secs:.2f}s")


def test_criterion_07_bound_certification(criterion):
    t0 = time.perf_counter()
    specs = [FamilySpec(p, m, ell) for p, m in ((2, 3), (2, 4), (3, 3), (2, 5))
             for ell in (1, 2) if ell < m and gcd(ell, m) == 1]
    uniform = beta_zero = 0
    bad = []
    for spec in specs:
        q = spec.q
        for rep in certify_all(spec):
            if (rep.alpha, rep.beta) != (1, 0):
                uniform += 1
                if not rep.checks.get("uniform"):
                    bad.append(("uniform", spec, rep.alpha, rep.beta))
            if rep.beta == 0 and rep.alpha != 1:
                beta_zero += 1
                if not (q + 1 - rep.delta <= rep.N <= q + 1 and rep.N_proj == q + 1):
                    bad.append(("beta_zero", spec, rep.alpha))
    secs = time.perf_counter() - t0
    ok = not bad and uniform > 0 and beta_zero > 0 and secs < 30
    assert criterion(7, ok, f"{len(specs)} specs, {uniform} interval checks, "
                            f"{beta_zero} beta=0 checks, violations={bad[:3]}, {secs:.1f}s")


def test_criterion_08_group_properties(criterion):
    t0 = time.perf_counter()
    h27 = groups.is_2_homogeneous(groups.AffineGroup(field_new(3, 3), groups.QR))
    h343 = groups.is_2_homogeneous(groups.AffineGroup(field_new(7, 3), groups.QR))
    h25 = groups.is_2_homogeneous(groups.AffineGroup(field_new(5, 2), groups.QR))
    eq2 = [groups.block_set_equality(FamilySpec(*s)).a1_eq_a2
           for s in ((2, 3, 1), (2, 5, 1), (2, 5, 2))]
    eq3 = [groups.block_set_equality(FamilySpec(*s)).a1_eq_a3 for s in ((3, 3, 1), (3, 3, 2))]
    secs = time.perf_counter() - t0
    ok = (h27.homogeneous and h343.homogeneous and not h25.homogeneous
          and h25.witness is not None and all(eq2) and all(eq3) and secs < 60)
    assert criterion(8, ok, f"GF(27) {h27.homogeneous}, GF(343) {h343.homogeneous}, "
                            f"GF(25) {h25.homogeneous} witness={h25.witness}, "
                            f"A1=A2 {eq2}, A1=A3 {eq3}, {secs:.1f}s")


def test_criterion_09_oracle_equivalence(criterion):
    t0 = time.perf_counter()
    structures = curves = 0
    bad = []
    for spec in grid(64):
        if spec.q <= 32:
            f = spec.power_map()
            for k in designs.value_spectrum(spec.field, f).counts:
                if k < 2:
                    continue
                st = designs.build_structure(spec.field, f, k)
                structures += 1
                rep = designs.verify_t_design(st, 2)
                naive = designs.naive_coverage(st, 2)
                values = set(naive.values())
                if rep.is_design != (len(values) == 1) or (rep.is_design
                                                          and rep.lam != values.pop()):
                    bad.append(("design", spec, k))
        for rep in certify_all(spec):
            curves += 1
            if rep.N != affine_count_naive(CurveSpec(spec, rep.alpha, rep.beta)):
                bad.append(("curve", spec, rep.alpha, rep.beta))
    secs = time.perf_counter() - t0
    ok = not bad and structures > 0 and curves > 0
    assert criterion(9, ok, f"{structures} structures (v <= 32), {curves} curves (q <= 64), "
                            f"disagreements={bad[:3]}, {secs:.1f}s")


def test_criterion_10_conjecture_findings(criterion, capsys, tmp_path):
    t0 = time.perf_counter()
    codes, confirmed, deviations, problems = [], 0, [], []
    for name in ("conjecture1", "conjecture2"):
        out = tmp_path / f"{name}.json"
        codes.append(cli.main(["sweep", name, "-o", str(out)]))
        capsys.readouterr()
        report = json.loads(out.read_text())
        for entry in report["entries"]:
            res = entry["results"].get("design", {})
            if "prediction" not in res:
                problems.append((name, entry["p"], entry["m"], entry["l"]))
                continue
            pred, got = res["prediction"], res["design"]
            k = got["k"]
            expect = k * (k - 1) if entry["p"] == 2 else k * (k - 1) // 2
            if res["status"] != family.FINDING or pred["lambda"] != expect:
                problems.append((name, entry["p"], entry["m"], entry["l"]))
            elif got["lambda"] == expect and got["b"] == pred["b"]:
                confirmed += 1
            elif "DEVIATION" in res["note"]:
                deviations.append((entry["p"], entry["m"], entry["l"]))
            else:
                problems.append((name, entry["p"], entry["m"], entry["l"]))
    secs = time.perf_counter() - t0
    ok = codes == [0, 0] and not problems
    assert criterion(10, ok, f"exit codes {codes}, {confirmed} confirmed, "
                             f"{len(deviations)} deviations reported {deviations}, "
                             f"problems={problems}, {secs:.1f}s")
