import math
import random
from fractions import Fraction

import numpy as np
import pytest

from multistat.decoration import find_decorated
from multistat.messi import assemble_region_system
from multistat.networks import hybrid_kinase, phosphorylation
from multistat.points import PointConfiguration, joint_cone
from multistat.ratlin import kernel_basis
from multistat.witness import (
    DeformedSystem,
    certify_multistationarity,
    count_positive_roots,
    deformed_system,
    newton_solve,
    phi_map,
    validate_root_set,
    witness_search,
)

HK_KAPPA = dict(k1=1, k2=1, k3=2, k4=1, k5=1, k6=1)
HK_TOTALS = [Fraction(7, 4), 1]


def phospho_kappa(n):
    k = {}
    for i in range(n):
        k.update({f"kon{i}": 1, f"koff{i}": 1, f"kcat{i}": 1,
                  f"lon{i}": 1, f"loff{i}": 1, f"lcat{i}": 1})
    k["kcat1"] = 2
    return k


def hk_region():
    net, part = hybrid_kinase()
    return net, part, assemble_region_system(net, part, HK_KAPPA, HK_TOTALS)


# ---------------------------------------------------------------------------
# coefficient scaling map
# ---------------------------------------------------------------------------

def test_phi_map_trivial_cases():
    cfg = PointConfiguration([(0, 0), (0, 1), (1, 0), (1, 1), (1, 2)])
    assert phi_map(cfg, [1, 1, 1], 0.5, [0] * 5) == [1.0] * 5
    h = [0, 1, 0, 0, 0]
    gamma = phi_map(cfg, [1, 1, 1], 0.5, h)
    assert gamma == [1.0, 0.5, 1.0, 1.0, 1.0]


def test_phi_map_kernel_identity():
    cfg = PointConfiguration([(0, 0), (0, 1), (1, 0), (1, 1), (1, 2)])
    kernel = kernel_basis(cfg.matrix)
    rng = random.Random(4)
    for _ in range(200):
        alpha = [math.exp(rng.uniform(-2, 2)) for _ in range(3)]
        t = rng.uniform(0.01, 1.0)
        h = [rng.uniform(-2, 2) for _ in range(5)]
        gamma = phi_map(cfg, alpha, t, h)
        for m in kernel:
            lhs = sum(float(mi) * math.log(g) for mi, g in zip(m, gamma))
            rhs = sum(float(mi) * hi for mi, hi in zip(m, h)) * math.log(t)
            assert abs(lhs - rhs) < 1e-10


def test_phi_map_rejects_bad_inputs():
    cfg = PointConfiguration([(0, 0), (0, 1), (1, 0), (1, 1), (1, 2)])
    with pytest.raises(ValueError):
        phi_map(cfg, [1, -1, 1], 0.5, [0] * 5)
    with pytest.raises(ValueError):
        phi_map(cfg, [1, 1, 1], 0.0, [0] * 5)


# ---------------------------------------------------------------------------
# deformed systems and Newton certification
# ---------------------------------------------------------------------------

def test_deformed_at_t_one_is_base_system():
    _, _, region = hk_region()
    h = [1, 1, 0, 0, 0]
    system = deformed_system(region.cfg, region.C, h, 1.0)
    rng = random.Random(2)
    for _ in range(20):
        x = [rng.uniform(0.2, 4.0) for _ in range(2)]
        u = np.log(x)
        f, _ = system.residual_jacobian(u)
        for i, row in enumerate(region.C):
            terms = [float(c) * x[0] ** a[0] * x[1] ** a[1]
                     for c, a in zip(row, region.cfg.points)]
            top = max(abs(v) for v in terms)
            assert abs(f[i] - sum(terms) / top) < 1e-12


def test_newton_univariate():
    cfg = PointConfiguration([(0,), (1,), (2,)])
    system = deformed_system(cfg, [[-2, 1, 0]], [0, 0, 0], 1.0)
    root = newton_solve(system, [1.0])
    assert root is not None
    assert root.x[0] == pytest.approx(2.0, abs=1e-12)
    assert root.residual < 1e-10
    assert root.sigma_ratio > 1e-8


def test_no_roots_when_coefficients_share_a_sign():
    cfg = PointConfiguration([(0, 0), (0, 1), (1, 0), (1, 1), (1, 2)])
    C = [[1, 2, 1, 1, 3], [2, 1, 1, 4, 1]]
    system = deformed_system(cfg, C, [0] * 5, 0.5)
    assert count_positive_roots(system) == []


def hk_system_and_family(t=2.0 ** -7):
    _, _, region = hk_region()
    family = find_decorated(region.cfg, region.C).best
    system = deformed_system(
        region.cfg, region.C, [float(v) for v in family.height], t
    )
    return region, system, family


def test_rerun_from_certified_root_reproduces_it():
    _, system, family = hk_system_and_family()
    roots = count_positive_roots(system, family)
    assert len(roots) >= 3
    for r in roots:
        again = newton_solve(system, r.x)
        assert again is not None
        assert float(np.max(np.abs(again.log_x - r.log_x))) < 1e-12


def test_duplicate_basins_are_merged():
    _, system, family = hk_system_and_family()
    roots = count_positive_roots(system, family)
    for i, a in enumerate(roots):
        for b in roots[i + 1:]:
            assert a.distinct_from(b)


# ---------------------------------------------------------------------------
# exclusion sweep (two variables)
# ---------------------------------------------------------------------------

def test_exclusion_confirms_root_count():
    _, system, family = hk_system_and_family()
    roots = count_positive_roots(system, family)
    assert len(roots) == 3
    missed, unresolved = validate_root_set(system, roots)
    assert missed == []
    assert unresolved == []


def test_exclusion_rejects_other_dimensions():
    net, part = phosphorylation(2)
    region = assemble_region_system(net, part, phospho_kappa(2), [1, 1, 3])
    system = deformed_system(region.cfg, region.C, [0] * region.cfg.n, 0.5)
    with pytest.raises(ValueError):
        validate_root_set(system, [])


# ---------------------------------------------------------------------------
# positive-scaling equivalence
# ---------------------------------------------------------------------------

def test_scaled_system_roots_map_across():
    region, system, family = hk_system_and_family()
    h = [float(v) for v in family.height]
    t = 2.0 ** -7
    roots = count_positive_roots(system, family)
    assert len(roots) == 3
    rng = random.Random(8)
    alpha = [math.exp(rng.uniform(-1, 1)) for _ in range(3)]
    # scaling the columns by alpha^{(1, a_j)} shifts every root by 1/alpha
    Cs = []
    for row in region.C:
        Cs.append([
            float(c) * alpha[0] * alpha[1] ** a[0] * alpha[2] ** a[1]
            for c, a in zip(row, region.cfg.points)
        ])
    scaled = deformed_system(region.cfg, Cs, h, t)
    for r in roots:
        mapped = r.x / np.array(alpha[1:])
        again = newton_solve(scaled, mapped)
        assert again is not None
        assert float(np.max(np.abs(again.log_x - np.log(mapped)))) < 1e-10


# ---------------------------------------------------------------------------
# the decreasing-t search
# ---------------------------------------------------------------------------

def test_witness_search_hk():
    net, part, region = hk_region()
    decor = find_decorated(region.cfg, region.C)
    best = decor.best
    assert best.simplices == [(0, 1, 4), (0, 2, 3), (0, 3, 4)]
    report = witness_search(
        region.cfg, region.C, best,
        context=(net, part, HK_KAPPA, HK_TOTALS, region),
    )
    assert report.status == "success"
    assert report.t_star == 2.0 ** -7
    assert len(report.roots) >= 3
    assert report.gamma == [report.t_star ** float(v) for v in report.height]
    changed = {k for k, v in report.kappa_bar.items()
               if abs(v - float(HK_KAPPA[k])) > 1e-9}
    assert changed == {"k4", "k5"}
    # the schedule log records every visited t
    assert [t for t, _ in report.log] == [2.0 ** -s for s in range(1, 8)]
    assert all(isinstance(s, dict) for s in report.species_roots)


def test_witness_search_exhausted_budget():
    _, _, region = hk_region()
    decor = find_decorated(region.cfg, region.C)
    report = witness_search(region.cfg, region.C, decor.best, budget=3)
    assert report.status == "exhausted"
    assert report.t_star is None
    assert report.roots == []
    assert len(report.log) == 3


def test_witness_search_requires_height():
    _, _, region = hk_region()
    decor = find_decorated(region.cfg, region.C)
    family = decor.best
    bad = type(family)(family.simplices, None, family.cone)
    with pytest.raises(ValueError):
        witness_search(region.cfg, region.C, bad)


def test_mapped_roots_satisfy_conservation_laws():
    net, part, region = hk_region()
    decor = find_decorated(region.cfg, region.C)
    report = witness_search(
        region.cfg, region.C, decor.best,
        context=(net, part, HK_KAPPA, HK_TOTALS, region),
    )
    laws = net.conservation_laws()
    for vec in report.species_roots:
        vals = [vec[sp] for sp in net.species]
        for law, T in zip(laws, HK_TOTALS):
            total = sum(float(l) * v for l, v in zip(law, vals))
            assert abs(total - float(T)) < 1e-8 * max(float(T), 1.0)


def test_certify_pipeline_small_total_ratio():
    # outside the multistationarity window the best family is a single
    # simplex; the report still certifies what it found and claims no more
    net, part = hybrid_kinase()
    decor, report = certify_multistationarity(
        net, part, HK_KAPPA, [Fraction(3), 1], budget=10
    )
    assert len(decor.best.simplices) < 3
    assert report.status == "success"
    assert len(report.roots) == len(decor.best.simplices)


def test_certify_pipeline_phospho():
    net, part = phosphorylation(2)
    decor, report = certify_multistationarity(
        net, part, phospho_kappa(2), [1, 1, 3]
    )
    pts = report.region.cfg.points
    delta1 = tuple(sorted(pts.index(p) for p in
                          [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]))
    delta2 = tuple(sorted(pts.index(p) for p in
                          [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 2, -1)]))
    assert delta1 in decor.decorated and delta2 in decor.decorated
    assert (delta1, delta2) in decor.facet_pairs
    assert report.status == "success"
    assert len(report.roots) >= 2
    changed = {k for k, v in report.kappa_bar.items()
               if abs(v - float(phospho_kappa(2)[k])) > 1e-9}
    assert changed <= {"kon0", "kon1", "lon0", "lon1"}
