"""Certified positive roots of deformed sparse polynomial systems.

A coefficient matrix ``C`` over a point configuration defines the square
system ``f_i(x) = sum_j C[i][j] x^{a_j}``.  Deforming each column by
``t^{h_j}`` for a height ``h`` in the joint cone of a family of positively
decorated simplices makes each simplex contribute one nondegenerate
positive root for all small enough ``t``.  No computable threshold on
``t`` is available, so this module searches a geometric schedule and
*certifies* every root it reports: small scaled residual, Jacobian
smallest singular value bounded away from zero, and (in two variables) an
adaptive rectangle-exclusion sweep that bounds the risk of missed roots.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cayley, decoration, messi, ratlin
from . import points as points_mod
from .points import PointConfiguration

__all__ = [
    "phi_map",
    "DeformedSystem",
    "deformed_system",
    "CertifiedRoot",
    "newton_solve",
    "count_positive_roots",
    "exclusion_boxes",
    "validate_root_set",
    "WitnessReport",
    "witness_search",
    "certify_multistationarity",
]

RESIDUAL_TOL = 1e-10
STEP_TOL = 1e-14
SINGULAR_TOL = 1e-8
DISTINCT_TOL = 1e-6
MAX_ITER = 200
LOG_DOMAIN_LIMIT = 600.0


def phi_map(cfg, alpha, t, h):
    """Positive coefficient scalings ``gamma_j = alpha^{(1, a_j)} t^{h_j}``.

    ``alpha`` has ``d + 1`` positive entries; every vector ``m`` in the
    kernel of the configuration matrix satisfies
    ``gamma^m = t^{<m, h>}``, so all scalings produced this way deform the
    system inside the same height class.
    """
    alpha = [float(a) for a in alpha]
    if len(alpha) != cfg.d + 1 or any(a <= 0 for a in alpha):
        raise ValueError("need %d positive entries" % (cfg.d + 1))
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    gamma = []
    for j, a in enumerate(cfg.points):
        val = alpha[0]
        for k, e in enumerate(a):
            val *= alpha[k + 1] ** e
        gamma.append(val * t ** float(h[j]))
    return gamma


class DeformedSystem:
    """The system ``sum_j C[i][j] t^{h_j} x^{a_j}`` in log coordinates.

    Coefficients are kept as (sign, log magnitude) pairs so the evaluation
    stays finite even when ``t^{h_j}`` leaves the double range; every
    residual is scaled row-wise by the largest term magnitude.
    """

    def __init__(self, cfg, C, h, t):
        if not 0 < t <= 1:
            raise ValueError("t must lie in (0, 1]")
        self.cfg = cfg
        self.C = C
        self.t = float(t)
        self.d = cfg.d
        self.m = len(C)
        # one height per column, or one per coefficient (mixed route)
        H = np.asarray(h, dtype=float)
        if H.ndim == 1:
            H = np.broadcast_to(H, (self.m, cfg.n))
        self.h = H
        logt = math.log(self.t) if self.t != 1.0 else 0.0
        self.exponents = np.array(cfg.points, dtype=float)
        sign = np.zeros((self.m, cfg.n))
        logmag = np.full((self.m, cfg.n), -np.inf)
        for i, row in enumerate(C):
            for j, c in enumerate(row):
                c = float(c)
                if c == 0:
                    continue
                sign[i, j] = 1.0 if c > 0 else -1.0
                logmag[i, j] = math.log(abs(c)) + H[i, j] * logt
        self.sign = sign
        self.logmag = logmag

    def scaled_terms(self, u):
        """Per-row term log-magnitudes ``log|c_ij t^{h_j}| + <a_j, u>``."""
        return self.logmag + self.exponents @ np.asarray(u, dtype=float)

    def residual_jacobian(self, u):
        """Row-scaled residual vector and Jacobian at ``u = log x``.

        Each row is divided by its largest term magnitude, so a residual
        entry is the relative cancellation of that equation and the
        certificates are invariant under row and coordinate scalings.
        """
        terms = self._scaled_term_values(u)
        return terms.sum(axis=1), terms @ self.exponents

    def residual(self, u):
        return float(np.max(np.abs(self._scaled_term_values(u).sum(axis=1))))

    def _scaled_term_values(self, u):
        w = self.scaled_terms(u)
        top = np.max(w, axis=1)
        if not np.all(np.isfinite(top)):
            raise ArithmeticError("a row has no terms")
        return self.sign * np.exp(w - top[:, None])


def deformed_system(cfg, C, h, t):
    """At ``t = 1`` this is the base system itself."""
    return DeformedSystem(cfg, C, h, t)


@dataclass
class CertifiedRoot:
    x: np.ndarray  # positive coordinates
    log_x: np.ndarray
    residual: float  # max row-scaled residual
    sigma_min: float  # smallest singular value of the scaled Jacobian
    sigma_ratio: float  # sigma_min / largest singular value
    basin: str  # seed that produced the root

    def distinct_from(self, other):
        return float(np.max(np.abs(self.log_x - other.log_x))) > DISTINCT_TOL


def newton_solve(system, seed, basin="seed"):
    """Damped Newton iteration in log coordinates from a positive seed.

    Armijo backtracking on the scaled residual keeps iterates finite;
    convergence requires both a tiny step and a certified residual.
    Returns ``None`` when the iteration diverges, stalls, or the final
    Jacobian fails the nondegeneracy test.
    """
    u = np.log(np.asarray(seed, dtype=float))
    if not np.all(np.isfinite(u)):
        return None
    step = np.inf
    for _ in range(MAX_ITER):
        try:
            f, J = system.residual_jacobian(u)
        except (ArithmeticError, FloatingPointError):
            return None
        res = float(np.max(np.abs(f)))
        if res < RESIDUAL_TOL and step < STEP_TOL:
            break
        try:
            du = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(du)):
            return None
        lam = 1.0
        accepted = False
        while lam > 1e-8:  # a smaller step cannot make useful progress
            trial = u + lam * du
            try:
                new_res = system.residual(trial)
            except (ArithmeticError, FloatingPointError):
                new_res = np.inf
            if new_res <= (1 - 1e-4 * lam) * res or new_res < RESIDUAL_TOL:
                u = trial
                step = lam * float(np.max(np.abs(du)))
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            if res < RESIDUAL_TOL:
                step = 0.0
                break
            return None
        if step == 0.0:
            break
    return _certify(system, u, basin)


def _certify(system, u, basin):
    try:
        f, J = system.residual_jacobian(u)
    except (ArithmeticError, FloatingPointError):
        return None
    res = float(np.max(np.abs(f)))
    if res >= RESIDUAL_TOL:
        return None
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[0] == 0 or sv[-1] <= SINGULAR_TOL * sv[0]:
        return None
    return CertifiedRoot(
        x=np.exp(u), log_x=u.copy(), residual=res,
        sigma_min=float(sv[-1]), sigma_ratio=float(sv[-1] / sv[0]),
        basin=basin,
    )


def _simplex_seed(system, simplex):
    """Closed-form positive root of the square subsystem supported on a
    decorated simplex of the deformed system, computed in logarithms."""
    idx = list(simplex)
    d = system.d
    # kernel vector of the deformed submatrix, solved in scaled doubles
    logs = system.logmag[:, idx]
    signs = system.sign[:, idx]
    scale = np.max(logs, axis=1, keepdims=True)
    sub = signs * np.exp(logs - scale)
    _, _, vt = np.linalg.svd(sub)
    v = vt[-1]
    if np.max(v) < -np.min(v):
        v = -v
    if np.any(v <= 0):
        return None
    M = np.zeros((d + 1, d + 1))
    rhs = np.zeros(d + 1)
    for k, j in enumerate(idx):
        M[k, :d] = system.exponents[j]
        M[k, d] = -1.0
        rhs[k] = math.log(v[k])
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        return None
    return np.exp(sol[:d])


def _lattice_seeds(d, rng):
    """A 5^d logarithmic lattice over [1e-6, 1e6]^d with a small jitter."""
    levels = np.linspace(math.log(1e-6), math.log(1e6), 5)
    seeds = []
    grids = [levels] * d
    idx = [0] * d
    while True:
        point = np.array([grids[k][idx[k]] for k in range(d)])
        if rng is not None:
            point = point + np.array([rng.uniform(-0.1, 0.1) for _ in range(d)])
        seeds.append(np.exp(point))
        for k in range(d):
            idx[k] += 1
            if idx[k] < 5:
                break
            idx[k] = 0
        else:
            break
    return seeds


def count_positive_roots(system, family=None, rng=None, threads=1):
    """Distinct certified positive roots found from decorated-subsystem
    seeds plus a logarithmic lattice; deduplicated by log-coordinate
    max-norm, earlier seeds win ties.

    Newton runs are independent, so with ``threads > 1`` they execute in a
    thread pool; the results are merged in seed order, keeping the output
    deterministic regardless of completion order.
    """
    seeds = []
    if family is not None:
        for s in family.simplices:
            seed = _simplex_seed(system, s)
            if seed is not None:
                seeds.append(("simplex %s" % (tuple(s),), seed))
    for i, seed in enumerate(_lattice_seeds(system.d, rng)):
        seeds.append(("lattice %d" % i, seed))
    if threads > 1 and len(seeds) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(lambda bs: newton_solve(system, bs[1], bs[0]), seeds)
            )
    else:
        results = [newton_solve(system, seed, basin) for basin, seed in seeds]
    roots = []
    for root in results:
        if root is None:
            continue
        if all(root.distinct_from(r) for r in roots):
            roots.append(root)
    return roots


# ---------------------------------------------------------------------------
# rectangle exclusion (two variables)
# ---------------------------------------------------------------------------

def _box_excludes(system, lo, hi):
    """True when interval bounds prove no root inside the log-box."""
    E = system.exponents
    for i in range(system.m):
        terms = []
        top = -np.inf
        for j in range(system.cfg.n):
            s = system.sign[i, j]
            if s == 0:
                continue
            wmin = system.logmag[i, j]
            wmax = system.logmag[i, j]
            for k in range(system.d):
                e = E[j, k]
                if e >= 0:
                    wmin += e * lo[k]
                    wmax += e * hi[k]
                else:
                    wmin += e * hi[k]
                    wmax += e * lo[k]
            terms.append((s, wmin, wmax))
            top = max(top, wmax)
        # scale the row by its largest term so the sums stay finite;
        # only the signs of the bounds matter
        low = 0.0
        high = 0.0
        for s, wmin, wmax in terms:
            if s > 0:
                low += math.exp(wmin - top)
                high += math.exp(wmax - top)
            else:
                low -= math.exp(wmax - top)
                high -= math.exp(wmin - top)
        if low > 0 or high < 0:
            return True
    return False


def exclusion_boxes(system, lo=None, hi=None, max_depth=16):
    """Adaptive rectangle subdivision for two-variable systems.

    Returns the log-coordinate boxes that interval bounds could not
    exclude; every positive root inside the initial box lies in one of
    them.  Exponential worst case, so depth-limited.
    """
    if system.d != 2:
        raise ValueError("exclusion sweep is implemented for two variables")
    if lo is None:
        lo = [math.log(1e-8)] * 2
    if hi is None:
        hi = [math.log(1e8)] * 2
    stack = [(tuple(lo), tuple(hi), 0)]
    out = []
    while stack:
        lo, hi, depth = stack.pop()
        if _box_excludes(system, lo, hi):
            continue
        if depth >= max_depth:
            out.append((lo, hi))
            continue
        k = 0 if hi[0] - lo[0] >= hi[1] - lo[1] else 1
        mid = 0.5 * (lo[k] + hi[k])
        a_hi = list(hi)
        a_hi[k] = mid
        b_lo = list(lo)
        b_lo[k] = mid
        stack.append((lo, tuple(a_hi), depth + 1))
        stack.append((tuple(b_lo), hi, depth + 1))
    return out


def validate_root_set(system, roots, max_depth=16, refine_depth=14):
    """Search every unexcluded box for roots the seeds may have missed.

    Newton is started from the center of each surviving box; any certified
    root distinct from the known ones is returned so the caller can fail
    loudly.  A box whose iteration does not converge is subdivided further
    (interval bounds overestimate near a vanishing equation); only boxes
    that survive the refinement too are reported as unresolved.
    """
    missed = []
    unresolved = []
    for lo, hi in exclusion_boxes(system, max_depth=max_depth):
        center = np.exp(0.5 * (np.array(lo) + np.array(hi)))
        near = any(
            np.max(np.abs(np.log(center) - r.log_x))
            <= max(hi[0] - lo[0], hi[1] - lo[1]) + 1e-3
            for r in roots
        )
        root = newton_solve(system, center, "exclusion box")
        if root is None:
            if near:
                continue
            for sub_lo, sub_hi in exclusion_boxes(system, lo, hi, refine_depth):
                sub_center = np.exp(0.5 * (np.array(sub_lo) + np.array(sub_hi)))
                sub_root = newton_solve(system, sub_center, "exclusion box")
                if sub_root is None:
                    unresolved.append((sub_lo, sub_hi))
                elif all(sub_root.distinct_from(r) for r in roots):
                    missed.append(sub_root)
            continue
        if all(root.distinct_from(r) for r in roots):
            missed.append(root)
    return missed, unresolved


# ---------------------------------------------------------------------------
# the decreasing-t search
# ---------------------------------------------------------------------------

@dataclass
class WitnessReport:
    status: str  # "success" or "exhausted"
    family: object  # decorated family driving the search
    height: list
    t_star: float  # deformation parameter of success, else None
    gamma: list  # t*^{h_j}, else None
    roots: list  # CertifiedRoot list at t*
    log: list  # (t, number of certified roots) per schedule step
    kappa_bar: dict = None  # rescaled rate constants (network context)
    chosen_scale: dict = None
    species_roots: list = None  # full concentration vectors at kappa_bar
    rescale: object = None


def witness_search(cfg, C, family, h=None, budget=60, rng=None, context=None,
                   threads=1):
    """Walk the geometric schedule ``t = 2^-1, ..., 2^-budget`` and stop at
    the first ``t`` whose certified-root count reaches the family size.

    Exhausting the schedule is inconclusive: the report never claims the
    required roots do not exist.  With a network ``context`` the success
    scalings ``gamma = t*^h`` are pushed back into rate constants and the
    roots are mapped to full concentration vectors.
    """
    if h is None:
        h = family.height
    if h is None:
        raise ValueError("family has no realizable height")
    hf = [float(v) for v in h]
    if rng is None:
        rng = _default_rng()
    p = len(family.simplices)
    log = []
    for step in range(1, budget + 1):
        t = 2.0 ** -step
        system = DeformedSystem(cfg, C, hf, t)
        roots = count_positive_roots(system, family, rng, threads)
        log.append((t, len(roots)))
        if len(roots) >= p:
            report = WitnessReport(
                status="success", family=family, height=list(h),
                t_star=t, gamma=[t ** v for v in hf], roots=roots, log=log,
            )
            if context is not None:
                _attach_network(report, context)
            return report
    return WitnessReport(
        status="exhausted", family=family, height=list(h),
        t_star=None, gamma=None, roots=[], log=log,
    )


def _default_rng():
    seed = os.environ.get("MULTISTAT_SEED")
    return random.Random(int(seed)) if seed is not None else random.Random(0)


def _attach_network(report, context):
    """Push the witness scalings back into rate constants and map every
    certified root to a full concentration vector, re-validated against
    the conservation laws."""
    net, partition, kappa, totals, region = context
    res = messi.rescale_back(
        net, partition, kappa, totals, report.gamma, region=region
    )
    report.rescale = res
    report.kappa_bar = res.kappa_bar
    report.chosen_scale = res.chosen_scale
    param_bar = messi.steady_state_parametrization(
        net, partition, res.kappa_bar, chosen=region.chosen, verify=False
    )
    laws = region.laws
    species_roots = []
    for root in report.roots:
        xbar = [
            res.chosen_scale[sp] * float(v)
            for sp, v in zip(region.chosen, root.x)
        ]
        vals = param_bar.evaluate(xbar)
        vec = [float(vals[sp]) for sp in net.species]
        for law, T in zip(laws, totals):
            total = sum(float(l) * v for l, v in zip(law, vec))
            if abs(total - float(T)) > 1e-8 * max(abs(float(T)), 1.0):
                raise ArithmeticError(
                    "mapped root violates a conservation law "
                    "(got %g, expected %g)" % (total, float(T))
                )
        species_roots.append(dict(zip(net.species, vec)))
    report.species_roots = species_roots
    return report


# ---------------------------------------------------------------------------
# the mixed route
# ---------------------------------------------------------------------------

@dataclass
class MixedFamily:
    simplices: list  # jointly realizable mixed-decorated simplices
    height: list  # interior point of the joint cone, one entry per point
    cone: object


@dataclass
class MixedDecorationReport:
    cayley: object
    coeffs: list  # equation i's coefficients over block i's points
    columns: list  # global point index -> column of the region system
    mixed: list  # all mixed simplices
    decorated: list  # the mixed-decorated ones
    families: list  # MixedFamily list, largest first

    @property
    def best(self):
        return self.families[0] if self.families else None


def mixed_decoration(cfg, C):
    """Cayley view of a square system: block ``i`` holds the support of
    equation ``i``; mixed simplices pick two points per block and are
    decorated when the picked coefficients have opposite signs."""
    blocks = []
    coeffs = []
    columns = []
    for row in C:
        block = []
        cs = []
        for j, c in enumerate(row):
            if float(c) != 0.0:
                block.append(cfg.points[j])
                cs.append(c)
                columns.append(j)
        blocks.append(block)
        coeffs.append(cs)
    cay = cayley.cayley_configuration(blocks)
    mixed = cayley.enumerate_mixed_simplices(cay)
    decorated = [s for s in mixed if cayley.is_mixed_decorated(cay, coeffs, s)]
    # per-simplex cone normals cached; growth feasibility uses the float
    # solver with exact re-verification of any accepted height
    normals = {s: points_mod.cone_normals(cay.matrix, s) for s in decorated}
    families = []
    seen = set()
    for seed in decorated:
        family = [seed]
        for s in decorated:
            if s == seed:
                continue
            joint = []
            for f in family + [s]:
                joint.extend(normals[f])
            if ratlin.strict_feasible_fast(joint) is not None:
                family.append(s)
        key = tuple(sorted(family))
        if key in seen:
            continue
        seen.add(key)
        cone = cayley.mixed_joint_cone(cay, sorted(family))
        h = ratlin.strict_feasible_fast(cone.normals)
        if h is None:
            continue
        families.append(MixedFamily(sorted(family), h, cone))
    families.sort(key=lambda f: (-len(f.simplices), f.simplices))
    return MixedDecorationReport(cay, coeffs, columns, mixed, decorated, families)


def _mixed_height_matrix(report, h, m, n):
    """Spread a height vector over Cayley points into one height per
    coefficient of the region system."""
    H = np.zeros((m, n))
    for g, hj in enumerate(h):
        i = report.cayley.block_of(g)
        H[i, report.columns[g]] = float(hj)
    return H


def _mixed_simplex_seed(system, report, simplex):
    """Positive root of the deformed binomial subsystem of a mixed
    simplex, solved in logarithms."""
    cay = report.cayley
    M = []
    rhs = []
    for i, (j1, j2) in enumerate(cayley._block_pairs(cay, simplex)):
        c1, c2 = report.columns[j1], report.columns[j2]
        if system.sign[i, c1] == 0 or system.sign[i, c1] == system.sign[i, c2]:
            return None
        M.append(system.exponents[c1] - system.exponents[c2])
        rhs.append(system.logmag[i, c2] - system.logmag[i, c1])
    try:
        u = np.linalg.solve(np.array(M), np.array(rhs))
    except np.linalg.LinAlgError:
        return None
    return np.exp(u)


def mixed_witness_search(cfg, C, report=None, family=None, budget=60, rng=None):
    """Decreasing-t search along a per-coefficient height of a family of
    mixed-decorated simplices.

    The deformation scales every coefficient independently (one height per
    Cayley point), so no rate-constant pullback is attempted; the result
    certifies root counts of the deformed system itself.
    """
    if report is None:
        report = mixed_decoration(cfg, C)
    if family is None:
        family = report.best
    if family is None or family.height is None:
        raise ValueError("no realizable mixed-decorated family")
    if rng is None:
        rng = _default_rng()
    H = _mixed_height_matrix(report, family.height, len(C), cfg.n)
    p = len(family.simplices)
    log = []
    for step in range(1, budget + 1):
        t = 2.0 ** -step
        system = DeformedSystem(cfg, C, H, t)
        roots = []
        for s in family.simplices:
            seed = _mixed_simplex_seed(system, report, s)
            if seed is None:
                continue
            root = newton_solve(system, seed, "mixed simplex %s" % (tuple(s),))
            if root is not None and all(root.distinct_from(r) for r in roots):
                roots.append(root)
        for i, seed in enumerate(_lattice_seeds(system.d, rng)):
            root = newton_solve(system, seed, "lattice %d" % i)
            if root is not None and all(root.distinct_from(r) for r in roots):
                roots.append(root)
        log.append((t, len(roots)))
        if len(roots) >= p:
            return WitnessReport(
                status="success", family=family,
                height=[float(v) for v in family.height],
                t_star=t, gamma=[t ** float(v) for v in family.height],
                roots=roots, log=log,
            )
    return WitnessReport(
        status="exhausted", family=family,
        height=[float(v) for v in family.height],
        t_star=None, gamma=None, roots=[], log=log,
    )


def certify_multistationarity(net, partition, kappa, totals, chosen=None,
                              budget=60, rng=None, threads=1):
    """Full pipeline from a network to a multistationarity witness.

    Parametrize the steady states, assemble the region system, enumerate
    positively decorated simplices, pick the largest jointly realizable
    family, deform along its interior height, and search the schedule.  On
    success the rescaled constants ``kappa_bar`` admit at least as many
    certified positive steady states as the family has simplices, each
    re-validated against the conservation laws.
    """
    region = messi.assemble_region_system(net, partition, kappa, totals, chosen)
    decor = decoration.find_decorated(region.cfg, region.C)
    best = decor.best
    if best is None:
        return decor, None
    report = witness_search(
        region.cfg, region.C, best, budget=budget, rng=rng, threads=threads,
        context=(net, partition, kappa, totals, region),
    )
    report.decoration = decor
    report.region = region
    return decor, report
