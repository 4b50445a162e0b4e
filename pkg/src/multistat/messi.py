"""Structured elimination for partitioned mass-action networks.

Species are partitioned into a block of *intermediates* (block 0) and
*core* blocks 1..m.  Intermediate complexes are singletons of block-0
species; core complexes are mono- or bimolecular in core species.  Under
the structural conditions checked here, the steady-state variety admits an
explicit parametrization by one chosen concentration per core block:

* intermediates are eliminated linearly through a Matrix-Tree computation
  on the collapsed reaction graph,
* each core block's concentrations follow from flux balances along the
  simple cycles of its association graph (single monomials when every pair
  of nodes is joined by a unique simple path),
* when those hypotheses fail but the remaining steady-state equations are
  triangular and linear in the non-chosen species, a sequential
  substitution produces the (possibly multi-term) elimination instead.

Substituting the parametrization into the independent conservation laws
yields the *region system*: a coefficient matrix over a point
configuration of monomial exponents whose decorated simplices certify
multistationarity regions.  :func:`rescale_back` converts a column-wise
scaling of that system into a rescaling of the rate constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

import networkx as nx

from . import ratlin
from .points import PointConfiguration

__all__ = [
    "MessiError",
    "validate_partition",
    "classify_complexes",
    "intermediate_coefficients",
    "tree_sum",
    "enumerate_tree_sum",
    "build_G1",
    "build_G2",
    "layer_sets",
    "s_toric_check",
    "Parametrization",
    "steady_state_parametrization",
    "messi_conservation",
    "RegionSystem",
    "assemble_region_system",
    "RescaleResult",
    "rescale_back",
    "default_chosen",
]


class MessiError(ValueError):
    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = violations or [message]


# ---------------------------------------------------------------------------
# partition structure
# ---------------------------------------------------------------------------

def _block_index(net, partition):
    blocks = {}
    for b, names in enumerate(partition):
        for s in names:
            if s in blocks:
                raise MessiError("species %r in two blocks" % s)
            blocks[s] = b
    missing = [s for s in net.species if s not in blocks]
    if missing:
        raise MessiError("species missing from partition: %r" % missing)
    extra = [s for s in blocks if s not in net.index]
    if extra:
        raise MessiError("unknown species in partition: %r" % extra)
    return blocks


def classify_complexes(net, partition):
    """Split complexes into intermediates (singleton block-0 species) and
    core complexes; returns ``(intermediate: {complex: species}, core: set,
    violations: list)``."""
    blocks = _block_index(net, partition)
    intermediate, core = {}, set()
    violations = []
    for cplx in net.complexes():
        species = [s for s, c in cplx]
        in0 = [s for s in species if blocks[s] == 0]
        if in0:
            if len(cplx) == 1 and cplx[0][1] == 1:
                intermediate[cplx] = cplx[0][0]
            else:
                violations.append("complex %r mixes intermediates into a non-singleton" % (cplx,))
            continue
        coeffs = [c for _, c in cplx]
        if len(cplx) == 1 and coeffs[0] == 1:
            core.add(cplx)
        elif len(cplx) == 2 and coeffs == [1, 1] and blocks[cplx[0][0]] != blocks[cplx[1][0]]:
            core.add(cplx)
        else:
            violations.append("complex %r is not mono/bimolecular core" % (cplx,))
    return intermediate, core, violations


def _complex_graph(net):
    adj = {}
    for r in net.reactions:
        adj.setdefault(r.source, []).append((r.target, r))
        adj.setdefault(r.target, [])
    return adj


def _reaches_through(adj, intermediate, start):
    """All complexes reachable from ``start`` along paths whose interior
    nodes are intermediate complexes (start excluded from interior)."""
    out = {}
    stack = [t for t, _ in adj.get(start, [])]
    seen = set()
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        out[c] = True
        if c in intermediate:
            stack.extend(t for t, _ in adj.get(c, []))
    return set(out)


def validate_partition(net, partition):
    """List of structural violations (empty iff the partition is valid)."""
    blocks = _block_index(net, partition)
    intermediate, core, violations = classify_complexes(net, partition)
    adj = _complex_graph(net)
    # block-0 species appear only in their own singleton complex
    for cplx in net.complexes():
        for s, _ in cplx:
            if blocks[s] == 0 and cplx not in intermediate:
                violations.append("intermediate species %r inside core complex %r" % (s, cplx))
    # every intermediate complex has a core input and a core output
    rev = {}
    for r in net.reactions:
        rev.setdefault(r.target, []).append(r.source)
    for u in intermediate:
        reach = _reaches_through(adj, intermediate, u)
        if not (reach & core):
            violations.append("intermediate %r has no core output" % (u,))
        if not _core_sources(net, partition, u):
            violations.append("intermediate %r has no core input" % (u,))
    # structural rules on core-to-core transitions (through intermediates)
    for y in core:
        for y2 in _reaches_through(adj, intermediate, y) & core:
            b1 = sorted(blocks[s] for s, _ in y)
            b2 = sorted(blocks[s] for s, _ in y2)
            if len(y) != len(y2):
                violations.append("core transition %r -> %r changes molecularity" % (y, y2))
            elif b1 != b2:
                violations.append("core transition %r -> %r does not respect blocks" % (y, y2))
    return violations


def _core_sources(net, partition, u):
    """Core complexes with a path to the intermediate complex ``u`` through
    intermediates only."""
    intermediate, core, _ = classify_complexes(net, partition)
    adj = _complex_graph(net)
    out = set()
    for y in core:
        if u in _reaches_through(adj, intermediate, y):
            out.add(y)
    return sorted(out)


# ---------------------------------------------------------------------------
# Matrix-Tree elimination of intermediates
# ---------------------------------------------------------------------------

def tree_sum(nodes, weights, root):
    """Sum over spanning in-trees rooted at ``root`` of the edge-weight
    products, via the Matrix-Tree minor of the out-degree Laplacian.
    ``weights`` maps ``(u, v)`` to the (summed) weight of edges u->v."""
    others = [v for v in nodes if v != root]
    idx = {v: i for i, v in enumerate(others)}
    n = len(others)
    L = [[Fraction(0)] * n for _ in range(n)]
    for (u, v), w in weights.items():
        if u == v:
            continue
        if u in idx:
            L[idx[u]][idx[u]] += Fraction(w)
            if v in idx:
                L[idx[u]][idx[v]] -= Fraction(w)
    return ratlin.determinant(L)


def enumerate_tree_sum(nodes, weights, root):
    """Oracle: literal enumeration of spanning in-trees rooted at ``root``.
    Each non-root node picks one out-edge; the choice is a tree iff every
    node reaches the root.  Exponential; for cross-checks only."""
    from itertools import product

    out_edges = {v: [] for v in nodes}
    for (u, v), w in weights.items():
        if u != v and u in out_edges:
            out_edges[u].append((v, w))
    others = [v for v in nodes if v != root]
    total = Fraction(0)
    for choice in product(*(out_edges[v] for v in others)):
        succ = dict(zip(others, (v for v, _ in choice)))
        ok = True
        for v in others:
            seen = set()
            cur = v
            while cur != root:
                if cur in seen or cur not in succ:
                    ok = False
                    break
                seen.add(cur)
                cur = succ[cur]
            if not ok:
                break
        if ok:
            p = Fraction(1)
            for _, w in choice:
                p *= Fraction(w)
            total += p
    return total


def _collapsed_graph(net, partition, kappa):
    """Collapsed graph on intermediate species plus a star node ``"*"``;
    concentrations in core->intermediate labels are set to 1."""
    intermediate, core, _ = classify_complexes(net, partition)
    rates = net.rates(kappa)
    weights = {}

    def add(u, v, w):
        weights[(u, v)] = weights.get((u, v), 0) + w

    for r in net.reactions:
        k = rates[r.rate_name]
        su = intermediate.get(r.source)
        tv = intermediate.get(r.target)
        if su is None and tv is None:
            continue
        add(su if su is not None else "*", tv if tv is not None else "*", k)
    nodes = ["*"] + sorted(set(intermediate.values()))
    return nodes, weights


def intermediate_coefficients(net, partition, kappa=None):
    """For each intermediate species the pair ``(mu, source)``: its steady
    value is ``mu * x^source`` with ``source`` the unique core complex
    feeding it through intermediates.  Raises when uniqueness fails."""
    intermediate, core, _ = classify_complexes(net, partition)
    nodes, weights = _collapsed_graph(net, partition, kappa)
    rho_star = tree_sum(nodes, weights, "*")
    if rho_star == 0:
        raise MessiError("intermediate linear system is singular")
    out = {}
    for cplx, sp in intermediate.items():
        sources = _core_sources(net, partition, cplx)
        if len(sources) != 1:
            raise MessiError(
                "intermediate %r needs a unique core source, found %r" % (sp, sources)
            )
        mu = tree_sum(nodes, weights, sp) / rho_star
        out[sp] = (mu, sources[0])
    return out


# ---------------------------------------------------------------------------
# association graphs
# ---------------------------------------------------------------------------

def build_G1(net, partition, kappa=None):
    """Digraph on core complexes; an edge carries the total transition rate
    ``tau = kappa_direct + sum_k kappa(U_k -> y') mu_k`` over intermediate
    channels."""
    intermediate, core, _ = classify_complexes(net, partition)
    rates = net.rates(kappa)
    mu = intermediate_coefficients(net, partition, kappa) if intermediate else {}
    edges = {}
    syms = {}

    def add(y, y2, val, sym):
        if y == y2:  # no net transition
            return
        edges[(y, y2)] = edges.get((y, y2), 0) + val
        syms.setdefault((y, y2), []).append(sym)

    for r in net.reactions:
        if r.source in core and r.target in core:
            add(r.source, r.target, rates[r.rate_name], r.rate_name)
        elif r.source in intermediate and r.target in core:
            sp = intermediate[r.source]
            m, src = mu[sp]
            add(src, r.target, rates[r.rate_name] * m, "%s*mu[%s]" % (r.rate_name, sp))
    return edges, {k: " + ".join(v) for k, v in syms.items()}


def _pair_bimolecular(blocks, y, y2):
    """Match the species of two bimolecular core complexes block-by-block;
    returns ((xi, xj), (xl, xm)) with xi,xj in one block and xl,xm in the
    other, or None."""
    (a1, _), (a2, _) = y
    (b1, _), (b2, _) = y2
    if blocks[a1] == blocks[b1] and blocks[a2] == blocks[b2]:
        return (a1, b1), (a2, b2)
    if blocks[a1] == blocks[b2] and blocks[a2] == blocks[b1]:
        return (a1, b2), (a2, b1)
    return None


def build_G2(net, partition, kappa=None):
    """The labelled association multigraph on core species plus the block
    dependency graph.

    Returns a dict with keys ``edges`` (list of ``(u, v, tau, hidden,
    symbol)``), ``parallel_free`` (no two edges share endpoints before
    collapsing), ``GE`` (set of block-index pairs) and ``components``
    (species grouped by graph component restricted to each block).
    """
    blocks = _block_index(net, partition)
    g1, g1sym = build_G1(net, partition, kappa)
    edges = []
    for (y, y2), tau in g1.items():
        sym = g1sym[(y, y2)]
        if len(y) == 1:
            u, v = y[0][0], y2[0][0]
            edges.append((u, v, tau, None, sym))
        else:
            pairing = _pair_bimolecular(blocks, y, y2)
            if pairing is None:
                raise MessiError("cannot pair %r -> %r block-wise" % (y, y2))
            (xi, xj), (xl, xm) = pairing
            edges.append((xi, xj, tau, xl, sym))
            edges.append((xl, xm, tau, xi, sym))
    seen = {}
    parallel_free = True
    for u, v, *_ in edges:
        if (u, v) in seen and u != v:
            parallel_free = False
        seen[(u, v)] = True
    ge = set()
    for u, v, tau, hidden, _ in edges:
        if u != v and hidden is not None and blocks[hidden] != blocks[u]:
            ge.add((blocks[hidden], blocks[u]))
    return {"edges": edges, "parallel_free": parallel_free, "GE": ge, "blocks": blocks}


def layer_sets(ge_edges, m):
    """Topological layers of the block dependency graph on blocks 1..m:
    layer 0 holds blocks with no incoming edge, layer k blocks whose
    incoming edges all originate in earlier layers.  Raises on cycles."""
    remaining = set(range(1, m + 1))
    layers = []
    placed = set()
    while remaining:
        layer = {
            b
            for b in remaining
            if all(src in placed for src, dst in ge_edges if dst == b)
        }
        if not layer:
            raise MessiError("block dependency graph has a cycle")
        layers.append(sorted(layer))
        placed |= layer
        remaining -= layer
    return layers


def _component_graphs(net, partition, g2):
    """networkx digraphs of the association graph restricted to each block
    (loops dropped)."""
    blocks = g2["blocks"]
    graphs = {}
    for b in range(1, len(partition)):
        G = nx.DiGraph()
        G.add_nodes_from(partition[b])
        for u, v, tau, hidden, sym in g2["edges"]:
            if u != v and blocks[u] == b:
                G.add_edge(u, v, tau=tau, hidden=hidden, sym=sym)
        graphs[b] = G
    return graphs


def _unique_simple_paths(G):
    nodes = list(G.nodes)
    for u, v in permutations(nodes, 2):
        count = 0
        for _ in nx.all_simple_paths(G, u, v):
            count += 1
            if count > 1:
                return False
        if count != 1:
            return False
    return True


def s_toric_check(net, partition, kappa=None):
    """Check the structural conditions for a toric steady-state
    parametrization; the quotient condition (iii) is machine-verified only
    in the unique-simple-path regime."""
    out = {"valid_partition": not validate_partition(net, partition)}
    intermediate, core, _ = classify_complexes(net, partition)
    try:
        intermediate_coefficients(net, partition, kappa)
        out["unique_intermediate_sources"] = True
    except MessiError as e:
        out["unique_intermediate_sources"] = False
        out["source_violation"] = str(e)
    try:
        g2 = build_G2(net, partition, kappa)
    except MessiError as e:
        out.update(parallel_free=False, weakly_reversible=False,
                   unique_simple_paths=False, quotient_condition="not verified",
                   g2_error=str(e))
        return out
    out["parallel_free"] = g2["parallel_free"]
    graphs = _component_graphs(net, partition, g2)
    wr = True
    usp = True
    for b, G in graphs.items():
        multi = [n for n in G.nodes if G.degree(n) > 0] or list(G.nodes)
        H = G.subgraph([n for n in G.nodes])
        if len(H) > 1 and H.number_of_edges() > 0:
            if not nx.is_strongly_connected(H):
                wr = False
            if not _unique_simple_paths(H):
                usp = False
    out["weakly_reversible"] = wr
    out["unique_simple_paths"] = usp
    out["quotient_condition"] = "verified" if (usp and wr) else "not verified"
    return out


# ---------------------------------------------------------------------------
# steady-state parametrization
# ---------------------------------------------------------------------------

def _tadd(p1, p2):
    out = dict(p1)
    for e, c in p2.items():
        out[e] = out.get(e, 0) + c
        if out[e] == 0:
            del out[e]
    return out


def _tmul(p1, p2):
    out = {}
    for e1, c1 in p1.items():
        for e2, c2 in p2.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
            if out[e] == 0:
                del out[e]
    return out


def _tpow(p, k, m):
    out = {tuple([0] * m): Fraction(1)}
    for _ in range(k):
        out = _tmul(out, p)
    return out


@dataclass
class Parametrization:
    chosen: tuple  # species names, defining the m coordinates
    terms: dict  # species -> {exponent tuple: coefficient}
    route: str  # "monomial" or "substitution"
    mu: dict = field(default_factory=dict)
    symbols: dict = field(default_factory=dict)

    def evaluate(self, x):
        """Species values at chosen concentrations ``x`` (positive)."""
        out = {}
        for sp, poly in self.terms.items():
            total = 0
            for e, c in poly.items():
                term = c
                for xi, ei in zip(x, e):
                    if ei:
                        term = term * xi ** ei
                total += term
            out[sp] = total
        return out


def default_chosen(net, partition):
    """One species per core block: conventional choices for the built-in
    networks, otherwise the first species of each block."""
    named = {
        "hybrid_kinase": ("X4", "X5"),
        "michaelis_menten": ("S0", "E"),
        "mixed_phosphorylation": ("S0", "E", "F"),
    }
    if net.name in named:
        return named[net.name]
    if net.name.startswith("phosphorylation_"):
        return ("S0", "E", "F")
    return tuple(partition[b][0] for b in range(1, len(partition)))


def _check_chosen(net, partition, chosen):
    blocks = _block_index(net, partition)
    if len(chosen) != len(partition) - 1:
        raise MessiError("need one chosen species per core block")
    seen = set()
    for sp in chosen:
        if sp not in blocks or blocks[sp] == 0:
            raise MessiError("chosen species %r must be a core species" % sp)
        if blocks[sp] in seen:
            raise MessiError("two chosen species in block %d" % blocks[sp])
        seen.add(blocks[sp])
    return blocks


def _monomial_route(net, partition, kappa, chosen):
    blocks = _check_chosen(net, partition, chosen)
    m = len(chosen)
    coord = {sp: i for i, sp in enumerate(chosen)}
    violations = validate_partition(net, partition)
    if violations:
        raise MessiError("invalid partition", violations)
    g2 = build_G2(net, partition, kappa)
    if not g2["parallel_free"]:
        raise MessiError("association graph has parallel edges")
    layers = layer_sets(g2["GE"], len(partition) - 1)
    graphs = _component_graphs(net, partition, g2)
    unit = lambda sp: {tuple(int(j == coord[sp]) for j in range(m)): Fraction(1)}
    terms = {sp: unit(sp) for sp in chosen}
    symbols = {}

    def label_term(data):
        """Single (exponent, coefficient) pair of an edge label tau * x_hidden."""
        tau = Fraction(data["tau"])
        hidden = data["hidden"]
        if hidden is None:
            return {tuple([0] * m): tau}
        hp = terms.get(hidden)
        if hp is None:
            raise MessiError("label species %r not yet parametrized" % hidden)
        if len(hp) != 1:
            raise MessiError("label species %r is not a single monomial" % hidden)
        ((e, c),) = hp.items()
        return {e: tau * c}

    for layer in layers:
        for b in layer:
            G = graphs[b]
            if len(G) == 1:
                sp = partition[b][0]
                if sp not in terms:
                    raise MessiError("isolated block %d must hold its chosen species" % b)
                continue
            if G.number_of_edges() == 0 or not nx.is_strongly_connected(G):
                raise MessiError("block %d association graph is not weakly reversible" % b)
            if not _unique_simple_paths(G):
                raise MessiError("block %d violates the unique-simple-path hypothesis" % b)
            start = next(sp for sp in partition[b] if sp in terms)
            values = {start: terms[start]}
            # flux balance along every simple cycle: the cycle out-rates
            # weight the node concentrations equally
            cycles = list(nx.simple_cycles(G))
            changed = True
            while changed and len(values) < len(G):
                changed = False
                for cyc in cycles:
                    L = len(cyc)
                    for i in range(L):
                        u, v = cyc[i], cyc[(i + 1) % L]
                        lu = label_term(G.edges[u, cyc[(i + 1) % L]])
                        wv = cyc[(i + 2) % L] if L > 1 else u
                        lv = label_term(G.edges[v, wv]) if G.has_edge(v, wv) else None
                        if lv is None:
                            continue
                        if u in values and v not in values:
                            ((eu, cu),) = lu.items()
                            ((ev, cv),) = lv.items()
                            ratio = {tuple(a - b for a, b in zip(eu, ev)): cu / cv}
                            values[v] = _tmul(values[u], ratio)
                            changed = True
            if len(values) < len(G):
                raise MessiError("could not propagate concentrations in block %d" % b)
            terms.update(values)
    # intermediates
    mu = intermediate_coefficients(net, partition, kappa) if partition[0] else {}
    for sp, (mval, src) in mu.items():
        poly = {tuple([0] * m): Fraction(mval)}
        for s2, c in src:
            poly = _tmul(poly, _tpow(terms[s2], c, m))
        if len(poly) != 1:
            raise MessiError("intermediate %r is not a single monomial" % sp)
        terms[sp] = poly
        symbols[sp] = "mu[%s] * x^%r" % (sp, dict(src))
    return Parametrization(tuple(chosen), terms, "monomial", mu=mu, symbols=symbols)


def _substitution_route(net, partition, kappa, chosen):
    _check_chosen(net, partition, chosen)
    m = len(chosen)
    coord = {sp: i for i, sp in enumerate(chosen)}
    polys = net.mass_action_system(kappa)
    unknown = [sp for sp in net.species if sp not in coord]
    known = {sp: {tuple(int(j == coord[sp]) for j in range(m)): Fraction(1)} for sp in chosen}

    def expand(mono, coeff):
        """Expand a full-species monomial over the chosen coordinates;
        None when it still contains unsolved species."""
        poly = {tuple([0] * m): Fraction(coeff)}
        for sp, e in zip(net.species, mono):
            if not e:
                continue
            if sp in known:
                poly = _tmul(poly, _tpow(known[sp], e, m))
            else:
                return None
        return poly

    pending = set(unknown)
    while pending:
        progress = False
        for v in sorted(pending, key=net.species.index):
            vi = net.index[v]
            for eq in polys:
                coeff_poly = {}
                rest_poly = {}
                ok = bool(eq)
                for mono, c in eq.items():
                    deg_unsolved = sum(e for sp, e in zip(net.species, mono) if sp in pending)
                    if mono[vi] == 0:
                        if deg_unsolved:
                            ok = False
                            break
                        rest_poly = _tadd(rest_poly, expand(mono, c))
                    elif mono[vi] == 1 and deg_unsolved == 1:
                        stripped = tuple(e - int(i == vi) for i, e in enumerate(mono))
                        coeff_poly = _tadd(coeff_poly, expand(stripped, c))
                    else:
                        ok = False
                        break
                if not ok or len(coeff_poly) != 1 or not rest_poly:
                    continue
                ((ce, cc),) = coeff_poly.items()
                known[v] = {
                    tuple(a - b for a, b in zip(e, ce)): -c / cc for e, c in rest_poly.items()
                }
                pending.discard(v)
                progress = True
                break
            if progress:
                break
        if not progress:
            raise MessiError(
                "sequential elimination stuck; unsolved species %r" % sorted(pending)
            )
    return Parametrization(tuple(chosen), known, "substitution")


def steady_state_parametrization(net, partition, kappa=None, chosen=None, verify=True):
    """Parametrization of the positive steady-state variety by one chosen
    concentration per core block.

    The monomial route (intermediate elimination plus cycle flux balances)
    is used when its hypotheses hold; otherwise a sequential linear
    substitution is attempted.  The result is verified by substituting into
    the full mass-action system at a random positive rational point, which
    must vanish identically.
    """
    violations = validate_partition(net, partition)
    if violations:
        raise MessiError(
            "invalid species partition: " + "; ".join(violations), violations
        )
    if chosen is None:
        chosen = default_chosen(net, partition)
    errors = []
    param = None
    try:
        param = _monomial_route(net, partition, kappa, chosen)
    except MessiError as e:
        errors.append(str(e))
    if param is None:
        try:
            param = _substitution_route(net, partition, kappa, chosen)
        except MessiError as e:
            errors.append(str(e))
            raise MessiError(
                "no steady-state parametrization: " + "; ".join(errors), errors
            )
    if verify:
        _verify_parametrization(net, kappa, param)
    return param


def _verify_parametrization(net, kappa, param, point=None):
    import random

    rng = random.Random(20240917)
    polys = net.mass_action_system(kappa)
    x = point or [Fraction(rng.randint(1, 7), rng.randint(1, 7)) for _ in param.chosen]
    vals = param.evaluate(x)
    exact = all(
        isinstance(v, (Fraction, int)) for v in vals.values()
    ) and all(isinstance(c, (Fraction, int)) for p in polys for c in p.values())
    full = [vals[sp] for sp in net.species]
    for i, p in enumerate(polys):
        total = 0
        scale = 0
        for mono, c in p.items():
            term = c
            for xv, e in zip(full, mono):
                term = term * xv ** e
            total += term
            scale += abs(term)
        if exact:
            if total != 0:
                raise MessiError("parametrization residual %r on %r" % (total, net.species[i]))
        elif scale and abs(total) > 1e-9 * scale:
            raise MessiError("parametrization residual %r on %r" % (total, net.species[i]))


# ---------------------------------------------------------------------------
# conservation laws and the region system
# ---------------------------------------------------------------------------

def messi_conservation(net, partition):
    """Block-wise 0/1 conservation laws: block alpha's law sums its species
    plus every intermediate fed (through intermediates) from a core complex
    containing a block-alpha species.  Verified to lie in the left kernel
    of the stoichiometric matrix."""
    blocks = _block_index(net, partition)
    intermediate, core, _ = classify_complexes(net, partition)
    adj = _complex_graph(net)
    feeds = {}
    for u, sp in intermediate.items():
        feeds[sp] = set()
        for y in _core_sources(net, partition, u):
            for s2, _ in y:
                feeds[sp].add(blocks[s2])
    N = net.stoichiometric_matrix()
    laws = []
    for b in range(1, len(partition)):
        vec = [Fraction(0)] * len(net.species)
        for sp in partition[b]:
            vec[net.index[sp]] = Fraction(1)
        for sp, bs in feeds.items():
            if b in bs:
                vec[net.index[sp]] = Fraction(1)
        for j in range(len(net.reactions)):
            tot = sum(vec[i] * N[i][j] for i in range(len(net.species)))
            if tot != 0:
                raise MessiError("block %d sum is not conserved" % b)
        laws.append(vec)
    # independence
    if ratlin.rank(laws) != len(laws):
        raise MessiError("conservation laws are dependent")
    return laws


@dataclass
class RegionSystem:
    cfg: PointConfiguration
    C: list  # m x n coefficient rows, aligned with cfg.points
    chosen: tuple
    totals: list
    parametrization: Parametrization
    laws: list
    column_symbols: list

    @property
    def constant_column(self):
        return self.cfg.points.index(tuple([0] * self.cfg.d))

    def chosen_columns(self):
        d = self.cfg.d
        return [self.cfg.points.index(tuple(int(j == a) for j in range(d))) for a in range(d)]


def assemble_region_system(net, partition, kappa, totals, chosen=None, param=None):
    """Substitute the steady-state parametrization into the block
    conservation laws and collect like monomials.

    Row ``alpha`` is ``sum_j C[alpha][j] x^{a_j} = 0`` including the

    constant column ``-T_alpha`` at exponent 0; the exponents form the
    point configuration of the region system.
    """
    if param is None:
        param = steady_state_parametrization(net, partition, kappa, chosen)
    chosen = param.chosen
    laws = messi_conservation(net, partition)
    m = len(laws)
    if len(totals) != m:
        raise MessiError("need one total per conservation law (%d)" % m)
    rows = []
    for b, law in enumerate(laws):
        poly = {}
        for sp in net.species:
            c = law[net.index[sp]]
            if c == 0:
                continue
            poly = _tadd(poly, {e: c * v for e, v in param.terms[sp].items()})
        zero = tuple([0] * len(chosen))
        poly = _tadd(poly, {zero: -totals[b]})
        rows.append(poly)
    columns = sorted({e for poly in rows for e in poly})
    C = [[poly.get(e, Fraction(0)) for e in columns] for poly in rows]
    cfg = PointConfiguration(columns)
    symbols = ["*".join(
        "%s^%d" % (sp, ei) if ei != 1 else sp
        for sp, ei in zip(chosen, e) if ei
    ) or "1" for e in columns]
    return RegionSystem(cfg, C, chosen, list(totals), param, laws, symbols)


# ---------------------------------------------------------------------------
# pulling a column scaling back onto the rate constants
# ---------------------------------------------------------------------------

@dataclass
class RescaleResult:
    kappa_bar: dict  # rescaled rate constants
    multipliers: dict  # reactant core complex -> scaling factor
    chosen_scale: dict  # chosen species -> variable-change factor
    gamma_effective: list  # normalized column scaling actually matched
    residual: float


def _reactant_core_complexes(net, partition):
    intermediate, core, _ = classify_complexes(net, partition)
    out = []
    for r in net.reactions:
        if r.source in core and r.source not in out:
            out.append(r.source)
    return out


def rescale_back(net, partition, kappa, totals, gamma, chosen=None, region=None):
    """Rate constants ``kappa_bar`` whose region system equals the original
    one scaled column-wise by ``gamma``.

    ``gamma`` is normalized first: the constant column is divided out and
    the chosen-variable columns are absorbed into a variable change
    ``x_alpha -> g_alpha x_alpha`` (reported in ``chosen_scale``).  The
    exponent of each remaining column in the per-reactant-complex scaling
    is measured by exact probing (multiply all rates out of one core
    complex by 2 and factor the column ratio), the resulting linear system
    is solved in logarithms, and the postcondition
    ``C(kappa_bar) = C(kappa) * diag(gamma_eff)`` is verified to 1e-9.
    """
    import numpy as np

    if region is None:
        region = assemble_region_system(net, partition, kappa, totals, chosen)
    chosen = region.chosen
    cols = region.cfg.points
    n = len(cols)
    if len(gamma) != n:
        raise MessiError("need one scale per column")
    gamma = [float(g) for g in gamma]
    const = region.constant_column
    unit_cols = region.chosen_columns()
    gtil = [g / gamma[const] for g in gamma]
    gscale = {sp: gtil[unit_cols[a]] for a, sp in enumerate(chosen)}
    ghat = []
    for j, e in enumerate(cols):
        val = gtil[j]
        for a in range(len(chosen)):
            val *= gtil[unit_cols[a]] ** (-e[a])
        ghat.append(val)
    active = [j for j in range(n) if j != const and j not in unit_cols]
    # probe every reactant core complex with an exact factor of 2
    kappa_exact = {k: Fraction(v) for k, v in net.rates(kappa).items()}
    base = assemble_region_system(net, partition, kappa_exact, totals, chosen)
    probes = []
    names = []
    for y in _reactant_core_complexes(net, partition):
        k2 = dict(kappa_exact)
        for r in net.reactions:
            if r.source == y:
                k2[r.rate_name] = kappa_exact[r.rate_name] * 2
        scaled = assemble_region_system(net, partition, k2, totals, chosen)
        if scaled.cfg.points != base.cfg.points:
            continue
        evec = {}
        uniform = True
        for j in active:
            ratios = set()
            for a in range(len(base.C)):
                c0, c1 = base.C[a][j], scaled.C[a][j]
                if (c0 == 0) != (c1 == 0):
                    uniform = False
                    break
                if c0 != 0:
                    ratios.add(c1 / c0)
            if not uniform or len(ratios) > 1:
                uniform = False
                break
            if not ratios:
                evec[j] = 0
                continue
            (r,) = ratios
            num, den = r.numerator, r.denominator
            if (num & (num - 1)) or (den & (den - 1)):
                uniform = False
                break
            evec[j] = num.bit_length() - den.bit_length()
        if uniform:
            probes.append(evec)
            names.append(y)
    if not probes and any(abs(math.log(ghat[j])) > 1e-12 for j in active):
        raise MessiError("no reactant complex scales the region system")
    E = np.array([[p[j] for p in probes] for j in active], dtype=float)
    rhs = np.array([math.log(ghat[j]) for j in active])
    if E.size:
        sol, *_ = np.linalg.lstsq(E, rhs, rcond=None)
        res = E @ sol - rhs
        if np.max(np.abs(res), initial=0.0) > 1e-9:
            raise MessiError("column scaling is not realizable by rate rescaling")
    else:
        sol = np.zeros(0)
    multipliers = {y: math.exp(s) for y, s in zip(names, sol)}
    kbar = {k: float(v) for k, v in net.rates(kappa).items()}
    for y, ell in multipliers.items():
        for r in net.reactions:
            if r.source == y:
                kbar[r.rate_name] *= ell
    # postcondition
    scaled = assemble_region_system(net, partition, kbar, totals, chosen)
    if scaled.cfg.points != base.cfg.points:
        raise MessiError("rescaled system changed support")
    worst = 0.0
    for a in range(len(base.C)):
        for j in range(n):
            want = float(base.C[a][j]) * ghat[j]
            got = float(scaled.C[a][j])
            scale = max(abs(want), abs(got), 1e-300)
            worst = max(worst, abs(want - got) / scale)
    if worst > 1e-9:
        raise MessiError(
            "column scaling is not realizable by rate rescaling "
            "(postcondition residual %g)" % worst
        )
    return RescaleResult(kbar, multipliers, gscale, ghat, worst)
