"""Command-line front end.

Commands::

    multistat analyze      network analysis up to decorated families
    multistat witness      adds the decreasing-t root certification
    multistat mixed-analyze  Cayley/mixed-simplex analysis of the system
    multistat subdivision  regular subdivisions of a point configuration

Exit codes: 0 success, 2 malformed input, 3 structural-hypothesis
failure, 4 witness search exhausted (inconclusive).  The environment
variable ``MULTISTAT_SEED`` fixes the lattice-seed jitter.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import decoration, messi, networks, report, witness
from .messi import MessiError
from .networks import ParseError
from .points import PointConfiguration, is_regular, regular_subdivision

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_HYPOTHESIS = 3
EXIT_EXHAUSTED = 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _parse_number(text):
    text = text.strip()
    try:
        if "/" in text:
            return Fraction(text)
        if "." in text or "e" in text or "E" in text:
            return Fraction(text)
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError):
        raise CliError("not a number: %r" % text, EXIT_PARSE)


def _parse_list(text):
    return [_parse_number(v) for v in text.split(",") if v.strip()]


def _load_network(args):
    """Network, partition, rates and totals from a file or ``--builtin``,
    with ``--k``/``--T``/``--partition`` overrides."""
    if args.builtin and args.network:
        raise CliError("give a network file or --builtin, not both", EXIT_PARSE)
    totals_named = None
    if args.builtin:
        try:
            net, partition = networks.builtin_network(args.builtin)
        except ValueError as e:
            raise CliError(str(e), EXIT_PARSE)
    elif args.network:
        try:
            net, partition, totals_named = networks.parse_network_file(args.network)
        except OSError as e:
            raise CliError(str(e), EXIT_PARSE)
        except ParseError as e:
            raise CliError(str(e), EXIT_PARSE)
    else:
        raise CliError("need a network file or --builtin", EXIT_PARSE)

    if args.partition:
        partition = _parse_partition(args.partition, net)
    if partition is None:
        raise CliError("no species partition given", EXIT_PARSE)

    if args.k:
        values = _parse_list(args.k)
        names = [r.rate_name for r in net.reactions]
        if len(values) != len(names):
            raise CliError(
                "--k needs %d values (%s)" % (len(names), ", ".join(names)),
                EXIT_PARSE,
            )
        kappa = dict(zip(names, values))
    else:
        try:
            kappa = net.rates()
        except ValueError as e:
            raise CliError("%s; give --k" % e, EXIT_PARSE)

    if args.T:
        totals = _parse_list(args.T)
    elif totals_named:
        totals = list(totals_named.values())
    else:
        raise CliError("no totals given (--T or a totals: line)", EXIT_PARSE)
    return net, partition, kappa, totals


def _parse_partition(text, net):
    blocks = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise CliError("partition blocks look like '1: X1 X2'", EXIT_PARSE)
        idx, names = part.split(":", 1)
        try:
            idx = int(idx)
        except ValueError:
            raise CliError("bad partition block index %r" % idx, EXIT_PARSE)
        blocks[idx] = names.split()
    if not blocks or set(blocks) != set(range(max(blocks) + 1)):
        raise CliError("partition blocks must be numbered 0..m", EXIT_PARSE)
    out = [blocks[i] for i in range(max(blocks) + 1)]
    for sp in (s for b in out for s in b):
        if sp not in net.index:
            raise CliError("unknown species %r in partition" % sp, EXIT_PARSE)
    return out


def _input_echo(net, partition, kappa, totals):
    return {
        "network": net.name,
        "species": list(net.species),
        "reactions": [
            "%s -> %s ; %s" % (
                " + ".join("%s %s" % (c, s) if c != 1 else s for s, c in r.source),
                " + ".join("%s %s" % (c, s) if c != 1 else s for s, c in r.target),
                r.rate_name,
            )
            for r in net.reactions
        ],
        "kappa": {k: _num(v) for k, v in kappa.items()},
        "totals": [_num(v) for v in totals],
        "partition": [list(b) for b in partition],
    }


def _num(v):
    return v if isinstance(v, (int, float)) else Fraction(v)


def _analysis_stages(net, partition, kappa, totals):
    region = messi.assemble_region_system(net, partition, kappa, totals)
    decor = decoration.find_decorated(region.cfg, region.C)
    stages = {
        "conservation_laws": [list(l) for l in region.laws],
        "parametrization": {
            "chosen": list(region.chosen),
            "route": region.parametrization.route,
            "terms": {
                sp: [
                    {"exponents": list(e), "coefficient": Fraction(c)}
                    for e, c in sorted(poly.items())
                ]
                for sp, poly in sorted(region.parametrization.terms.items())
            },
        },
        "region_system": {
            "points": [list(p) for p in region.cfg.points],
            "C": [[Fraction(c) for c in row] for row in region.C],
            "column_symbols": list(region.column_symbols),
        },
        "decoration": {
            "decorated": [list(s) for s in decor.decorated],
            "facet_pairs": [[list(a), list(b)] for a, b in decor.facet_pairs],
            "indeterminate": [list(s) for s in decor.indeterminate],
            "families": [
                {
                    "simplices": [list(s) for s in f.simplices],
                    "height": list(f.height) if f.height is not None else None,
                    "cone_inequalities": [
                        report.inequality(m) for m in f.cone.normals
                    ],
                }
                for f in decor.families
            ],
        },
    }
    return region, decor, stages


def _witness_stage(rep):
    out = {
        "status": rep.status,
        "height": list(rep.height),
        "t_star": rep.t_star,
        "gamma": list(rep.gamma) if rep.gamma else None,
        "schedule": [{"t": t, "roots": n} for t, n in rep.log],
        "roots": [
            {
                "x": [float(v) for v in r.x],
                "residual": r.residual,
                "jacobian_sigma_min": r.sigma_min,
                "jacobian_sigma_ratio": r.sigma_ratio,
                "basin": r.basin,
            }
            for r in rep.roots
        ],
    }
    if rep.kappa_bar is not None:
        out["kappa_bar"] = {k: float(v) for k, v in sorted(rep.kappa_bar.items())}
        out["chosen_scale"] = {k: float(v) for k, v in sorted(rep.chosen_scale.items())}
        out["species_roots"] = rep.species_roots
    return out


def _finish(doc, args, summary_lines):
    if not args.quiet:
        for line in summary_lines:
            print(line)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.dumps(doc))
        if not args.quiet:
            print("report written to %s" % args.out)


def cmd_analyze(args):
    net, partition, kappa, totals = _load_network(args)
    region, decor, stages = _analysis_stages(net, partition, kappa, totals)
    doc = {
        "schema_version": report.SCHEMA_VERSION,
        "command": "analyze",
        "input": _input_echo(net, partition, kappa, totals),
    }
    doc.update(stages)
    lines = [
        "network %s: %d species, %d reactions" % (
            net.name, len(net.species), len(net.reactions)),
        "steady-state parametrization via the %s route in %s" % (
            region.parametrization.route, ", ".join(region.chosen)),
        "region system: %d monomials in %d variables" % (
            region.cfg.n, region.cfg.d),
        "positively decorated simplices: %s" % (
            ", ".join(str(tuple(s)) for s in decor.decorated) or "none"),
    ]
    best = decor.best
    if best is not None:
        lines.append(
            "largest jointly realizable family (p = %d): %s" % (
                len(best.simplices),
                ", ".join(str(tuple(s)) for s in best.simplices)))
    else:
        lines.append("no decorated simplex: no lower bound obtained")
    _finish(doc, args, lines)
    return EXIT_OK


def cmd_witness(args):
    net, partition, kappa, totals = _load_network(args)
    region, decor, stages = _analysis_stages(net, partition, kappa, totals)
    doc = {
        "schema_version": report.SCHEMA_VERSION,
        "command": "witness",
        "input": _input_echo(net, partition, kappa, totals),
    }
    doc.update(stages)
    lines = []
    if args.mixed:
        mixed_rep = witness.mixed_decoration(region.cfg, region.C)
        doc["mixed"] = _mixed_stage(mixed_rep)
        if mixed_rep.best is None:
            lines.append("no mixed-decorated simplex: nothing to certify")
            _finish(doc, args, lines)
            return EXIT_HYPOTHESIS
        rep = witness.mixed_witness_search(
            region.cfg, region.C, mixed_rep, budget=args.budget)
        doc["witness"] = _witness_stage(rep)
        lines.append("mixed family of %d simplices" % len(mixed_rep.best.simplices))
    else:
        best = decor.best
        if best is None:
            lines.append("no decorated simplex: nothing to certify")
            _finish(doc, args, lines)
            return EXIT_HYPOTHESIS
        rep = witness.witness_search(
            region.cfg, region.C, best, budget=args.budget,
            threads=args.threads,
            context=(net, partition, kappa, totals, region))
        doc["witness"] = _witness_stage(rep)
        lines.append("family of %d simplices: %s" % (
            len(best.simplices), ", ".join(str(tuple(s)) for s in best.simplices)))
    if rep.status == "success":
        lines.append("success at t* = %g: %d distinct certified roots" % (
            rep.t_star, len(rep.roots)))
        for r in rep.roots:
            lines.append("  x = (%s)  residual %.3g  [%s]" % (
                ", ".join("%.6g" % v for v in r.x), r.residual, r.basin))
        if rep.kappa_bar is not None:
            changed = {
                k: v for k, v in rep.kappa_bar.items()
                if abs(v - float(kappa[k])) > 1e-9 * max(1.0, abs(float(kappa[k])))
            }
            lines.append("rescaled rate constants: %s" % (
                ", ".join("%s = %.6g" % kv for kv in sorted(changed.items()))
                or "unchanged"))
        _finish(doc, args, lines)
        return EXIT_OK
    lines.append(
        "schedule exhausted after %d steps: inconclusive "
        "(no claim about nonexistence)" % len(rep.log))
    _finish(doc, args, lines)
    return EXIT_EXHAUSTED


def _mixed_stage(mixed_rep):
    return {
        "blocks": [[list(p) for p in b] for b in mixed_rep.cayley.blocks],
        "mixed_simplices": [list(s) for s in mixed_rep.mixed],
        "decorated": [list(s) for s in mixed_rep.decorated],
        "families": [
            {
                "simplices": [list(s) for s in f.simplices],
                "height": list(f.height) if f.height is not None else None,
                "cone_inequalities": [
                    report.inequality(m) for m in f.cone.normals
                ],
            }
            for f in mixed_rep.families
        ],
    }


def cmd_mixed_analyze(args):
    net, partition, kappa, totals = _load_network(args)
    region, decor, stages = _analysis_stages(net, partition, kappa, totals)
    mixed_rep = witness.mixed_decoration(region.cfg, region.C)
    doc = {
        "schema_version": report.SCHEMA_VERSION,
        "command": "mixed-analyze",
        "input": _input_echo(net, partition, kappa, totals),
        "region_system": stages["region_system"],
        "mixed": _mixed_stage(mixed_rep),
    }
    lines = [
        "Cayley configuration: %d points in %d blocks" % (
            mixed_rep.cayley.n, mixed_rep.cayley.d),
        "mixed simplices: %d, decorated: %d" % (
            len(mixed_rep.mixed), len(mixed_rep.decorated)),
    ]
    if mixed_rep.best is not None:
        lines.append("largest realizable mixed family: p = %d" %
                     len(mixed_rep.best.simplices))
    _finish(doc, args, lines)
    return EXIT_OK


def _read_points(path):
    points = []
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                try:
                    points.append(tuple(int(v) for v in line.replace(",", " ").split()))
                except ValueError:
                    raise CliError(
                        "%s:%d: expected one integer vector per line"
                        % (path, lineno), EXIT_PARSE)
    except OSError as e:
        raise CliError(str(e), EXIT_PARSE)
    return points


def _read_cells(path):
    cells = []
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                try:
                    cells.append(tuple(sorted(
                        int(v) for v in line.replace(",", " ").split())))
                except ValueError:
                    raise CliError(
                        "%s:%d: expected one cell (point indices) per line"
                        % (path, lineno), EXIT_PARSE)
    except OSError as e:
        raise CliError(str(e), EXIT_PARSE)
    return cells


def cmd_subdivision(args):
    points = _read_points(args.points)
    try:
        cfg = PointConfiguration(points)
    except ValueError as e:
        raise CliError(str(e), EXIT_PARSE)
    doc = {
        "schema_version": report.SCHEMA_VERSION,
        "command": "subdivision",
        "input": {"points": [list(p) for p in points]},
    }
    lines = []
    if args.check:
        cells = _read_cells(args.check)
        ok, height = is_regular(cfg, cells)
        doc["check"] = {
            "cells": [list(c) for c in cells],
            "regular": ok,
            "height": list(height) if height is not None else None,
        }
        if ok:
            lines.append("regular: witnessed by a height function")
            lines.append("height h = (%s)" % ", ".join(str(v) for v in height))
        else:
            lines.append("non-regular: the height cone is empty")
        _finish(doc, args, lines)
        return EXIT_OK
    if args.heights:
        heights = _parse_list(args.heights)
        if len(heights) != cfg.n:
            raise CliError("--heights needs %d values" % cfg.n, EXIT_PARSE)
    else:
        heights = [Fraction(0)] * cfg.n
    cells = regular_subdivision(cfg, heights)
    doc["subdivision"] = {
        "heights": [Fraction(v) for v in heights],
        "cells": [list(c) for c in cells.cells],
    }
    lines.append("%d cells: %s" % (
        len(cells.cells), ", ".join(str(tuple(c)) for c in cells.cells)))
    _finish(doc, args, lines)
    return EXIT_OK


def _add_network_options(p):
    p.add_argument("network", nargs="?", help="network description file")
    p.add_argument("--builtin", help="built-in network: hk, mm, mixed-phospho, phospho:n")
    p.add_argument("--k", help="rate constants, comma-separated in reaction order")
    p.add_argument("--T", help="conserved totals, comma-separated in block order")
    p.add_argument("--partition", help="species partition, e.g. '0: ; 1: X1 X2'")
    _add_common(p)


def _add_common(p):
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--quiet", action="store_true", help="suppress the summary")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads for independent solver runs")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="multistat",
        description="Lower bounds for positive steady states of "
                    "mass-action networks via decorated simplices.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("analyze", help="pipeline up to decorated families")
    _add_network_options(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("witness", help="analysis plus certified root search")
    _add_network_options(p)
    p.add_argument("--budget", type=int, default=60,
                   help="schedule depth: t runs over 2^-1 .. 2^-budget")
    p.add_argument("--mixed", action="store_true",
                   help="use the Cayley/mixed-simplex route")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("mixed-analyze",
                       help="Cayley configuration and mixed decoration")
    _add_network_options(p)
    p.set_defaults(func=cmd_mixed_analyze)

    p = sub.add_parser("subdivision", help="regular subdivisions of a point set")
    p.add_argument("points", help="file with one integer vector per line")
    p.add_argument("--heights", help="height values, comma-separated")
    p.add_argument("--check",
                   help="file of cells to test for regularity (indices per line)")
    _add_common(p)
    p.set_defaults(func=cmd_subdivision)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print("error: %s" % e, file=sys.stderr)
        return e.code
    except (ParseError,) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_PARSE
    except (MessiError, decoration.IndeterminateSign) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ValueError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
