"""Certify multistationarity of the distributive two-site phosphorylation
cycle, then scale up to three sites.

Run with:  python3 demos/phosphorylation_cascade.py
"""

from multistat.networks import phosphorylation
from multistat.witness import certify_multistationarity


def kappa_for(n):
    k = {}
    for i in range(n):
        k.update({f"kon{i}": 1, f"koff{i}": 1, f"kcat{i}": 1,
                  f"lon{i}": 1, f"loff{i}": 1, f"lcat{i}": 1})
    k["kcat1"] = 2  # a single asymmetric catalytic rate suffices
    return k


def main():
    for n in (2, 3):
        net, partition = phosphorylation(n)
        totals = [1, 1, 3]  # enzyme, phosphatase, substrate
        decor, report = certify_multistationarity(net, partition, kappa_for(n), totals)
        print("%s: %d species, %d reactions" % (net.name, len(net.species),
                                                len(net.reactions)))
        print("    decorated simplices:", decor.decorated)
        print("    largest realizable family:", decor.best.simplices)
        print("    witness search:", report.status,
              "(t* = %g, %d certified roots)" % (report.t_star, len(report.roots)))
        kappa = kappa_for(n)
        changed = sorted(k for k, v in report.kappa_bar.items()
                         if abs(v - float(kappa[k])) > 1e-9)
        print("    rate constants changed by the rescaling:", changed)
        for vec in report.species_roots:
            shown = {sp: float("%.4g" % v) for sp, v in vec.items()
                     if sp.startswith("S")}
            print("      substrate profile at a root:", shown)
        print()


if __name__ == "__main__":
    main()
