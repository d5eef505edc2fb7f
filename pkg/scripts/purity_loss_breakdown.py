"""Purity loss under Gaussian phase noise: where 2 dgamma / dx^2 stops tracking the sub-QFI.

Prints the ratio and its relative error against the sub-QFI for a range of noise widths,
on the |+>, sigma_z probe and on the diagonal qutrit probe.
"""

import argparse

import numpy as np

from subqfi import fisher
from subqfi.fixtures import SIGMA_Z, plus_state, qutrit


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--widths", default="0.001,0.005,0.01,0.05,0.1,0.2,0.5,1.0")
    args = ap.parse_args(argv)
    widths = [float(x) for x in args.widths.split(",")]

    for name, (rho, h) in [("|+>, sigma_z", (plus_state(), SIGMA_Z)), ("qutrit", qutrit())]:
        sub = fisher.subqfi_closed(rho, h)
        print(f"{name}: sub-QFI = {sub:g}")
        print(f"  {'dx':>7} {'dgamma':>12} {'ratio':>10} {'rel err':>10}")
        for dx in widths:
            res = fisher.purity_loss(rho, h, dx)
            print(f"  {dx:>7g} {res.delta_gamma:>12.5e} {res.ratio:>10.5f} {abs(res.ratio - sub) / sub:>10.2e}")
        # pure qubit closed form: dgamma = (1 - exp(-4 dx^2)) / 2
        if name.startswith("|+>"):
            dx = widths[-1]
            print(f"  closed form at dx={dx:g}: {(1 - np.exp(-4 * dx * dx)) / 2:.5e}")


if __name__ == "__main__":
    main()
