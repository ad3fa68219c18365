#!/usr/bin/env python3
"""Generate hydrogen-density-matched surrogate unit cells in extended XYZ.

Each cell holds two metal sites at (0,0,0) and (1/2,1/2,1/2) and a fixed
number of hydrogen atoms placed by seeded rejection sampling, subject to a
minimum H-H and H-metal separation under periodic boundary conditions.
"""

import argparse

import numpy as np

PRESETS = {
    # name: (metal, a, b, c, n_hydrogen)
    "votpp": ("V", 13.4, 13.4, 8.2847, 56),
    "cumnt": ("Cu", 13.6, 13.6, 11.970, 80),
}


def periodic_distance(frac_a, frac_b, lattice):
    d = frac_a - frac_b
    d -= np.round(d)
    return np.linalg.norm(d @ lattice)


def generate(metal, a, b, c, n_h, seed, min_hh, min_hm):
    lattice = np.diag([a, b, c])
    metals = [np.array([0.0, 0.0, 0.0]), np.array([0.5, 0.5, 0.5])]
    rng = np.random.default_rng(seed)
    hydrogens = []
    attempts = 0
    while len(hydrogens) < n_h:
        attempts += 1
        if attempts > 2_000_000:
            raise RuntimeError("could not place hydrogens; relax the separations")
        p = rng.random(3)
        if any(periodic_distance(p, m, lattice) < min_hm for m in metals):
            continue
        if any(periodic_distance(p, h, lattice) < min_hh for h in hydrogens):
            continue
        hydrogens.append(p)
    atoms = [(metal, m) for m in metals] + [("H", h) for h in hydrogens]
    lines = [str(len(atoms))]
    lines.append(
        'Lattice="{:.6f} 0 0 0 {:.6f} 0 0 0 {:.6f}" qubit_index=0'.format(a, b, c)
    )
    for element, frac in atoms:
        x, y, z = frac @ lattice
        lines.append(f"{element} {x:.6f} {y:.6f} {z:.6f}")
    return "\n".join(lines) + "\n"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("preset", choices=sorted(PRESETS))
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--min-hh", type=float, default=2.0)
    parser.add_argument("--min-hm", type=float, default=4.5)
    parser.add_argument("--out", required=True)
    args = parser.parse_args()
    metal, a, b, c, n_h = PRESETS[args.preset]
    text = generate(metal, a, b, c, n_h, args.seed, args.min_hh, args.min_hm)
    with open(args.out, "w", newline="\n") as fh:
        fh.write(text)


if __name__ == "__main__":
    main()
