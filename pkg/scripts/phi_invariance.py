"""Signature spread over random positive functionals for every exact-path map.

For each corpus germ, every square map the pipeline feeds to the signature
method (the germ itself when n = p, and each gradient) is tried with many
random rational functionals phi with phi(J) > 0.  A well-defined degree shows
up as a single signature value per map.

    python3 scripts/phi_invariance.py --samples 100
"""

import argparse
import random
from fractions import Fraction
from pathlib import Path

from realmilnor.analysis import load_germ
from realmilnor.elk import apply_functional, inertia, local_algebra
from realmilnor.errors import RealMilnorError
from realmilnor.polyring import gradient

CORPUS = Path(__file__).resolve().parents[1] / "src" / "realmilnor" / "corpus"


def square_maps(germ):
    if germ.n == germ.p:
        yield "f", list(germ.components)
    for k, c in enumerate(germ.components):
        yield f"grad f{k + 1}", gradient(c)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    print(f"{'germ':<18} {'map':<8} {'dim':>4}  signatures")
    for path in sorted(CORPUS.glob("*.json")):
        germ = load_germ(path)
        for label, g in square_maps(germ):
            if any(c.constant_term for c in g):
                continue
            try:
                alg = local_algebra(g)
            except RealMilnorError as exc:
                print(f"{germ.name:<18} {label:<8} {'-':>4}  skipped ({type(exc).__name__})")
                continue
            values = set()
            done = 0
            while done < args.samples:
                w = [Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(alg.basis.dimension)]
                if apply_functional(w, alg.jacobian, alg.basis) <= 0:
                    continue
                pos, neg, _ = inertia(alg.form(w).matrix)
                values.add(pos - neg)
                done += 1
            print(f"{germ.name:<18} {label:<8} {alg.basis.dimension:>4}  {sorted(values)}")


if __name__ == "__main__":
    main()
