"""Brute-force cylinder counting against the Legendre prediction on a finite Luroth system.

The cover exponent is log(#cylinders with Birkhoff average near alpha) / (n alpha).
At modest depth the window 2 delta is narrower than the spacing log 2 / n of the
attainable averages, so some windows are empty and the counts carry a polynomial
prefactor; the exact endpoints are nonetheless recovered.
"""
import math

from lyapspec.oracle import alpha_grid, enumerate_level_set, finite_legendre, oracle_vs_legendre

LENGTHS = [0.5, 0.25, 0.25]


def main():
    alphas = alpha_grid(LENGTHS, 11)
    for depth, delta in ((14, 0.02), (14, 0.05)):
        rep = oracle_vs_legendre(LENGTHS, alphas, delta=delta, depth=depth)
        print(f"depth={depth} delta={delta}: max |cover - legendre| = {rep.max_deviation:.3f}")
        for r in rep.rows:
            print(f"  alpha={r.alpha:.4f} count={r.count:>8} cover={r.cover_exponent:.4f} legendre={r.legendre_value:.4f}")

    end = enumerate_level_set(LENGTHS, math.log(4), delta=0.02, depth=14)
    print(f"\nalpha = log 4: cover exponent {end.cover_exponent:.12f}, prediction "
          f"{finite_legendre(LENGTHS, math.log(4)):.12f}")


if __name__ == "__main__":
    main()
