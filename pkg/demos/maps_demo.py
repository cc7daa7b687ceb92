"""MRL maps: branches, cylinders, periodic points and typical Lyapunov exponents."""
import math

from lyapspec import maps


def main():
    G = maps.gauss()
    x = math.sqrt(2) - 1
    print("Gauss orbit of sqrt(2) - 1 (continued fraction digits are all 2):")
    print("  digits", [maps.branch_of(G, y) for _, y, _ in maps.orbit(G, x, 8)])

    w = (1, 2, 3)
    lo, hi = maps.cylinder_interval(G, w)
    p = maps.periodic_point(G, w)
    print(f"\ncylinder {w}: [{lo:.6f}, {hi:.6f}], periodic point {p:.12f}")
    print(f"  T^3(p) - p = {maps.apply(G, maps.apply(G, maps.apply(G, p))) - p:.1e}")

    target = math.pi ** 2 / (6 * math.log(2))
    est = maps.lyapunov_mc(G, orbits=4000, steps=500, seed=7)
    print(f"\nGauss typical exponent {est.mean:.4f} +- {est.stderr:.4f} (known value {target:.5f})")

    D = maps.dyadic_luroth()
    est = maps.lyapunov_mc(D, orbits=4000, steps=500, seed=7)
    print(f"dyadic Luroth typical exponent {est.mean:.4f} (2 log 2 = {2 * math.log(2):.5f})")

    for name in ("renyi", "mp", "luroth-logdir-5"):
        T = maps.map_from_record(name)
        rec = T.record()
        print(f"preset {name:<16} family={rec['family']:<7} branches={'finite' if T.finite else 'infinite'}")


if __name__ == "__main__":
    main()
