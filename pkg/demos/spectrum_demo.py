"""Lyapunov spectrum L(alpha) from a pressure curve, including the boundary regimes."""
import math

from lyapspec import maps
from lyapspec.pressure import pressure_curve
from lyapspec.spectrum import dom_L, spectrum_at_zero, spectrum_curve, spectrum_point


def show(name, curve, a_lo, a_hi, steps=8):
    dom = dom_L(curve)
    print(f"\n{name}: alpha_min={dom.alpha_min:.4f} dashed_from={dom.dashed_from} plateau_to={dom.plateau_to}")
    for p in spectrum_curve(curve, a_lo, a_hi, steps):
        print(f"  alpha={p.alpha:7.3f}  L={p.L:.5f}  +-{p.L_err:.1e}  {p.case}")


def main():
    G = pressure_curve(maps.gauss(), 0.55, 3.0, steps=50)
    a = math.pi ** 2 / (6 * math.log(2))
    p = spectrum_point(G, a)
    print(f"Gauss: L at the typical exponent {a:.4f} is {p.L:.4f} (expected 1)")
    show("Gauss", G, 1.0, 6.0)

    show("log-Dirichlet Luroth, m=5", pressure_curve(maps.map_from_record("luroth-logdir-5"), 0.55, 3.0, 40),
         4.0, 8.0, 6)

    R = pressure_curve(maps.renyi(), 0.6, 2.0, steps=30)
    show("Renyi", R, 0.1, 4.0, 6)
    print(f"  limit as alpha -> 0: {spectrum_at_zero(R):.6f}")


if __name__ == "__main__":
    main()
