"""Topological pressure: certified brackets, phase transitions and plateaus."""
import math

from lyapspec import maps
from lyapspec.pressure import (classify_type, detect_t_inf, find_root_d, partition_sum_bounds, pressure_curve,
                               truncated_pressure)


def main():
    D = maps.dyadic_luroth()
    c = pressure_curve(D, 0.1, 5.0, steps=50)
    exact = [math.log(2 ** -t / (1 - 2 ** -t)) for t in c.t]
    print(f"dyadic Luroth: max error vs closed form {max(abs(a - b) for a, b in zip(c.p_mid, exact)):.1e}, "
          f"root d = {find_root_d(c):.12f}")

    G = maps.gauss()
    lo, hi = partition_sum_bounds(G, 1.0, depth=2, cutoff=2000)
    print(f"\nGauss at t=1: certified bracket [{lo:.4f}, {hi:.4f}]")
    c = pressure_curve(G, 0.55, 3.0, steps=50)
    print(f"Gauss root of pressure d = {find_root_d(c):.4f} (Hausdorff dimension of the repeller is 1)")
    print("finite truncations increase towards P(1):",
          [round(truncated_pressure(G, B, 1.0), 5) for B in (5, 10, 30)])

    print("\nphase transitions of the log-Dirichlet Luroth maps:")
    for m in (1, 5):
        T = maps.map_from_record(f"luroth-logdir-{m}")
        print(f"  m={m}: t_inf={detect_t_inf(T)} type={classify_type(T).value}")

    R = maps.renyi()
    c = pressure_curve(R, 0.6, 2.0, steps=15)
    print("\nRenyi pressure flattens at 0 beyond d = 1 (parabolic plateau):")
    for t, p in zip(c.t[::2], c.p_mid[::2]):
        print(f"  P({t:.2f}) = {p:+.5f}")


if __name__ == "__main__":
    main()
