"""Slide functions: support lines, the S-Newton map and the Legendre transform.

A slide is a convex non-increasing function that is +inf left of t_inf and
vanishes at d. We build the quadratic slide (t - 1)^2 on (0, 1], flat at 0
beyond d = 1, and read off its support lines for a few slopes.
"""
from lyapspec.slide import legendre, power_slide, s_newton_case, support_line


def main():
    f = power_slide(c=1.0, gamma=2.0, d=1.0, t_inf=0.0)
    print(f"t_inf={f.t_inf} d={f.d} kind={f.kind.value} type={f.ctype.value}")
    print(f"boundary slopes a_f={f.a_f:.3f} b_f={f.b_f:.3f}, limit at t_inf={f.limit_at_t_inf:.3f}")

    print("\nalpha   case                     tangency   Ns(alpha)   F(alpha)   F - alpha*Ns")
    for alpha in (0.25, 1.0, 1.9, 3.0):
        ns, case, t = s_newton_case(f, alpha)
        F = legendre(f, alpha)
        print(f"{alpha:<7} {case.value:<24} {t:<10.4f} {ns:<11.6f} {F:<10.6f} {F - alpha * ns:.1e}")

    # slopes steeper than a_f = -2 all touch at the corner (t_inf, f(t_inf+))
    line = support_line(f, 3.0)
    print(f"\nslope -3 line touches at t={line.tangency_t}, intercept {line.intercept:.3f}")


if __name__ == "__main__":
    main()
