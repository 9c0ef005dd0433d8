"""
alpha from two directions
=========================

alpha is bracketed by an upper estimate (the fastest two-level state)
and a lower estimate (a min-max over tangent lines of cos x + q sin x,
evaluated on random grids and extrapolated to zero spacing).  The two
land on top of each other.
"""
from qsl import GridSpec, alpha_lower, alpha_upper, tangent_line

line = tangent_line(3.141592653589793 / 4)
print(f"tangent line for q=pi/4: slope a={line.a:.5f}, contact at x={line.y:.5f}")

print("\n  eps    upper      lower     err      (upper-lower)/err")
for i, eps in enumerate((0.05, 0.2, 0.3, 0.5, 0.8)):
    low = alpha_lower(eps, GridSpec(seed=i))
    up = alpha_upper(eps)
    print(f"{eps:5.2f}  {up:.6f}  {low.value_at_zero:.6f}  {low.error_bar:.1e}  "
          f"{(up - low.value_at_zero) / low.error_bar:+.2f}")

print("\nper-level minima for eps=0.3:")
for lvl in alpha_lower(0.3).diagnostics["levels"]:
    print(f"  {lvl['theta_count']:5d} theta points: min={lvl['min']:.6f}  "
          f"q at max={lvl['q_at_max']:.3f}")
