"""The layers T_n of the return-time series and their Birkhoff sums.

T_n is a signed combination of trapezoid bumps placed along the level-n
tower.  Along a full column the contributions cancel, and at half a column
they leave a closed-form multiple of the bump value.

Run:  python demos/02_layers.py
"""
from rotsus import birkhoff_naive, build_Tn, interval_In, make_context, make_params
from rotsus.returntime import chi_value, tail_bound, tn_spec
from rotsus.tower import qn

P = make_params(2)
for n in (1, 2, 3):
    spec = tn_spec(P, n)
    print(f"T_{n}: column height {spec.height}, {spec.j} full bumps, "
          f"{spec.j_prime - spec.j} empty floors, leading sign {spec.leading_sign:+d}")

n = 2
spec, f = build_Tn(P, n)
print(f"\nT_{n} has {len(f)} breakpoints, sup |T_{n}| = {f.sup_norm().decimal(10)}")

I, _ = interval_In(P, n)
x = I.left + I.length / 7
print(f"sum over a full column (q_{n + 1} = {qn(P, n + 1)} steps) at x in I_{n}:",
      birkhoff_naive(f, x, qn(P, n + 1)))

ctx = make_context(P, n, "left")
value = birkhoff_naive(f, ctx.x, ctx.i)
print(f"\nhalf column, i = {ctx.i}, x = left end of J_{n}:")
print("  Birkhoff sum      ", value)
print("  from the origin   ", birkhoff_naive(f, P.zero, ctx.i))
# the closed form uses the cumulative column coefficient
print("  closed form       ", spec.cumulative(ctx.i) * chi_value(P, n, ctx.x))

print("\ntail beyond N (bounds sup of the omitted layers):")
for N in range(1, 6):
    print(f"  N={N}: {tail_bound(P, N).decimal(6)}")
