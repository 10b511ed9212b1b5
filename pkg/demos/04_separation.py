"""How far apart do nearby orbits drift under the return-time cocycle?

At a = 1000 every term of the exact separation budget is evaluated and
compared with its bound, then a grid of pairs is certified.

Run:  python demos/04_separation.py
"""
from rotsus import make_context, make_params
from rotsus import verify as V

P = make_params(1000)
print(f"a = {P.a}, 1/c = alpha = {P.alpha.decimal(12)}\n")

for n in (1, 2, 3):
    ctx = make_context(P, n)
    print(f"level n={n}: x = midpoint of J_{n}, i = {ctx.i}")
    checks = [V.check_p2(ctx), V.check_c5(ctx), V.check_p6(ctx, n + 4), V.check_p7(ctx),
              V.main_separation(ctx)]
    if n >= 2:
        checks.insert(1, V.check_p3(ctx))
    for r in checks:
        print(f"  {r.prop:5s} {r.verdict:14s} lhs {r.lhs.decimal(8):>18s}  bound {r.rhs.decimal(8):>18s}")
    print()

cert = V.separation_certificate(P, count=40, seed=1)
moved = sum(1 for r in cert.results if r.q)
print(f"certificate over {len(cert.results)} pairs: passed={cert.passed}, "
      f"delta={cert.delta.decimal(8)}, {moved} pairs needed a transport step")
w = cert.worst
print(f"tightest pair: window n={w.n}, branch {w.branch}, separation {w.value.decimal(8)}")
