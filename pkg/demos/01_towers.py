"""Convergents and Rokhlin towers of the rotation by alpha = [0; a, a, ...].

Run:  python demos/01_towers.py
"""
from rotsus import convergents, interval_In, make_params, ostrowski, tower_partition
from rotsus.tower import closest_return_verify, dn

P = make_params(3)
print(f"a = {P.a}, alpha = {P.alpha.decimal(25)}")
print(f"alpha is exact: {P.alpha}  (alpha^2 + a alpha = {P.alpha * P.alpha + P.a * P.alpha})")

print("\nConvergents p/q and the signed distances d_n = q alpha - p:")
for c in convergents(P, 6):
    print(f"  n={c.n}  p={c.p:5d}  q={c.q:5d}  d_n = {dn(P, c.n).decimal(12)}")

# q_n are the closest returns: no earlier iterate comes nearer to 0
print("\nclosest returns up to n = 4:", all(closest_return_verify(P, n) for n in range(1, 5)))

# the orbit of I_n for q_{n+1} steps and of I_{n+1} for q_n steps tiles the circle
n = 2
T = tower_partition(P, n)
I0, _ = interval_In(P, n)
I1, _ = interval_In(P, n + 1)
print(f"\nLevel {n}: {len(T.long_floors)} floors over I_{n}, {len(T.short_floors)} over I_{n + 1}")
total = sum((f.interval.length for f in T.floors), P.zero)
print("  total length:", total)
print("  first floors:")
for f in T.floors[:4]:
    print(f"    {f.base:5s} h={f.height:2d}  [{f.interval.left.decimal(8)}, {f.interval.right.decimal(8)}]")

# Ostrowski digits split an iterate count into full tower passes
for i in (7, 100, 12345):
    print(f"\n{i} = " + " + ".join(f"{b}*q_{k}" for k, b in enumerate(ostrowski(P, i).digits) if b), end="")
print()
