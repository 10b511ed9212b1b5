"""The suspension flow over the rotation, with roof 1 + sup|T| + T.

Run:  python demos/05_flow.py
"""
from gmpy2 import mpq

from rotsus import MappingTorusPoint, expansiveness_probe, flow, make_params, normalize
from rotsus.flow import quotient_dist, roof, section_return_time

P = make_params(1000)
Tp = roof(P, 6)
y = P.alpha / 5
p = MappingTorusPoint(y, P.zero)

t = section_return_time(Tp, p)
print("first return to the section after", t.decimal(15))
print("lands at", flow(Tp, p, t))

q = normalize(Tp, y, mpq(7, 2))
print("\nflowing 3.5 from the section:", q.y.decimal(10), q.s.decimal(10))
a, b = mpq(123, 10), mpq(-45, 7)
print("group law:", flow(Tp, flow(Tp, q, a), b) == flow(Tp, q, a + b))
print("distance to a time-shift by 1/1000:",
      quotient_dist(Tp, q, flow(Tp, q, mpq(1, 1000))))

res = expansiveness_probe(P, eps=mpq(1, 10), samples=30, seed=4, controls=3)
print(f"\nprobe: {res.separated}/{res.samples} pairs on distinct orbits separated, "
      f"delta(eps=1/10) = {res.delta.decimal(8)}")
for c in res.controls:
    print(f"  same-orbit control tau={float(c['tau']):+.4f}: max distance {c['max_distance'].decimal(6)}")
