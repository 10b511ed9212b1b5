"""Birkhoff sums in time independent of the number of iterates.

Run:  python demos/03_fast_sums.py
"""
import time

from rotsus import birkhoff_fast, birkhoff_naive, build_T, make_params, truncated_T
from rotsus.field import circle_reduce
from rotsus.tower import rotate

P = make_params(10)
N = 3
explicit, _ = build_T(P, N)
implicit = truncated_T(P, N)
x = circle_reduce(P.alpha / 7)
birkhoff_fast(implicit, x, 1)  # builds the cached tables once

for i in (10, 1000, 20000):
    t0 = time.perf_counter()
    slow = birkhoff_naive(explicit, x, i)
    t1 = time.perf_counter()
    fast = birkhoff_fast(implicit, x, i)
    t2 = time.perf_counter()
    print(f"i={i:6d}  equal={slow == fast}  naive {1e3 * (t1 - t0):8.1f} ms  fast {1e3 * (t2 - t1):6.2f} ms")

# at a = 1000 the iterate counts of interest are astronomically large
P = make_params(1000)
g = truncated_T(P, 7)
x = P.alpha / 3
i, j = 10**18, 7 * 10**17 + 3
t0 = time.perf_counter()
whole = birkhoff_fast(g, x, i + j)
parts = birkhoff_fast(g, x, i) + birkhoff_fast(g, rotate(P, x, i), j)
print(f"\na=1000, i+j = {i + j}: cocycle law holds {whole == parts} "
      f"({time.perf_counter() - t0:.3f} s for three sums)")
print("value:", whole.decimal(20))
