"""How the expected total tip shrinks as the auction gets more crowded.

Prints the threshold value and the expected total tip for uniform values and
for a Beta law, then compares the threshold power with the 1/n and
1/sqrt(n) reference curves.
"""

from censorship_auctions import Beta, bounds_report, figure_data

print(" n    v_lo      total tip")
for row in figure_data(2, 12):
    print(f"{row.n:2d}  {row.v_lo:.5f}  {row.total_tip:.6f}")

# a right-skewed law; every row satisfies the tip bound
print("\nBeta(5,1):")
for row in figure_data(2, 6, Beta(5, 1)):
    print(f"{row.n:2d}  {row.v_lo:.5f}  {row.total_tip:.6f}  bound ok={row.assumption_holds}")

# Beta(2,2) breaks the bound from n=3 on; rows are kept but flagged
print("\nBeta(2,2):")
for row in figure_data(2, 5, Beta(2, 2)):
    print(f"{row.n:2d}  {row.v_lo:.5f}  {row.total_tip:.6f}  bound ok={row.assumption_holds}")

rep = bounds_report(2, 200)
print(f"\n1/n <= v_lo^n from n={rep.lower_holds_from}")
print(f"v_lo^n <= 1/sqrt(n) from n={rep.upper_holds_from}")
for row in rep.rows[::33]:
    print(f"n={row.n:3d}  v_lo^n={row.vlo_pow_n:.4f}  1/n={row.inv_n:.4f}  1/sqrt(n)={row.inv_sqrt_n:.4f}")
# v_lo^n levels off near 0.222 while 1/sqrt(n) keeps falling
