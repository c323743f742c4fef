"""Rate thresholds of min-sum decoding: what rates survive the approximation.

Below R_L strong polarization still holds under min-sum decoding; above R_U
the word error rate tends to one no matter which bits are frozen.  Both come
out of one pruned scan of the polarization tree.  R_U is typically a little
below the channel capacity: the price of the approximation.
"""

from minsum_polar import binary_entropy, compute_thresholds, make_bsc, make_quantized_biawgn, label_distribution, mutual_information

print("=== BSC sweep (depths 10/24, pruning 1e-3) ===")
print("   p      R_L       R_U       C        C-R_U")
for p in (0.02, 0.05, 0.08, 0.11, 0.14, 0.17, 0.20):
    tree = compute_thresholds(make_bsc(p), 10, 24, 1e-3)
    capacity = 1.0 - binary_entropy(p)
    print(f"  {p:.2f}   {tree.r_l:.5f}   {tree.r_u:.5f}   {capacity:.5f}   {capacity - tree.r_u:.5f}")
print()

print("=== quantized BPSK/AWGN at sigma = 1 ===")
ch = make_quantized_biawgn(1.0)
tree = compute_thresholds(ch, 10, 24, 1e-3)
capacity = mutual_information(label_distribution(ch))
print(f"R_L={tree.r_l:.5f}  R_U={tree.r_u:.5f}  C_quantized={capacity:.5f}")
print(f"scan sizes: |G|={len(tree.g_nodes)}, |E|={len(tree.e_nodes)}")
print()

print("=== deeper scans only tighten the bracket ===")
for d_g, d_e in ((6, 12), (8, 16), (10, 24)):
    tree = compute_thresholds(make_bsc(0.11), d_g, d_e, 1e-3)
    print(f"  depths ({d_g:2d},{d_e:2d}): R_L={tree.r_l:.6f}  R_U={tree.r_u:.6f}")
