import numpy as np

from svnkit import WeightedNetwork, disparity_backbone, disparity_pvalues

# Each node spreads its strength over its links.  Under the null the shares
# are uniform random splits, and a link is significant for a node when its
# share is too large to be chance.  Heavy-tailed weights make a few links stand out.
rng = np.random.default_rng(11)
n = 80
edges = [
    (f"n{u:02d}", f"n{v:02d}", float(rng.pareto(0.8) + 0.1))
    for u in range(n)
    for v in range(u + 1, n)
    if rng.random() < 0.1
]
wn = WeightedNetwork.from_edges(edges)
print(f"{wn.n_nodes} nodes, {wn.n_edges} links, {wn.n_arcs} (node, link) tests")

p = disparity_pvalues(wn)
print(f"smallest p-values: {np.sort(p[~np.isnan(p)])[:5]}")

# The backbone is directed: i -> j means the link passed from i's side.
for correction in ("none", "fdr", "bonferroni"):
    bb = disparity_backbone(wn, alpha=0.05, correction=correction)
    both = bb.symmetrize("intersection")
    print(f"{correction:>10}: {len(bb.edges):3d} arcs kept, {len(both):3d} links kept from both ends")

# Rescaling every link of one node leaves that node's p-values alone,
# since only shares of its own strength enter the test.
bb = disparity_backbone(wn, alpha=0.05, correction="fdr")
print("first retained arcs:")
for u, v, w, pv in bb.edges[:5]:
    print(f"  {u} -> {v}  w={w:.2f}  p={pv:.2e}")
