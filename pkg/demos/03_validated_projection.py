from svnkit import BenchmarkSpec, generate, project, validate_one_tail, validate_two_tail

# Bipartite data: 3 groups of A nodes, each preferring its own block of B
# nodes.  Projecting on A links any two A nodes sharing a B neighbour, which
# here means almost everything is linked to everything.
spec = BenchmarkSpec(n_blocks=3, a_nodes_per_block=30, b_nodes_per_block=60, intra_link_prob=0.4, inter_link_prob=0.04, seed=3)
bn, planted = generate(spec)
pn = project(bn, "A")
n = bn.n_a
print(f"projection: {pn.n_edges} of {n * (n - 1) // 2} possible links present")

# Test each projected link for over-expression of shared neighbours against
# the hypergeometric null, then correct for the number of links tested.
where = planted.assignment
for method in ("fdr", "bonferroni"):
    vn = validate_one_tail(bn, "A", alpha=0.05, method=method)
    inside = sum(where[i] == where[j] for i, j, *_ in vn.edges)
    print(f"{method:>10}: N_t={vn.n_tests}, {vn.n_edges} validated, {inside} inside a planted group")

# The two-tail mode also tests unlinked pairs and flags pairs sharing
# fewer neighbours than chance would give.
vn = validate_two_tail(bn, "A", alpha=0.05, method="fdr")
s = vn.summary()
print(f"two-tail: N_t={s['n_tests']}, {s['n_over']} over-expressed, {s['n_under']} under-expressed")
cross = sum(where[i] != where[j] for i, j, *_ in vn.under_edges())
print(f"under-expressed pairs across groups: {cross} of {s['n_under']}")
