"""Independent brute-force implementations used to cross-check the library.

Everything here is deliberately written from the definitions with loops
and exhaustive enumeration, sharing no code path with the package.
"""

from __future__ import annotations

import itertools


def brute_prefix_count(addresses) -> int:
    """Distinct /16 prefixes, counted via string octets."""
    seen = set()
    for addr in addresses:
        a, b, _, _ = addr.split(".")
        seen.add((int(a), int(b)))
    return len(seen)


def brute_jaccard(a, b) -> float:
    inter = 0
    for x in a:
        if x in b:
            inter += 1
    union = len(set(list(a) + list(b)))
    return inter / union if union else 0.0


def brute_avgddr(member_ddrs) -> float:
    total = 0.0
    for v in member_ddrs:
        total += v
    return total / len(member_ddrs)


def brute_avgmcr(members, weight) -> float:
    """Mean pairwise weight over all unordered member pairs (0 when absent)."""
    members = sorted(members)
    k = len(members)
    if k < 2:
        return 0.0
    total = 0.0
    pairs = 0
    for i in range(k):
        for j in range(i + 1, k):
            total += weight(members[i], members[j])
            pairs += 1
    return total / pairs


def brute_modularity(graph, assignment, resolution=1.0) -> float:
    """Direct double sum over ordered vertex pairs."""
    n = len(graph.vertices)
    w = [[0.0] * n for _ in range(n)]
    for e in graph.edges:
        w[e.a][e.b] = e.mcr
        w[e.b][e.a] = e.mcr
    s = [sum(row) for row in w]
    two_w = sum(s)
    if two_w == 0:
        return 0.0
    q = 0.0
    for i in range(n):
        for j in range(n):
            if assignment[i] == assignment[j]:
                q += w[i][j] - resolution * s[i] * s[j] / two_w
    return q / two_w


def set_partitions(items):
    """All set partitions, as lists of lists."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1 :]
        yield [[first]] + part


def exhaustive_best_modularity(graph, resolution=1.0) -> float:
    """Optimum modularity over every partition of the vertex set."""
    n = len(graph.vertices)
    best = float("-inf")
    for part in set_partitions(range(n)):
        assignment = {}
        for cid, block in enumerate(part):
            for v in block:
                assignment[v] = cid
        q = brute_modularity(graph, assignment, resolution)
        if q > best:
            best = q
    return best


def brute_maximum_cliques(adj, vertices=None):
    """(size, all maximum cliques as sorted tuples) of the induced subgraph."""
    verts = sorted(vertices if vertices is not None else adj)
    for size in range(len(verts), 0, -1):
        found = []
        for combo in itertools.combinations(verts, size):
            ok = True
            for u, v in itertools.combinations(combo, 2):
                if v not in adj[u]:
                    ok = False
                    break
            if ok:
                found.append(tuple(combo))
        if found:
            return size, found
    return 0, []


def brute_pair_indices(groups, communities, bots=None, legits=None):
    """(bsi, bai, blsi) recomputed by explicit pair enumeration.

    blsi is None unless bots and legits are both given.
    """
    comm_of = {}
    for idx, com in enumerate(communities):
        for h in com:
            comm_of[h] = idx
    group_of = {}
    for gi, g in enumerate(groups):
        for h in g:
            group_of[h] = gi
    all_bots = sorted(group_of)
    a = b = c = 0
    for u, v in itertools.combinations(all_bots, 2):
        same_x = group_of[u] == group_of[v]
        cu, cv = comm_of.get(u), comm_of.get(v)
        same_y = cu is not None and cu == cv
        if same_x and same_y:
            a += 1
        elif same_x:
            b += 1
        elif same_y:
            c += 1
    bsi = 1.0 if a + c == 0 else a / (a + c)
    bai = 1.0 if a + b == 0 else a / (a + b)
    blsi = None
    if bots and legits:
        d = 0
        for u in sorted(bots):
            for v in sorted(legits):
                cu, cv = comm_of.get(u), comm_of.get(v)
                if cu is None or cv is None or cu != cv:
                    d += 1
        blsi = d / (len(bots) * len(legits))
    return bsi, bai, blsi
