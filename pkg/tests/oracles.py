"""Reference computations kept independent of the library code paths they check."""

from __future__ import annotations

from types import SimpleNamespace

import numpy as np


def jaro_reference(s: str, t: str) -> float:
    """Jaro similarity straight from its definition, written index-first."""
    if s == t:
        return 1.0
    if not s or not t:
        return 0.0
    reach = max(len(s), len(t)) // 2 - 1
    if reach < 0:
        reach = 0
    taken = set()
    s_pos = []
    for i in range(len(s)):
        lo, hi = max(0, i - reach), min(len(t) - 1, i + reach)
        j = lo
        while j <= hi:
            if j not in taken and s[i] == t[j]:
                taken.add(j)
                s_pos.append(i)
                break
            j += 1
    m = len(s_pos)
    if m == 0:
        return 0.0
    s_seq = "".join(s[i] for i in s_pos)
    t_seq = "".join(t[j] for j in sorted(taken))
    out_of_order = 0
    for k in range(m):
        if s_seq[k] != t_seq[k]:
            out_of_order += 1
    tau = out_of_order / 2
    return (m / len(s) + m / len(t) + (m - tau) / m) / 3


def dense_weighted_pagerank(n, edges, weights, damping, iterations):
    """Dense-matrix iteration of PR(v) = (1-d) + d * sum_u w(u,v) PR(u) / W(u)."""
    mat = np.zeros((n, n))
    for (u, v), w in zip(edges, weights):
        mat[u, v] += w
    out = mat.sum(axis=1)
    trans = np.zeros_like(mat)
    rows = out > 0
    trans[rows] = mat[rows] / out[rows, None]
    pr = np.ones(n)
    for _ in range(iterations):
        pr = (1 - damping) + damping * (trans.T @ pr)
    return pr


def random_digraph(rng, max_nodes, p_max=0.3):
    """Random simple digraph as a duck-typed graph with ``ids``, ``src``, ``dst``, ``n_nodes``."""
    n = int(rng.integers(1, max_nodes + 1))
    p = rng.uniform(0, p_max)
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    return SimpleNamespace(
        ids=[f"n{i}" for i in range(n)],
        src=src.astype(np.int64),
        dst=dst.astype(np.int64),
        n_nodes=n,
    )


def venue_weights_double_loop(articles, graph, weights):
    """Sum of edge weights for every venue pair by looping over article pairs."""
    edge_w = {(int(u), int(v)): w for u, v, w in zip(graph.src, graph.dst, weights)}
    venues = sorted({a.venue_id for a in articles.values() if a.venue_id is not None})
    members = {v: [] for v in venues}
    for i, aid in enumerate(graph.ids):
        vid = articles[aid].venue_id
        if vid is not None:
            members[vid].append(i)
    pair_w = {}
    for s in venues:
        for t in venues:
            acc, hit = 0.0, False
            for u in members[s]:
                for v in members[t]:
                    if (u, v) in edge_w:
                        acc += edge_w[(u, v)]
                        hit = True
            if hit:
                pair_w[(s, t)] = acc
    return pair_w


def two_level_average(citation_scores: dict, articles, attr: str):
    """Entity mean of its articles' scores, then article mean over its entities (None if none)."""
    by_entity = {}
    for aid, rec in articles.items():
        for e in getattr(rec, attr):
            by_entity.setdefault(e, []).append(citation_scores[aid])
    out = {}
    for aid, rec in articles.items():
        ents = getattr(rec, attr)
        if ents:
            means = [sum(by_entity[e]) / len(by_entity[e]) for e in ents]
            out[aid] = sum(means) / len(means)
        else:
            out[aid] = None
    return out


def impact_weight_mp(delta: int, decay: float) -> float:
    import mpmath

    mpmath.mp.dps = 50
    if delta < 0:
        return 1.0
    return float(1 / mpmath.log(mpmath.e + delta) ** mpmath.mpf(decay))


def closed_form_star_hub(n_leaves: int, damping: float) -> float:
    return (1 - damping) + damping * n_leaves * (1 - damping)



def link_reference(name, fos, venues, lam, theta, phi):
    """Two-tier linking decision recomputed with ``jaro_reference``.

    ``venues`` is a list of (venue_id, normalised_name, fos_set). Returns
    (venue_id or None, rule).
    """
    if not name or not venues:
        return None, "unmatched"

    def pick(rows):
        # highest similarity, then smallest id
        return sorted(rows, key=lambda r: (-r[0], r[1]))[0]

    scored = [(jaro_reference(name, vname), vid, vfos) for vid, vname, vfos in venues]
    sim, vid, _ = pick(scored)
    if sim >= lam:
        return vid, "name_only"
    fos = set(fos)
    topical = []
    for s, v, vfos in scored:
        vfos = set(vfos)
        ts = len(fos & vfos) / (len(fos) * len(vfos)) ** 0.5 if fos and vfos else 0.0
        if ts >= theta:
            topical.append((s, v, vfos))
    if topical:
        sim, vid, _ = pick(topical)
        if sim >= phi:
            return vid, "topic_then_name"
    return None, "unmatched"
