import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factories import art, table
from oracles import dense_weighted_pagerank, two_level_average
from scholarank.ensembles import (
    EnsembleWeights,
    ScaledRanking,
    affiliation_ensemble,
    author_ensemble,
    citation_ensemble,
    fuse,
    rank_articles,
    scale_to_common_mean,
    venue_ensemble,
)
from scholarank.errors import ConfigError
from scholarank.graph import Dataset, build_citation_graph, build_venue_graph
from scholarank.ranking import RankingParams, RankingVector, classical_pagerank, edge_weights, time_weighted_pagerank


def _scaled(values, provenance="citation"):
    values = np.asarray(values, dtype=float)
    return ScaledRanking([f"a{i}" for i in range(len(values))], values, 1.0, provenance)


def test_citation_ensemble_empty_graph():
    g = build_citation_graph(table(art("A"), art("B")), [])
    assert np.all(citation_ensemble(g).scores == 0.85)


def test_citation_ensemble_is_twpr():
    arts = table(art("A", 2000), art("B", 2002), art("C", 2003), art("D", 2004), art("E", 2010))
    g = build_citation_graph(arts, [("B", "A"), ("C", "A"), ("D", "B"), ("E", "A"), ("E", "D")])
    direct = time_weighted_pagerank(g, edge_weights(g, 2.5), RankingParams())
    assert citation_ensemble(g).scores.tobytes() == direct.scores.tobytes()


def test_recent_article_beats_old_one_with_equal_in_degree():
    arts = table(
        art("O", 1990), art("p", 1992), art("q", 1992),
        art("R", 2009), art("s", 2010), art("b", 2011), art("a", 2011),
    )
    refs = [("p", "O"), ("q", "O"), ("a", "O"), ("s", "R"), ("b", "R"), ("a", "R")]
    g = build_citation_graph(arts, refs)
    assert g.in_degree()[g.index["O"]] == g.in_degree()[g.index["R"]] == 3
    twpr = citation_ensemble(g).as_dict()
    flat = classical_pagerank(g).as_dict()
    assert flat["R"] == flat["O"]
    assert twpr["R"] > twpr["O"]
    w = edge_weights(g, 2.5)
    oracle = dense_weighted_pagerank(g.n_nodes, zip(g.src, g.dst), w, 0.15, 30)
    assert twpr["R"] == pytest.approx(oracle[g.index["R"]], abs=1e-12)
    assert twpr["O"] == pytest.approx(oracle[g.index["O"]], abs=1e-12)


def _venue_setup(arts, refs):
    g = build_citation_graph(arts, refs)
    return g, build_venue_graph(g, arts, edge_weights(g, 2.5))


def test_single_venue_gives_identical_base_scores():
    arts = table(art("a", 2000, "V"), art("b", 2001, "V"), art("c", 2002, "V"))
    g, vg = _venue_setup(arts, [("b", "a"), ("c", "a"), ("c", "b")])
    r = venue_ensemble(vg, arts)
    assert np.all(r.scores == 0.85)


def test_cited_venue_outranks_citing_venue():
    arts = table(art("s1", 2001, "S"), art("s2", 2002, "S"), art("t1", 2000, "T"), art("t2", 2000, "T"))
    g, vg = _venue_setup(arts, [("s1", "t1"), ("s2", "t1"), ("s2", "t2")])
    r = venue_ensemble(vg, arts).as_dict()
    # two-node venue graph S -> T: T = 0.85 + 0.15 * 0.85
    assert r["t1"] == r["t2"] == pytest.approx(0.9775, abs=1e-12)
    assert r["s1"] == r["s2"] == pytest.approx(0.85, abs=1e-15)


def test_missing_venue_gets_minimum_venue_score():
    arts = table(art("s", 2001, "S"), art("t", 2000, "T"), art("x", 2001, None))
    g, vg = _venue_setup(arts, [("s", "t"), ("x", "t")])
    r = venue_ensemble(vg, arts).as_dict()
    assert r["x"] == min(r["s"], r["t"]) == r["s"]


def test_author_singleton():
    arts = table(art("a", authors=["x"]))
    c = RankingVector(["a"], [1.7], "citation")
    assert author_ensemble(c, arts).scores.tolist() == [1.7]


def test_author_two_authors_average():
    arts = table(art("p", authors=["x", "y"]), art("q", authors=["y"]), art("r", authors=["x"]))
    c = RankingVector(["p", "q", "r"], [1.0, 3.0, 1.0], "citation")
    # x: mean(1, 1) = 1, y: mean(1, 3) = 2
    assert author_ensemble(c, arts).as_dict()["p"] == 1.5


def test_author_toy_matches_oracle_and_floor():
    arts = table(
        art("a1", authors=["x"]), art("a2", authors=["x", "y"]), art("a3", authors=["y"]), art("a4"),
    )
    c = RankingVector(list(arts), [0.9, 1.4, 2.2, 0.95], "citation")
    got = author_ensemble(c, arts).as_dict()
    want = two_level_average(c.as_dict(), arts, "author_ids")
    for aid in ("a1", "a2", "a3"):
        assert got[aid] == pytest.approx(want[aid], abs=1e-15)
    assert got["a4"] == min(got[a] for a in ("a1", "a2", "a3"))


def test_affiliation_mirrors_author():
    arts = table(art("a1", affiliations=["o"]), art("a2", affiliations=["o", "p"]), art("a3"))
    c = RankingVector(list(arts), [1.0, 2.0, 5.0], "citation")
    got = affiliation_ensemble(c, arts)
    want = two_level_average(c.as_dict(), arts, "affiliation_ids")
    assert got.provenance == "affiliation"
    assert got.as_dict()["a1"] == pytest.approx(want["a1"])
    assert got.as_dict()["a2"] == pytest.approx(want["a2"])
    assert got.as_dict()["a3"] == min(want["a1"], want["a2"])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.1, 10), min_size=1, max_size=30), st.data())
def test_one_article_per_author_is_identity(scores, data):
    n = len(scores)
    sizes = data.draw(st.lists(st.integers(1, 3), min_size=n, max_size=n))
    arts, k = {}, 0
    for i in range(n):
        arts[f"a{i}"] = art(f"a{i}", authors=[f"x{k + j}" for j in range(sizes[i])])
        k += sizes[i]
    c = RankingVector(list(arts), scores, "citation")
    np.testing.assert_allclose(author_ensemble(c, arts).scores, c.scores, rtol=1e-15)


def test_scale_halves():
    r = RankingVector(["a", "b"], [1.0, 3.0], "citation")
    (s,) = scale_to_common_mean([r], 1.0)
    assert s.scores.tolist() == [0.5, 1.5]


def test_scale_identity():
    r = RankingVector(["a", "b"], [0.5, 1.5], "citation")
    (s,) = scale_to_common_mean([r], 1.0)
    assert s.scores.tolist() == [0.5, 1.5]


def test_scale_two_rankings_to_common_mean():
    a = RankingVector(["x", "y", "z"], [0.6, 0.9, 1.2], "citation")
    b = RankingVector(["x", "y", "z"], [1.0, 3.0, 5.0], "venue")
    for s in scale_to_common_mean([a, b], 1.0):
        assert abs(np.mean(s.scores) - 1.0) <= 1e-9
    assert [s.provenance for s in scale_to_common_mean([a, b])] == ["citation", "venue"]


def test_scale_rejects_zero_mean():
    with pytest.raises(ValueError):
        scale_to_common_mean([RankingVector(["a"], [0.0], "citation")])


def test_fuse_default_weights_one_two_three():
    out = fuse(_scaled([1.0]), _scaled([2.0]), _scaled([3.0]), EnsembleWeights(1.2, 0.3))
    assert out.scores[0] == pytest.approx(1.72, abs=1e-12)
    assert out.provenance == "fused"


def test_fuse_equal_inputs():
    x = [0.37, 1.9]
    out = fuse(_scaled(x), _scaled(x), _scaled(x))
    assert out.scores.tolist() == x


def test_fuse_zero_weights_is_citation():
    c = [0.3, 1.1, 2.0]
    out = fuse(_scaled(c), _scaled([5, 5, 5]), _scaled([9, 9, 9]), EnsembleWeights(0.0, 0.0))
    assert out.scores.tolist() == c


def test_fuse_with_affiliation():
    out = fuse(_scaled([1.0]), _scaled([2.0]), _scaled([3.0]), EnsembleWeights(1.2, 0.3, 0.3), _scaled([4.0]))
    assert out.scores[0] == pytest.approx((1 + 2.4 + 0.9 + 1.2) / 2.8, abs=1e-12)


def test_fuse_mismatched_articles():
    other = ScaledRanking(["zz"], np.array([1.0]), 1.0, "venue")
    with pytest.raises(ValueError):
        fuse(_scaled([1.0]), other, _scaled([1.0]))


def test_weights_validation():
    with pytest.raises(ConfigError):
        EnsembleWeights(alpha=-0.1)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.tuples(st.floats(0.01, 5), st.floats(0.01, 5), st.floats(0.01, 5)), min_size=2, max_size=20),
    st.floats(0.01, 100),
    st.integers(0, 2),
)
def test_fused_order_invariant_to_prescaling(triples, factor, which):
    ids = [f"a{i}" for i in range(len(triples))]
    cols = [np.array(c) for c in zip(*triples)]
    names = ("citation", "venue", "author")
    base = [RankingVector(ids, cols[k], names[k]) for k in range(3)]
    bumped = list(base)
    bumped[which] = RankingVector(ids, cols[which] * factor, names[which])
    f1 = fuse(*scale_to_common_mean(base)).scores
    f2 = fuse(*scale_to_common_mean(bumped)).scores
    np.testing.assert_allclose(f1, f2, rtol=1e-12)
    gap = f1[:, None] - f1[None, :]
    clear = np.abs(gap) > 1e-9
    assert np.all(np.sign(gap[clear]) == np.sign((f2[:, None] - f2[None, :])[clear]))


def _missing_data_dataset():
    arts = table(
        art("c1", 2005, "H", authors=["z"]),
        art("c2", 2006, "L", authors=["w"]),
        art("h", 2001, "H", authors=["y"]),
        art("X", 2000, None),
        art("Y", 2000, "H", authors=["y"]),
    )
    refs = [("c1", "X"), ("c1", "Y"), ("c2", "X"), ("c2", "Y"), ("c2", "h")]
    return Dataset(arts, refs)


def test_missing_data_article_never_outranks_enriched_twin():
    ds = _missing_data_dataset()
    res = rank_articles(ds, "ewpr")
    venue = res.ensembles["venue"].as_dict()
    assert venue["Y"] > min(venue.values())
    final = res.final.as_dict()
    assert res.ensembles["citation"].as_dict()["X"] == res.ensembles["citation"].as_dict()["Y"]
    assert final["Y"] > final["X"]


def test_rank_articles_methods():
    ds = _missing_data_dataset()
    assert rank_articles(ds, "pr").final.provenance == "pagerank"
    assert set(rank_articles(ds, "wpr").ensembles) == {"citation"}
    assert set(rank_articles(ds, "ewpr").ensembles) == {"citation", "venue", "author"}
    assert set(rank_articles(ds, "ewpr-all").ensembles) == {"citation", "venue", "author", "affiliation"}
    with pytest.raises(ConfigError):
        rank_articles(ds, "mutualrank")


def test_pr_and_wpr_coincide_without_decay():
    ds = _missing_data_dataset()
    params = RankingParams(decay=0.0)
    pr = rank_articles(ds, "pr", params).final.scores
    wpr = rank_articles(ds, "wpr", params).final.scores
    np.testing.assert_allclose(pr, wpr, rtol=0, atol=1e-15)
