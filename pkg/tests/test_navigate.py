import random

import numpy as np
import pytest

from conftest import random_bst
from hypertree.bits import MalformedStream
from hypertree.cover import decompose_binary
from hypertree.hypercodec import hs_encode_binary, hs_encode_ordinal
from hypertree.navigate import NavIndex, build_nav
from hypertree.trees import annotate, left_chain, ordinal_star, single_node
from hypertree import sources as S


def brute_tables(t):
    ann = annotate(t)
    par = [0] * (t.n + 1)
    for v in range(1, t.n + 1):
        if t.left[v]:
            par[t.left[v]] = v
        if t.right[v]:
            par[t.right[v]] = v

    def lca(u, v):
        seen = set()
        while u:
            seen.add(u)
            u = par[u]
        while v and v not in seen:
            v = par[v]
        return v

    return ann, par, lca


def test_single_node_index():
    blob = hs_encode_binary(single_node())
    idx = build_nav(blob)
    assert idx.n == 1 and idx.m == 1
    assert idx.inorder_rank(1) == 1 and idx.inorder_select(1) == 1
    assert idx.lca(1, 1) == 1
    assert idx.parent(1) is None
    assert idx.subtree_size(1) == 1
    assert len(idx.in_starts) == 1


def test_rejects_ordinal_blob():
    blob = hs_encode_ordinal(ordinal_star(5))
    with pytest.raises(MalformedStream):
        build_nav(blob)


def test_inorder_intervals_partition(rng):
    for _ in range(40):
        t = random_bst(rng, rng.randint(1, 300))
        idx = build_nav(hs_encode_binary(t, rng.choice([None, 1, 2, 4])))
        # select over every rank reproduces a permutation: covers [1, n]
        seen = sorted(idx.inorder_select(r) for r in range(1, t.n + 1))
        assert seen == list(range(1, t.n + 1))
        assert idx.in_starts[0] == 1
        # at most 3 inorder runs per micro tree
        from collections import Counter
        per = Counter(idx.in_micro)
        assert all(c <= 3 for c in per.values())


def test_oracle_equivalence(rng):
    for trial in range(160):
        n = rng.randint(1, 512)
        src = rng.choice([S.BstSource(), S.UniformSource(), S.AlmostPathSource(1)])
        t = S.sample(src, n, rng.getrandbits(32))
        B = rng.choice([None, 1, 2, 3, 6])
        cov = decompose_binary(t, B)
        blob = hs_encode_binary(t, cover=cov)
        idx = build_nav(blob) if trial % 2 else NavIndex.from_cover(cov, blob)
        ann, par, lca = brute_tables(t)
        for v in range(1, n + 1):
            assert idx.inorder_rank(v) == ann.inorder_rank[v]
            assert idx.inorder_select(ann.inorder_rank[v]) == v
            assert (idx.parent(v) or 0) == par[v]
            assert idx.subtree_size(v) == ann.subtree_size[v]
        if n <= 64:
            pairs = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1)]
        else:
            pairs = [(rng.randint(1, n), rng.randint(1, n)) for _ in range(600)]
        for u, v in pairs:
            assert idx.lca(u, v) == lca(u, v)


def test_lca_trivial_identities(rng):
    t = random_bst(rng, 100)
    idx = build_nav(hs_encode_binary(t))
    for v in range(1, 101):
        assert idx.lca(v, v) == v
    if t.left[1] and t.right[1]:
        assert idx.lca(t.left[1], t.right[1]) == 1
    assert idx.subtree_size(1) == 100


def test_batch_kernels_match_scalar(rng):
    t = S.sample(S.BstSource(), 4000, 17)
    idx = build_nav(hs_encode_binary(t))
    g = np.random.default_rng(3)
    li = g.integers(1, 4001, 2500)
    ri = g.integers(1, 4001, 2500)
    lo, hi = np.minimum(li, ri), np.maximum(li, ri)
    mi, ul = idx.batch_select_local(lo)
    mj, vl = idx.batch_select_local(hi)
    W, wl = idx.batch_lca_local(mi, ul, mj, vl)
    rr = idx.batch_inorder_rank(W, wl)
    for k in range(0, 2500, 7):
        u = idx.inorder_select(int(lo[k]))
        v = idx.inorder_select(int(hi[k]))
        assert int(rr[k]) == idx.inorder_rank(idx.lca(u, v))


def test_out_of_range():
    idx = build_nav(hs_encode_binary(left_chain(5)))
    with pytest.raises(IndexError):
        idx.inorder_select(6)
    with pytest.raises(IndexError):
        idx.lca(0, 3)
    with pytest.raises(IndexError):
        idx.subtree_size(9)


def test_build_smoke_large():
    t = S.sample(S.BstSource(), 10**6, 5)
    idx = build_nav(hs_encode_binary(t))
    ann = annotate(t)
    rng = random.Random(8)
    for _ in range(300):
        v = rng.randint(1, 10**6)
        assert idx.inorder_rank(v) == ann.inorder_rank[v]
        assert idx.subtree_size(v) == ann.subtree_size[v]
