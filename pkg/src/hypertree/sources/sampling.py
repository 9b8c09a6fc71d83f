"""Exact samplers for every source family.

Each sampler takes an explicit ``random.Random`` (or a seed); nothing global.
Trees come back preorder-numbered. Sampling is exact for the families with
rational probabilities; the binomial family draws through numpy's binomial
sampler in floating point.
"""

from __future__ import annotations

import hashlib
import random
from bisect import bisect_right

from ..bits import BitBuf
from ..trees import BinaryTree, OrdinalTree, bp_decode_binary
from . import counting
from .models import (
    AlmostPathSource, AvlByHeightSource, BinomialSource, BstSource,
    CompositionSource, DegreeDist, FixedHeightSource, FixedSizeSource,
    FringeBalancedSource, LrmSource, SourceModel, TypeProcess, UniformSource,
    UniformSubclass,
)


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary labeled parts (hash-based, so
    parallel replicates never depend on call order)."""
    h = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(h[:8], "big")


def _rng(seed) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


class EmptyClassError(ValueError):
    """The requested (family, target) combination contains no tree."""


def sample(source: SourceModel, target: int, seed=0):
    """Draw one tree. ``target`` is the size for fixed-size families and
    subclasses, the height for fixed-height families, and the size cap for
    branching processes (type processes / degree distributions)."""
    rng = _rng(seed)
    if isinstance(source, UniformSource):
        return _sample_uniform(target, rng)
    if isinstance(source, FixedSizeSource):
        return _sample_fixed_size(source, target, rng)
    if isinstance(source, TypeProcess):
        return _sample_type_process(source, target, rng)
    if isinstance(source, AvlByHeightSource):
        return _sample_avl_height(target, rng)
    if isinstance(source, DegreeDist):
        return _sample_degree(source, target, rng)
    if isinstance(source, CompositionSource):
        return _sample_composition(target, rng)
    if isinstance(source, LrmSource):
        return _sample_lrm(target, rng)
    if isinstance(source, UniformSubclass):
        return _sample_subclass(source, target, rng)
    raise TypeError(f"no sampler for {source.name}")


# ---------------------------------------------------------------------------
# binary fixed-size families

def _sample_fixed_size(source: FixedSizeSource, n: int, rng) -> BinaryTree:
    if n < 1:
        raise EmptyClassError("size must be >= 1")
    left = [0] * (n + 1)
    right = [0] * (n + 1)
    if isinstance(source, BstSource):
        draw = lambda s: rng.randrange(s)
    elif isinstance(source, FringeBalancedSource):
        t = source.t

        def draw(s):
            if s < 2 * t + 1:
                return rng.randrange(s)
            return sorted(rng.sample(range(s), 2 * t + 1))[t]
    elif isinstance(source, AlmostPathSource):
        K = source.K

        def draw(s):
            if s <= 2 * K + 2:
                return rng.randrange(s)
            i = rng.randrange(2 * K + 2)
            return i if i <= K else s - 1 - (2 * K + 1 - i)
    elif isinstance(source, BinomialSource):
        import numpy as np

        gen = np.random.Generator(np.random.PCG64(rng.getrandbits(64)))
        p = float(source.alpha)
        draw = lambda s: int(gen.binomial(s - 1, p))
    else:
        cums: dict[int, tuple[list[int], int]] = {}

        def draw(s):
            got = cums.get(s)
            if got is None:
                w, total = source.split_weights(s)
                acc = []
                run = 0
                for x in w:
                    run += x
                    acc.append(run)
                if run != total:
                    raise EmptyClassError(f"{source.name}: row {s} not normalized")
                got = cums[s] = (acc, total)
            acc, total = got
            return bisect_right(acc, rng.randrange(total))

    cnt = 0
    stack = [(n, 0, 0)]
    while stack:
        s, parent, side = stack.pop()
        cnt += 1
        v = cnt
        if parent:
            if side == 0:
                left[parent] = v
            else:
                right[parent] = v
        l = draw(s)
        r = s - 1 - l
        if r:
            stack.append((r, v, 1))
        if l:
            stack.append((l, v, 0))
    return BinaryTree(n, left, right)


def _sample_uniform(n: int, rng) -> BinaryTree:
    """Uniform binary tree via a uniform Dyck word (cycle lemma): shuffle
    n opens and n+1 closes, rotate to just after the first prefix-sum
    minimum, drop the final close."""
    if n < 1:
        raise EmptyClassError("size must be >= 1")
    arr = [1] * n + [0] * (n + 1)
    rng.shuffle(arr)
    s = 0
    best = 1
    best_pos = -1
    for i, x in enumerate(arr):
        s += 1 if x else -1
        if s < best:
            best = s
            best_pos = i
    rot = arr[best_pos + 1:] + arr[:best_pos + 1]
    buf = BitBuf()
    for x in rot[:-1]:
        buf.append_bit(x)
    return bp_decode_binary(buf)


# ---------------------------------------------------------------------------
# branching processes

def _weights_from_fractions(rows) -> tuple[list[int], int]:
    den = 1
    for f in rows:
        den = den * f.denominator // __import__("math").gcd(den, f.denominator)
    w = [int(f * den) for f in rows]
    return w, den


def _sample_type_process(tp: TypeProcess, cap: int, rng) -> BinaryTree:
    if cap < 1:
        raise EmptyClassError("size cap must be >= 1")
    k = tp.k
    tables: dict[tuple, tuple[list[int], int]] = {}

    def draw(hist):
        got = tables.get(hist)
        if got is None:
            w, den = _weights_from_fractions(tp.row(hist))
            acc = [w[0], w[0] + w[1], w[0] + w[1] + w[2], den]
            got = tables[hist] = (acc, den)
        acc, den = got
        return bisect_right(acc, rng.randrange(den))

    budget = 100 * cap
    while budget > 0:
        left = [0]
        right = [0]
        cnt = 0
        ok = True
        stack = [(0, (1,) * k)]
        while stack:
            parent_side, hist = stack.pop()
            cnt += 1
            budget -= 1
            if cnt > cap or budget <= 0:
                ok = False
                break
            v = cnt
            left.append(0)
            right.append(0)
            parent, side = parent_side >> 1, parent_side & 1
            if parent:
                if side == 0:
                    left[parent] = v
                else:
                    right[parent] = v
            ty = draw(hist)
            child = (hist + (ty,))[-k:] if k else hist
            if ty in (2, 3):
                stack.append(((v << 1) | 1, child))
            if ty in (1, 2):
                stack.append((v << 1, child))
        if ok:
            return BinaryTree(cnt, left, right)
    raise EmptyClassError(
        f"type process failed to produce a tree within the size cap {cap}")


def _sample_degree(src: DegreeDist, cap: int, rng) -> OrdinalTree:
    if cap < 1:
        raise EmptyClassError("size cap must be >= 1")
    w, den = _weights_from_fractions(src.d)
    acc = []
    run = 0
    for x in w:
        run += x
        acc.append(run)
    budget = 100 * cap
    while budget > 0:
        children: list[list[int]] = [[]]
        cnt = 0
        ok = True
        stack = [0]
        while stack:
            parent = stack.pop()
            cnt += 1
            budget -= 1
            if cnt > cap or budget <= 0:
                ok = False
                break
            children.append([])
            if parent:
                children[parent].append(cnt)
            deg = bisect_right(acc, rng.randrange(den))
            for _ in range(deg):
                stack.append(cnt)
        if ok:
            # children were appended in pop order; reverse to left-to-right
            # (stack pops give right-to-left child creation)
            t = OrdinalTree(cnt, children)
            return _renumber_preorder(t)
    raise EmptyClassError(
        f"degree process failed to produce a tree within the size cap {cap}")


def _renumber_preorder(t: OrdinalTree) -> OrdinalTree:
    return OrdinalTree.from_links(t.root, t.children)


# ---------------------------------------------------------------------------
# fixed-height AVL

def _sample_avl_height(h: int, rng) -> BinaryTree:
    if h < 1:
        raise EmptyClassError("height must be >= 1")
    counting.avl_height_counts(h)
    nodes_left: list[int] = [0]
    nodes_right: list[int] = [0]
    cnt = 0
    stack = [(h, 0, 0)]
    a = counting.avl_height_counts(h)
    while stack:
        hh, parent, side = stack.pop()
        cnt += 1
        v = cnt
        nodes_left.append(0)
        nodes_right.append(0)
        if parent:
            if side == 0:
                nodes_left[parent] = v
            else:
                nodes_right[parent] = v
        if hh == 1:
            continue
        w1 = a[hh - 2] * a[hh - 1]
        w2 = a[hh - 1] * a[hh - 1]
        x = rng.randrange(2 * w1 + w2)
        if x < w1:
            hl, hr = hh - 2, hh - 1
        elif x < w1 + w2:
            hl, hr = hh - 1, hh - 1
        else:
            hl, hr = hh - 1, hh - 2
        if hr:
            stack.append((hr, v, 1))
        if hl:
            stack.append((hl, v, 0))
    return BinaryTree(cnt, nodes_left, nodes_right)


# ---------------------------------------------------------------------------
# ordinal fixed-size families

def _sample_composition(n: int, rng) -> OrdinalTree:
    if n < 1:
        raise EmptyClassError("size must be >= 1")
    children: list[list[int]] = [[] for _ in range(n + 1)]
    cnt = 0
    stack = [(n, 0)]
    while stack:
        s, parent = stack.pop()
        cnt += 1
        v = cnt
        if parent:
            children[parent].append(v)
        q = s - 1
        if q == 0:
            continue
        # uniform composition of q: each of the q-1 gaps holds a barrier
        # independently with probability 1/2
        bars = rng.getrandbits(q - 1) if q > 1 else 0
        parts = []
        run = 1
        for i in range(q - 1):
            if (bars >> i) & 1:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        for p in reversed(parts):
            stack.append((p, v))
    # stack order produced children right-to-left; fix by reversing
    for v in range(1, n + 1):
        children[v].reverse()
    return _renumber_preorder(OrdinalTree(n, children))


def _sample_lrm(n: int, rng) -> OrdinalTree:
    """Uniform attachment: node i picks a uniform parent among 1..i-1 and
    becomes its leftmost child."""
    if n < 1:
        raise EmptyClassError("size must be >= 1")
    children: list[list[int]] = [[] for _ in range(n + 1)]
    for v in range(2, n + 1):
        p = rng.randrange(1, v)
        children[p].insert(0, v)
    return _renumber_preorder(OrdinalTree(n, children))


# ---------------------------------------------------------------------------
# uniform subclasses

def _sample_subclass(src: UniformSubclass, n: int, rng) -> BinaryTree:
    if n < 1:
        raise EmptyClassError("size must be >= 1")
    if src.cls == "avl-size":
        return _sample_avl_size(n, rng)
    if src.cls == "wb":
        return _sample_wb(src.alpha, n, rng)
    return _sample_llrb(n, rng)


def _sample_avl_size(n: int, rng) -> BinaryTree:
    table = counting.avl_size_table(n)
    if not table[n]:
        raise EmptyClassError(f"no AVL tree of size {n}")
    left = [0] * (n + 1)
    right = [0] * (n + 1)
    hs = sorted(table[n])
    x = rng.randrange(sum(table[n].values()))
    for h in hs:
        if x < table[n][h]:
            break
        x -= table[n][h]
    cnt = 0
    stack = [(n, h, 0, 0)]
    while stack:
        k, hh, parent, side = stack.pop()
        cnt += 1
        v = cnt
        if parent:
            if side == 0:
                left[parent] = v
            else:
                right[parent] = v
        if k == 1:
            continue
        # choose (l, hl, hr) proportional to count products
        choices = []
        for l in range(k):
            r = k - 1 - l
            for hl, cl in table[l].items():
                for hr in (hh - 1, hh - 2):
                    if max(hl, hr) != hh - 1 or abs(hl - hr) > 1 or hr < 0:
                        continue
                    cr = table[r].get(hr)
                    if cr:
                        choices.append((cl * cr, l, hl, hr))
        x = rng.randrange(sum(c[0] for c in choices))
        for w, l, hl, hr in choices:
            if x < w:
                break
            x -= w
        r = k - 1 - l
        if r:
            stack.append((r, hr, v, 1))
        if l:
            stack.append((l, hl, v, 0))
    return BinaryTree(n, left, right)


def _sample_wb(alpha, n: int, rng) -> BinaryTree:
    counts = counting.wb_counts(alpha, n)
    if counts[n] == 0:
        raise EmptyClassError(f"no {alpha}-weight-balanced tree of size {n}")
    left = [0] * (n + 1)
    right = [0] * (n + 1)
    cnt = 0
    stack = [(n, 0, 0)]
    while stack:
        k, parent, side = stack.pop()
        cnt += 1
        v = cnt
        if parent:
            if side == 0:
                left[parent] = v
            else:
                right[parent] = v
        if k <= 1:
            continue
        x = rng.randrange(counts[k])
        for l in range(k):
            r = k - 1 - l
            if not counting.wb_split_ok(alpha, l, r):
                continue
            w = counts[l] * counts[r]
            if x < w:
                break
            x -= w
        r = k - 1 - l
        if r:
            stack.append((r, v, 1))
        if l:
            stack.append((l, v, 0))
    return BinaryTree(n, left, right)


def _sample_llrb(n: int, rng) -> BinaryTree:
    """Uniform over colored left-leaning red-black trees; returns the shape."""
    table = counting.llrb_table(n)
    A, _ = table[n]
    if not A:
        raise EmptyClassError(f"no left-leaning red-black tree of size {n}")
    left = [0] * (n + 1)
    right = [0] * (n + 1)
    hs = sorted(A)
    x = rng.randrange(sum(A.values()))
    for h in hs:
        if x < A[h]:
            break
        x -= A[h]
    cnt = 0
    stack = [(n, h, 0, 0, 0)]  # (size, bh, red incoming, parent, side)
    while stack:
        k, hh, red, parent, side = stack.pop()
        cnt += 1
        v = cnt
        if parent:
            if side == 0:
                left[parent] = v
            else:
                right[parent] = v
        if k == 1:
            continue
        choices = []  # (weight, l, hl, redl, hr, redr) ; r = k-1-l
        if hh == 1 and not red:
            _, r1 = table[k - 1]
            if 1 in r1:
                choices.append((r1[1], k - 1, 1, 1, None, None))
        for l in range(1, k - 1):
            r = k - 1 - l
            Al, Rl = table[l]
            Ar, Rr = table[r]
            cl = Al.get(hh - 1)
            cr = Ar.get(hh - 1)
            if cl and cr:
                choices.append((cl * cr, l, hh - 1, 0, hh - 1, 0))
            if not red:
                cl = Rl.get(hh)
                cr = Ar.get(hh - 1)
                if cl and cr:
                    choices.append((cl * cr, l, hh, 1, hh - 1, 0))
                cl = Rl.get(hh)
                cr = Rr.get(hh)
                if cl and cr:
                    choices.append((cl * cr, l, hh, 1, hh, 1))
        x = rng.randrange(sum(c[0] for c in choices))
        for w, l, hl, redl, hr, redr in choices:
            if x < w:
                break
            x -= w
        if hr is None:  # left-unary
            stack.append((k - 1, hl, redl, v, 0))
        else:
            r = k - 1 - l
            stack.append((r, hr, redr, v, 1))
            stack.append((l, hl, redl, v, 0))
    return BinaryTree(n, left, right)
