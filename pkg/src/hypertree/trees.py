"""Tree representations (pointerless, preorder-numbered), balanced-parenthesis
codecs for binary and ordinal trees, the first-child-next-sibling bijection,
and per-node annotations.

Nodes are identified by their preorder index (1-based); 0 is the null
sentinel. All traversals are iterative so degenerate trees of any size work.
"""

from __future__ import annotations

from .bits import BitBuf, BitCursor, MalformedStream


class BinaryTree:
    """Binary tree with per-node left/right child ids; node = preorder index."""

    __slots__ = ("n", "left", "right", "root")

    def __init__(self, n: int, left: list[int], right: list[int]):
        self.n = n
        self.left = left      # left[0] unused
        self.right = right
        self.root = 1 if n else 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BinaryTree)
            and self.n == other.n
            and self.left == other.left
            and self.right == other.right
        )

    def __hash__(self):
        return hash((self.n, tuple(self.left), tuple(self.right)))

    def __repr__(self):
        return f"BinaryTree(n={self.n}, bp={bp_encode_binary(self).to_paren()!r})" if self.n <= 24 else f"BinaryTree(n={self.n})"

    @staticmethod
    def from_links(root: int, left: dict | list, right: dict | list) -> "BinaryTree":
        """Renumber an arbitrary-id link structure into preorder form."""
        if not root:
            return BinaryTree(0, [0], [0])
        order = []
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            r = right[v]
            l = left[v]
            if r:
                stack.append(r)
            if l:
                stack.append(l)
        idx = {v: i + 1 for i, v in enumerate(order)}
        n = len(order)
        nl = [0] * (n + 1)
        nr = [0] * (n + 1)
        for v in order:
            i = idx[v]
            if left[v]:
                nl[i] = idx[left[v]]
            if right[v]:
                nr[i] = idx[right[v]]
        return BinaryTree(n, nl, nr)


class OrdinalTree:
    """Ordinal (rooted, ordered) tree; node = preorder index."""

    __slots__ = ("n", "children", "root")

    def __init__(self, n: int, children: list[list[int]]):
        self.n = n
        self.children = children  # children[0] unused
        self.root = 1 if n else 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, OrdinalTree)
            and self.n == other.n
            and self.children == other.children
        )

    def __repr__(self):
        return f"OrdinalTree(n={self.n})"

    @staticmethod
    def from_links(root: int, children: dict | list) -> "OrdinalTree":
        if not root:
            return OrdinalTree(0, [[]])
        order = []
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(children[v]))
        idx = {v: i + 1 for i, v in enumerate(order)}
        n = len(order)
        ch: list[list[int]] = [[] for _ in range(n + 1)]
        for v in order:
            ch[idx[v]] = [idx[c] for c in children[v]]
        return OrdinalTree(n, ch)


Forest = list  # list[OrdinalTree]


# ---------------------------------------------------------------------------
# balanced-parenthesis codecs ('(' = 1, ')' = 0)

def bp_encode_binary(t: BinaryTree, out: BitBuf | None = None) -> BitBuf:
    """BP(t) = "(" BP(left) ")" BP(right); 2n bits."""
    buf = out if out is not None else BitBuf()
    left, right = t.left, t.right
    # work item: node to open, or 0 marker meaning "emit close"
    stack = [t.root] if t.n else []
    while stack:
        v = stack.pop()
        if v == 0:
            buf.append_bit(0)
            continue
        buf.append_bit(1)
        if right[v]:
            stack.append(right[v])
        stack.append(0)
        if left[v]:
            stack.append(left[v])
    return buf


def bp_decode_binary(buf: BitBuf) -> BinaryTree:
    """Inverse of bp_encode_binary; rejects non-prefix-valid strings.

    Recursive-descent over T -> eps | "(" T ")" T with an explicit
    continuation stack.
    """
    nbits = len(buf)
    if nbits % 2:
        raise MalformedStream("BP string has odd length")
    n = nbits // 2
    left = [0] * (n + 1)
    right = [0] * (n + 1)
    pos = 0
    cnt = 0
    # ops: (0, parent, side) = parse a subtree; (1, 0, 0) = expect ')'
    ops: list[tuple[int, int, int]] = [(0, 0, 0)]
    while ops:
        kind, parent, side = ops.pop()
        if kind == 1:
            if pos >= nbits or buf.get(pos) != 0:
                raise MalformedStream("BP string not balanced")
            pos += 1
            continue
        if pos < nbits and buf.get(pos) == 1:
            pos += 1
            cnt += 1
            v = cnt
            if parent:
                if side == 0:
                    left[parent] = v
                else:
                    right[parent] = v
            ops.append((0, v, 1))
            ops.append((1, 0, 0))
            ops.append((0, v, 0))
        # else: empty subtree, consume nothing
    if pos != nbits or cnt != n:
        raise MalformedStream("BP string not balanced")
    return BinaryTree(n, left, right)


def bp_encode_ordinal(forest: Forest | OrdinalTree, out: BitBuf | None = None) -> BitBuf:
    """BP_o(t) = "(" BP_o(t_1) ... BP_o(t_k) ")"; concatenated over a forest."""
    buf = out if out is not None else BitBuf()
    trees = [forest] if isinstance(forest, OrdinalTree) else forest
    for t in trees:
        if not t.n:
            continue
        ch = t.children
        stack = [t.root]
        while stack:
            v = stack.pop()
            if v == 0:
                buf.append_bit(0)
                continue
            buf.append_bit(1)
            stack.append(0)
            stack.extend(reversed(ch[v]))
    return buf


def bp_decode_ordinal(buf: BitBuf, forest: bool = False):
    """Inverse of bp_encode_ordinal. With forest=False expects one tree."""
    nbits = len(buf)
    if nbits % 2:
        raise MalformedStream("BP string has odd length")
    trees: list[OrdinalTree] = []
    children: list[list[int]] = [[]]
    stack: list[int] = []
    cnt = 0
    start = 1
    for i in range(nbits):
        if buf.get(i):
            cnt += 1
            children.append([])
            if stack:
                children[stack[-1]].append(cnt)
            stack.append(cnt)
        else:
            if not stack:
                raise MalformedStream("BP string not prefix-valid")
            stack.pop()
            if not stack:
                # a root-level tree closed; split it off
                ntree = cnt - start + 1
                ch = [[]] + [
                    [c - start + 1 for c in children[v]]
                    for v in range(start, cnt + 1)
                ]
                trees.append(OrdinalTree(ntree, ch))
                start = cnt + 1
    if stack:
        raise MalformedStream("BP string not balanced")
    if forest:
        return trees
    if len(trees) != 1:
        raise MalformedStream(f"expected a single tree, got {len(trees)}")
    return trees[0]


# ---------------------------------------------------------------------------
# first-child-next-sibling bijection

def fcns(forest: Forest | OrdinalTree) -> BinaryTree:
    """Map an ordinal forest to a binary tree: first child -> left,
    next sibling -> right. Preserves DFS order of nodes, so
    BP_o(f) == BP(fcns(f)) bit for bit."""
    trees = [forest] if isinstance(forest, OrdinalTree) else forest
    n = sum(t.n for t in trees)
    if n == 0:
        return BinaryTree(0, [0], [0])
    left = [0] * (n + 1)
    right = [0] * (n + 1)
    base = 0
    prev_root = 0
    for t in trees:
        if not t.n:
            continue
        ch = t.children
        for v in range(1, t.n + 1):
            kids = ch[v]
            if kids:
                left[base + v] = base + kids[0]
            for a, b in zip(kids, kids[1:]):
                right[base + a] = base + b
        if prev_root:
            right[prev_root] = base + 1
        prev_root = base + 1
        base += t.n
    return BinaryTree(n, left, right)


def fcns_inverse(t: BinaryTree) -> Forest:
    """Inverse of fcns; returns the ordinal forest."""
    if not t.n:
        return []
    children: list[list[int]] = [[] for _ in range(t.n + 1)]
    roots = []
    v = t.root
    while v:
        roots.append(v)
        v = t.right[v]
    # walk: each node's ordinal children = left child then its right-chain
    stack = list(reversed(roots))
    while stack:
        v = stack.pop()
        c = t.left[v]
        while c:
            children[v].append(c)
            stack.append(c)
            c = t.right[c]
    # split into per-tree structures: roots begin new trees
    out: Forest = []
    for r in roots:
        # collect nodes of this ordinal tree in DFS order
        order = []
        st = [r]
        while st:
            v = st.pop()
            order.append(v)
            st.extend(reversed(children[v]))
        idx = {v: i + 1 for i, v in enumerate(order)}
        ch = [[]] + [[idx[c] for c in children[v]] for v in order]
        out.append(OrdinalTree(len(order), ch))
    return out


def fcns_full(t: OrdinalTree) -> BinaryTree:
    """Modified FCNS: materialize every null of fcns(t) as a leaf, yielding
    a full binary tree with 2n+1 nodes."""
    b = fcns([t])
    n2 = 2 * b.n + 1
    left = [0] * (n2 + 1)
    right = [0] * (n2 + 1)
    if b.n == 0:
        return BinaryTree(1, [0, 0], [0, 0])
    # rebuild in preorder with explicit leaves
    nxt = 0
    out_left: list[int] = [0]
    out_right: list[int] = [0]
    # frames: (original node or 0 for a materialized leaf, parent slot ref)
    # simpler: recursive shape expansion via stack producing preorder ids
    stack: list[tuple[int, int, int]] = [(b.root, 0, 0)]  # (orig, parent, side 0=left 1=right)
    while stack:
        orig, par, side = stack.pop()
        nxt += 1
        out_left.append(0)
        out_right.append(0)
        if par:
            if side == 0:
                out_left[par] = nxt
            else:
                out_right[par] = nxt
        if orig:
            me = nxt
            # push right first so left is expanded next (preorder)
            stack.append((b.right[orig], me, 1))
            stack.append((b.left[orig], me, 0))
    return BinaryTree(nxt, out_left, out_right)


# ---------------------------------------------------------------------------
# annotations

class TreeAnnotation:
    """Per-node annotations; binary trees also get type and inorder rank."""

    __slots__ = ("subtree_size", "height", "depth", "node_type", "degree",
                 "inorder_rank")

    def __init__(self):
        self.subtree_size: list[int] = []
        self.height: list[int] = []
        self.depth: list[int] = []
        self.node_type: list[int] | None = None
        self.degree: list[int] | None = None
        self.inorder_rank: list[int] | None = None


LEAF, LEFT_UNARY, BINARY, RIGHT_UNARY = 0, 1, 2, 3


def node_type(t: BinaryTree, v: int) -> int:
    l, r = t.left[v], t.right[v]
    if l and r:
        return BINARY
    if l:
        return LEFT_UNARY
    if r:
        return RIGHT_UNARY
    return LEAF


def annotate(t: BinaryTree | OrdinalTree) -> TreeAnnotation:
    a = TreeAnnotation()
    n = t.n
    size = [0] * (n + 1)
    height = [0] * (n + 1)
    depth = [0] * (n + 1)
    a.subtree_size, a.height, a.depth = size, height, depth
    if n == 0:
        return a
    if isinstance(t, BinaryTree):
        left, right = t.left, t.right
        a.node_type = [0] * (n + 1)
        a.inorder_rank = [0] * (n + 1)
        # preorder ids are 1..n: reverse preorder is a valid bottom-up order
        for v in range(n, 0, -1):
            l, r = left[v], right[v]
            size[v] = 1 + size[l] + size[r]
            height[v] = 1 + max(height[l], height[r])
            a.node_type[v] = (2 if r else 1) if l else (3 if r else 0)
        for v in range(1, n + 1):
            if left[v]:
                depth[left[v]] = depth[v] + 1
            if right[v]:
                depth[right[v]] = depth[v] + 1
        # inorder numbering, iterative
        rank = 0
        stack = []
        v = t.root
        while stack or v:
            while v:
                stack.append(v)
                v = left[v]
            v = stack.pop()
            rank += 1
            a.inorder_rank[v] = rank
            v = right[v]
    else:
        ch = t.children
        a.degree = [0] * (n + 1)
        for v in range(n, 0, -1):
            kids = ch[v]
            a.degree[v] = len(kids)
            s = 1
            h = 0
            for c in kids:
                s += size[c]
                if height[c] > h:
                    h = height[c]
            size[v] = s
            height[v] = h + 1
        for v in range(1, n + 1):
            for c in ch[v]:
                depth[c] = depth[v] + 1
    return a


# ---------------------------------------------------------------------------
# small builders used all over the tests and CLI

def single_node() -> BinaryTree:
    return BinaryTree(1, [0, 0], [0, 0])


def left_chain(n: int) -> BinaryTree:
    left = [0] + [i + 1 for i in range(1, n)] + [0]
    return BinaryTree(n, left[: n + 1], [0] * (n + 1))


def right_chain(n: int) -> BinaryTree:
    right = [0] + [i + 1 for i in range(1, n)] + [0]
    return BinaryTree(n, [0] * (n + 1), right[: n + 1])


def ordinal_star(n: int) -> OrdinalTree:
    ch = [[]] + [list(range(2, n + 1))] + [[] for _ in range(n - 1)]
    return OrdinalTree(n, ch)


def ordinal_path(n: int) -> OrdinalTree:
    ch = [[]] + [[i + 1] for i in range(1, n)] + [[]]
    return OrdinalTree(n, ch[: n + 1])


def parse_bp(text: str):
    """Parse a BP line; returns a BitBuf. Accepts '()' or '01' characters."""
    text = text.strip()
    if not all(c in "()01" for c in text):
        raise MalformedStream("BP text may only contain parentheses")
    return BitBuf(text)
