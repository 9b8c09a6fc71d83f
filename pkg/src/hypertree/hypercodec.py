"""The compressed tree code: canonical Huffman over occurring micro-tree
shapes, a length-restricted escape, and the five-part (binary) / six-part
(ordinal) serialization with portals and parent edge types.

Blob layout (bit stream, MSB-first):

  binary:  gamma(n+1) gamma(m+1) | BP(top tier) | codebook |
           restricted codewords in top-tier DFS order | 2 portal fields/micro
  ordinal: same, with the dummy-rooted top tier, (pos, rank) portal fields,
           and 3 edge-type bits per micro appended.

The codebook stores gamma(|alphabet|+1), then per shape in canonical order
(codeword length ascending, BP string ascending) gamma(size+1), the BP bits,
and gamma(length+1); canonical codewords are reconstructed from lengths.
Portal fields are sized from the largest codebook shape so a blob decodes
without knowing B.
"""

from __future__ import annotations

import heapq
import math

from .bits import BitBuf, BitCursor, MalformedStream, gamma_decode, gamma_encode, gamma_length
from .cover import (
    EDGE_CONT_LEFT, EDGE_CONT_RIGHT, EDGE_EXTERNAL, EDGE_NEW_LEFT, EDGE_NEW_RIGHT,
    BinaryCover, OrdinalCover, decompose_binary, decompose_ordinal,
)
from .trees import (
    BinaryTree, OrdinalTree, annotate,
    bp_decode_binary, bp_decode_ordinal, bp_encode_binary, bp_encode_ordinal,
)

MAGIC = b"HST1"
KIND_BINARY = 0x00
KIND_ORDINAL = 0x01


class ShapeCode:
    """Canonical Huffman code over micro-tree shapes (keyed by BP string)."""

    def __init__(self, freq: dict[str, int]):
        if not freq:
            raise ValueError("need at least one shape")
        self.freq = dict(freq)
        lengths = _huffman_lengths(self.freq)
        # canonical order: (codeword length asc, BP string lex asc)
        self.order = sorted(lengths, key=lambda s: (lengths[s], s))
        self.code_len = lengths
        self.codewords: dict[str, tuple[int, int]] = {}
        code = 0
        prev = 0
        for s in self.order:
            L = lengths[s]
            code <<= L - prev
            self.codewords[s] = (code, L)
            code += 1
            prev = L
        # canonical decode tables per length
        self._first: dict[int, int] = {}
        self._syms: dict[int, list[str]] = {}
        for s in self.order:
            L = lengths[s]
            if L not in self._first:
                self._first[L] = self.codewords[s][0]
                self._syms[L] = []
            self._syms[L].append(s)
        self.max_len = max(lengths.values())

    def kraft_sum(self) -> float:
        return sum(2.0 ** -l for l in self.code_len.values())

    def total_bits(self, freq: dict[str, int] | None = None) -> int:
        f = self.freq if freq is None else freq
        return sum(self.code_len[s] * c for s, c in f.items())

    def decode_symbol(self, cur: BitCursor) -> str:
        v = 0
        for L in range(1, self.max_len + 1):
            v = (v << 1) | cur.read_bit()
            first = self._first.get(L)
            if first is not None:
                idx = v - first
                syms = self._syms[L]
                if 0 <= idx < len(syms):
                    return syms[idx]
        raise MalformedStream("unknown Huffman codeword")

    @classmethod
    def from_lengths(cls, shapes_and_lengths: list[tuple[str, int]]) -> "ShapeCode":
        obj = cls.__new__(cls)
        obj.freq = {s: 1 for s, _ in shapes_and_lengths}
        obj.code_len = dict(shapes_and_lengths)
        obj.order = [s for s, _ in shapes_and_lengths]
        if sorted(obj.order, key=lambda s: (obj.code_len[s], s)) != obj.order:
            raise MalformedStream("codebook not in canonical order")
        obj.codewords = {}
        code = 0
        prev = 0
        for s in obj.order:
            L = obj.code_len[s]
            code <<= L - prev
            if code >= (1 << L):
                raise MalformedStream("codebook lengths violate Kraft")
            obj.codewords[s] = (code, L)
            code += 1
            prev = L
        obj._first = {}
        obj._syms = {}
        for s in obj.order:
            L = obj.code_len[s]
            if L not in obj._first:
                obj._first[L] = obj.codewords[s][0]
                obj._syms[L] = []
            obj._syms[L].append(s)
        obj.max_len = max(obj.code_len.values())
        return obj


def _huffman_lengths(freq: dict[str, int]) -> dict[str, int]:
    if len(freq) == 1:
        return {next(iter(freq)): 1}
    heap = []
    for tie, (s, f) in enumerate(sorted(freq.items())):
        heap.append((f, tie, s))
    heapq.heapify(heap)
    tie = len(freq)
    parent: dict[str | int, tuple] = {}
    nodes = 0
    while len(heap) > 1:
        fa, _, a = heapq.heappop(heap)
        fb, _, b = heapq.heappop(heap)
        nodes += 1
        parent[a] = nodes
        parent[b] = nodes
        heapq.heappush(heap, (fa + fb, tie, nodes))
        tie += 1
    lengths = {}
    for s in freq:
        d = 0
        x: str | int = s
        while x in parent:
            x = parent[x]
            d += 1
        lengths[s] = d
    return lengths


def build_shape_code(shapes: list[str] | dict[str, int]) -> ShapeCode:
    """Build the canonical Huffman code for a sequence of shapes (BP strings)."""
    if isinstance(shapes, dict):
        return ShapeCode(shapes)
    freq: dict[str, int] = {}
    for s in shapes:
        freq[s] = freq.get(s, 0) + 1
    return ShapeCode(freq)


def _escape_threshold(size: int) -> int:
    return 2 * size + 2 * ((size + 1).bit_length() - 1)


def restrict(code: ShapeCode, bp: str, out: BitBuf | None = None) -> BitBuf:
    """Length-restricted codeword: 1*C(shape) or the escape 0*gamma(|s|+1)*BP."""
    buf = out if out is not None else BitBuf()
    size = len(bp) // 2
    cw = code.codewords.get(bp)
    if cw is not None and cw[1] <= _escape_threshold(size):
        buf.append_bit(1)
        buf.append_bits(cw[0], cw[1])
    else:
        buf.append_bit(0)
        gamma_encode(size + 1, buf)
        for ch in bp:
            buf.append_bit(1 if ch == "(" else 0)
    return buf


def restricted_length(code: ShapeCode, bp: str) -> int:
    size = len(bp) // 2
    cw = code.codewords.get(bp)
    esc = 1 + gamma_length(size + 1) + 2 * size
    if cw is not None and cw[1] <= _escape_threshold(size):
        return 1 + cw[1]
    return esc


def _read_restricted(code: ShapeCode, cur: BitCursor) -> str:
    if cur.read_bit():
        return code.decode_symbol(cur)
    size = gamma_decode(cur) - 1
    bits = []
    for _ in range(2 * size):
        bits.append("(" if cur.read_bit() else ")")
    return "".join(bits)


class HsBlob:
    """A serialized tree: kind tag plus the self-delimiting bit stream."""

    __slots__ = ("kind", "bits", "parts")

    def __init__(self, kind: str, bits: BitBuf, parts: dict[str, int] | None = None):
        self.kind = kind
        self.bits = bits
        self.parts = parts or {}

    def __len__(self) -> int:
        return len(self.bits)

    def to_bytes(self) -> bytes:
        kind = KIND_BINARY if self.kind == "binary" else KIND_ORDINAL
        return MAGIC + bytes([kind]) + self.bits.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "HsBlob":
        if len(data) < 5 or data[:4] != MAGIC:
            raise MalformedStream("not a HST1 blob")
        if data[4] == KIND_BINARY:
            kind = "binary"
        elif data[4] == KIND_ORDINAL:
            kind = "ordinal"
        else:
            raise MalformedStream(f"unknown kind byte {data[4]:#x}")
        payload = data[5:]
        return cls(kind, BitBuf.from_bytes(payload, 8 * len(payload)))


# ---------------------------------------------------------------------------
# shared pieces

def _emit_codebook(code: ShapeCode, buf: BitBuf) -> None:
    gamma_encode(len(code.order) + 1, buf)
    for s in code.order:
        gamma_encode(len(s) // 2 + 1, buf)
        for ch in s:
            buf.append_bit(1 if ch == "(" else 0)
        gamma_encode(code.code_len[s] + 1, buf)


def _read_codebook(cur: BitCursor) -> ShapeCode:
    k = gamma_decode(cur) - 1
    if k < 1:
        raise MalformedStream("empty codebook")
    entries = []
    for _ in range(k):
        size = gamma_decode(cur) - 1
        bp = "".join("(" if cur.read_bit() else ")" for _ in range(2 * size))
        ln = gamma_decode(cur) - 1
        entries.append((bp, ln))
    return ShapeCode.from_lengths(entries)


def _portal_width(code: ShapeCode) -> int:
    mu_star = max(len(s) // 2 for s in code.order)
    return max(1, math.ceil(math.log2(mu_star + 2)))


# ---------------------------------------------------------------------------
# binary encode / decode

def hs_encode_binary(t: BinaryTree, B: int | None = None,
                     cover: BinaryCover | None = None) -> HsBlob:
    if t.n < 1:
        raise ValueError("cannot encode the empty tree")
    if cover is None:
        cover = decompose_binary(t, B)
    bp_cache: dict[int, str] = {}
    micro_bp = []
    for mt in cover.micro:
        s = bp_cache.get(id(mt.shape))
        if s is None:
            s = bp_cache[id(mt.shape)] = bp_encode_binary(mt.shape).to_paren()
        micro_bp.append(s)
    code = build_shape_code(micro_bp)
    m = len(cover.micro)
    w = _portal_width(code)

    buf = BitBuf()
    parts: dict[str, int] = {}
    gamma_encode(t.n + 1, buf)
    gamma_encode(m + 1, buf)
    parts["header"] = len(buf)
    bp_encode_binary(cover.top_tier, buf)
    parts["topTierBP"] = len(buf) - sum(parts.values())
    _emit_codebook(code, buf)
    parts["codebook"] = len(buf) - sum(parts.values())
    for s in micro_bp:
        restrict(code, s, buf)
    parts["codewords"] = len(buf) - sum(parts.values())
    for mt in cover.micro:
        buf.append_bits(0 if mt.left_portal is None else mt.left_portal + 1, w)
        buf.append_bits(0 if mt.right_portal is None else mt.right_portal + 1, w)
    parts["portals"] = len(buf) - sum(parts.values())
    parts["edgeTypes"] = 0
    parts["huffman"] = code.total_bits()
    parts["total"] = len(buf)
    return HsBlob("binary", buf, parts)


def _null_rank_slots(shape: BinaryTree) -> dict[int, tuple[int, int]]:
    """Map 0-based null rank -> (local node, side)."""
    inr = annotate(shape).inorder_rank
    out: dict[int, tuple[int, int]] = {}
    for v in range(1, shape.n + 1):
        if not shape.left[v]:
            out[inr[v] - 1] = (v, 0)
        if not shape.right[v]:
            out[inr[v]] = (v, 1)
    return out


def parse_binary_blob(blob: HsBlob):
    """Parse the parts of a binary blob without materializing the tree:
    returns (n, top tier, shape BP strings per micro, portal null-rank pairs)."""
    if blob.kind != "binary":
        raise MalformedStream("not a binary blob")
    cur = BitCursor(blob.bits)
    n = gamma_decode(cur) - 1
    m = gamma_decode(cur) - 1
    if n < 1 or m < 1:
        raise MalformedStream("bad header")
    top_bits = BitBuf()
    for _ in range(2 * m):
        top_bits.append_bit(cur.read_bit())
    top = bp_decode_binary(top_bits)
    code = _read_codebook(cur)
    shapes: list[str] = [_read_restricted(code, cur) for _ in range(m)]
    w = _portal_width(code)
    portals = []
    for _ in range(m):
        a = cur.read_bits(w)
        b = cur.read_bits(w)
        portals.append((a - 1 if a else None, b - 1 if b else None))
    return n, top, shapes, portals


def hs_decode_binary(blob: HsBlob) -> BinaryTree:
    n, top, shapes, portals = parse_binary_blob(blob)
    m = top.n

    # per-shape decoded structures and null-rank maps, cached by BP string
    cache: dict[str, tuple[BinaryTree, dict[int, tuple[int, int]]]] = {}
    local: list[BinaryTree] = []
    nulls: list[dict[int, tuple[int, int]]] = []
    for s in shapes:
        if s not in cache:
            sh = bp_decode_binary(BitBuf(s))
            cache[s] = (sh, _null_rank_slots(sh))
        sh, nr = cache[s]
        local.append(sh)
        nulls.append(nr)

    # portal slots per micro: (left child micro, slot), (right child micro, slot)
    att: list[dict[tuple[int, int], int]] = []
    for i in range(m):
        lp, rp = portals[i]
        slots: dict[tuple[int, int], int] = {}
        lc, rc = top.left[i + 1], top.right[i + 1]
        if lp is not None:
            if lc == 0 or lp not in nulls[i]:
                raise MalformedStream("portal without matching child")
            slots[nulls[i][lp]] = lc - 1
        elif lc:
            raise MalformedStream("top-tier child without portal")
        if rp is not None:
            if rc == 0 or rp not in nulls[i]:
                raise MalformedStream("portal without matching child")
            slots[nulls[i][rp]] = rc - 1
        elif rc:
            raise MalformedStream("top-tier child without portal")
        att.append(slots)

    left = [0] * (n + 1)
    right = [0] * (n + 1)
    g = 0
    # task: (micro, local node, parent global id, side)
    stack: list[tuple[int, int, int, int]] = [(0, 1, 0, 0)]
    while stack:
        mi, x, parent, side = stack.pop()
        g += 1
        if g > n:
            raise MalformedStream("decoded tree larger than header size")
        if parent:
            if side == 0:
                left[parent] = g
            else:
                right[parent] = g
        sh = local[mi]
        slots = att[mi]
        rx = sh.right[x]
        if rx:
            stack.append((mi, rx, g, 1))
        else:
            child = slots.get((x, 1))
            if child is not None:
                stack.append((child, 1, g, 1))
        lx = sh.left[x]
        if lx:
            stack.append((mi, lx, g, 0))
        else:
            child = slots.get((x, 0))
            if child is not None:
                stack.append((child, 1, g, 0))
    if g != n:
        raise MalformedStream("decoded tree smaller than header size")
    return BinaryTree(n, left, right)


# ---------------------------------------------------------------------------
# ordinal encode / decode

def hs_encode_ordinal(t: OrdinalTree, B: int | None = None,
                      cover: OrdinalCover | None = None) -> HsBlob:
    if t.n < 1:
        raise ValueError("cannot encode the empty tree")
    if cover is None:
        cover = decompose_ordinal(t, B)
    bp_cache: dict[int, str] = {}
    micro_bp = []
    for mt in cover.micro:
        s = bp_cache.get(id(mt.shape))
        if s is None:
            s = bp_cache[id(mt.shape)] = bp_encode_ordinal(mt.shape).to_paren()
        micro_bp.append(s)
    code = build_shape_code(micro_bp)
    m = len(cover.micro)
    w = _portal_width(code)

    buf = BitBuf()
    parts: dict[str, int] = {}
    gamma_encode(t.n + 1, buf)
    gamma_encode(m + 1, buf)
    parts["header"] = len(buf)
    bp_encode_ordinal(cover.top_tier, buf)
    parts["topTierBP"] = len(buf) - sum(parts.values())
    _emit_codebook(code, buf)
    parts["codebook"] = len(buf) - sum(parts.values())
    for s in micro_bp:
        restrict(code, s, buf)
    parts["codewords"] = len(buf) - sum(parts.values())
    for mt in cover.micro:
        if mt.ext_portal is None:
            buf.append_bits(0, w)
            buf.append_bits(0, w)
        else:
            buf.append_bits(mt.ext_portal[0], w)
            buf.append_bits(mt.ext_portal[1], w)
    parts["portals"] = len(buf) - sum(parts.values())
    for mt in cover.micro:
        buf.append_bits(mt.parent_edge_type, 3)
    parts["edgeTypes"] = len(buf) - sum(parts.values())
    parts["huffman"] = code.total_bits()
    parts["total"] = len(buf)
    return HsBlob("ordinal", buf, parts)


def hs_decode_ordinal(blob: HsBlob) -> OrdinalTree:
    if blob.kind != "ordinal":
        raise MalformedStream("not an ordinal blob")
    cur = BitCursor(blob.bits)
    n = gamma_decode(cur) - 1
    m = gamma_decode(cur) - 1
    if n < 1 or m < 1:
        raise MalformedStream("bad header")
    top_bits = BitBuf()
    for _ in range(2 * (m + 1)):
        top_bits.append_bit(cur.read_bit())
    top = bp_decode_ordinal(top_bits)
    if top.n != m + 1:
        raise MalformedStream("top tier size mismatch")
    code = _read_codebook(cur)
    shapes = [_read_restricted(code, cur) for _ in range(m)]
    w = _portal_width(code)
    portals = []
    for _ in range(m):
        pos = cur.read_bits(w)
        rank = cur.read_bits(w)
        portals.append((pos, rank))
    types = [cur.read_bits(3) for _ in range(m)]
    if any(ty > EDGE_EXTERNAL for ty in types):
        raise MalformedStream("bad edge type")

    cache: dict[str, OrdinalTree] = {}
    local: list[OrdinalTree] = []
    for s in shapes:
        if s not in cache:
            cache[s] = bp_decode_ordinal(BitBuf(s))
        local.append(cache[s])

    # expand micro trees bottom-up (reverse top-tier preorder); nodes are
    # nested python lists (the children lists), merged in place
    expanded: list[list | None] = [None] * m
    for i in range(m - 1, -1, -1):
        sh = local[i]
        objs: list[list] = [None] * (sh.n + 1)  # type: ignore[list-item]
        for v in range(sh.n, 0, -1):
            objs[v] = [objs[c] for c in sh.children[v]]
        kids_micro = [c - 2 for c in top.children[i + 2]]
        left_roots, right_roots, ext_root = _merge_groups(
            kids_micro, types, expanded)
        if ext_root is not None:
            pos, rank = portals[i]
            if not (1 <= pos <= sh.n) or not (1 <= rank <= len(objs[pos]) + 1):
                raise MalformedStream("bad external portal")
            objs[pos].insert(rank - 1, ext_root)
        elif portals[i][0] != 0:
            raise MalformedStream("portal without external children")
        root_obj = objs[1]
        if left_roots or right_roots:
            merged = left_roots + root_obj + right_roots
            root_obj[:] = merged
        expanded[i] = root_obj

    root_micros = [c - 2 for c in top.children[1]]
    if not root_micros:
        raise MalformedStream("empty top tier")
    if types[root_micros[0]] != EDGE_NEW_LEFT or any(
            types[j] != EDGE_CONT_LEFT for j in root_micros[1:]):
        raise MalformedStream("bad root edge types")
    root = expanded[root_micros[0]]
    for j in root_micros[1:]:
        root.extend(expanded[j])

    # number the object tree in preorder
    children: list[list[int]] = [[]]
    stack = [root]
    order: list[list] = []
    ids: dict[int, int] = {}
    cnt = 0
    while stack:
        obj = stack.pop()
        cnt += 1
        ids[id(obj)] = cnt
        children.append([])
        order.append(obj)
        stack.extend(reversed(obj))
    if cnt != n:
        raise MalformedStream("decoded tree size mismatch")
    for obj in order:
        children[ids[id(obj)]] = [ids[id(c)] for c in obj]
    return OrdinalTree(n, children)


def _merge_groups(kids_micro, types, expanded):
    left_roots: list[list] = []
    right_roots: list[list] = []
    ext_root: list | None = None
    for j in kids_micro:
        ty = types[j]
        ex = expanded[j]
        if ty == EDGE_NEW_LEFT:
            left_roots.append(ex)
        elif ty == EDGE_CONT_LEFT:
            if not left_roots:
                raise MalformedStream("continued child without a head")
            left_roots[-1].extend(ex)
        elif ty == EDGE_NEW_RIGHT:
            right_roots.append(ex)
        elif ty == EDGE_CONT_RIGHT:
            if not right_roots:
                raise MalformedStream("continued child without a head")
            right_roots[-1].extend(ex)
        else:  # external
            if ext_root is None:
                ext_root = ex
            else:
                ext_root.extend(ex)
    return left_roots, right_roots, ext_root


# ---------------------------------------------------------------------------

def space_report(t: BinaryTree | OrdinalTree, B: int | None = None) -> dict[str, int]:
    """Per-part bit counts of the encoding of ``t`` plus the unrestricted
    Huffman total (key ``huffman``)."""
    if isinstance(t, BinaryTree):
        blob = hs_encode_binary(t, B)
    else:
        blob = hs_encode_ordinal(t, B)
    return dict(blob.parts)


def write_hst(path: str, blob: HsBlob) -> None:
    with open(path, "wb") as fh:
        fh.write(blob.to_bytes())


def read_hst(path: str) -> HsBlob:
    with open(path, "rb") as fh:
        return HsBlob.from_bytes(fh.read())
