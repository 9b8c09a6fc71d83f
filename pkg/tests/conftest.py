import random

import pytest

from hypertree.trees import BinaryTree

# The 20-node worked example: node label = inorder number, edges from the
# published drawing; subtree-size annotations (root 18/20 etc.) pin the
# structure. Its subtree-size entropy is ~28.74 bits.
FIGURE_EDGES = [
    (19, 20), (19, 10), (10, 16), (10, 9), (9, 5), (5, 7), (5, 4), (4, 2),
    (2, 3), (2, 1), (7, 8), (7, 6), (16, 18), (16, 14), (14, 15), (14, 13),
    (13, 12), (12, 11), (18, 17),
]

# BP under the recursive "(" L ")" R encoding (derived from the edges above)
FIGURE_BP = "((((((())()))(())()))((((())))())(()))()"
# the wrap-style string printed alongside the figure: "(" L R ")"
FIGURE_BP_WRAPPED = "((((((()()))(()())))((((()))())(())))())"


def figure_tree() -> BinaryTree:
    left = {i: 0 for i in range(1, 21)}
    right = {i: 0 for i in range(1, 21)}
    for p, c in FIGURE_EDGES:
        if c < p:
            left[p] = c
        else:
            right[p] = c
    return BinaryTree.from_links(19, left, right)


def random_bst(rng: random.Random, n: int) -> BinaryTree:
    left = {}
    right = {}
    stack = [(1, n, None, None)]
    root = None
    while stack:
        lo, hi, par, side = stack.pop()
        if lo > hi:
            continue
        r = rng.randint(lo, hi)
        left[r] = 0
        right[r] = 0
        if par is None:
            root = r
        elif side == 0:
            left[par] = r
        else:
            right[par] = r
        stack.append((lo, r - 1, r, 0))
        stack.append((r + 1, hi, r, 1))
    return BinaryTree.from_links(root, left, right)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
