"""Finite trees of increasing sequences: derivatives, ranks, monotone maps.

A tree is a frozenset of nonempty tuples closed under nonempty initial
segments. The empty sequence is left out, so a single node has rank 1 and
the empty tree rank 0.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .errors import CapExceeded, PreconditionError
from .schreier import UNIVERSE_CAP, FamilySpec, enumerate_family

Node = tuple[int, ...]
Tree = frozenset

#: node-count cap for monotone-map searches
NODE_CAP = 5000


def make_tree(nodes: Iterable[Iterable[int]]) -> Tree:
    tree = frozenset(tuple(n) for n in nodes)
    for node in tree:
        if not node:
            raise PreconditionError("trees exclude the empty sequence")
        if len(node) > 1 and node[:-1] not in tree:
            raise PreconditionError(f"{node} is in the tree but its parent is not")
    return tree


def chain(k: int) -> Tree:
    """The tree (1), (1,2), ..., (1,...,k)."""
    return frozenset(tuple(range(1, i + 1)) for i in range(1, k + 1))


def family_tree(spec: FamilySpec, universe: int, cap: int = UNIVERSE_CAP) -> Tree:
    return frozenset(F for F in enumerate_family(spec, universe, cap) if F)


def derivative(T: Tree) -> Tree:
    """Nodes that have a proper extension in T."""
    return frozenset(node[:-1] for node in T if len(node) > 1)


def rank(T: Tree) -> int:
    """Least k with ``T^{(k)}`` empty; for finite trees this is the height."""
    return max((len(node) for node in T), default=0)


def rank_by_derivatives(T: Tree) -> int:
    k = 0
    while T:
        T = derivative(T)
        k += 1
    return k


def children(T: Tree) -> dict[Node, list[Node]]:
    out: dict[Node, list[Node]] = {node: [] for node in T}
    for node in T:
        if len(node) > 1:
            out[node[:-1]].append(node)
    for kids in out.values():
        kids.sort()
    return out


def _heights(T: Tree, kids: dict[Node, list[Node]]) -> dict[Node, int]:
    height: dict[Node, int] = {}
    for node in sorted(T, key=len, reverse=True):
        height[node] = 1 + max((height[c] for c in kids[node]), default=0)
    return height


def monotone_embeds(S: Tree, T: Tree, cap: int = NODE_CAP) -> Optional[dict[Node, Node]]:
    """A monotone map ``phi: S -> T`` (``s1 < s2`` implies ``phi(s1) < phi(s2)``), or None.

    The search maps each node to a target whose subtree is at least as tall
    as its own subtree; when some S-root has no such target, no monotone
    map exists.
    """
    if len(S) > cap or len(T) > cap:
        raise CapExceeded(f"trees with {len(S)} and {len(T)} nodes exceed cap {cap}")
    s_kids, t_kids = children(S), children(T)
    s_height, t_height = _heights(S, s_kids), _heights(T, t_kids)
    t_desc: dict[Node, list[Node]] = {}

    def descendants(t: Node) -> list[Node]:
        if t not in t_desc:
            out = []
            for c in t_kids[t]:
                out.append(c)
                out.extend(descendants(c))
            t_desc[t] = out
        return t_desc[t]

    phi: dict[Node, Node] = {}

    def place(s: Node, candidates: Iterable[Node]) -> bool:
        for t in sorted(candidates):
            if t_height[t] < s_height[s]:
                continue
            phi[s] = t
            if all(place(c, descendants(t)) for c in s_kids[s]):
                return True
            del phi[s]
        return False

    for root in sorted(node for node in S if len(node) == 1):
        if not place(root, T):
            return None
    return phi


def is_monotone(phi: dict[Node, Node], S: Tree, T: Tree) -> bool:
    if set(phi) != set(S) or not set(phi.values()) <= set(T):
        return False
    for s in S:
        for k in range(1, len(s)):
            a, b = phi[s[:k]], phi[s]
            if not (len(a) < len(b) and b[: len(a)] == a):
                return False
    return True


def tree_to_json(T: Tree) -> list[list[int]]:
    return [list(n) for n in sorted(T, key=lambda n: (len(n), n))]
