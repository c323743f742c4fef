"""Rate thresholds from a pruned scan of the polarization tree.

The scan walks the binary transform tree in pre-order.  Above the frontier
set G it carries exact posynomials; entering G seeds a scalar surrogate that
below the frontier evolves as doubling (minus) or squaring (plus).  Leaves
collected in E accumulate the achievable-rate lower threshold, G members
accumulate the converse upper threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

from .channels import LabeledChannel, validate_labeler
from .posynomial import (
    LabelPosynomial,
    label_distribution,
    minus_transform,
    mutual_information,
    plus_transform,
    z_star,
)

PHI = 1.6180339887498949
LOG2_PHI = 0.69424191363061737

DEFAULT_D_G = 12
DEFAULT_D_E = 36
DEFAULT_EPS = 1e-3


def delta_prime(eta: float) -> float:
    """Polarization-failure bound ``2 * (8 * eta) ** log2(phi)``."""
    if eta < 0.0:
        raise ValueError(f"eta must be non-negative, got {eta}")
    return 2.0 * (8.0 * eta) ** LOG2_PHI


def eta_of_delta(dp: float) -> float:
    """Inverse of ``delta_prime``: ``(1/8) * (dp / 2) ** (1 / log2(phi))``."""
    if dp < 0.0:
        raise ValueError(f"delta' must be non-negative, got {dp}")
    return 0.125 * (dp / 2.0) ** (1.0 / LOG2_PHI)


def zeta_step(z: float, branch: str) -> float:
    """Evolve the scalar surrogate: minus doubles, plus squares."""
    if z < 0.0:
        raise ValueError(f"zeta must be non-negative, got {z}")
    if branch == "minus":
        return 2.0 * z
    if branch == "plus":
        return z * z
    raise ValueError(f"branch must be 'minus' or 'plus', got {branch!r}")


class GNode(NamedTuple):
    d: int
    j: int
    mi: float
    zeta_seed: float


class ENode(NamedTuple):
    d: int
    j: int
    zeta: float


@dataclass
class ThresholdTree:
    """Result of a threshold scan: the (G, E) sets and both rates."""

    d_g: int
    d_e: int
    eps: float
    g_nodes: list
    e_nodes: list
    r_l: float
    r_u: float

    @property
    def g_set(self) -> set:
        return {(node.d, node.j) for node in self.g_nodes}

    @property
    def e_set(self) -> set:
        return {(node.d, node.j) for node in self.e_nodes}

    def to_json_dict(self) -> dict:
        return {
            "params": {"d_g": self.d_g, "d_e": self.d_e, "eps": self.eps},
            "g": [[node.d, node.j] for node in self.g_nodes],
            "e": [[node.d, node.j] for node in self.e_nodes],
            "r_l": self.r_l,
            "r_u": self.r_u,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def rl_of(tree: ThresholdTree) -> float:
    """Recompute the lower threshold from the stored E-node surrogates."""
    _require_valid(tree.g_set, tree.e_set)
    return sum(
        max(1.0 - delta_prime(node.zeta), 0.0) / (1 << node.d) for node in tree.e_nodes
    )


def ru_of(tree: ThresholdTree) -> float:
    """Recompute the upper threshold from the stored G-node informations."""
    _require_valid(tree.g_set, tree.e_set)
    return sum(node.mi / (1 << node.d) for node in tree.g_nodes)


def compute_thresholds(
    ch: LabeledChannel,
    d_g: int = DEFAULT_D_G,
    d_e: int = DEFAULT_D_E,
    eps: float = DEFAULT_EPS,
) -> ThresholdTree:
    """Pre-order scan of the polarization tree with numeric pruning.

    A node still above the frontier is terminal (joining both G and E) when
    its mutual information falls below ``eps`` or its optimized bound is
    already small enough that ``1 - delta_prime(bound) > 1 - eps``; otherwise
    it is forced into G at depth ``d_g``.  Below the frontier a node joins E
    when ``1 - delta_prime(zeta) > 1 - eps``, when ``zeta > 1``, or at depth
    ``d_e``.

    Parameters
    ----------
    ch : LabeledChannel
        Channel with a good labeler.
    d_g, d_e : int
        Maximal depths of G and E vertices, ``0 <= d_g <= d_e``.
    eps : float
        Pruning threshold, positive.
    """
    report = validate_labeler(ch)
    if not report.is_good:
        raise ValueError(f"channel labeler is not good: {report.violations}")
    if not (0 <= d_g <= d_e):
        raise ValueError(f"need 0 <= d_g <= d_e, got ({d_g}, {d_e})")
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps}")

    g_nodes = []
    e_nodes = []

    def scan_below(d0: int, j0: int, zeta0: float):
        # iterative pre-order; push right child first so the left pops first
        stack = [(d0, j0, zeta0)]
        while stack:
            d, j, zeta = stack.pop()
            if (1.0 - delta_prime(zeta) > 1.0 - eps) or zeta > 1.0 or d >= d_e:
                e_nodes.append(ENode(d, j, zeta))
            else:
                stack.append((d + 1, 2 * j + 1, zeta * zeta))
                stack.append((d + 1, 2 * j, 2.0 * zeta))

    def scan_above(d: int, j: int, posy: LabelPosynomial):
        mi = mutual_information(posy)
        zs = z_star(posy).value
        if mi < eps or (1.0 - delta_prime(zs) > 1.0 - eps):
            g_nodes.append(GNode(d, j, mi, zs))
            e_nodes.append(ENode(d, j, zs))
            return
        if d >= d_g:
            g_nodes.append(GNode(d, j, mi, zs))
            scan_below(d + 1, 2 * j, 2.0 * zs)
            scan_below(d + 1, 2 * j + 1, zs * zs)
            return
        scan_above(d + 1, 2 * j, minus_transform(posy))
        scan_above(d + 1, 2 * j + 1, plus_transform(posy))

    scan_above(0, 0, label_distribution(ch))

    r_u = sum(node.mi / (1 << node.d) for node in g_nodes)
    r_l = sum(
        max(1.0 - delta_prime(node.zeta), 0.0) / (1 << node.d) for node in e_nodes
    )
    return ThresholdTree(d_g=d_g, d_e=d_e, eps=eps, g_nodes=g_nodes, e_nodes=e_nodes, r_l=r_l, r_u=r_u)


def is_leaf_set(nodes) -> tuple:
    """Whether the (depth, index) set is the exact leaf set of a full binary
    tree, checked by explicit traversal.  Returns (ok, diagnostics)."""
    nodeset = set((int(d), int(j)) for d, j in nodes)
    if not nodeset:
        return False, ["set is empty"]
    for d, j in nodeset:
        if d < 0 or not (0 <= j < (1 << d)):
            return False, [f"({d},{j}) is not a tree vertex"]
    # ancestors of members; a subtree with no registered ancestor holds no member
    ancestors = set()
    for d, j in nodeset:
        while d > 0:
            d, j = d - 1, j >> 1
            ancestors.add((d, j))
    consumed = set()
    diagnostics = []

    def cover(d, j):
        if (d, j) in nodeset:
            consumed.add((d, j))
            return True
        if (d, j) not in ancestors:
            diagnostics.append(f"path through ({d},{j}) reaches no member")
            return False
        return cover(d + 1, 2 * j) and cover(d + 1, 2 * j + 1)

    ok = cover(0, 0)
    if ok and consumed != nodeset:
        stranded = sorted(nodeset - consumed)
        diagnostics.append(f"members below other members: {stranded}")
        ok = False
    kraft = sum(2.0 ** -d for d, _ in nodeset)
    if abs(kraft - 1.0) > 1e-12 and ok:
        diagnostics.append(f"Kraft sum {kraft!r} != 1")
        ok = False
    return ok, diagnostics


def validate_tree(g_set, e_set) -> tuple:
    """Validate a (G, E) pair: each set must be a full-binary-tree leaf set,
    meaning every deep-enough root-to-leaf path meets G exactly once and E
    exactly once.  Returns (ok, diagnostics)."""
    ok_g, diag_g = is_leaf_set(g_set)
    ok_e, diag_e = is_leaf_set(e_set)
    diagnostics = [f"G: {msg}" for msg in diag_g] + [f"E: {msg}" for msg in diag_e]
    return ok_g and ok_e, diagnostics


def _require_valid(g_set, e_set):
    ok, diagnostics = validate_tree(g_set, e_set)
    if not ok:
        raise ValueError(f"invalid (G, E) pair: {diagnostics}")


def pair_rates(ch: LabeledChannel, g_set, e_set) -> tuple:
    """Both thresholds for explicitly given valid (G, E) sets.

    Every E vertex must have a G vertex at or above it on its root path (the
    surrogate recursion is seeded there).  Used for monotonicity experiments
    where sets are edited by hand.
    """
    _require_valid(g_set, e_set)
    g_set = {(int(d), int(j)) for d, j in g_set}
    cache = {(): label_distribution(ch)}

    def posy_at(d, j):
        path = tuple((j >> (d - 1 - k)) & 1 for k in range(d))
        if path in cache:
            return cache[path]
        parent = posy_at(d - 1, j >> 1)
        posy = plus_transform(parent) if path[-1] else minus_transform(parent)
        cache[path] = posy
        return posy

    r_u = 0.0
    seeds = {}
    for d, j in sorted(g_set):
        posy = posy_at(d, j)
        r_u += mutual_information(posy) / (1 << d)
        seeds[(d, j)] = z_star(posy).value

    r_l = 0.0
    for d, j in sorted((int(d), int(j)) for d, j in e_set):
        zeta = None
        for dg in range(d, -1, -1):
            anchor = (dg, j >> (d - dg))
            if anchor in g_set:
                zeta = seeds[anchor]
                for k in range(d - dg - 1, -1, -1):
                    zeta = zeta_step(zeta, "plus" if (j >> k) & 1 else "minus")
                break
        if zeta is None:
            raise ValueError(f"E vertex ({d},{j}) has no G vertex on its root path")
        r_l += max(1.0 - delta_prime(zeta), 0.0) / (1 << d)
    return r_l, r_u
