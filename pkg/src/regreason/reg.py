"""Referential event graphs.

An AMR parse is turned into a REG in four steps: pick the referent token from
the syntactic annotation, pick the referent concept via token alignments,
re-root the graph at that concept, then break co-reference cycles with a DFS
that stores every edge child-to-parent. The resulting graph is a DAG whose
unique sink is the referent, so a layered Kahn traversal yields the bottom-up
reasoning schedule directly.

Edge roles are always stored as read in the child-to-parent direction: an
edge written parent-to-child contributes its inverse role. This keeps every
REG edge semantically identical to the AMR edge it came from.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, replace

from .amr import (
    AmrEdge,
    AmrGraph,
    SyntaxAnnotation,
    Token,
    concept_lemma,
    invert_role,
)

__all__ = [
    "MAX_REFER_DEPTH",
    "RegConcept",
    "RegEdge",
    "Reg",
    "ReasoningSchedule",
    "ReferentChoice",
    "select_referent_token",
    "select_referent_concept",
    "reroot",
    "acyclize",
    "compute_refer_depths",
    "topological_schedule",
    "validate",
    "reg_to_json",
    "reg_from_json",
    "build_reg",
]

MAX_REFER_DEPTH = 50

NOUN_TAGS = ("NN", "NNS", "NNP", "NNPS")
COMPOUND_LABELS = ("nn", "compound", "nn:compound")


@dataclass(frozen=True)
class RegConcept:
    label: str
    align: tuple[int, ...] = ()


@dataclass(frozen=True)
class RegEdge:
    src: int  # child / context side
    role: str
    dst: int  # parent side


@dataclass(frozen=True)
class Reg:
    concepts: tuple[RegConcept, ...]
    edges: tuple[RegEdge, ...]
    root: int
    depths: tuple[int, ...] | None = None

    def children_of(self, node: int) -> list[tuple[int, str]]:
        return [(e.src, e.role) for e in self.edges if e.dst == node]

    def parents_of(self, node: int) -> list[tuple[int, str]]:
        return [(e.dst, e.role) for e in self.edges if e.src == node]


@dataclass(frozen=True)
class ReasoningSchedule:
    layers: tuple[tuple[int, ...], ...]

    def __iter__(self):
        return iter(self.layers)


# ---------------------------------------------------------------------------
# Referent selection


@dataclass(frozen=True)
class ReferentChoice:
    token_index: int | None
    node_id: str
    rule: str  # "POS-rule" | "compound-rule" | "fallback"


def select_referent_token(ann: SyntaxAnnotation) -> int | None:
    """First noun token, redirected to the head of its compound chain."""
    idx = None
    for i, tag in enumerate(ann.pos):
        if tag in NOUN_TAGS:
            idx = i
            break
    if idx is None:
        return None
    return _follow_compound_chain(ann, idx)


def _follow_compound_chain(ann: SyntaxAnnotation, idx: int) -> int:
    seen = {idx}
    moved = True
    while moved:
        moved = False
        for head, dep, label in ann.deps:
            if label in COMPOUND_LABELS and dep == idx and head not in seen:
                idx = head
                seen.add(head)
                moved = True
                break
    return idx


def _lcs_length(a: str, b: str) -> int:
    """Longest common substring length (dynamic programming)."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    best = 0
    for ca in a:
        cur = [0] * (len(b) + 1)
        for j, cb in enumerate(b, start=1):
            if ca == cb:
                cur[j] = prev[j - 1] + 1
                if cur[j] > best:
                    best = cur[j]
        prev = cur
    return best


def select_referent_concept(graph: AmrGraph, token: Token | None) -> str:
    """Referent node id for the chosen token.

    A unique alignment wins outright. Among several aligned nodes, the one
    whose lemma shares the longest common substring with the token surface
    wins (earliest appearance breaks ties). With no usable token, the node
    carrying the smallest alignment index wins.
    """
    if token is not None:
        aligned = [n for n in graph.nodes if token.index in n.align]
        if len(aligned) == 1:
            return aligned[0].id
        if len(aligned) > 1:
            surface = token.surface.lower()
            best = max(
                enumerate(aligned),
                key=lambda item: (
                    _lcs_length(concept_lemma(item[1].concept).lower(), surface),
                    -item[0],
                ),
            )
            return best[1].id
    with_align = [n for n in graph.nodes if n.align]
    if not with_align:
        raise ValueError("unalignable graph: no node carries a token alignment")
    return min(with_align, key=lambda n: min(n.align)).id


def choose_referent(graph: AmrGraph, ann: SyntaxAnnotation) -> ReferentChoice:
    """Token + concept selection with the rule that fired, for reporting."""
    first_noun = None
    for i, tag in enumerate(ann.pos):
        if tag in NOUN_TAGS:
            first_noun = i
            break
    if first_noun is None:
        node_id = select_referent_concept(graph, None)
        return ReferentChoice(token_index=None, node_id=node_id, rule="fallback")
    idx = _follow_compound_chain(ann, first_noun)
    rule = "compound-rule" if idx != first_noun else "POS-rule"
    node_id = select_referent_concept(graph, ann.tokens[idx])
    return ReferentChoice(token_index=idx, node_id=node_id, rule=rule)


# ---------------------------------------------------------------------------
# Re-rooting and acyclization


def reroot(graph: AmrGraph, new_root: str) -> AmrGraph:
    """Reverse (and role-invert) every edge lying on a path old-root -> new_root."""
    ids = {n.id for n in graph.nodes}
    if new_root not in ids:
        raise ValueError(f"unknown node {new_root!r}")
    if new_root == graph.root:
        return graph

    forward: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    backward: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    for e in graph.edges:
        forward[e.source].append(e.target)
        backward[e.target].append(e.source)

    def closure(start: str, adj: dict[str, list[str]]) -> set[str]:
        seen = {start}
        stack = [start]
        while stack:
            cur = stack.pop()
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    from_root = closure(graph.root, forward)
    to_new = closure(new_root, backward)  # nodes that can reach new_root

    new_edges = []
    for e in graph.edges:
        if e.source in from_root and e.target in to_new:
            new_edges.append(AmrEdge(source=e.target, role=invert_role(e.role), target=e.source))
        else:
            new_edges.append(e)
    return graph.with_edges(new_edges, root=new_root)


def acyclize(graph: AmrGraph) -> Reg:
    """Build the REG by DFS from the root, storing edges child-to-parent.

    The traversal walks edges in either written direction. An edge reaching an
    unvisited node makes that node a child of the current one. An edge back to
    a node the current one already reaches (a co-reference) is stored with the
    visited node kept on the parent side and the role inverted accordingly.
    Any other edge to a visited node keeps the current node as parent.
    """
    incident: dict[str, list[int]] = {n.id: [] for n in graph.nodes}
    for i, e in enumerate(graph.edges):
        incident[e.source].append(i)
        incident[e.target].append(i)
    if graph.root not in incident:
        raise ValueError(f"root {graph.root!r} is not a node")

    order: dict[str, int] = {}
    concepts: list[RegConcept] = []
    reg_edges: list[RegEdge] = []
    reach_adj: dict[int, list[int]] = {}  # child index -> parent indices so far
    consumed: set[int] = set()
    node_by_id = {n.id: n for n in graph.nodes}

    def admit(node_id: str) -> int:
        idx = len(concepts)
        order[node_id] = idx
        node = node_by_id[node_id]
        concepts.append(RegConcept(label=node.concept, align=tuple(sorted(node.align))))
        reach_adj[idx] = []
        return idx

    def reaches(a: int, b: int) -> bool:
        stack = [a]
        seen = {a}
        while stack:
            cur = stack.pop()
            if cur == b:
                return True
            for nxt in reach_adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return False

    def add_edge(src: int, role: str, dst: int) -> None:
        reg_edges.append(RegEdge(src=src, role=role, dst=dst))
        reach_adj[src].append(dst)

    def visit(node_id: str) -> None:
        u = order[node_id]
        for edge_index in incident[node_id]:
            if edge_index in consumed:
                continue
            edge = graph.edges[edge_index]
            if edge.source == node_id:
                other, role_to_u = edge.target, invert_role(edge.role)
            else:
                other, role_to_u = edge.source, edge.role
            consumed.add(edge_index)
            if other not in order:
                w = admit(other)
                add_edge(w, role_to_u, u)
                visit(other)
            else:
                w = order[other]
                if reaches(u, w):
                    add_edge(u, invert_role(role_to_u), w)
                else:
                    add_edge(w, role_to_u, u)

    admit(graph.root)
    visit(graph.root)
    if len(order) != len(graph.nodes):
        missing = [n.id for n in graph.nodes if n.id not in order]
        raise ValueError(f"graph is not connected; unreachable nodes: {missing}")

    reg = Reg(
        concepts=tuple(concepts),
        edges=tuple(sorted(reg_edges, key=lambda e: (e.src, e.dst, e.role))),
        root=0,
    )
    return compute_refer_depths(reg)


def compute_refer_depths(reg: Reg) -> Reg:
    """Shortest hop distance to the root along child-to-parent edges, capped."""
    children: dict[int, list[int]] = {i: [] for i in range(len(reg.concepts))}
    for e in reg.edges:
        children[e.dst].append(e.src)
    depths = [-1] * len(reg.concepts)
    depths[reg.root] = 0
    queue = deque([reg.root])
    while queue:
        cur = queue.popleft()
        for child in children[cur]:
            if depths[child] < 0:
                depths[child] = depths[cur] + 1
                queue.append(child)
    if any(d < 0 for d in depths):
        bad = [i for i, d in enumerate(depths) if d < 0]
        raise ValueError(f"nodes cannot reach the root: {bad}")
    return replace(reg, depths=tuple(min(d, MAX_REFER_DEPTH) for d in depths))


def topological_schedule(reg: Reg) -> ReasoningSchedule:
    """Kahn layering, leaves first: a node fires once all its children have."""
    n = len(reg.concepts)
    pending_children = [0] * n
    parents: dict[int, list[int]] = {i: [] for i in range(n)}
    for e in reg.edges:
        pending_children[e.dst] += 1
        parents[e.src].append(e.dst)
    frontier = sorted(i for i in range(n) if pending_children[i] == 0)
    layers: list[tuple[int, ...]] = []
    placed = 0
    while frontier:
        layers.append(tuple(frontier))
        placed += len(frontier)
        nxt: set[int] = set()
        for node in frontier:
            for parent in parents[node]:
                pending_children[parent] -= 1
                if pending_children[parent] == 0:
                    nxt.add(parent)
        frontier = sorted(nxt)
    if placed != n:
        raise ValueError("cycle detected: graph has no topological layering")
    return ReasoningSchedule(layers=tuple(layers))


def validate(reg: Reg) -> list[str]:
    """All invariant violations, empty when the graph is a valid REG."""
    violations: list[str] = []
    n = len(reg.concepts)
    if not (0 <= reg.root < n):
        return [f"root index {reg.root} out of range"]
    for e in reg.edges:
        if not (0 <= e.src < n and 0 <= e.dst < n):
            violations.append(f"edge ({e.src},{e.role},{e.dst}) out of range")
    if violations:
        return violations

    sinks = sorted(set(range(n)) - {e.src for e in reg.edges})
    if sinks != [reg.root]:
        violations.append(f"unique-root violation: sink set {sinks} != [{reg.root}]")

    try:
        topological_schedule(reg)
    except ValueError:
        violations.append("cycle")

    children: dict[int, list[int]] = {i: [] for i in range(n)}
    for e in reg.edges:
        children[e.dst].append(e.src)
    seen = {reg.root}
    stack = [reg.root]
    while stack:
        cur = stack.pop()
        for child in children[cur]:
            if child not in seen:
                seen.add(child)
                stack.append(child)
    for i in range(n):
        if i not in seen:
            violations.append(f"unreachable: node {i}")

    if reg.depths is not None and len(seen) == n and "cycle" not in violations:
        expected = compute_refer_depths(replace(reg, depths=None)).depths
        if tuple(reg.depths) != expected:
            violations.append(f"depths {list(reg.depths)} != expected {list(expected)}")
    return violations


# ---------------------------------------------------------------------------
# Serialization


def reg_to_json_dict(reg: Reg, schedule: ReasoningSchedule) -> dict:
    if reg.depths is None:
        reg = compute_refer_depths(reg)
    return {
        "root": reg.root,
        "concepts": [
            {"label": c.label, "align": list(c.align), "depth": reg.depths[i]}
            for i, c in enumerate(reg.concepts)
        ],
        "edges": [{"src": e.src, "role": e.role, "dst": e.dst} for e in reg.edges],
        "schedule": [list(layer) for layer in schedule.layers],
    }


def reg_to_json(reg: Reg, schedule: ReasoningSchedule | None = None) -> str:
    if schedule is None:
        schedule = topological_schedule(reg)
    return json.dumps(reg_to_json_dict(reg, schedule), indent=2) + "\n"


def reg_from_json(text: str) -> tuple[Reg, ReasoningSchedule]:
    doc = json.loads(text)
    concepts = tuple(
        RegConcept(label=c["label"], align=tuple(c["align"])) for c in doc["concepts"]
    )
    depths = tuple(c["depth"] for c in doc["concepts"])
    edges = tuple(RegEdge(src=e["src"], role=e["role"], dst=e["dst"]) for e in doc["edges"])
    reg = Reg(concepts=concepts, edges=edges, root=doc["root"], depths=depths)
    schedule = ReasoningSchedule(layers=tuple(tuple(layer) for layer in doc["schedule"]))
    return reg, schedule


# ---------------------------------------------------------------------------
# Full pipeline


@dataclass(frozen=True)
class RegBuild:
    reg: Reg
    schedule: ReasoningSchedule
    choice: ReferentChoice


def build_reg(graph: AmrGraph, ann: SyntaxAnnotation) -> RegBuild:
    """annotation + AMR -> referent choice, re-rooted DAG, schedule."""
    choice = choose_referent(graph, ann)
    rooted = reroot(graph, choice.node_id)
    reg = acyclize(rooted)
    schedule = topological_schedule(reg)
    return RegBuild(reg=reg, schedule=schedule, choice=choice)
