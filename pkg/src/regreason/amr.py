"""AMR graphs in PENMAN notation with inline token alignments.

A graph is a list of labeled nodes plus (source, role, target) edges stored
exactly as written, parent-to-child. Variables become one node each no matter
how often they are mentioned; re-entrant mentions become extra edges.
Constants (numbers, quoted strings, '-', 'imperative', ...) become nodes with
generated ids and can never be re-entrant.

Alignment markers may follow a variable, a concept, or a constant:
``~3``, ``~3,4`` and the ISI form ``~e.3,4`` all attach the given token
indices to the enclosing node.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

__all__ = [
    "Token",
    "SyntaxAnnotation",
    "AmrNode",
    "AmrEdge",
    "AmrGraph",
    "PenmanParseError",
    "parse_penman",
    "serialize_penman",
    "iter_penman_file",
    "invert_role",
    "concept_lemma",
]

_SENSE_RE = re.compile(r"-\d{2,3}$")
_SYMBOL_CHARS = re.compile(r"[^\s()~/]")


class PenmanParseError(ValueError):
    """Parse failure with 1-based line/column of the offending text."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    lemma: str


@dataclass(frozen=True)
class SyntaxAnnotation:
    """Tokenized sentence with POS tags and dependency triples.

    deps entries are (head index, dependent index, relation label).
    """

    tokens: tuple[Token, ...]
    pos: tuple[str, ...]
    deps: tuple[tuple[int, int, str], ...] = ()

    def __post_init__(self):
        for i, tok in enumerate(self.tokens):
            if tok.index != i:
                raise ValueError(f"token indices must be contiguous from 0, got {tok.index} at {i}")
        if len(self.pos) != len(self.tokens):
            raise ValueError("one POS tag per token is required")
        for head, dep, _label in self.deps:
            if not (0 <= head < len(self.tokens) and 0 <= dep < len(self.tokens)):
                raise ValueError(f"dependency ({head}, {dep}) out of range")


@dataclass(frozen=True)
class AmrNode:
    id: str
    concept: str
    align: frozenset[int] = frozenset()
    is_constant: bool = False


@dataclass(frozen=True)
class AmrEdge:
    source: str
    role: str
    target: str


@dataclass(frozen=True)
class AmrGraph:
    nodes: tuple[AmrNode, ...]
    edges: tuple[AmrEdge, ...]
    root: str

    def node_by_id(self, node_id: str) -> AmrNode:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)

    def with_edges(self, edges, root: str | None = None) -> "AmrGraph":
        return AmrGraph(nodes=self.nodes, edges=tuple(edges), root=root or self.root)


def invert_role(role: str) -> str:
    """':X' <-> ':X-of'. Involutive by construction."""
    if not role.startswith(":") or len(role) < 2:
        raise ValueError(f"not a role label: {role!r}")
    if role.endswith("-of"):
        return role[: -len("-of")]
    return role + "-of"


def concept_lemma(concept: str) -> str:
    """Concept label with a trailing sense suffix removed ('stand-01' -> 'stand')."""
    return _SENSE_RE.sub("", concept)


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass
class _Tok:
    kind: str  # lparen rparen slash role symbol string align
    text: str
    line: int
    col: int


_ALIGN_RE = re.compile(r"^(?:e\.)?\d+(?:,\d+)*$")


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#" and col == 1:
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "(":
            toks.append(_Tok("lparen", ch, line, col))
            i += 1
            col += 1
        elif ch == ")":
            toks.append(_Tok("rparen", ch, line, col))
            i += 1
            col += 1
        elif ch == "/":
            toks.append(_Tok("slash", ch, line, col))
            i += 1
            col += 1
        elif ch == "~":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in ".,"):
                j += 1
            body = text[i + 1 : j]
            if not _ALIGN_RE.match(body):
                raise PenmanParseError(f"malformed alignment '~{body}'", start_line, start_col)
            toks.append(_Tok("align", body, start_line, start_col))
            col += j - i
            i = j
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise PenmanParseError("unterminated string literal", start_line, start_col)
                j += 1
            if j >= n:
                raise PenmanParseError("unterminated string literal", start_line, start_col)
            toks.append(_Tok("string", text[i : j + 1], start_line, start_col))
            col += j + 1 - i
            i = j + 1
        elif ch == ":":
            j = i + 1
            while j < n and _SYMBOL_CHARS.match(text[j]):
                j += 1
            if j == i + 1:
                raise PenmanParseError("empty role label", start_line, start_col)
            toks.append(_Tok("role", text[i:j], start_line, start_col))
            col += j - i
            i = j
        else:
            j = i
            while j < n and _SYMBOL_CHARS.match(text[j]) and text[j] != ":":
                j += 1
            if j == i:
                raise PenmanParseError(f"unexpected character {ch!r}", start_line, start_col)
            toks.append(_Tok("symbol", text[i:j], start_line, start_col))
            col += j - i
            i = j
    return toks


def _align_indices(body: str) -> frozenset[int]:
    if body.startswith("e."):
        body = body[2:]
    return frozenset(int(part) for part in body.split(","))


_CONSTANT_WORDS = {"imperative", "expressive", "interrogative"}


def _is_constant_token(text: str) -> bool:
    if text.startswith('"'):
        return True
    first = text[0]
    if not (first.isalpha() or first == "_"):
        return True
    return text in _CONSTANT_WORDS


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.pos = 0
        self.nodes: list[AmrNode] = []
        self.node_index: dict[str, int] = {}
        self.edges: list[AmrEdge] = []
        # (edge slot, variable, token, alignment written on the mention)
        self.pending_refs: list[tuple[int, str, _Tok, frozenset[int]]] = []
        self.const_count = 0

    def _peek(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def _next(self, kind: str | None = None, what: str = "") -> _Tok:
        tok = self._peek()
        if tok is None:
            last = self.toks[-1] if self.toks else _Tok("", "", 1, 1)
            raise PenmanParseError(f"unexpected end of input{what}", last.line, last.col)
        if kind is not None and tok.kind != kind:
            raise PenmanParseError(f"expected {kind}{what}, found {tok.text!r}", tok.line, tok.col)
        self.pos += 1
        return tok

    def _collect_aligns(self) -> frozenset[int]:
        indices: set[int] = set()
        while (tok := self._peek()) is not None and tok.kind == "align":
            indices |= _align_indices(self._next().text)
        return frozenset(indices)

    def _add_constant(self, literal: str, align: frozenset[int]) -> str:
        node_id = f"_k{self.const_count}"
        self.const_count += 1
        self.node_index[node_id] = len(self.nodes)
        self.nodes.append(AmrNode(id=node_id, concept=literal, align=align, is_constant=True))
        return node_id

    def parse_graph(self) -> AmrGraph:
        root = self.parse_node()
        trailing = self._peek()
        if trailing is not None:
            raise PenmanParseError(
                f"trailing content {trailing.text!r} after graph", trailing.line, trailing.col
            )
        # Resolve bare variable mentions now that every definition is known.
        for slot, var, tok, align in self.pending_refs:
            if var not in self.node_index:
                raise PenmanParseError(f"dangling variable reference '{var}'", tok.line, tok.col)
            edge = self.edges[slot]
            if edge.source == var:
                raise PenmanParseError(
                    f"self-loop edge on '{var}' is not allowed", tok.line, tok.col
                )
            if align:
                idx = self.node_index[var]
                node = self.nodes[idx]
                self.nodes[idx] = replace(node, align=node.align | align)
        return AmrGraph(nodes=tuple(self.nodes), edges=tuple(self.edges), root=root)

    def parse_node(self) -> str:
        open_tok = self._next("lparen", " at start of node")
        var_tok = self._next("symbol", " (variable)")
        var = var_tok.text
        if _is_constant_token(var):
            raise PenmanParseError(f"invalid variable name {var!r}", var_tok.line, var_tok.col)
        if var in self.node_index:
            raise PenmanParseError(
                f"duplicate definition of variable '{var}'", var_tok.line, var_tok.col
            )
        align = self._collect_aligns()
        self._next("slash", " after variable")
        concept_tok = self._next("symbol", " (concept)")
        align |= self._collect_aligns()
        self.node_index[var] = len(self.nodes)
        self.nodes.append(AmrNode(id=var, concept=concept_tok.text, align=frozenset(align)))

        while (tok := self._peek()) is not None and tok.kind == "role":
            role_tok = self._next("role")
            self.parse_target(var, role_tok)
        close = self._peek()
        if close is None:
            raise PenmanParseError("unbalanced parentheses: missing ')'", open_tok.line, open_tok.col)
        self._next("rparen", " to close node")
        return var

    def parse_target(self, source: str, role_tok: _Tok) -> None:
        self._collect_aligns()  # ISI role alignments are tolerated and dropped
        tok = self._peek()
        if tok is None:
            raise PenmanParseError(
                f"role {role_tok.text!r} has no target", role_tok.line, role_tok.col
            )
        if tok.kind == "lparen":
            # Reserve the slot first so edges keep document order even though
            # the nested node parses before the target id is known.
            slot = len(self.edges)
            self.edges.append(AmrEdge(source=source, role=role_tok.text, target=""))
            target = self.parse_node()
            if target == source:
                raise PenmanParseError("self-loop edge is not allowed", tok.line, tok.col)
            self.edges[slot] = AmrEdge(source=source, role=role_tok.text, target=target)
            return
        if tok.kind == "string" or (tok.kind == "symbol" and _is_constant_token(tok.text)):
            lit = self._next()
            align = self._collect_aligns()
            node_id = self._add_constant(lit.text, align)
            self.edges.append(AmrEdge(source=source, role=role_tok.text, target=node_id))
            return
        if tok.kind == "symbol":
            ref = self._next()
            align = self._collect_aligns()
            slot = len(self.edges)
            self.edges.append(AmrEdge(source=source, role=role_tok.text, target=ref.text))
            self.pending_refs.append((slot, ref.text, ref, align))
            return
        raise PenmanParseError(
            f"role {role_tok.text!r} has invalid target {tok.text!r}", tok.line, tok.col
        )


def parse_penman(text: str) -> AmrGraph:
    """Parse one PENMAN graph. '#' starts a comment line."""
    toks = _tokenize(text)
    if not toks:
        raise PenmanParseError("empty input", 1, 1)
    return _Parser(toks).parse_graph()


def iter_penman_file(text: str):
    """Yield each graph in a PENMAN file (records separated by blank lines)."""
    chunk: list[str] = []
    depth = 0
    for raw in text.splitlines():
        line = raw.rstrip()
        if line.startswith("#"):
            continue
        if not line.strip():
            if chunk and depth == 0:
                yield parse_penman("\n".join(chunk))
                chunk = []
            continue
        chunk.append(line)
        depth += line.count("(") - line.count(")")
    if chunk:
        yield parse_penman("\n".join(chunk))


# ---------------------------------------------------------------------------
# Serializer


def _format_align(align: frozenset[int]) -> str:
    if not align:
        return ""
    return "~" + ",".join(str(i) for i in sorted(align))


def serialize_penman(graph: AmrGraph) -> str:
    """Deterministic single-line PENMAN text.

    Children are emitted in stored edge order; the first mention of a variable
    carries its definition, later mentions are bare references. Requires every
    node to be reachable from the root following edge direction.
    """
    by_id = {node.id: node for node in graph.nodes}
    if graph.root not in by_id:
        raise ValueError(f"root {graph.root!r} is not a node")
    outgoing: dict[str, list[AmrEdge]] = {node.id: [] for node in graph.nodes}
    for edge in graph.edges:
        if edge.source not in by_id or edge.target not in by_id:
            raise ValueError(f"edge {edge} references unknown node")
        outgoing[edge.source].append(edge)

    emitted: set[str] = set()

    def emit(node_id: str) -> str:
        node = by_id[node_id]
        emitted.add(node_id)
        parts = [f"({node.id}", "/", node.concept + _format_align(node.align)]
        for edge in outgoing[node_id]:
            target = by_id[edge.target]
            if target.is_constant:
                emitted.add(target.id)
                parts.append(edge.role)
                parts.append(target.concept + _format_align(target.align))
            elif edge.target in emitted:
                parts.append(edge.role)
                parts.append(target.id)
            else:
                parts.append(edge.role)
                parts.append(emit(edge.target))
        return " ".join(parts) + ")"

    text = emit(graph.root)
    missing = [n.id for n in graph.nodes if n.id not in emitted]
    if missing:
        raise ValueError(f"nodes unreachable from root: {missing}")
    return text


def strip_alignments(graph: AmrGraph) -> AmrGraph:
    return AmrGraph(
        nodes=tuple(replace(n, align=frozenset()) for n in graph.nodes),
        edges=graph.edges,
        root=graph.root,
    )
