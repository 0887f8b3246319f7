"""Graph file formats.

* JSON: ``{"vertices": ["a", "b"], "edges": [["a", "b"]]}``
* edge list: one ``u v`` pair per line, ``vertex u`` declares a vertex,
  ``#`` starts a comment
* batch line: ``V:a,b,c E:a-b,b-c``
"""
from __future__ import annotations

import json
from pathlib import Path

from .errors import InputError
from .graph import Graph


def _build(vertices: list[str], edges: list[tuple[str, str, int | None]], where: str) -> Graph:
    if not vertices:
        raise InputError("graph needs at least one vertex")
    declared = set(vertices)
    seen: set[frozenset[str]] = set()
    for u, v, line in edges:
        if u == v:
            raise InputError(f"self-loop at {u!r}{where}", line)
        for x in (u, v):
            if x not in declared:
                raise InputError(f"edge uses undeclared vertex {x!r}{where}", line)
        key = frozenset((u, v))
        if key in seen:
            raise InputError(f"duplicate edge {u}-{v}{where}", line)
        seen.add(key)
    return Graph(vertices, [(u, v) for u, v, _ in edges])


def parse_graph_json(text: str) -> Graph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(data, dict) or not isinstance(data.get("vertices"), list):
        raise InputError('graph JSON needs a "vertices" list')
    vertices = data["vertices"]
    if not all(isinstance(v, str) and v for v in vertices):
        raise InputError("vertex labels must be non-empty strings")
    if len(set(vertices)) != len(vertices):
        raise InputError("duplicate vertex label")
    edges = []
    for k, e in enumerate(data.get("edges", [])):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e)):
            raise InputError(f"edge #{k} must be a pair of labels")
        edges.append((e[0], e[1], None))
    return _build(vertices, edges, "")


def parse_edge_list(text: str) -> Graph:
    vertices: dict[str, None] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex":
            if len(parts) != 2:
                raise InputError("expected 'vertex <label>'", lineno)
            vertices.setdefault(parts[1])
        elif len(parts) == 2:
            u, v = parts
            vertices.setdefault(u)
            vertices.setdefault(v)
            edges.append((u, v, lineno))
        else:
            raise InputError(f"expected 'u v' or 'vertex u', got {line!r}", lineno)
    return _build(list(vertices), edges, "")


def parse_batch_line(line: str, lineno: int | None = None) -> Graph:
    vertices: list[str] | None = None
    edges: list[tuple[str, str, int | None]] = []
    for token in line.split():
        if token.startswith("V:"):
            vertices = [v for v in token[2:].split(",") if v]
        elif token.startswith("E:"):
            for pair in filter(None, token[2:].split(",")):
                ends = pair.split("-")
                if len(ends) != 2 or not all(ends):
                    raise InputError(f"bad edge {pair!r}", lineno)
                edges.append((ends[0], ends[1], lineno))
        else:
            raise InputError(f"unexpected token {token!r}", lineno)
    if vertices is None:
        raise InputError("missing 'V:' field", lineno)
    if len(set(vertices)) != len(vertices):
        raise InputError("duplicate vertex label", lineno)
    try:
        return _build(vertices, edges, "")
    except InputError as exc:
        if exc.line is None and lineno is not None:
            raise InputError(str(exc), lineno) from None
        raise


def parse_graph(text: str) -> Graph:
    if text.lstrip().startswith("{"):
        return parse_graph_json(text)
    return parse_edge_list(text)


def load_graph(path: str | Path) -> tuple[Graph, bytes]:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8 text") from None
    return parse_graph(text), raw


def graph_to_json(g: Graph) -> str:
    return json.dumps({"vertices": list(g.vertices), "edges": [list(e) for e in g.edges()]})


def graph_to_edge_list(g: Graph) -> str:
    lines = [f"vertex {v}" for v in g.vertices]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def graph_to_batch_line(g: Graph) -> str:
    edges = ",".join(f"{u}-{v}" for u, v in g.edges())
    return f"V:{','.join(g.vertices)} E:{edges}"
