"""On-disk map documents and outline export.

Documents are versioned JSON with a fixed field order, written atomically
(temp file + rename), so saving the same map twice produces byte-identical
files when the clock is pinned. Undo history is session state and is not
persisted.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from .errors import CorruptDocument, VersionError
from .mindmap import MindMap, Node, NodeId, NodeOrigin
from .outline import OutlineNode, serialize_outline

FORMAT_VERSION = 1

Clock = Callable[[], datetime]


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


def _stamp(clock: Clock) -> str:
    return clock().strftime("%Y-%m-%dT%H:%M:%SZ")


def _slug(text: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")
    return slug[:40] or "map"


def _node_record(m: MindMap, node_id: NodeId) -> dict:
    node = m.nodes[node_id]
    return {
        "id": node.id,
        "text": node.text,
        "depth": node.depth,
        "collapsed": node.collapsed,
        "color_index": node.color_index,
        "origin": node.origin.value,
        "children": [_node_record(m, cid) for cid in node.children],
    }


def save(
    m: MindMap,
    path: str | Path,
    *,
    map_id: str | None = None,
    clock: Clock = _utc_now,
) -> None:
    """Write the map document atomically.

    The map's stored metadata (id, created timestamp) is reused when present
    so repeated saves are stable; the first save establishes it.
    """
    path = Path(path)
    resolved_id = map_id or m.map_id or _slug(m.nodes[m.root].text)
    now = _stamp(clock)
    created = m.created_at or now
    document = {
        "format_version": FORMAT_VERSION,
        "map_id": resolved_id,
        "created": created,
        "modified": now,
        "root": _node_record(m, m.root),
    }
    payload = json.dumps(document, ensure_ascii=False, indent=2) + "\n"

    fd, tmp_name = tempfile.mkstemp(
        dir=path.parent, prefix=f".{path.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(payload)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    m.map_id = resolved_id
    m.created_at = created


def load(path: str | Path) -> MindMap:
    """Rebuild a map from a document; history comes back empty.

    Raises VersionError for unknown format versions and CorruptDocument when
    the stored tree violates a map invariant (duplicate ids, bad depths,
    empty text, misplaced origins). Branch colors are derived state and are
    recomputed from structure.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptDocument(f"not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise CorruptDocument("document root must be an object")
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported format_version {version!r}")

    root_record = document.get("root")
    if not isinstance(root_record, dict):
        raise CorruptDocument("missing root node record")

    seen: set[str] = set()
    root = _check_node(root_record, expected_depth=1, is_root=True, seen=seen)
    m = MindMap(root)
    m.map_id = document.get("map_id")
    m.created_at = document.get("created")

    def attach(parent: Node, record: dict) -> None:
        node = _check_node(
            record, expected_depth=parent.depth + 1, is_root=False, seen=seen
        )
        node.parent = parent.id
        m.nodes[node.id] = node
        parent.children.append(node.id)
        for child_record in record["children"]:
            attach(node, child_record)

    for child_record in root_record["children"]:
        attach(root, child_record)

    m._next_id = max(_id_number(nid) for nid in m.nodes) + 1
    m.assign_colors()
    return m


def _check_node(record: dict, expected_depth: int, is_root: bool, seen: set) -> Node:
    try:
        node_id = record["id"]
        text = record["text"]
        depth = record["depth"]
        collapsed = record["collapsed"]
        origin_value = record["origin"]
        children = record["children"]
    except (KeyError, TypeError) as exc:
        raise CorruptDocument(f"node record missing field: {exc}") from exc
    if not isinstance(node_id, str) or not node_id:
        raise CorruptDocument("node id must be a non-empty string")
    if node_id in seen:
        raise CorruptDocument(f"duplicate node id {node_id!r}")
    seen.add(node_id)
    if not isinstance(text, str) or not text.strip():
        raise CorruptDocument(f"node {node_id!r} has empty text")
    if depth != expected_depth:
        raise CorruptDocument(
            f"node {node_id!r} stored depth {depth}, expected {expected_depth}"
        )
    try:
        origin = NodeOrigin(origin_value)
    except ValueError as exc:
        raise CorruptDocument(f"node {node_id!r} has bad origin") from exc
    if is_root and origin is not NodeOrigin.ROOT:
        raise CorruptDocument("root node must have origin 'root'")
    if not is_root and origin is NodeOrigin.ROOT:
        raise CorruptDocument(f"non-root node {node_id!r} has origin 'root'")
    if not isinstance(children, list):
        raise CorruptDocument(f"node {node_id!r} children must be a list")
    return Node(
        id=node_id,
        text=text,
        depth=depth,
        origin=origin,
        collapsed=bool(collapsed),
    )


def _id_number(node_id: str) -> int:
    digits = "".join(ch for ch in node_id if ch.isdigit())
    return int(digits) if digits else 0


def export_outline(m: MindMap, include_collapsed: bool = True) -> str:
    """Outline export; with include_collapsed=False, descendants of collapsed
    nodes are omitted (the collapsed node itself stays)."""

    def convert(node_id: NodeId) -> OutlineNode:
        node = m.nodes[node_id]
        out = OutlineNode(node.depth, node.text)
        if include_collapsed or not node.collapsed:
            out.children = [convert(cid) for cid in node.children]
        return out

    return serialize_outline(convert(m.root))
