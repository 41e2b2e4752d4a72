"""Mind map document model: tree of nodes, reversible edits, undo/redo.

A :class:`MindMap` is a single rooted ordered tree. All mutations go through
:class:`EditCommand` objects applied via :meth:`MindMap.apply`, which records
them on the undo stack; each command captures whatever state it needs to
invert itself exactly. Branch colors are derived state: the depth-2 children
of the root take palette indices 0..n-1 in sibling order and every deeper
node inherits the index of its depth-2 ancestor, so colors are recomputed
after every change rather than stored authoritatively.

A map is a single-writer document. It is safe to hand between threads but
not to mutate from two threads at once; callers that share a map (the HTTP
service does) must serialize mutations behind a lock.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import (
    CannotDeleteRoot,
    CycleError,
    EmptyText,
    EmptyTopic,
    NoHistory,
    UnknownNode,
)

NodeId = str


class NodeOrigin(enum.Enum):
    """Which action created a node."""

    ROOT = "root"
    GENERATED = "generated"
    EXPLANATION = "explanation"
    EXAMPLE = "example"
    EXPLORATION = "exploration"
    USER_ADDED = "user_added"


def normalize_text(raw: str) -> str:
    """Trim text and fold line breaks into spaces.

    Node text lives on a single line of the outline wire format, so embedded
    newlines would corrupt exports; they become single spaces.
    """
    return " ".join(raw.splitlines()).strip()


@dataclass
class Node:
    id: NodeId
    text: str
    depth: int
    origin: NodeOrigin
    parent: NodeId | None = None
    children: list[NodeId] = field(default_factory=list)
    collapsed: bool = False
    color_index: int = 0


class MindMap:
    """Rooted ordered tree with undo/redo history and a revision counter."""

    def __init__(self, root: Node):
        self.nodes: dict[NodeId, Node] = {root.id: root}
        self.root: NodeId = root.id
        self.revision: int = 0
        self.history: History = History()
        self._next_id: int = _numeric_suffix(root.id) + 1
        # Store-level metadata, set when the map is loaded from or saved to
        # a document; not part of tree structure.
        self.map_id: str | None = None
        self.created_at: str | None = None
        # Advisory findings from generation (format-rule checks); never fatal.
        self.warnings: list = []

    # -- lookups ------------------------------------------------------------

    def node(self, node_id: NodeId) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(f"no node with id {node_id!r}") from None

    def __contains__(self, node_id: NodeId) -> bool:
        return node_id in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def ancestors(self, node_id: NodeId) -> list[Node]:
        """Ancestors of a node ordered root first; empty for the root."""
        chain: list[Node] = []
        current = self.node(node_id).parent
        while current is not None:
            ancestor = self.nodes[current]
            chain.append(ancestor)
            current = ancestor.parent
        chain.reverse()
        return chain

    def subtree_ids(self, node_id: NodeId) -> list[NodeId]:
        """Pre-order ids of the subtree rooted at node_id."""
        self.node(node_id)
        order: list[NodeId] = []
        stack = [node_id]
        while stack:
            nid = stack.pop()
            order.append(nid)
            stack.extend(reversed(self.nodes[nid].children))
        return order

    def walk(self):
        """Yield nodes in pre-order from the root."""
        for nid in self.subtree_ids(self.root):
            yield self.nodes[nid]

    def to_record(self, node_id: NodeId | None = None) -> dict:
        """Nested plain-dict view of a subtree (API/tree wire shape)."""
        node = self.node(node_id or self.root)
        return {
            "id": node.id,
            "text": node.text,
            "depth": node.depth,
            "collapsed": node.collapsed,
            "color_index": node.color_index,
            "origin": node.origin.value,
            "children": [self.to_record(cid) for cid in node.children],
        }

    # -- id minting ----------------------------------------------------------

    def mint_id(self, existing: NodeId | None = None) -> NodeId:
        """Return a fresh id, or re-register an id captured by a redo.

        Ids come from a per-map monotonic counter and are never reused after
        deletion, so replaying the same command sequence always yields the
        same ids.
        """
        if existing is not None:
            self._next_id = max(self._next_id, _numeric_suffix(existing) + 1)
            return existing
        node_id = f"n{self._next_id}"
        self._next_id += 1
        return node_id

    # -- mutation ------------------------------------------------------------

    def apply(self, cmd: "EditCommand") -> None:
        """Apply a command, push it to the undo stack, clear the redo stack."""
        cmd.apply_to(self)
        self.history.undo_stack.append(cmd)
        self.history.redo_stack.clear()
        self.assign_colors()
        self.revision += 1

    def undo(self) -> None:
        if not self.history.undo_stack:
            raise NoHistory("nothing to undo")
        cmd = self.history.undo_stack.pop()
        cmd.undo_on(self)
        self.history.redo_stack.append(cmd)
        self.assign_colors()
        self.revision += 1

    def redo(self) -> None:
        if not self.history.redo_stack:
            raise NoHistory("nothing to redo")
        cmd = self.history.redo_stack.pop()
        cmd.apply_to(self)
        self.history.undo_stack.append(cmd)
        self.assign_colors()
        self.revision += 1

    def set_collapsed(self, node_id: NodeId, flag: bool) -> None:
        """Record a collapse/expand toggle as an undoable command."""
        self.apply(SetCollapsed(node_id, flag))

    def assign_colors(self) -> None:
        """Recompute branch color indices from the current structure."""
        root = self.nodes[self.root]
        root.color_index = 0
        for index, branch_id in enumerate(root.children):
            for nid in self.subtree_ids(branch_id):
                self.nodes[nid].color_index = index

    def _recompute_depths(self, node_id: NodeId) -> None:
        node = self.nodes[node_id]
        base = 1 if node.parent is None else self.nodes[node.parent].depth + 1
        node.depth = base
        for cid in node.children:
            self._recompute_depths(cid)


def new_map(topic_text: str) -> MindMap:
    """Create a map holding only a root node with the given topic."""
    text = normalize_text(topic_text)
    if not text:
        raise EmptyTopic("topic is empty")
    root = Node(id="n1", text=text, depth=1, origin=NodeOrigin.ROOT)
    return MindMap(root)


def _numeric_suffix(node_id: NodeId) -> int:
    digits = "".join(ch for ch in node_id if ch.isdigit())
    return int(digits) if digits else 0


def _clamp_position(position: int | None, length: int) -> int:
    if position is None:
        return length
    return max(0, min(position, length))


# -- commands -----------------------------------------------------------------


@dataclass
class History:
    undo_stack: list["EditCommand"] = field(default_factory=list)
    redo_stack: list["EditCommand"] = field(default_factory=list)


class EditCommand:
    """A reversible mutation. apply_to() recaptures inverse state each run,
    so the same command object can be re-executed by redo or replayed onto
    an equivalent copy of the map."""

    def apply_to(self, m: MindMap) -> None:
        raise NotImplementedError

    def undo_on(self, m: MindMap) -> None:
        raise NotImplementedError


@dataclass
class AddChild(EditCommand):
    parent: NodeId
    text: str
    origin: NodeOrigin = NodeOrigin.USER_ADDED
    position: int | None = None
    node_id: NodeId | None = None  # minted on first application, then stable

    def apply_to(self, m: MindMap) -> None:
        parent = m.node(self.parent)
        text = normalize_text(self.text)
        if not text:
            raise EmptyText("node text is empty")
        self.node_id = m.mint_id(self.node_id)
        node = Node(
            id=self.node_id,
            text=text,
            depth=parent.depth + 1,
            origin=self.origin,
            parent=parent.id,
        )
        m.nodes[node.id] = node
        parent.children.insert(
            _clamp_position(self.position, len(parent.children)), node.id
        )

    def undo_on(self, m: MindMap) -> None:
        node = m.node(self.node_id)
        m.nodes[node.parent].children.remove(node.id)
        del m.nodes[node.id]


@dataclass
class DeleteSubtree(EditCommand):
    node: NodeId
    _removed: list[Node] = field(default_factory=list, repr=False)
    _parent: NodeId | None = field(default=None, repr=False)
    _index: int = field(default=0, repr=False)

    def apply_to(self, m: MindMap) -> None:
        target = m.node(self.node)
        if target.id == m.root:
            raise CannotDeleteRoot("the root node cannot be deleted")
        self._parent = target.parent
        self._index = m.nodes[target.parent].children.index(target.id)
        self._removed = [m.nodes[nid] for nid in m.subtree_ids(target.id)]
        m.nodes[target.parent].children.remove(target.id)
        for node in self._removed:
            del m.nodes[node.id]

    def undo_on(self, m: MindMap) -> None:
        for node in self._removed:
            m.nodes[node.id] = node
        m.nodes[self._parent].children.insert(self._index, self.node)


@dataclass
class EditText(EditCommand):
    node: NodeId
    new_text: str
    _old_text: str = field(default="", repr=False)

    def apply_to(self, m: MindMap) -> None:
        target = m.node(self.node)
        text = normalize_text(self.new_text)
        if not text:
            raise EmptyText("node text is empty")
        self._old_text = target.text
        target.text = text

    def undo_on(self, m: MindMap) -> None:
        m.node(self.node).text = self._old_text


@dataclass
class MoveSubtree(EditCommand):
    node: NodeId
    new_parent: NodeId
    position: int | None = None
    _old_parent: NodeId | None = field(default=None, repr=False)
    _old_index: int = field(default=0, repr=False)

    def apply_to(self, m: MindMap) -> None:
        target = m.node(self.node)
        new_parent = m.node(self.new_parent)
        if new_parent.id in m.subtree_ids(target.id):
            raise CycleError(
                f"cannot move {target.id!r} under its own subtree"
            )
        self._old_parent = target.parent
        self._old_index = m.nodes[target.parent].children.index(target.id)
        m.nodes[target.parent].children.remove(target.id)
        new_parent.children.insert(
            _clamp_position(self.position, len(new_parent.children)), target.id
        )
        target.parent = new_parent.id
        m._recompute_depths(target.id)

    def undo_on(self, m: MindMap) -> None:
        target = m.node(self.node)
        m.nodes[target.parent].children.remove(target.id)
        m.nodes[self._old_parent].children.insert(self._old_index, target.id)
        target.parent = self._old_parent
        m._recompute_depths(target.id)


@dataclass
class SetCollapsed(EditCommand):
    node: NodeId
    flag: bool
    _old_flag: bool = field(default=False, repr=False)

    def apply_to(self, m: MindMap) -> None:
        target = m.node(self.node)
        self._old_flag = target.collapsed
        target.collapsed = self.flag

    def undo_on(self, m: MindMap) -> None:
        m.node(self.node).collapsed = self._old_flag


@dataclass
class Composite(EditCommand):
    """Several commands applied as one undoable step.

    Enrichment uses this so one AI action (which may attach a whole subtree)
    is reverted by a single undo.
    """

    commands: list[EditCommand] = field(default_factory=list)

    def apply_to(self, m: MindMap) -> None:
        done: list[EditCommand] = []
        try:
            for cmd in self.commands:
                cmd.apply_to(m)
                done.append(cmd)
        except Exception:
            for cmd in reversed(done):
                cmd.undo_on(m)
            raise

    def undo_on(self, m: MindMap) -> None:
        for cmd in reversed(self.commands):
            cmd.undo_on(m)
