"""Parser and serializer for the '#'-level outline wire format.

Every LLM response and every export uses the same line format: one node per
line, the number of leading ``#`` characters is the node's depth, the rest of
the line is the node's text. The parser is deliberately forgiving (LLM output
is unreliable): depth jumps are clamped, loose prose lines are folded into the
previous node, and structural rule checks only ever produce warnings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import EmptyInput, MultipleRoots, NoHeadings, OrphanEntry


class ViolationKind(enum.Enum):
    MAX_DEPTH_EXCEEDED = "MaxDepthExceeded"
    LEAF_WITHOUT_SIBLING = "LeafWithoutSibling"
    LEAF_TOO_SHORT = "LeafTooShort"
    TOTAL_LENGTH_EXCEEDED = "TotalLengthExceeded"
    DEPTH_JUMP_CLAMPED = "DepthJumpClamped"
    LOOSE_LINE_JOINED = "LooseLineJoined"


@dataclass(frozen=True)
class Violation:
    """One advisory finding, anchored to a single entry index."""

    kind: ViolationKind
    location: int
    detail: str = ""

    def __str__(self) -> str:
        msg = f"{self.kind.value} at entry {self.location}"
        return f"{msg}: {self.detail}" if self.detail else msg


@dataclass(frozen=True)
class OutlineEntry:
    depth: int
    text: str


@dataclass
class OutlineFragment:
    """Flat parse result: ordered (depth, text) entries plus parse warnings."""

    entries: list[OutlineEntry]
    warnings: list[Violation] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class OutlineNode:
    """Generic (depth, text) tree node used for parsing and export."""

    depth: int
    text: str
    children: list["OutlineNode"] = field(default_factory=list)

    def walk(self):
        """Yield nodes in pre-order."""
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class OutlineLimits:
    """Structural limits on initial maps; counts are Unicode code points."""

    max_depth: int = 4
    min_leaf_chars: int = 15
    max_total_chars: int = 1000


DEFAULT_LIMITS = OutlineLimits()


def _heading(line: str) -> tuple[int, str] | None:
    if not line.startswith("#"):
        return None
    depth = len(line) - len(line.lstrip("#"))
    return depth, line[depth:].strip()


def parse_outline(text: str) -> OutlineFragment:
    """Parse outline text into a flat fragment.

    Heading depth is the count of leading '#' characters. A depth that jumps
    more than one level past the previous entry is clamped to previous + 1
    (DepthJumpClamped warning). Non-heading lines are appended to the previous
    entry's text, joined by a single space (LooseLineJoined warning); loose
    lines before the first heading are dropped with the same warning.

    Raises EmptyInput on blank text and NoHeadings when no line starts
    with '#'.
    """
    if not text or not text.strip():
        raise EmptyInput("outline text is empty")

    entries: list[OutlineEntry] = []
    warnings: list[Violation] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        parsed = _heading(stripped)
        if parsed is None:
            if entries:
                index = len(entries) - 1
                prev = entries[index]
                entries[index] = OutlineEntry(prev.depth, f"{prev.text} {stripped}")
                warnings.append(Violation(ViolationKind.LOOSE_LINE_JOINED, index))
            else:
                warnings.append(
                    Violation(
                        ViolationKind.LOOSE_LINE_JOINED,
                        0,
                        "dropped line before first heading",
                    )
                )
            continue
        depth, heading_text = parsed
        if not heading_text:
            # A bare run of '#' carries no content; nothing to keep.
            continue
        if entries and depth > entries[-1].depth + 1:
            clamped = entries[-1].depth + 1
            warnings.append(
                Violation(
                    ViolationKind.DEPTH_JUMP_CLAMPED,
                    len(entries),
                    f"depth {depth} clamped to {clamped}",
                )
            )
            depth = clamped
        entries.append(OutlineEntry(depth, heading_text))

    if not entries:
        raise NoHeadings("no '#' heading lines found")
    return OutlineFragment(entries, warnings)


def fragment_to_forest(frag: OutlineFragment) -> list[OutlineNode]:
    """Rebuild tree structure from a fragment, allowing multiple roots.

    Each entry becomes a child of the nearest preceding entry one level above
    it; entries with no such parent start a new root. Relative structure is
    preserved even when the fragment does not begin at its shallowest depth.
    """
    roots: list[OutlineNode] = []
    stack: list[OutlineNode] = []
    for entry in frag.entries:
        node = OutlineNode(entry.depth, entry.text)
        while stack and stack[-1].depth >= entry.depth:
            stack.pop()
        if stack:
            stack[-1].children.append(node)
        else:
            roots.append(node)
        stack.append(node)
    return roots


def fragment_to_tree(frag: OutlineFragment) -> OutlineNode:
    """Standalone tree reconstruction: exactly one depth-1 root required.

    Raises OrphanEntry when the first entry is deeper than level 1 and
    MultipleRoots when more than one depth-1 entry is present.
    """
    if not frag.entries:
        raise EmptyInput("fragment has no entries")
    if frag.entries[0].depth > 1:
        raise OrphanEntry(
            f"first entry is at depth {frag.entries[0].depth}, expected 1"
        )
    top_level = sum(1 for e in frag.entries if e.depth == 1)
    if top_level > 1:
        raise MultipleRoots(f"found {top_level} top-level entries, expected 1")
    return fragment_to_forest(frag)[0]


def serialize_outline(tree: OutlineNode) -> str:
    """Emit the tree in wire format: pre-order, '#' * depth + ' ' + text."""
    lines = [f"{'#' * node.depth} {node.text}" for node in tree.walk()]
    return "\n".join(lines)


def validate_initial_map(
    tree: OutlineNode, limits: OutlineLimits = DEFAULT_LIMITS
) -> list[Violation]:
    """Check an initial map against the generation format rules.

    Never raises; every finding is advisory. Locations are pre-order entry
    indices. TotalLengthExceeded is anchored to the entry at which the
    running character total first reaches the limit.
    """
    violations: list[Violation] = []
    total = 0
    total_flagged = False
    index = -1

    def visit(node: OutlineNode, parent: OutlineNode | None) -> None:
        nonlocal total, total_flagged, index
        index += 1
        if node.depth > limits.max_depth:
            violations.append(
                Violation(
                    ViolationKind.MAX_DEPTH_EXCEEDED,
                    index,
                    f"depth {node.depth} exceeds maximum of {limits.max_depth}",
                )
            )
        if not node.children:
            if parent is not None and len(parent.children) == 1:
                violations.append(
                    Violation(
                        ViolationKind.LEAF_WITHOUT_SIBLING,
                        index,
                        "leaf has no sibling nodes",
                    )
                )
            if len(node.text) <= limits.min_leaf_chars:
                violations.append(
                    Violation(
                        ViolationKind.LEAF_TOO_SHORT,
                        index,
                        f"leaf text is {len(node.text)} chars, "
                        f"needs more than {limits.min_leaf_chars}",
                    )
                )
        total += len(node.text)
        if not total_flagged and total >= limits.max_total_chars:
            total_flagged = True
            violations.append(
                Violation(
                    ViolationKind.TOTAL_LENGTH_EXCEEDED,
                    index,
                    f"total text reaches {total} chars, "
                    f"limit is below {limits.max_total_chars}",
                )
            )
        for child in node.children:
            visit(child, node)

    visit(tree, None)
    return violations
