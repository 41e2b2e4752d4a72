"""Static figure rendering of a map: tiered left-to-right tree layout.

Depth maps to a column, siblings stack vertically with parents centered over
their subtrees. Node fill comes from a fixed palette keyed by the branch
color index (cycling); collapsed nodes hide their descendants and show a
count badge instead. Output format follows the file extension (png, svg,
pdf, ...).
"""

from __future__ import annotations

from pathlib import Path

from .mindmap import MindMap, NodeId

# 10 distinguishable fills, cycling for maps with more branches.
PALETTE = [
    "#4e79a7",
    "#f28e2b",
    "#59a14f",
    "#e15759",
    "#b07aa1",
    "#76b7b2",
    "#edc948",
    "#ff9da7",
    "#9c755f",
    "#bab0ac",
]

_COLUMN_WIDTH = 4.2
_ROW_HEIGHT = 1.0
_TEXT_WRAP = 36


def branch_color(color_index: int) -> str:
    return PALETTE[color_index % len(PALETTE)]


def layout_positions(
    m: MindMap, include_hidden: bool = False
) -> dict[NodeId, tuple[float, float]]:
    """Positions for the visible tree: x by depth, leaves stacked in y,
    parents centered over their children."""
    positions: dict[NodeId, tuple[float, float]] = {}
    next_row = [0.0]

    def place(node_id: NodeId) -> float:
        node = m.nodes[node_id]
        x = (node.depth - 1) * _COLUMN_WIDTH
        children = (
            node.children if (include_hidden or not node.collapsed) else []
        )
        if not children:
            y = next_row[0]
            next_row[0] += _ROW_HEIGHT
        else:
            ys = [place(cid) for cid in children]
            y = (ys[0] + ys[-1]) / 2
        positions[node_id] = (x, y)
        return y

    place(m.root)
    return positions


def _wrap(text: str, width: int = _TEXT_WRAP) -> str:
    words = text.split()
    lines: list[list[str]] = [[]]
    count = 0
    for word in words:
        if count and count + 1 + len(word) > width:
            lines.append([])
            count = 0
        lines[-1].append(word)
        count += len(word) + (1 if count else 0)
    return "\n".join(" ".join(line) for line in lines)


def render_map_figure(
    m: MindMap,
    out_path: str | Path,
    *,
    include_hidden: bool = False,
    dpi: int = 150,
) -> Path:
    """Render the map to an image file and return the written path."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    positions = layout_positions(m, include_hidden=include_hidden)
    max_x = max(x for x, _ in positions.values())
    max_y = max(y for _, y in positions.values())

    fig, ax = plt.subplots(
        figsize=(max(6.0, max_x / 1.4 + 4.0), max(3.0, max_y * 0.55 + 2.0))
    )
    ax.axis("off")

    for node_id, (x, y) in positions.items():
        node = m.nodes[node_id]
        visible_children = (
            node.children if (include_hidden or not node.collapsed) else []
        )
        for cid in visible_children:
            cx, cy = positions[cid]
            ax.plot([x + 0.4, cx - 0.4], [-y, -cy], color="#888888", lw=0.8, zorder=1)

    for node_id, (x, y) in positions.items():
        node = m.nodes[node_id]
        label = _wrap(node.text)
        if node.collapsed and node.children and not include_hidden:
            hidden = len(m.subtree_ids(node_id)) - 1
            label += f"  [+{hidden}]"
        ax.text(
            x,
            -y,
            label,
            ha="center",
            va="center",
            fontsize=8,
            zorder=2,
            bbox={
                "boxstyle": "round,pad=0.35",
                "facecolor": branch_color(node.color_index),
                "edgecolor": "#333333",
                "alpha": 0.9,
            },
        )

    ax.set_xlim(-2.5, max_x + 2.5)
    ax.set_ylim(-max_y - 1.0, 1.0)
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
    return out_path
