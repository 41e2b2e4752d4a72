"""AI actions on the map: initial generation plus the three node actions.

Each node action follows the same pipeline: build the prompt with the node's
ancestor chain as background, ask the provider, parse the outline fragment,
re-base its depths under the target node, reject candidates that mostly
repeat existing siblings, then attach everything as one composite command so
a single undo reverts the whole action.

Depth re-basing trusts the fragment's relative structure but never the
absolute '#' counts: the first entry always lands at target depth + 1.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .errors import (
    EmptyQuestion,
    GenerationMalformed,
    NoExamples,
    RedundantContent,
)
from .llm import DEFAULT_PARAMS, CompletionParams, Provider
from .mindmap import AddChild, Composite, MindMap, Node, NodeId, NodeOrigin
from .outline import (
    DEFAULT_LIMITS,
    OutlineLimits,
    OutlineNode,
    Violation,
    fragment_to_forest,
    fragment_to_tree,
    parse_outline,
    validate_initial_map,
)
from .prompts import (
    NodeContext,
    PromptConfig,
    build_custom_question_prompt,
    build_examples_prompt,
    build_explain_prompt,
    build_generate_prompt,
)
from . import errors as _errors

MAX_EXAMPLES = 3
REDUNDANCY_THRESHOLD = 0.5


class EnrichmentKind(enum.Enum):
    EXPLAIN = "explain"
    EXAMPLES = "examples"
    EXPLORE = "explore"


ORIGIN_FOR_KIND = {
    EnrichmentKind.EXPLAIN: NodeOrigin.EXPLANATION,
    EnrichmentKind.EXAMPLES: NodeOrigin.EXAMPLE,
    EnrichmentKind.EXPLORE: NodeOrigin.EXPLORATION,
}


@dataclass(frozen=True)
class EnrichmentWarning:
    """Non-fatal finding from an enrichment run (distinct from the parser's
    closed Violation vocabulary)."""

    kind: str  # "TooManyExamples" | "RedundantContent"
    detail: str = ""


@dataclass
class EnrichmentResult:
    attached_ids: list[NodeId]
    warnings: list = field(default_factory=list)  # Violation | EnrichmentWarning
    raw_response: str = ""


# --- redundancy ---------------------------------------------------------------

_TOKEN = re.compile(r"\w+", re.UNICODE)


def _tokens(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def repetition_rate(candidate: str, references: list[str]) -> float:
    """Share of candidate tokens (with multiplicity) already present in the
    references' combined vocabulary. Empty references give 0.0."""
    if not references:
        return 0.0
    candidate_tokens = _tokens(candidate)
    if not candidate_tokens:
        return 0.0
    seen: set[str] = set()
    for ref in references:
        seen.update(_tokens(ref))
    hits = sum(1 for tok in candidate_tokens if tok in seen)
    return hits / len(candidate_tokens)


def is_redundant(
    candidate: str, siblings: list[str], threshold: float = REDUNDANCY_THRESHOLD
) -> bool:
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    return repetition_rate(candidate, siblings) >= threshold


# --- context ------------------------------------------------------------------


def node_context(m: MindMap, node_id: NodeId) -> NodeContext:
    """Ancestor chain (root -> parent, joined by ' > ') plus the node text."""
    node = m.node(node_id)
    chain = " > ".join(a.text for a in m.ancestors(node_id))
    return NodeContext(parent_information=chain, node_information=node.text)


# --- initial generation --------------------------------------------------------


def generate_map(
    query: str,
    provider: Provider,
    config: PromptConfig,
    *,
    params: CompletionParams = DEFAULT_PARAMS,
    limits: OutlineLimits = DEFAULT_LIMITS,
) -> MindMap:
    """Generate a fresh map from a query.

    The LLM response is parsed as a standalone outline (single root);
    structure problems raise GenerationMalformed with the raw response
    attached, while format-rule findings are kept as advisory warnings on
    the returned map (``map.warnings``).
    """
    bundle = build_generate_prompt(query, config)
    raw = provider.complete(bundle.messages(), params)
    try:
        frag = parse_outline(raw)
        tree = fragment_to_tree(frag)
    except (
        _errors.EmptyInput,
        _errors.NoHeadings,
        _errors.MultipleRoots,
        _errors.OrphanEntry,
    ) as exc:
        raise GenerationMalformed(str(exc), raw=raw) from exc

    m = _map_from_outline(tree)
    m.warnings = list(frag.warnings) + validate_initial_map(tree, limits)
    return m


def _map_from_outline(tree: OutlineNode) -> MindMap:
    root = Node(id="n1", text=tree.text, depth=1, origin=NodeOrigin.ROOT)
    m = MindMap(root)

    def attach(parent: Node, outline_child: OutlineNode) -> None:
        node = Node(
            id=m.mint_id(),
            text=outline_child.text,
            depth=parent.depth + 1,
            origin=NodeOrigin.GENERATED,
            parent=parent.id,
        )
        m.nodes[node.id] = node
        parent.children.append(node.id)
        for grandchild in outline_child.children:
            attach(node, grandchild)

    for child in tree.children:
        attach(root, child)
    m.assign_colors()
    return m


# --- node actions ---------------------------------------------------------------


def explain_node(
    m: MindMap,
    node_id: NodeId,
    provider: Provider,
    config: PromptConfig,
    *,
    params: CompletionParams = DEFAULT_PARAMS,
    threshold: float = REDUNDANCY_THRESHOLD,
) -> EnrichmentResult:
    """Attach one explanation child under the node (undoable in one step)."""
    ctx = node_context(m, node_id)
    bundle = build_explain_prompt(ctx, config)
    return _run_single(
        m, node_id, bundle, provider, EnrichmentKind.EXPLAIN, params, threshold
    )


def explore_node(
    m: MindMap,
    node_id: NodeId,
    question: str,
    provider: Provider,
    config: PromptConfig,
    *,
    params: CompletionParams = DEFAULT_PARAMS,
    threshold: float = REDUNDANCY_THRESHOLD,
) -> EnrichmentResult:
    """Answer a free question about the node; attaches exactly one child."""
    if not question or not question.strip():
        raise EmptyQuestion("question is empty")
    ctx = node_context(m, node_id)
    bundle = build_custom_question_prompt(ctx, question, config)
    return _run_single(
        m, node_id, bundle, provider, EnrichmentKind.EXPLORE, params, threshold
    )


def exemplify_node(
    m: MindMap,
    node_id: NodeId,
    provider: Provider,
    config: PromptConfig,
    *,
    params: CompletionParams = DEFAULT_PARAMS,
    threshold: float = REDUNDANCY_THRESHOLD,
) -> EnrichmentResult:
    """Attach 1..3 example children; extra cases are dropped with a warning,
    duplicates of existing or earlier cases are dropped with a warning."""
    target = m.node(node_id)
    ctx = node_context(m, node_id)
    bundle = build_examples_prompt(ctx, config)
    raw = provider.complete(bundle.messages(), params)
    forest, warnings = _parse_fragment(raw)

    if len(forest) > MAX_EXAMPLES:
        warnings.append(
            EnrichmentWarning(
                "TooManyExamples",
                f"{len(forest)} cases generated, keeping first {MAX_EXAMPLES}",
            )
        )
        forest = forest[:MAX_EXAMPLES]

    existing = [m.nodes[cid].text for cid in target.children]
    accepted: list[OutlineNode] = []
    for candidate in forest:
        if is_redundant(candidate.text, existing + [a.text for a in accepted], threshold):
            warnings.append(
                EnrichmentWarning(
                    "RedundantContent",
                    f"case dropped, repeats siblings: {candidate.text[:60]}",
                )
            )
        else:
            accepted.append(candidate)
    if not accepted:
        raise NoExamples("every generated case was redundant", raw=raw)

    attached = _attach_subtrees(m, node_id, accepted, NodeOrigin.EXAMPLE)
    return EnrichmentResult(attached, warnings, raw)


def _run_single(
    m: MindMap,
    node_id: NodeId,
    bundle,
    provider: Provider,
    kind: EnrichmentKind,
    params: CompletionParams,
    threshold: float,
) -> EnrichmentResult:
    target = m.node(node_id)
    raw = provider.complete(bundle.messages(), params)
    forest, warnings = _parse_fragment(raw)

    # Exactly one top-level node: extra roots become descendants of the first.
    head = forest[0]
    head.children.extend(forest[1:])

    siblings = [m.nodes[cid].text for cid in target.children]
    if is_redundant(head.text, siblings, threshold):
        raise RedundantContent(
            f"generated content repeats existing children of {node_id}", raw=raw
        )
    attached = _attach_subtrees(m, node_id, [head], ORIGIN_FOR_KIND[kind])
    return EnrichmentResult(attached, warnings, raw)


def _parse_fragment(raw: str) -> tuple[list[OutlineNode], list[Violation]]:
    try:
        frag = parse_outline(raw)
    except (_errors.EmptyInput, _errors.NoHeadings) as exc:
        raise GenerationMalformed(str(exc), raw=raw) from exc
    return fragment_to_forest(frag), list(frag.warnings)


def _attach_subtrees(
    m: MindMap,
    target_id: NodeId,
    subtrees: list[OutlineNode],
    origin: NodeOrigin,
) -> list[NodeId]:
    """Attach outline subtrees under the target as ONE composite command.

    Ids are minted up front so the AddChild commands can reference their
    parents before application; replay and redo then reuse the same ids.
    """
    commands: list[AddChild] = []

    def plan(parent_id: NodeId, subtree: OutlineNode) -> NodeId:
        node_id = m.mint_id()
        commands.append(
            AddChild(
                parent=parent_id, text=subtree.text, origin=origin, node_id=node_id
            )
        )
        for child in subtree.children:
            plan(node_id, child)
        return node_id

    attached = [plan(target_id, subtree) for subtree in subtrees]
    m.apply(Composite(commands))
    return attached
