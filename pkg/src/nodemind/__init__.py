"""nodemind: node-based mind map exploration engine driven by a chat LLM.

Generate a four-level map from a query, deepen any node with explanation /
examples / free exploration actions (ancestor context injected into every
prompt), edit the tree freely with full undo/redo, persist and export maps,
and serve the whole engine over HTTP.
"""

from .errors import EngineError
from .mindmap import (
    AddChild,
    Composite,
    DeleteSubtree,
    EditText,
    MindMap,
    MoveSubtree,
    Node,
    NodeOrigin,
    SetCollapsed,
    new_map,
)
from .outline import (
    OutlineFragment,
    OutlineNode,
    Violation,
    ViolationKind,
    fragment_to_tree,
    parse_outline,
    serialize_outline,
    validate_initial_map,
)
from .prompts import (
    NodeContext,
    PromptBundle,
    TemplateCategory,
    build_generate_prompt,
    default_config,
    load_config,
    route,
)
from .llm import (
    ChatMessage,
    CompletionParams,
    OpenAIChatClient,
    ProviderError,
    ScriptedProvider,
)
from .enrichment import (
    EnrichmentKind,
    EnrichmentResult,
    exemplify_node,
    explain_node,
    explore_node,
    generate_map,
    is_redundant,
    repetition_rate,
)
from .store import export_outline, load, save

__version__ = "0.1.0"

__all__ = [
    "AddChild",
    "ChatMessage",
    "CompletionParams",
    "Composite",
    "DeleteSubtree",
    "EditText",
    "EngineError",
    "EnrichmentKind",
    "EnrichmentResult",
    "MindMap",
    "MoveSubtree",
    "Node",
    "NodeContext",
    "NodeOrigin",
    "OpenAIChatClient",
    "OutlineFragment",
    "OutlineNode",
    "PromptBundle",
    "ProviderError",
    "ScriptedProvider",
    "SetCollapsed",
    "TemplateCategory",
    "Violation",
    "ViolationKind",
    "build_generate_prompt",
    "default_config",
    "exemplify_node",
    "explain_node",
    "explore_node",
    "export_outline",
    "fragment_to_tree",
    "generate_map",
    "is_redundant",
    "load",
    "load_config",
    "new_map",
    "parse_outline",
    "repetition_rate",
    "route",
    "save",
    "serialize_outline",
    "validate_initial_map",
]
