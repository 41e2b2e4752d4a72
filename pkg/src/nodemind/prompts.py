"""Prompt construction: keyword routing plus template substitution.

Templates and the routing table live in a versioned YAML config file (the
package ships one under ``data/prompt_config.yaml``); operators may point the
engine at an edited copy to tune prompts or extend keyword lists. Placeholder
substitution is plain string replacement of ``{query}``,
``{parent_information}``, ``{node_information}`` and ``{question}``, so
braces inside user text are never interpreted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import yaml

from .errors import ConfigError, EmptyQuery, EmptyQuestion
from .llm import ChatMessage

CONFIG_VERSION = 1


class TemplateCategory(enum.Enum):
    HUMANITIES_TOPIC = "humanities_topic"
    SCIENCE_TOPIC = "science_topic"
    BUSINESS_TOPIC = "business_topic"
    CREATIVE_TOPIC = "creative_topic"
    APP_RECOMMENDATION = "app_recommendation"
    CITY_DESCRIPTION = "city_description"
    FALLBACK = "fallback"


@dataclass(frozen=True)
class CategoryRule:
    category: TemplateCategory
    keywords: tuple[str, ...]
    template: str

    def matches(self, query: str) -> bool:
        if not self.keywords:
            return True  # catch-all
        folded = query.casefold()
        return any(k.casefold() in folded for k in self.keywords)


@dataclass(frozen=True)
class RoutingTable:
    """Ordered category rules; the last rule must be the catch-all."""

    rules: tuple[CategoryRule, ...]

    def route(self, query: str) -> CategoryRule:
        for rule in self.rules:
            if rule.matches(query):
                return rule
        return self.rules[-1]


@dataclass(frozen=True)
class PromptConfig:
    preamble: str
    routing: RoutingTable
    explain_template: str
    examples_template: str
    question_template: str


@dataclass(frozen=True)
class PromptBundle:
    """System/user message pair ready to send to a provider."""

    system: str
    user: str = ""
    category: TemplateCategory | None = None

    def messages(self) -> list[ChatMessage]:
        msgs = [ChatMessage("system", self.system)]
        if self.user:
            msgs.append(ChatMessage("user", self.user))
        return msgs


@dataclass(frozen=True)
class NodeContext:
    """Background injected into node-level prompts.

    ``parent_information`` is the ancestor chain from the root down to the
    node's parent, joined by " > "; it is the empty string when the target is
    the root itself. ``node_information`` is the target node's own text.
    """

    parent_information: str
    node_information: str

    def __post_init__(self):
        if not self.node_information:
            raise ValueError("node_information is empty")
        if "\n" in self.parent_information:
            raise ValueError("parent_information must be a single line")


# --- config loading ----------------------------------------------------------


def load_config(path: str | Path | None = None) -> PromptConfig:
    """Load a prompt config file; with no path, load the packaged defaults."""
    if path is None:
        text = (
            resources.files("nodemind")
            .joinpath("data/prompt_config.yaml")
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    if data.get("version") != CONFIG_VERSION:
        raise ConfigError(
            f"unsupported config version {data.get('version')!r}, "
            f"expected {CONFIG_VERSION}"
        )
    try:
        generation = data["generation"]
        preamble = generation["preamble"]
        raw_rules = generation["categories"]
        explain_template = data["explain"]["template"]
        examples_template = data["examples"]["template"]
        question_template = data["question"]["template"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"config is missing section: {exc}") from exc

    rules = []
    for raw in raw_rules:
        try:
            category = TemplateCategory(raw["name"])
        except ValueError as exc:
            raise ConfigError(f"unknown category {raw.get('name')!r}") from exc
        rules.append(
            CategoryRule(category, tuple(raw.get("keywords", [])), raw["template"])
        )
    if not rules or rules[-1].keywords:
        raise ConfigError("the last category must have no keywords (catch-all)")
    return PromptConfig(
        preamble=preamble,
        routing=RoutingTable(tuple(rules)),
        explain_template=explain_template,
        examples_template=examples_template,
        question_template=question_template,
    )


@lru_cache(maxsize=1)
def default_config() -> PromptConfig:
    return load_config()


# --- operations ---------------------------------------------------------------


def route(query: str, table: RoutingTable) -> TemplateCategory:
    """First category whose keywords match the query, Fallback otherwise."""
    if not query.strip():
        raise EmptyQuery("query is empty")
    return table.route(query).category


def build_generate_prompt(query: str, config: PromptConfig) -> PromptBundle:
    """Generation prompt: format preamble plus the routed topic template."""
    if not query.strip():
        raise EmptyQuery("query is empty")
    rule = config.routing.route(query)
    system = f"{config.preamble}\n\n{rule.template.replace('{query}', query)}"
    return PromptBundle(system=system, user=query, category=rule.category)


def build_explain_prompt(ctx: NodeContext, config: PromptConfig) -> PromptBundle:
    return PromptBundle(system=_fill(config.explain_template, ctx))


def build_examples_prompt(ctx: NodeContext, config: PromptConfig) -> PromptBundle:
    return PromptBundle(system=_fill(config.examples_template, ctx))


def build_custom_question_prompt(
    ctx: NodeContext, question: str, config: PromptConfig
) -> PromptBundle:
    if not question.strip():
        raise EmptyQuestion("question is empty")
    system = _fill(config.question_template, ctx).replace("{question}", question)
    return PromptBundle(system=system, user=question)


def _fill(template: str, ctx: NodeContext) -> str:
    return template.replace(
        "{parent_information}", ctx.parent_information
    ).replace("{node_information}", ctx.node_information)
