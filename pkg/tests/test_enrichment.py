import random

import pytest

from nodemind.errors import (
    EmptyQuestion,
    GenerationMalformed,
    NoExamples,
    RedundantContent,
    UnknownNode,
)
from nodemind.llm import ScriptedProvider
from nodemind.mindmap import NodeOrigin
from nodemind.enrichment import (
    EnrichmentWarning,
    exemplify_node,
    explain_node,
    explore_node,
    generate_map,
    is_redundant,
    node_context,
    repetition_rate,
)
from nodemind.outline import ViolationKind
from conftest import DALI_EXPLANATION, SURREALISM_OUTLINE
from treegen import snapshot


def find_id(m, text):
    for node in m.walk():
        if node.text == text:
            return node.id
    raise AssertionError(f"no node with text {text!r}")


def surrealism_map(config):
    return generate_map(
        "Surrealism", ScriptedProvider([SURREALISM_OUTLINE]), config
    )


class TestRepetitionRate:
    def test_disjoint(self):
        assert repetition_rate("alpha beta", ["gamma delta"]) == 0.0

    def test_identical(self):
        assert repetition_rate("alpha beta", ["alpha beta"]) == 1.0

    def test_half_overlap(self):
        # 2 of 4 candidate tokens appear in the reference
        assert repetition_rate("alpha beta gamma delta", ["alpha beta"]) == 0.5

    def test_no_references(self):
        assert repetition_rate("anything at all", []) == 0.0

    def test_case_insensitive_and_multiplicity(self):
        # all three candidate tokens (with the repeat) hit the reference set
        assert repetition_rate("Alpha alpha beta", ["ALPHA BETA"]) == 1.0

    def test_punctuation_ignored(self):
        assert repetition_rate("alpha, beta!", ["alpha beta"]) == 1.0

    def test_matches_brute_force_oracle(self):
        rng = random.Random(3)
        vocabulary = [f"tok{i}" for i in range(30)]
        for _ in range(100):
            candidate_tokens = rng.choices(vocabulary, k=rng.randint(1, 12))
            references = [
                rng.choices(vocabulary, k=rng.randint(1, 12))
                for _ in range(rng.randint(0, 3))
            ]
            union = set()
            for tokens in references:
                union.update(tokens)
            expected = (
                sum(t in union for t in candidate_tokens) / len(candidate_tokens)
                if references
                else 0.0
            )
            got = repetition_rate(
                " ".join(candidate_tokens), [" ".join(r) for r in references]
            )
            assert got == expected


class TestIsRedundant:
    def test_no_siblings(self):
        assert is_redundant("fresh text", []) is False

    def test_exact_duplicate(self):
        assert is_redundant("same words here", ["same words here"]) is True

    def test_forty_percent_overlap_passes(self):
        # 2 of 5 tokens shared: rate 0.4 < 0.5
        candidate = "alpha beta gamma delta epsilon"
        assert is_redundant(candidate, ["alpha beta zeta"]) is False

    def test_threshold_bounds(self):
        with pytest.raises(ValueError):
            is_redundant("x", [], threshold=0.0)


class TestGenerateMap:
    def test_surrealism_four_levels(self, config):
        m = surrealism_map(config)
        assert max(node.depth for node in m.walk()) == 4
        root = m.nodes[m.root]
        assert root.text == "Surrealism"
        assert len(root.children) >= 2
        assert not m.history.undo_stack
        assert m.warnings == []
        origins = {node.origin for node in m.walk() if node.id != m.root}
        assert origins == {NodeOrigin.GENERATED}

    def test_colors_assigned(self, config):
        m = surrealism_map(config)
        root = m.nodes[m.root]
        indices = [m.nodes[c].color_index for c in root.children]
        assert indices == list(range(len(root.children)))

    def test_no_hash_response(self, config):
        provider = ScriptedProvider(["it is all prose, no structure"])
        with pytest.raises(GenerationMalformed) as excinfo:
            generate_map("Surrealism", provider, config)
        assert "prose" in excinfo.value.raw

    def test_five_level_outline_warns(self, config):
        outline = (
            "# t\n## a\n### b\n#### c\n##### this goes one level too deep\n"
            "##### and so does this one\n## second branch to have siblings"
        )
        m = generate_map("t", ScriptedProvider([outline]), config)
        kinds = {
            w.kind for w in m.warnings if hasattr(w, "kind")
        }
        assert ViolationKind.MAX_DEPTH_EXCEEDED in kinds
        assert max(node.depth for node in m.walk()) == 5

    def test_multiple_roots_malformed(self, config):
        provider = ScriptedProvider(["# one\n# two"])
        with pytest.raises(GenerationMalformed):
            generate_map("t", provider, config)


class TestExplain:
    def test_attaches_one_child_at_depth_plus_one(self, config):
        m = surrealism_map(config)
        dali = find_id(m, "Salvador Dali")
        depth = m.nodes[dali].depth
        result = explain_node(m, dali, ScriptedProvider([DALI_EXPLANATION]), config)
        assert len(result.attached_ids) == 1
        child = m.nodes[result.attached_ids[0]]
        assert child.depth == depth + 1
        assert child.origin is NodeOrigin.EXPLANATION
        assert child.parent == dali

    def test_rebases_absolute_hash_counts(self, config):
        # response claims depth 4 via '####' but the node is depth 2
        m = surrealism_map(config)
        target = find_id(m, "Origins")
        provider = ScriptedProvider(["#### overly deep heading from the model"])
        result = explain_node(m, target, provider, config)
        assert m.nodes[result.attached_ids[0]].depth == 3

    def test_extra_entries_become_descendants(self, config):
        m = surrealism_map(config)
        target = find_id(m, "Origins")
        provider = ScriptedProvider(["# head entry text\n## detail one\n## detail two"])
        result = explain_node(m, target, provider, config)
        assert len(result.attached_ids) == 1
        head = m.nodes[result.attached_ids[0]]
        assert len(head.children) == 2
        assert all(m.nodes[c].depth == head.depth + 1 for c in head.children)

    def test_extra_top_level_entries_grafted_under_first(self, config):
        m = surrealism_map(config)
        target = find_id(m, "Origins")
        provider = ScriptedProvider(["# first entry here\n# stray second root"])
        result = explain_node(m, target, provider, config)
        assert len(result.attached_ids) == 1
        head = m.nodes[result.attached_ids[0]]
        assert [m.nodes[c].text for c in head.children] == ["stray second root"]

    def test_duplicate_of_existing_child_rejected(self, config):
        m = surrealism_map(config)
        dali = find_id(m, "Salvador Dali")
        existing = m.nodes[m.nodes[dali].children[0]].text
        before = snapshot(m)
        with pytest.raises(RedundantContent):
            explain_node(m, dali, ScriptedProvider([f"# {existing}"]), config)
        assert snapshot(m) == before

    def test_undo_reverts_whole_action(self, config):
        m = surrealism_map(config)
        dali = find_id(m, "Salvador Dali")
        before = snapshot(m)
        provider = ScriptedProvider(["# head entry text\n## detail one\n## detail two"])
        explain_node(m, dali, provider, config)
        m.undo()
        assert snapshot(m) == before

    def test_unknown_node(self, config):
        m = surrealism_map(config)
        with pytest.raises(UnknownNode):
            explain_node(m, "zz99", ScriptedProvider(["# x y z"]), config)

    def test_prompt_carries_ancestor_chain(self, config):
        m = surrealism_map(config)
        dali = find_id(m, "Salvador Dali")
        provider = ScriptedProvider([DALI_EXPLANATION])
        explain_node(m, dali, provider, config)
        sent = provider.calls[0][0].content
        assert "Surrealism > Major artists" in sent
        assert "Salvador Dali" in sent

    def test_malformed_fragment(self, config):
        m = surrealism_map(config)
        dali = find_id(m, "Salvador Dali")
        with pytest.raises(GenerationMalformed):
            explain_node(m, dali, ScriptedProvider(["no headings at all"]), config)


class TestExamples:
    CASES_3 = (
        "# Case one speaks of manifesto writing.\n"
        "# Case two covers collage experiments.\n"
        "# Case three follows postwar painters."
    )

    def test_three_cases_attached(self, config):
        m = surrealism_map(config)
        target = find_id(m, "Major artists")
        result = exemplify_node(m, target, ScriptedProvider([self.CASES_3]), config)
        assert len(result.attached_ids) == 3
        for nid in result.attached_ids:
            node = m.nodes[nid]
            assert node.origin is NodeOrigin.EXAMPLE
            assert node.depth == m.nodes[target].depth + 1

    def test_four_cases_truncated_with_warning(self, config):
        m = surrealism_map(config)
        target = find_id(m, "Major artists")
        script = self.CASES_3 + "\n# Case four goes beyond the allowed count."
        result = exemplify_node(m, target, ScriptedProvider([script]), config)
        assert len(result.attached_ids) == 3
        kinds = [w.kind for w in result.warnings if isinstance(w, EnrichmentWarning)]
        assert "TooManyExamples" in kinds

    def test_duplicate_within_batch_dropped(self, config):
        m = surrealism_map(config)
        target = find_id(m, "Major artists")
        script = (
            "# Unique case describing automatic writing sessions.\n"
            "# Unique case describing automatic writing sessions."
        )
        result = exemplify_node(m, target, ScriptedProvider([script]), config)
        assert len(result.attached_ids) == 1
        kinds = [w.kind for w in result.warnings if isinstance(w, EnrichmentWarning)]
        assert "RedundantContent" in kinds

    def test_all_duplicates_of_existing_children(self, config):
        m = surrealism_map(config)
        target = find_id(m, "Major artists")
        existing = [m.nodes[c].text for c in m.nodes[target].children]
        script = "\n".join(f"# {text}" for text in existing)
        before = snapshot(m)
        with pytest.raises(NoExamples):
            exemplify_node(m, target, ScriptedProvider([script]), config)
        assert snapshot(m) == before

    def test_single_undo_reverts_batch(self, config):
        m = surrealism_map(config)
        target = find_id(m, "Major artists")
        before = snapshot(m)
        exemplify_node(m, target, ScriptedProvider([self.CASES_3]), config)
        m.undo()
        assert snapshot(m) == before


class TestExplore:
    def test_question_answered_as_single_child(self, config):
        m = surrealism_map(config)
        ernst = find_id(m, "Max Ernst")
        provider = ScriptedProvider(
            ["# A German-born artist bridging Dada and the dream painters."]
        )
        result = explore_node(m, ernst, "Who is Max Ernst?", provider, config)
        assert len(result.attached_ids) == 1
        child = m.nodes[result.attached_ids[0]]
        assert child.origin is NodeOrigin.EXPLORATION
        assert "German-born" in child.text
        sent = provider.calls[0][0].content
        assert "Who is Max Ernst?" in sent

    def test_empty_question(self, config):
        m = surrealism_map(config)
        ernst = find_id(m, "Max Ernst")
        with pytest.raises(EmptyQuestion):
            explore_node(m, ernst, "  ", ScriptedProvider(["# x y"]), config)

    def test_undo_removes_answer(self, config):
        m = surrealism_map(config)
        ernst = find_id(m, "Max Ernst")
        before = snapshot(m)
        provider = ScriptedProvider(["# A short answer that is clearly new text."])
        explore_node(m, ernst, "Who is Max Ernst?", provider, config)
        m.undo()
        assert snapshot(m) == before


class TestNodeContext:
    def test_root_has_blank_parent_info(self, config):
        m = surrealism_map(config)
        ctx = node_context(m, m.root)
        assert ctx.parent_information == ""
        assert ctx.node_information == "Surrealism"

    def test_chain_joined_with_angle_separator(self, config):
        m = surrealism_map(config)
        leaf = find_id(m, "Breton framed it as a revolution of the mind.")
        ctx = node_context(m, leaf)
        assert ctx.parent_information == "Surrealism > Origins > Revolution of the mind"
