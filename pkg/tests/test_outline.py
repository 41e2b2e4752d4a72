import random

import pytest
from hypothesis import given, settings, strategies as st

from nodemind.errors import EmptyInput, MultipleRoots, NoHeadings, OrphanEntry
from nodemind.outline import (
    OutlineLimits,
    OutlineNode,
    ViolationKind,
    fragment_to_forest,
    fragment_to_tree,
    parse_outline,
    serialize_outline,
    validate_initial_map,
)
from treegen import flatten_outline, random_outline_tree


class TestParseOutline:
    def test_four_level_chain(self):
        frag = parse_outline("# A\n## B\n### C\n#### D is a full sentence here.")
        assert [e.depth for e in frag.entries] == [1, 2, 3, 4]
        assert frag.entries[3].text == "D is a full sentence here."

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            parse_outline("")
        with pytest.raises(EmptyInput):
            parse_outline("   \n  ")

    def test_no_headings(self):
        with pytest.raises(NoHeadings):
            parse_outline("just prose\nwith no structure")

    def test_depth_jump_clamped(self):
        frag = parse_outline("# A\n### C")
        assert [(e.depth, e.text) for e in frag.entries] == [(1, "A"), (2, "C")]
        assert [w.kind for w in frag.warnings] == [ViolationKind.DEPTH_JUMP_CLAMPED]

    def test_clamp_tracks_clamped_depth(self):
        # second jump measured against the already-clamped predecessor
        frag = parse_outline("# A\n### B\n#### C")
        assert [e.depth for e in frag.entries] == [1, 2, 3]

    def test_loose_line_joins_previous(self):
        frag = parse_outline("# A\ncontinues here")
        assert frag.entries[0].text == "A continues here"
        assert frag.warnings[0].kind == ViolationKind.LOOSE_LINE_JOINED
        assert frag.warnings[0].location == 0

    def test_loose_line_before_first_heading_dropped(self):
        frag = parse_outline("preface text\n# A")
        assert [(e.depth, e.text) for e in frag.entries] == [(1, "A")]
        assert frag.warnings[0].kind == ViolationKind.LOOSE_LINE_JOINED

    def test_depth_equals_hash_count(self):
        frag = parse_outline("# a\n## b\n### c\n## d")
        for entry, line in zip(frag.entries, ["# a", "## b", "### c", "## d"]):
            assert entry.depth == len(line) - len(line.lstrip("#"))

    def test_blank_and_hash_only_lines_skipped(self):
        frag = parse_outline("# A\n\n##   \n## B")
        assert [(e.depth, e.text) for e in frag.entries] == [(1, "A"), (2, "B")]


class TestFragmentToTree:
    def test_two_children(self):
        tree = fragment_to_tree(parse_outline("# A\n## B\n## C"))
        assert tree.text == "A"
        assert [c.text for c in tree.children] == ["B", "C"]

    def test_orphan_entry(self):
        with pytest.raises(OrphanEntry):
            fragment_to_tree(parse_outline("## B"))

    def test_multiple_roots(self):
        with pytest.raises(MultipleRoots):
            fragment_to_tree(parse_outline("# A\n# B"))

    def test_forest_allows_multiple_roots(self):
        roots = fragment_to_forest(parse_outline("# A\n## B\n# C"))
        assert [r.text for r in roots] == ["A", "C"]
        assert roots[0].children[0].text == "B"

    def test_forest_preserves_relative_structure_when_starting_deep(self):
        roots = fragment_to_forest(parse_outline("### A\n#### B\n### C"))
        assert [r.text for r in roots] == ["A", "C"]
        assert roots[0].children[0].text == "B"


class TestSerialize:
    def test_single_root(self):
        assert serialize_outline(OutlineNode(1, "A")) == "# A"

    def test_four_level_chain(self):
        tree = OutlineNode(
            1, "a", [OutlineNode(2, "b", [OutlineNode(3, "c", [OutlineNode(4, "dd")])])]
        )
        assert serialize_outline(tree) == "# a\n## b\n### c\n#### dd"

    def test_round_trip_seeded(self):
        rng = random.Random(7)
        for _ in range(50):
            tree = random_outline_tree(rng)
            reparsed = fragment_to_tree(parse_outline(serialize_outline(tree)))
            assert flatten_outline(reparsed) == flatten_outline(tree)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_round_trip_property(self, seed):
        tree = random_outline_tree(random.Random(seed))
        frag = parse_outline(serialize_outline(tree))
        assert not frag.warnings
        assert [(e.depth, e.text) for e in frag.entries] == flatten_outline(tree)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_clamp_monotone(self, seed):
        # arbitrary '#' soup never yields a +2 jump after parsing
        rng = random.Random(seed)
        lines = [
            "#" * rng.randint(1, 8) + " x" + str(rng.randint(0, 9))
            for _ in range(rng.randint(1, 20))
        ]
        frag = parse_outline("\n".join(lines))
        for previous, current in zip(frag.entries, frag.entries[1:]):
            assert current.depth <= previous.depth + 1


class TestValidateInitialMap:
    def test_five_level_chain_exceeds_depth(self):
        tree = fragment_to_tree(
            parse_outline("# a\n## b\n### c\n#### d\n##### this leaf is deep enough")
        )
        kinds = {v.kind for v in validate_initial_map(tree)}
        assert ViolationKind.MAX_DEPTH_EXCEEDED in kinds

    def test_lonely_leaf(self):
        tree = fragment_to_tree(parse_outline("# a\n## only child sentence here"))
        kinds = {v.kind for v in validate_initial_map(tree)}
        assert ViolationKind.LEAF_WITHOUT_SIBLING in kinds

    def test_short_leaf(self):
        tree = fragment_to_tree(parse_outline("# a\n## short\n## also short"))
        violations = validate_initial_map(tree)
        assert [v.kind for v in violations].count(ViolationKind.LEAF_TOO_SHORT) == 2

    def test_small_totals_pass(self):
        # 2 + 2 = 4 characters, far below the 1000 limit
        tree = OutlineNode(1, "ab", [OutlineNode(2, "cd" * 10), OutlineNode(2, "ef" * 10)])
        kinds = {v.kind for v in validate_initial_map(tree)}
        assert ViolationKind.TOTAL_LENGTH_EXCEEDED not in kinds

    def test_total_length_flagged_once(self):
        children = [
            OutlineNode(2, "x" * 120 + f" tail {i}") for i in range(10)
        ]
        tree = OutlineNode(1, "root topic", children)
        violations = validate_initial_map(tree)
        totals = [v for v in violations if v.kind == ViolationKind.TOTAL_LENGTH_EXCEEDED]
        assert len(totals) == 1

    def test_custom_limits(self):
        tree = fragment_to_tree(parse_outline("# a\n## bb\n## cc"))
        limits = OutlineLimits(max_depth=1, min_leaf_chars=1, max_total_chars=10_000)
        kinds = [v.kind for v in validate_initial_map(tree, limits)]
        assert kinds.count(ViolationKind.MAX_DEPTH_EXCEEDED) == 2

    def test_validation_is_pure(self):
        tree = fragment_to_tree(parse_outline("# a\n## bb\n## cc"))
        before = flatten_outline(tree)
        first = validate_initial_map(tree)
        second = validate_initial_map(tree)
        assert flatten_outline(tree) == before
        assert first == second
