import itertools

import pytest

from chaosfilter import TreeError, format_tree, parse_tree
from chaosfilter.processtree import (
    ProcessTree,
    accepts,
    act,
    bounded_language,
    enabled_labels,
    from_doc,
    initial_state,
    labels,
    loop,
    par,
    seq,
    tau,
    to_doc,
    xor,
)


class TestConstruction:
    def test_operator_arity(self):
        with pytest.raises(TreeError):
            ProcessTree("seq", children=(act("a"),))
        with pytest.raises(TreeError):
            ProcessTree("loop", children=(act("a"),))
        with pytest.raises(TreeError):
            ProcessTree("act")

    def test_smart_constructors_collapse(self):
        assert xor(act("a")) == act("a")
        assert seq() == tau()

    def test_labels(self):
        tree = seq(act("a"), xor(act("b"), tau()), loop(act("c"), act("a")))
        assert labels(tree) == {"a", "b", "c"}


class TestTextFormat:
    def test_round_trip(self):
        text = "seq(a, xor(b, c), par(d, e), loop(f, g))"
        tree = parse_tree(text)
        assert format_tree(tree) == text
        assert parse_tree(format_tree(tree)) == tree

    def test_whitespace_insensitive(self):
        assert parse_tree(" seq( a,\n xor(b,c) ) ") == parse_tree("seq(a,xor(b,c))")

    def test_tau_leaf(self):
        assert parse_tree("xor(a, tau)") == xor(act("a"), tau())

    def test_loop_arity_enforced(self):
        with pytest.raises(TreeError):
            parse_tree("loop(a, b, c)")

    def test_trailing_tokens(self):
        with pytest.raises(TreeError):
            parse_tree("seq(a, b) c")

    def test_doc_round_trip(self):
        tree = parse_tree("seq(a, xor(b, tau), loop(c, d))")
        assert from_doc(to_doc(tree)) == tree


class TestSemantics:
    def test_sequence_language(self):
        tree = seq(act("a"), act("b"))
        assert bounded_language(tree, 4) == {("a", "b")}

    def test_xor_language(self):
        tree = xor(act("a"), act("b"))
        assert bounded_language(tree, 3) == {("a",), ("b",)}

    def test_par_language(self):
        tree = par(act("a"), act("b"), act("c"))
        assert bounded_language(tree, 3) == set(itertools.permutations(("a", "b", "c")))

    def test_loop_language(self):
        tree = loop(act("a"), act("b"))
        assert bounded_language(tree, 5) == {("a",), ("a", "b", "a"), ("a", "b", "a", "b", "a")}

    def test_nullable_branch(self):
        tree = seq(act("a"), xor(tau(), act("b")), act("c"))
        assert bounded_language(tree, 3) == {("a", "c"), ("a", "b", "c")}

    def test_accepts_matches_language(self):
        tree = seq(act("a"), par(act("b"), loop(act("c"), act("d"))))
        language = bounded_language(tree, 6)
        for trace in language:
            assert accepts(tree, trace)
        assert not accepts(tree, ("a",))
        assert not accepts(tree, ("b", "a", "c"))

    def test_enabled_labels_initial(self):
        tree = seq(xor(tau(), act("a")), act("b"))
        assert enabled_labels(tree, initial_state(tree)) == {"a", "b"}

    def test_flower_shape_accepts_repetitions(self):
        tree = loop(tau(), xor(act("a"), act("b")))
        for trace in (("a",), ("a", "a", "a"), ("b", "a", "b")):
            assert accepts(tree, trace)
        assert not accepts(tree, ("c",))

    def test_nested_loop_skip_chain(self):
        # Redo is silent, so the body can repeat with nothing in between.
        tree = loop(xor(tau(), act("a")), tau())
        assert accepts(tree, ("a", "a"))
        assert accepts(tree, ())
