import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pctlmc.formula import (
    RESERVED_WORDS,
    And,
    Atom,
    BoundedEventually,
    BoundedUntil,
    Eventually,
    FalseFormula,
    FormulaSyntaxError,
    Implies,
    Next,
    Not,
    Or,
    Prob,
    TrueFormula,
    Until,
    atom_names,
    desugar,
    parse,
    pretty,
)


class TestParse:
    def test_bounded_until_formula(self):
        assert parse("P>=0.9[ safe U<=5 target ]") == Prob(
            ">=", 0.9, BoundedUntil(Atom("safe"), 5, Atom("target"))
        )

    def test_true_keyword(self):
        assert parse("true") == TrueFormula()
        assert parse("false") == FalseFormula()

    def test_not_binds_tighter_than_and(self):
        assert parse("P<0.5[ X a ] & !b") == And(
            Prob("<", 0.5, Next(Atom("a"))), Not(Atom("b"))
        )

    def test_and_binds_tighter_than_or(self):
        assert parse("a | b & c") == Or(Atom("a"), And(Atom("b"), Atom("c")))

    def test_implies_right_associative_and_loosest(self):
        assert parse("a -> b -> c") == Implies(Atom("a"), Implies(Atom("b"), Atom("c")))
        assert parse("a | b -> c") == Implies(Or(Atom("a"), Atom("b")), Atom("c"))

    def test_parentheses_override(self):
        assert parse("(a | b) & c") == And(Or(Atom("a"), Atom("b")), Atom("c"))

    def test_whitespace_insensitive(self):
        spaced = parse(" P >= 0.9 [ safe U <= 5 target ] ")
        packed = parse("P>=0.9[safe U<=5 target]")
        assert spaced == packed

    def test_unbounded_until_and_next(self):
        assert parse("P<1[a U b]") == Prob("<", 1.0, Until(Atom("a"), Atom("b")))
        assert parse("P>0[X a]") == Prob(">", 0.0, Next(Atom("a")))

    def test_eventually_forms(self):
        assert parse("P>=0.5[F a]") == Prob(">=", 0.5, Eventually(Atom("a")))
        assert parse("P>=0.5[F<=3 a]") == Prob(">=", 0.5, BoundedEventually(3, Atom("a")))

    def test_nested_probability_operator(self):
        f = parse("P>=0.9[ safe U<=5 P>=0.5[X target] ]")
        inner = Prob(">=", 0.5, Next(Atom("target")))
        assert f == Prob(">=", 0.9, BoundedUntil(Atom("safe"), 5, inner))


class TestParseErrors:
    def test_syntax_error_carries_offset_and_expectations(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("P>=[x]")
        assert exc.value.offset == 3
        assert "probability" in exc.value.expected

    def test_probability_above_one_rejected(self):
        with pytest.raises(FormulaSyntaxError, match=r"outside \[0, 1\]"):
            parse("P>=1.5[X a]")

    def test_probability_never_clamped(self):
        for text in ("P>=2[X a]", "P<1.0001[X a]", "P>100[a U b]"):
            with pytest.raises(FormulaSyntaxError):
                parse(text)

    def test_negative_bound_rejected(self):
        with pytest.raises(FormulaSyntaxError, match="nonnegative integer"):
            parse("P>=0.9[a U<=-1 b]")

    def test_fractional_bound_rejected(self):
        with pytest.raises(FormulaSyntaxError, match="nonnegative integer"):
            parse("P>=0.9[a U<=2.5 b]")

    def test_trailing_input(self):
        with pytest.raises(FormulaSyntaxError, match="trailing"):
            parse("a b")

    def test_unbalanced_parenthesis(self):
        with pytest.raises(FormulaSyntaxError):
            parse("(a & b")

    def test_empty_input(self):
        with pytest.raises(FormulaSyntaxError):
            parse("")

    def test_reserved_words_are_not_atoms(self):
        with pytest.raises(FormulaSyntaxError):
            parse("X & a")
        with pytest.raises(ValueError):
            Atom("U")

    def test_unexpected_character(self):
        with pytest.raises(FormulaSyntaxError, match="unexpected character"):
            parse("a @ b")


class TestNodeInvariants:
    def test_prob_bound_validated(self):
        with pytest.raises(ValueError):
            Prob(">=", 1.5, Next(Atom("a")))
        with pytest.raises(ValueError):
            Prob(">=", -0.1, Next(Atom("a")))
        with pytest.raises(ValueError):
            Prob("==", 0.5, Next(Atom("a")))

    def test_until_bound_validated(self):
        with pytest.raises(ValueError):
            BoundedUntil(Atom("a"), -1, Atom("b"))
        with pytest.raises(ValueError):
            BoundedEventually(-2, Atom("a"))


class TestPretty:
    def test_canonical_forms(self):
        assert pretty(parse("P>=0.9[safe U<=5 target]")) == "P>=0.9[safe U<=5 target]"
        assert pretty(parse("a & b | c")) == "((a & b) | c)"
        assert pretty(parse("!a -> P<0.5[X b]")) == "(!a -> P<0.5[X b])"
        assert pretty(parse("P>0[F<=3 a]")) == "P>0.0[F<=3 a]"


class TestDesugar:
    def test_eventually_becomes_until_from_true(self):
        f = Prob(">=", 0.5, Eventually(Atom("a")))
        assert desugar(f) == Prob(">=", 0.5, Until(TrueFormula(), Atom("a")))

    def test_bounded_eventually_becomes_bounded_until(self):
        f = Prob("<", 0.2, BoundedEventually(4, Atom("a")))
        assert desugar(f) == Prob("<", 0.2, BoundedUntil(TrueFormula(), 4, Atom("a")))

    def test_no_sugar_is_identity(self):
        f = Atom("a")
        assert desugar(f) == f

    def test_booleans_are_kept_as_set_operations(self):
        f = Implies(Or(Atom("a"), Atom("b")), Not(Atom("c")))
        assert desugar(f) == f


class TestAtomNames:
    def test_collects_through_path_formulas(self):
        f = Prob(">=", 0.9, BoundedUntil(Atom("safe"), 5, Atom("target")))
        assert atom_names(f) == {"safe", "target"}

    def test_true_has_none(self):
        assert atom_names(TrueFormula()) == set()

    def test_duplicates_collapse(self):
        assert atom_names(And(Atom("a"), Not(Atom("a")))) == {"a"}


# ---------------------------------------------------------------------------
# Property tests
# ---------------------------------------------------------------------------

_idents = st.from_regex(r"[a-z][a-z0-9_]{0,5}", fullmatch=True).filter(
    lambda s: s not in RESERVED_WORDS
)
_probs = st.integers(0, 1000).map(lambda n: n / 1000)
_rels = st.sampled_from(["<", "<=", ">", ">="])
_bounds = st.integers(0, 30)

_state = st.deferred(
    lambda: st.one_of(
        st.builds(TrueFormula),
        st.builds(FalseFormula),
        st.builds(Atom, _idents),
        st.builds(Not, _state),
        st.builds(And, _state, _state),
        st.builds(Or, _state, _state),
        st.builds(Implies, _state, _state),
        st.builds(Prob, _rels, _probs, _path),
    )
)
_path = st.deferred(
    lambda: st.one_of(
        st.builds(Next, _state),
        st.builds(BoundedUntil, _state, _bounds, _state),
        st.builds(Until, _state, _state),
        st.builds(BoundedEventually, _bounds, _state),
        st.builds(Eventually, _state),
    )
)


@settings(max_examples=200)
@given(_state)
def test_pretty_parse_round_trip(f):
    assert parse(pretty(f)) == f


@settings(max_examples=200)
@given(_state)
def test_desugar_idempotent(f):
    once = desugar(f)
    assert desugar(once) == once


@settings(max_examples=100)
@given(_state)
def test_desugar_output_has_no_sugar(f):
    def assert_no_sugar(node):
        assert not isinstance(node, (Eventually, BoundedEventually))
        for attr in ("child", "left", "right", "path"):
            if hasattr(node, attr):
                assert_no_sugar(getattr(node, attr))

    assert_no_sugar(desugar(f))
