import pytest
from hypothesis import given, settings, strategies as st

from scforge.actions import Assign, ClockReset, IncIndex, actions_text, apply_actions, check_actions
from scforge.dsl import parse_expr
from scforge.errors import DomainOverflow, TypeMismatch, UnboundVariable, EvalError
from scforge.expr import (And, Arith, BoolLit, ChanRecv, Cmp, EvalContext, EventRef, IntLit, Neg,
                          Not, Or, Trigger, Var, and_all, conjuncts, eval_expr, positive_channels,
                          to_text, typecheck)
from scforge.status import ExecutionTrace, SystemStatus, TAStatus, Valuation, VarDecl

KINDS = {"x": "int", "y": "int", "b": "bool", "ev": "event"}

ints = st.recursive(
    st.one_of(st.integers(-20, 20).map(IntLit), st.sampled_from([Var("x"), Var("y")])),
    lambda sub: st.one_of(
        st.builds(Arith, st.sampled_from(["+", "-", "*"]), sub, sub),
        st.builds(Neg, sub)),
    max_leaves=6)

bools = st.recursive(
    st.one_of(st.booleans().map(BoolLit), st.just(Var("b")), st.just(EventRef("ev")),
              st.builds(Cmp, st.sampled_from(["<", "<=", "==", ">=", ">", "!="]), ints, ints)),
    lambda sub: st.one_of(st.builds(And, sub, sub), st.builds(Or, sub, sub), st.builds(Not, sub)),
    max_leaves=8)

envs = st.fixed_dictionaries({"x": st.integers(-5, 5), "y": st.integers(-5, 5), "b": st.booleans()})


@given(bools)
def test_printed_expression_reads_back_equal(e):
    assert parse_expr(to_text(e), KINDS) == e


@given(ints)
def test_printed_int_expression_reads_back_equal(e):
    assert parse_expr(to_text(e), KINDS) == e


@given(bools, envs, st.booleans())
def test_evaluation_matches_python_reference(e, env, raised):
    ctx = EvalContext(events=frozenset({"ev"} if raised else ()))

    def ref(n):
        if isinstance(n, IntLit) or isinstance(n, BoolLit):
            return n.value
        if isinstance(n, Var):
            return env[n.name]
        if isinstance(n, EventRef):
            return raised
        if isinstance(n, Not):
            return not ref(n.operand)
        if isinstance(n, Neg):
            return -ref(n.operand)
        if isinstance(n, And):
            return ref(n.left) and ref(n.right)
        if isinstance(n, Or):
            return ref(n.left) or ref(n.right)
        if isinstance(n, Cmp):
            a, b = ref(n.left), ref(n.right)
            return {"<": a < b, "<=": a <= b, "==": a == b, ">=": a >= b, ">": a > b, "!=": a != b}[n.op]
        a, b = ref(n.left), ref(n.right)
        return {"+": a + b, "-": a - b, "*": a * b}[n.op]

    assert eval_expr(e, env, ctx) == ref(e)
    assert typecheck(e, KINDS) == "bool"


def test_division_truncates_toward_zero_and_rejects_zero():
    assert eval_expr(Arith("/", IntLit(-7), IntLit(2)), {}) == -3
    with pytest.raises(EvalError):
        eval_expr(Arith("/", IntLit(1), IntLit(0)), {})


def test_unbound_variable_and_type_errors():
    with pytest.raises(UnboundVariable):
        eval_expr(Var("z"), {})
    with pytest.raises(TypeMismatch):
        typecheck(And(IntLit(1), BoolLit(True)), KINDS)
    with pytest.raises(TypeMismatch):
        typecheck(Cmp("<", Var("b"), BoolLit(True)), KINDS)


def test_event_and_trigger_atoms_read_the_context():
    ctx = EvalContext(events=frozenset({"ev"}), triggers=frozenset({"Y.t.1"}))
    assert eval_expr(EventRef("ev"), {}, ctx) is True
    assert eval_expr(Trigger("after", 5, "Y.t.1"), {}, ctx) is True
    assert eval_expr(Trigger("after", 5, "Y.t.2"), {}, ctx) is False


def test_channel_atoms_on_the_automata_side():
    ctx = EvalContext(events=None, triggers=None, channels=frozenset({"a"}))
    assert eval_expr(ChanRecv("a"), {}, ctx) is True
    assert eval_expr(Not(ChanRecv("b")), {}, ctx) is True
    assert positive_channels(And(ChanRecv("a"), Not(ChanRecv("b")))) == {"a"}


def test_text_forms():
    assert to_text(Not(Cmp(">", Var("x"), IntLit(0)))) == "!(x > 0)"
    assert to_text(Not(BoolLit(True))) == "!true"
    assert to_text(Trigger("after", 5)) == "after 5s"
    assert to_text(Neg(IntLit(5))) == "-(5)"


@given(bools)
def test_and_all_rebuilds_conjuncts(e):
    assert and_all(conjuncts(e)) == e


@given(st.lists(bools.filter(lambda e: not isinstance(e, And)), min_size=1, max_size=5))
def test_conjuncts_splits_and_all(parts):
    assert conjuncts(and_all(parts)) == parts


# -- actions --------------------------------------------------------------------

DECLS = {"x": VarDecl("x", "int", 0, 0, 15), "b": VarDecl("b", "bool", False)}

assigns = st.builds(Assign, st.just("x"), st.one_of(
    st.integers(0, 15).map(IntLit),
    st.builds(Arith, st.just("-"), st.just(IntLit(15)), st.just(Var("x")))))


@given(st.lists(assigns, max_size=4), st.lists(assigns, max_size=4), st.integers(0, 15))
def test_action_sequences_compose(a, b, x0):
    start = Valuation({"x": x0, "b": False})
    assert apply_actions(a + b, start, DECLS) == apply_actions(b, apply_actions(a, start, DECLS), DECLS)


def test_actions_see_earlier_effects():
    seq = (Assign("x", IntLit(2)), Assign("x", Arith("+", Var("x"), IntLit(3))))
    assert apply_actions(seq, {"x": 0})["x"] == 5
    assert actions_text(seq) == "<x = 2; x = x + 3>"
    assert actions_text(()) == "NULL"


def test_domain_overflow_and_type_errors():
    with pytest.raises(DomainOverflow):
        apply_actions((Assign("x", IntLit(16)),), {"x": 0, "b": False}, DECLS)
    with pytest.raises(TypeMismatch):
        apply_actions((Assign("x", BoolLit(True)),), {"x": 0, "b": False}, DECLS)
    with pytest.raises(TypeMismatch):
        check_actions((Assign("x", BoolLit(True)),), {"x": "int"})
    with pytest.raises(TypeMismatch):
        check_actions((ClockReset("x"),), {"x": "int"})


@given(st.integers(1, 6), st.data())
def test_inc_cycles_through_one_to_n(n, data):
    v = data.draw(st.integers(1, n))
    inc = IncIndex("alpha", n)
    assert 1 <= inc.next(v) <= n
    seen, cur = [], v
    for _ in range(n):
        cur = inc.next(cur)
        seen.append(cur)
    assert sorted(seen) == list(range(1, n + 1))
    assert str(inc) == "Inc(alpha)"


# -- statuses -------------------------------------------------------------------

def test_valuation_is_hashable_and_immutable():
    v = Valuation({"x": 1, "b": True})
    assert hash(v) == hash(Valuation([("x", 1), ("b", True)]))
    assert v.updated({"x": 2})["x"] == 2 and v["x"] == 1
    assert v.restricted(["x"]) == Valuation({"x": 1})


def test_var_decl_domains():
    assert list(VarDecl("x", "int", 0, 0, 3).domain()) == [0, 1, 2, 3]
    assert not VarDecl("y", "int", 0).bounded
    assert VarDecl("b", "bool", False).domain() == (False, True)
    assert not VarDecl("x", "int", 0, 0, 3).contains(True)


def test_trace_dump_format():
    t = ExecutionTrace([SystemStatus(("a",), Valuation({"x": 0}))], [], [(0, 0)], ("Y",))
    t.append(SystemStatus(("b",), Valuation({"x": 1})), "t1", (0, 1))
    assert t.dump() == "0.0 | (a) | x=0 | INIT\n0.1 | (b) | x=1 | t1\n"
    ta = ExecutionTrace([TAStatus(("l",), Valuation({"x": 0}), Valuation({"c": 2}))], [], [(0, 0)])
    assert ta.dump() == "0.0 | (l) | x=0 | c=2 | INIT\n"
    with pytest.raises(ValueError):
        ExecutionTrace([])
