import random

import pytest
from hypothesis import given, settings, strategies as st

from scforge.actions import Assign
from scforge.dsl import parse_network, print_network, tokenize, validate
from scforge.errors import DSLError
from scforge.expr import IntLit, Trigger, walk
from scforge.fuzz import random_network
from scforge.statechart import StatechartNetwork

from conftest import fixture_text


def codes(text):
    with pytest.raises(DSLError) as info:
        parse_network(text)
    return [d.code for d in info.value.diagnostics], info.value.diagnostics


def test_two_charts_structure(two_charts):
    assert [c.name for c in two_charts.charts] == ["Y1", "Y2"]
    assert [c.priority for c in two_charts.charts] == [1, 2]
    y1 = two_charts.chart("Y1")
    assert y1.state("s1").entry == (Assign("x", IntLit(5)),)
    assert y1.state("s2").exit == (Assign("x", IntLit(2)),)
    assert [t.id for t in y1.outgoing("s2")] == ["t3", "t4"]
    assert [(t.id, t.priority) for t in y1.transitions] == [("t1", 1), ("t2", 1), ("t3", 1), ("t4", 2)]
    assert two_charts.events == ("eventA",)
    assert two_charts.decls["x"].domain() == range(0, 16)
    assert validate(two_charts) == []


def test_triggers_get_occurrence_ids(two_charts):
    ids = [s.trigger.tid for s in two_charts.trigger_sites]
    assert ids == ["Y2.t6.1", "Y2.t7.1"]
    assert [s.trigger.kind for s in two_charts.trigger_sites] == ["after", "every"]


def test_print_then_parse_is_identity(two_charts, cardiac):
    for net in (two_charts, cardiac):
        text = print_network(net)
        again = parse_network(text)
        assert again == net
        assert print_network(again) == text


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_generated_networks_round_trip(seed):
    net = random_network(random.Random(seed))
    assert validate(net) == []
    assert parse_network(print_network(net)) == net


def test_syntax_error_has_position():
    found, diags = codes("var x : int[0..3] = 0\nstatechart A priority 1 { }")
    assert "SYNTAX_ERROR" in found
    assert diags[0].line >= 1 and diags[0].col >= 1
    assert str(diags[0]).startswith(f"{diags[0].line}:{diags[0].col}: ")


def test_empty_document_is_rejected():
    found, _ = codes("// nothing here\n")
    assert found == ["SYNTAX_ERROR"]


def test_unknown_state_and_variable():
    found, _ = codes("""
        var x : int[0..3] = 0;
        statechart A priority 1 {
            state s0; state s1; initial s0;
            transition t0: s0 -> s1 when true;
            transition t1: s1 -> s9 when y > 0;
        }""")
    assert "UNKNOWN_STATE" in found and "UNKNOWN_VARIABLE" in found


def test_duplicate_transition_priority():
    found, _ = codes("""
        var x : int[0..3] = 0;
        statechart A priority 1 {
            state s0; state s1; initial s0;
            transition t0: s0 -> s1 when true;
            transition t1: s1 -> s0 priority 1 when x > 0;
            transition t2: s1 -> s1 priority 1 when x > 1;
        }""")
    assert "DUPLICATE_NAME" in found


def test_type_mismatch():
    found, _ = codes("""
        var x : int[0..3] = 0;
        statechart A priority 1 {
            state s0; state s1; initial s0;
            transition t0: s0 -> s1 when true;
            transition t1: s1 -> s0 when x + 1;
        }""")
    assert "TYPE_MISMATCH" in found


def test_sibling_transitions_need_priorities():
    found, _ = codes("""
        var x : int[0..3] = 0;
        statechart A priority 1 {
            state s0; state s1; initial s0;
            transition t0: s0 -> s1 when true;
            transition t1: s1 -> s0 when x > 0;
            transition t2: s1 -> s1 when x > 1;
        }""")
    assert "MISSING_PRIORITY" in found


def test_validate_reports_semantic_rules():
    net = parse_network("""
        var x : int[0..3] = 0;
        statechart A priority 2 {
            state s0; state s1; initial s0;
            transition t0: s0 -> s1 when x > 0 do { x = 1; };
            transition t1: s1 -> s0 when every 0s;
        }""")
    found = {d.code for d in validate(net)}
    assert {"PRIORITY_GAP", "INITIAL_GUARD_NOT_TRUE", "INITIAL_ACTION_NOT_EMPTY", "EVERY_ZERO"} <= found


def test_init_out_of_range():
    net = parse_network("""
        var x : int[0..3] = 7;
        statechart A priority 1 { state s0; initial s0; transition t0: s0 -> s0 when true; }""")
    assert [d.code for d in validate(net)] == ["INIT_OUT_OF_RANGE"]


def test_tokenizer_skips_comments():
    kinds = [t.kind for t in tokenize("x // trailing\n# whole line\n5s")]
    assert kinds[:2] == ["IDENT", "TIME"]


def test_cardiac_fixture_shape(cardiac, cardiac_mutated):
    assert [c.name for c in cardiac.charts] == ["Treatment", "Ventilator", "EPIpump",
                                                "SodiumBicarbonatePump", "IVpump", "LasixPump"]
    treat = cardiac.chart("Treatment")
    assert {"InjectEPIPre", "InjectEPI", "ActivateDefibrillaotr"} <= set(treat.state_names)
    assert cardiac.bounded and validate(cardiac) == [] and validate(cardiac_mutated) == []
    consts = lambda n: {x.value for c in n.charts for t in c.transitions for x in walk(t.guard)
                        if isinstance(x, IntLit)}
    assert 12 in consts(cardiac) and 10 in consts(cardiac_mutated)
