import pytest
from hypothesis import given, settings, strategies as st

from scforge.actions import ClockReset
from scforge.automata import Automaton, Edge, Location, TANetwork
from scforge.errors import Deadlock, InvariantViolation, NondeterminismError, TAError, TransformError
from scforge.expr import And, ChanRecv, ChanSend, Cmp, IntLit, Var
from scforge.sc_semantics import EventEnv, run
from scforge.equivalence import project, random_schedule
from scforge.status import TAStatus, Valuation, VarDecl
from scforge.ta_semantics import (discharge_timers, max_delay, ta_cycle, ta_delay, ta_initial_status,
                                  ta_run, ta_step)
from scforge.transform import transform_stages


def le(c, k):
    return Cmp("<=", Var(c), IntLit(k))


def eq(c, k):
    return Cmp("==", Var(c), IntLit(k))


def timer_net():
    """One clocked sender bounded by c <= 3 and one receiver."""
    decls = (VarDecl("x", "int", 0, 0, 9), VarDecl("go", "channel"), VarDecl("c", "clock", 0))
    sender = Automaton("S", "timer", (Location("a", le("c", 3)), Location("b")), "a",
                       (Edge("snd", "a", And(ChanSend("go"), eq("c", 3)), (ClockReset("c"),), ("c",), "b"),))
    recv = Automaton("R", "transformed", (Location("p"), Location("q")), "p",
                     (Edge("rcv", "p", ChanRecv("go"), (), (), "q"),))
    return TANetwork(decls, (sender, recv))


def test_initial_status():
    st0 = ta_initial_status(timer_net())
    assert st0.locations == ("a", "p") and st0.clocks == Valuation({"c": 0})
    assert st0.valuation == Valuation({"x": 0})


def test_delay_respects_invariants():
    ta = timer_net()
    st0 = ta_initial_status(ta)
    assert max_delay(ta, st0) == 3
    assert ta_delay(ta, st0, 3).clocks["c"] == 3
    with pytest.raises(InvariantViolation) as info:
        ta_delay(ta, st0, 4)
    assert info.value.max_admissible == 3
    with pytest.raises(ValueError):
        ta_delay(ta, st0, -1)


def test_step_delays_then_synchronises():
    ta = timer_net()
    status = ta_initial_status(ta)
    labels = []
    for _ in range(4):
        status, label = ta_step(ta, status)
        labels.append(label)
    assert labels == ["DELAY 1", "DELAY 1", "DELAY 1", "R.rcv+S.snd"]
    assert status.locations == ("b", "q") and status.clocks["c"] == 0


def test_deadlock_when_time_is_blocked():
    decls = (VarDecl("c", "clock", 0),)
    a = Automaton("A", "transformed", (Location("l", le("c", 0)),), "l", ())
    with pytest.raises(Deadlock):
        ta_step(TANetwork(decls, (a,)), ta_initial_status(TANetwork(decls, (a,))))


def test_ties_are_reported():
    decls = (VarDecl("x", "int", 0, 0, 1),)
    a = Automaton("A", "transformed", (Location("l"),), "l",
                  (Edge("e1", "l", None, (), (), "l"), Edge("e2", "l", None, (), (), "l")))
    ta = TANetwork(decls, (a,))
    _, label = ta_step(ta, ta_initial_status(ta))
    assert label == "A.e1 TIE"


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 3), max_size=6))
def test_clocks_never_decrease_under_delay(delays):
    ta = timer_net()
    status = ta_initial_status(ta)
    for d in delays:
        room = max_delay(ta, status)
        if room is not None and d > room:
            with pytest.raises(InvariantViolation):
                ta_delay(ta, status, d)
            continue
        nxt = ta_delay(ta, status, d)
        assert all(nxt.clocks[c] == status.clocks[c] + d for c in status.clocks)
        status = nxt


def test_lockstep_run_matches_statechart_run(two_charts):
    stages, tmap = transform_stages(two_charts)
    ta = stages[-1]
    env = EventEnv({1: {"eventA"}, 4: {"eventA"}})
    sc = run(two_charts, env, 25)
    tt = ta_run(ta, env, 25)
    proj = project(tt, ta, tmap)
    assert [(p.states, p.valuation) for p in proj] == [(s.states, s.valuation) for s in sc.statuses]
    # every cycle ends with one delay status stamped as the start of the next cycle
    assert [m for m, lab in zip(tt.marks[1:], tt.labels) if lab == "DELAY"] == [(k, 0) for k in range(1, 26)]


def test_timer_clock_values_along_the_run(two_charts_ta):
    ta, _ = two_charts_ta
    tt = ta_run(ta, EventEnv({}), 12)
    ends = [s.clocks for s, lab in zip(tt.statuses[1:], tt.labels) if lab == "DELAY"]
    assert [c["c1"] for c in ends] == [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 1, 2]
    assert [c["c2"] for c in ends][:6] == [1, 2, 3, 4, 5, 1]


def test_lockstep_driver_needs_the_index(two_charts):
    stages, _ = transform_stages(two_charts)
    with pytest.raises(TransformError):
        ta_run(stages[5], EventEnv({}), 1)


def test_cycle_period_must_divide_bounds(two_charts_ta):
    ta, _ = two_charts_ta
    with pytest.raises(TAError):
        ta_run(ta, EventEnv({}, cycle_period=3), 1)


def test_missing_priority_rule_is_nondeterministic(two_charts):
    stages, _ = transform_stages(two_charts, [6])
    with pytest.raises(NondeterminismError):
        ta_run(stages[-1], EventEnv({1: {"eventA"}}), 5)


def test_unconsumed_timer_send_is_discharged(two_charts_ta):
    ta, _ = two_charts_ta
    status = ta_initial_status(ta)
    clocks = Valuation({"c1": 0, "c2": 5})
    status = TAStatus(status.locations, status.valuation, clocks)
    out = discharge_timers(ta, status)
    assert out.locations[ta.index("U_after5s")] == "s1_after5s" and out.clocks["c2"] == 0
