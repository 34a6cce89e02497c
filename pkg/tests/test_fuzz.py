import random

from scforge.dsl import validate
from scforge.fuzz import FuzzBounds, random_network


def test_generator_is_reproducible():
    assert random_network(random.Random(42)) == random_network(random.Random(42))


def test_generated_networks_stay_in_bounds():
    b = FuzzBounds()
    for seed in range(150):
        net = random_network(random.Random(seed))
        assert validate(net) == []
        assert 1 <= len(net.charts) <= b.max_charts
        assert all(len(c.states) <= b.max_states for c in net.charts)
        assert len(net.events) <= b.max_events
        assert len(net.trigger_sites) <= b.max_triggers
        for d in net.variables:
            if d.kind == "int":
                assert d.lo == 0 and d.hi <= b.max_int_hi


def test_generator_covers_the_fragment():
    nets = [random_network(random.Random(s)) for s in range(200)]
    assert any(n.events for n in nets)
    assert {s.trigger.kind for n in nets for s in n.trigger_sites} == {"after", "every"}
    assert any(len(n.charts) == 3 for n in nets)
    assert any(st.entry or st.exit for n in nets for c in n.charts for st in c.states)
