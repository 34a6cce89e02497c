import random
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings, strategies as st

from scforge.automata import Automaton, Edge, Location, TANetwork
from scforge.errors import ExportError
from scforge.export import ExportReport, read_uppaal_xml, write_queries, write_uppaal_xml
from scforge.fuzz import random_network
from scforge.status import VarDecl
from scforge.transform import transform_all, transform_stages
from scforge.verify import parse_properties

from conftest import fixture_text


def body(doc):
    return ET.fromstring(doc.split("\n", 2)[2])


def check_document(doc):
    root = body(doc)
    assert root.tag == "nta"
    for tpl in root.findall("template"):
        ids = {l.get("id") for l in tpl.findall("location")}
        assert tpl.find("init").get("ref") in ids
        for tr in tpl.findall("transition"):
            assert tr.find("source").get("ref") in ids and tr.find("target").get("ref") in ids
    return root


def test_two_charts_document(two_charts_ta):
    ta, tmap = two_charts_ta
    report = ExportReport()
    doc = write_uppaal_xml(ta, tmap, report)
    root = check_document(doc)
    assert len(root.findall("template")) == 5
    decl = root.findtext("declaration")
    for line in ("chan eventA;", "clock c1;", "clock c2;", "int alpha = 1;", "int[0,15] x = 0;"):
        assert line in decl.splitlines()
    assert root.findtext("system").strip() == "system Y1, Y2, U_eventA, U_every10s, U_after5s;"
    # the negated receive self-loops are flagged, not rewritten
    assert sorted(u.element for u in report.unsupported) == ["Y1.stay_s1", "Y2.stay_s3", "Y2.stay_s4"]
    assert doc.count("<!-- WARN") == 3
    t1 = root.find("template").find("transition")
    labels = {l.get("kind"): l.text for l in t1.findall("label")}
    assert labels["assignment"] == "x = 5, alpha = alpha % 2 + 1"
    assert labels["guard"] == "true && alpha == 1"


def test_sync_labels_are_split_out(two_charts_ta):
    ta, tmap = two_charts_ta
    root = body(write_uppaal_xml(ta, tmap))
    syncs = sorted(l.text for l in root.iter("label") if l.get("kind") == "synchronisation")
    assert syncs == ["after5s!", "after5s?", "eventA!", "eventA?", "every10s!", "every10s?"]
    invs = sorted(l.text for l in root.iter("label") if l.get("kind") == "invariant")
    assert invs == ["c1 <= 10", "c2 <= 5"]


def test_round_trip_on_fixtures(two_charts, cardiac, cardiac_mutated):
    for net in (two_charts, cardiac, cardiac_mutated):
        ta, tmap = transform_all(net)
        doc = write_uppaal_xml(ta, tmap)
        check_document(doc)
        assert read_uppaal_xml(doc) == ta
        assert write_uppaal_xml(ta, tmap) == doc  # byte-stable


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_round_trip_on_generated_networks(seed):
    ta, tmap = transform_all(random_network(random.Random(seed)))
    doc = write_uppaal_xml(ta, tmap)
    check_document(doc)
    assert read_uppaal_xml(doc) == ta


def test_minimal_document():
    ta = TANetwork((), (Automaton("A", "transformed", (Location("l"),), "l", ()),))
    doc = write_uppaal_xml(ta)
    root = check_document(doc)
    assert len(root.findall("template")) == 1
    assert read_uppaal_xml(doc) == ta


def test_events_must_be_transformed_first(two_charts):
    stages, tmap = transform_stages(two_charts)
    with pytest.raises(ExportError):
        write_uppaal_xml(stages[2], tmap)


def test_malformed_input():
    with pytest.raises(ExportError):
        read_uppaal_xml("<nta>")


def test_queries(cardiac):
    props = parse_properties(fixture_text("cardiac.q"), cardiac)
    text = write_queries(props)
    lines = text.splitlines()
    assert lines[0] == "A[] Treatment.ActivateDefibrillaotr imply Breath == 0 && Rhythm == 0"
    assert lines[1].startswith("A[] Treatment.InjectEPI imply (BloodPH_int > 7 ||")
    assert "UrineFlow_int > 12" in lines[1] and len(lines) == 2
    assert write_queries([]) == ""
