import random

import pytest

from botsift.detect import DetectionReport
from botsift.flows import HostLabel
from botsift.metrics import (
    PairCounts,
    bai,
    blsi,
    bsi,
    detection_metrics,
    group_detection_rates,
    pair_counts,
)

from oracles import brute_pair_indices


def report_with(hosts):
    return DetectionReport(
        thresholds={},
        scores=[],
        botnet_communities=set(),
        cliques={},
        bot_clusters=set(),
        bot_hosts=set(hosts),
    )


def labels_for(bots=(), legits=(), background=()):
    labels = {}
    for i, h in enumerate(bots):
        labels[h] = HostLabel(h, "bot", f"botnet{1 + i % 2}")
    for h in legits:
        labels[h] = HostLabel(h, "legit_p2p", "app")
    for h in background:
        labels[h] = HostLabel(h, "background", "")
    return labels


def test_bsi_examples():
    x = [{"1", "2"}, {"3", "4"}]
    assert bsi(x, [{"1", "2"}, {"3"}, {"4"}]) == 1.0
    assert abs(bsi(x, [{"1", "2", "3", "4"}]) - 2 / 6) < 1e-12


def test_bai_examples():
    x = [{"1", "2"}, {"3", "4"}]
    assert bai(x, [{"1", "2"}, {"3"}, {"4"}]) == 0.5
    assert bai([{"1", "2"}], [{"1", "2"}]) == 1.0


def test_blsi_examples():
    assert blsi({"b1", "b2"}, {"l1", "l2"}, [{"b1"}, {"b2"}, {"l1"}, {"l2"}]) == 1.0
    assert blsi({"b1", "b2"}, {"l1", "l2"}, [{"b1", "l1"}, {"b2"}, {"l2"}]) == 0.75
    assert blsi({"b1", "b2"}, {"l1", "l2"}, [{"b1", "b2", "l1", "l2"}]) == 0.0


def test_blsi_warns_when_undefined():
    with pytest.warns(UserWarning):
        assert blsi(set(), {"l1"}, []) == 1.0


def test_pair_counts_fields():
    pc = pair_counts([{"1", "2"}, {"3", "4"}], [{"1", "2", "3"}, {"4"}],
                     bots={"1", "2", "3", "4"}, legits={"5"})
    assert pc == PairCounts(a=1, b=1, c=2, d=4)


def test_indices_match_brute_force():
    rng = random.Random(47)
    for _ in range(200):
        hosts = [f"h{i}" for i in range(rng.randint(4, 14))]
        n_groups = rng.randint(1, 3)
        groups = [set() for _ in range(n_groups)]
        bots = set()
        for h in hosts[: rng.randint(2, len(hosts))]:
            groups[rng.randrange(n_groups)].add(h)
            bots.add(h)
        groups = [g for g in groups if g]
        legits = set(h for h in hosts if h not in bots and rng.random() < 0.7)
        communities = []
        pool = list(hosts)
        rng.shuffle(pool)
        while pool:
            take = rng.randint(1, min(4, len(pool)))
            communities.append(set(pool[:take]))
            pool = pool[take:]
        # drop some hosts from every community to exercise unassigned hosts
        if rng.random() < 0.3 and communities:
            communities[0].discard(next(iter(communities[0])))
        expected_bsi, expected_bai, expected_blsi = brute_pair_indices(
            groups, communities, bots, legits
        )
        assert abs(bsi(groups, communities) - expected_bsi) < 1e-12
        assert abs(bai(groups, communities) - expected_bai) < 1e-12
        if bots and legits:
            assert abs(blsi(bots, legits, communities) - expected_blsi) < 1e-12


def test_indices_invariant_under_community_relabeling():
    rng = random.Random(53)
    groups = [{"a", "b", "c"}, {"d", "e"}]
    communities = [{"a", "b"}, {"c", "d"}, {"e", "x"}]
    reordered = list(reversed(communities))
    assert bsi(groups, communities) == bsi(groups, reordered)
    assert bai(groups, communities) == bai(groups, reordered)
    assert blsi({"a", "d"}, {"x"}, communities) == blsi({"a", "d"}, {"x"}, reordered)


def test_detection_metrics_all_found():
    bots = [f"10.0.0.{i + 1}" for i in range(37)]
    labels = labels_for(bots=bots, background=["10.9.0.1"])
    m = detection_metrics(report_with(bots), labels)
    assert m == {"precision": 1.0, "recall": 1.0, "f_score": 1.0, "fp": 0, "fn": 0}


def test_detection_metrics_empty_report():
    labels = labels_for(bots=["10.0.0.1", "10.0.0.2"])
    m = detection_metrics(report_with([]), labels)
    assert m["precision"] == 1.0
    assert m["recall"] == 0.0
    assert m["f_score"] == 0.0


def test_detection_metrics_half():
    bots = [f"10.0.0.{i + 1}" for i in range(10)]
    noise = [f"10.1.0.{i + 1}" for i in range(5)]
    labels = labels_for(bots=bots, background=noise)
    m = detection_metrics(report_with(bots[:5] + noise), labels)
    assert m["precision"] == 0.5
    assert m["recall"] == 0.5
    assert m["f_score"] == 0.5
    assert m["fp"] == 5
    assert m["fn"] == 5


def test_group_detection_rates():
    labels = {
        "10.0.0.1": HostLabel("10.0.0.1", "bot", "alpha"),
        "10.0.0.2": HostLabel("10.0.0.2", "bot", "alpha"),
        "10.0.0.3": HostLabel("10.0.0.3", "bot", "beta"),
    }
    rates = group_detection_rates(report_with(["10.0.0.1", "10.0.0.3"]), labels)
    assert rates == {"alpha": 0.5, "beta": 1.0}
