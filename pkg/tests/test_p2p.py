import random

import pytest

from botsift.flows import FlowKey, FlowRecord
from botsift.p2p import (
    cluster_flows,
    destination_diversity,
    detect_p2p,
    dump_clusters,
    make_cluster,
    merge_cluster_maps,
)

from oracles import brute_prefix_count


def flow(src, dst, proto="tcp", out=100, inn=50):
    return FlowRecord(src, dst, proto, out, inn)


def test_same_key_merges():
    clusters = cluster_flows([flow("10.0.0.1", "20.0.0.1"), flow("10.0.0.1", "20.0.0.2")])
    assert len(clusters) == 1
    cluster = clusters[FlowKey("10.0.0.1", "tcp", 100, 50)]
    assert cluster.contacts == {"20.0.0.1", "20.0.0.2"}
    assert cluster.flow_count == 2


def test_proto_splits_clusters():
    clusters = cluster_flows(
        [flow("10.0.0.1", "20.0.0.1", "tcp"), flow("10.0.0.1", "20.0.0.1", "udp")]
    )
    assert len(clusters) == 2


def test_empty_input():
    assert cluster_flows([]) == {}


def test_grouping_is_a_partition():
    rng = random.Random(1)
    flows = [
        flow(f"10.0.0.{rng.randint(1, 5)}", f"20.{rng.randint(0, 3)}.0.{rng.randint(1, 9)}",
             rng.choice(["tcp", "udp"]), rng.randint(1, 3) * 10, 50)
        for _ in range(300)
    ]
    clusters = cluster_flows(flows)
    assert sum(c.flow_count for c in clusters.values()) == len(flows)
    for key, cluster in clusters.items():
        assert cluster.key == key


@pytest.mark.parametrize("parts", [1, 2, 4, 8])
def test_partition_invariance(parts):
    rng = random.Random(42)
    flows = [
        flow(f"10.0.0.{rng.randint(1, 9)}", f"20.{rng.randint(0, 9)}.0.{rng.randint(1, 30)}",
             rng.choice(["tcp", "udp"]), rng.randint(1, 4) * 25, rng.randint(1, 4) * 10)
        for _ in range(500)
    ]
    whole = cluster_flows(flows)
    chunks = [flows[i::parts] for i in range(parts)]
    merged = merge_cluster_maps(cluster_flows(chunk) for chunk in chunks)
    assert merged == whole


def test_merge_is_order_insensitive():
    a = cluster_flows([flow("10.0.0.1", "20.0.0.1")])
    b = cluster_flows([flow("10.0.0.1", "20.1.0.1"), flow("10.0.0.2", "20.0.0.1")])
    assert merge_cluster_maps([a, b]) == merge_cluster_maps([b, a])


def test_destination_diversity_examples():
    key = FlowKey("10.0.0.1", "tcp", 1, 1)
    assert destination_diversity(make_cluster(key, {"93.184.1.1", "93.184.7.7"}, 2)) == 1
    assert destination_diversity(make_cluster(key, {"10.0.0.2", "10.1.0.1", "11.0.0.1"}, 3)) == 3
    assert destination_diversity(make_cluster(key, set(), 0)) == 0


def test_destination_diversity_matches_oracle():
    rng = random.Random(3)
    key = FlowKey("10.0.0.1", "udp", 9, 9)
    for _ in range(50):
        contacts = {
            f"{rng.randint(20, 60)}.{rng.randint(0, 5)}.0.{rng.randint(1, 200)}"
            for _ in range(rng.randint(1, 40))
        }
        cluster = make_cluster(key, contacts, len(contacts))
        assert destination_diversity(cluster) == brute_prefix_count(contacts)
        assert cluster.dd == destination_diversity(cluster)


def _cluster_with_dd(src, dd, extra=0):
    contacts = {f"{30 + i // 256}.{i % 256}.0.1" for i in range(dd)}
    contacts |= {f"30.0.0.{2 + i}" for i in range(extra)}
    key = FlowKey(src, "tcp", 10, 10)
    return key, make_cluster(key, contacts, len(contacts))


def test_detect_p2p_boundary_inclusive():
    key, cluster = _cluster_with_dd("10.0.0.1", 30)
    assert detect_p2p({key: cluster}, 30) == {key: cluster}
    key2, cluster2 = _cluster_with_dd("10.0.0.2", 29)
    assert detect_p2p({key2: cluster2}, 30) == {}


def test_detect_p2p_threshold_one_keeps_everything():
    key, cluster = _cluster_with_dd("10.0.0.1", 3)
    assert detect_p2p({key: cluster}, 1) == {key: cluster}
    with pytest.raises(ValueError):
        detect_p2p({key: cluster}, 0)


def test_detect_p2p_monotone_in_threshold():
    clusters = dict(_cluster_with_dd(f"10.0.0.{i}", dd) for i, dd in enumerate([2, 5, 20, 31, 50], 1))
    previous = None
    for theta in (1, 3, 10, 25, 40, 60):
        kept = set(detect_p2p(clusters, theta))
        if previous is not None:
            assert kept <= previous
        previous = kept


def test_dump_clusters_format(tmp_path):
    key, cluster = _cluster_with_dd("10.0.0.1", 3, extra=2)
    path = tmp_path / "clusters.csv"
    dump_clusters({key: cluster}, path)
    lines = path.read_text().splitlines()
    assert lines[1] == "10.0.0.1,tcp,10,10,3,5"
