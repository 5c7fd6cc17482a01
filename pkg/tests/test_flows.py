import pytest

from botsift.flows import (
    FlowParseError,
    FlowRecord,
    HostLabel,
    derive_bpp,
    parse_flow_file,
    parse_label_file,
    prefix16,
    write_flow_file,
    write_label_file,
)


def test_parse_single_line(tmp_path):
    path = tmp_path / "flows.csv"
    path.write_text("10.0.0.1,93.184.216.34,tcp,120,64\n")
    flows = parse_flow_file(path)
    assert flows == [FlowRecord("10.0.0.1", "93.184.216.34", "tcp", 120, 64)]


def test_parse_preserves_order_and_count(tmp_path):
    lines = [f"10.0.0.1,20.0.{i}.1,udp,{i},{i * 2}" for i in range(10)]
    path = tmp_path / "flows.csv"
    path.write_text("\n".join(lines) + "\n")
    flows = parse_flow_file(path)
    assert len(flows) == 10
    assert [f.dst for f in flows] == [f"20.0.{i}.1" for i in range(10)]


def test_parse_empty_file(tmp_path):
    path = tmp_path / "flows.csv"
    path.write_text("")
    assert parse_flow_file(path) == []


def test_parse_skips_comments_and_header(tmp_path):
    path = tmp_path / "flows.csv"
    path.write_text(
        "# a comment\n"
        "src_ip,dst_ip,proto,bpp_out,bpp_in\n"
        "10.0.0.1,20.0.0.1,tcp,10,10\n"
    )
    assert len(parse_flow_file(path)) == 1


def test_parse_rejects_src_equals_dst(tmp_path):
    path = tmp_path / "flows.csv"
    path.write_text("10.0.0.1,20.0.0.1,tcp,1,1\n10.0.0.1,10.0.0.1,udp,10,10\n")
    with pytest.raises(FlowParseError) as err:
        parse_flow_file(path)
    assert err.value.line_no == 2
    assert "src_ip equals dst_ip" in str(err.value)


@pytest.mark.parametrize(
    "line,fragment",
    [
        ("10.0.0.1,20.0.0.1,icmp,1,1", "proto"),
        ("10.0.0.1,20.0.0.1,tcp,-1,1", "negative"),
        ("10.0.0.1,20.0.0.1,tcp,x,1", "integer"),
        ("999.0.0.1,20.0.0.1,tcp,1,1", "IPv4"),
        ("2001:db8::1,20.0.0.1,tcp,1,1", "IPv4"),
        ("10.0.0.1,20.0.0.1,tcp,1", "5 comma-separated fields"),
    ],
)
def test_parse_rejects_malformed(tmp_path, line, fragment):
    path = tmp_path / "flows.csv"
    path.write_text(line + "\n")
    with pytest.raises(FlowParseError) as err:
        parse_flow_file(path)
    assert fragment in str(err.value)
    assert err.value.line_no == 1


def test_flow_roundtrip(tmp_path):
    flows = [
        FlowRecord("10.0.0.1", "20.0.0.1", "tcp", 120, 64),
        FlowRecord("10.0.0.2", "21.5.0.9", "udp", 0, 7),
    ]
    path = tmp_path / "flows.csv"
    write_flow_file(path, flows)
    assert parse_flow_file(path) == flows


def test_prefix16_definition():
    assert prefix16("93.184.216.34") == 93 * 256 + 184


def test_prefix16_constant_within_block():
    assert prefix16("93.184.1.1") == prefix16("93.184.216.34")


def test_prefix16_distinct_across_blocks():
    assert prefix16("10.0.0.1") != prefix16("10.1.0.1")


def test_derive_bpp():
    assert derive_bpp(1200, 10) == 120
    assert derive_bpp(125, 2) == 62
    assert derive_bpp(0, 5) == 0
    with pytest.raises(ValueError):
        derive_bpp(100, 0)


def test_flow_record_invariants():
    with pytest.raises(ValueError):
        FlowRecord("10.0.0.1", "10.0.0.1", "tcp", 1, 1)
    with pytest.raises(ValueError):
        FlowRecord("10.0.0.1", "20.0.0.1", "tcp", -1, 1)
    with pytest.raises(ValueError):
        FlowRecord("10.0.0.1", "20.0.0.1", "sctp", 1, 1)


def test_label_roundtrip(tmp_path):
    labels = {
        "10.0.0.1": HostLabel("10.0.0.1", "bot", "botnet1"),
        "10.0.0.2": HostLabel("10.0.0.2", "legit_p2p", "emule"),
        "10.0.0.3": HostLabel("10.0.0.3", "background", ""),
    }
    path = tmp_path / "labels.csv"
    write_label_file(path, labels)
    assert parse_label_file(path) == labels


def test_label_requires_group_for_planted_roles():
    with pytest.raises(ValueError):
        HostLabel("10.0.0.1", "bot", "")
    HostLabel("10.0.0.1", "background", "")  # fine without a group
