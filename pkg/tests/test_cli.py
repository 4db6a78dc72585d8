from __future__ import annotations

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from exactsparse import Network, verify_cut_sparsifier
from exactsparse.cli import main
from exactsparse.io import dump_network, parse_demands, read_network, write_network

from conftest import star_network


@pytest.fixture
def stars(tmp_path):
    path = tmp_path / "g.net"
    write_network(star_network([(1, 2), (2, 5), (2, 1)], 2, [(0, 1, 1)]), path)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sparsify_cut_writes_network_and_map(capsys, stars, tmp_path):
    out = tmp_path / "h.net"
    code, _, err = run(capsys, "sparsify-cut", stars, "-o", out, "--report")
    assert code == 0
    assert "weak_classes=2" in err
    assert read_network(out).n == 4
    assert (tmp_path / "h.net.map").read_text().splitlines()[1:] == ["m 2 2", "m 3 2", "m 4 4"]


def test_sparsify_flow_to_stdout(capsys, stars):
    code, out, _ = run(capsys, "sparsify-flow", stars)
    assert code == 0
    assert out.startswith("p network 4 ")


def test_verify_cut_exit_codes(capsys, stars, tmp_path):
    good, bad = tmp_path / "good.net", tmp_path / "bad.net"
    run(capsys, "sparsify-cut", stars, "-o", good)
    write_network(star_network([(5, 8)], 2, [(0, 1, 1)]), bad)
    assert run(capsys, "verify-cut", stars, good)[0] == 0
    code, out, _ = run(capsys, "verify-cut", stars, bad)
    assert code == 1
    assert "violation A={0}" in out
    assert run(capsys, "verify-cut", stars, bad, "--quality", "2")[0] == 0


def test_verify_flow_with_and_without_demands(capsys, stars, tmp_path):
    h = tmp_path / "h.net"
    run(capsys, "sparsify-flow", stars, "-o", h)
    assert run(capsys, "verify-flow", stars, h)[0] == 0
    dem = tmp_path / "d.dem"
    dem.write_text("d 0 1 3\n%\nd 0 1 1/2\n")
    code, out, _ = run(capsys, "verify-flow", stars, h, dem)
    assert code == 0 and "demands=2" in out


def test_signature_and_decompose(capsys, stars):
    code, out, _ = run(capsys, "signature", stars)
    assert out.splitlines() == ["2 3", "3 3", "4 5"]
    code, out, _ = run(capsys, "signature", stars, "--strong")
    assert code == 0 and len(out.splitlines()) == 3
    code, out, _ = run(capsys, "decompose", stars)
    assert out.splitlines()[0] == "2 (1, 2) = 1*(0, 1) + 2*(1/2, 1/2)"


def test_enumerate_rays(capsys):
    code, out, err = run(capsys, "enumerate-rays", "2")
    assert out.splitlines() == ["0 1", "1/2 1/2", "1 0"]
    assert "3 rays" in err
    assert run(capsys, "enumerate-rays", "5")[0] == 2


def test_split_demand(capsys, tmp_path):
    dem = tmp_path / "d.dem"
    dem.write_text("d 0 1 8\nd 1 2 8\n")
    code, out, err = run(capsys, "split-demand", "3,4,2", "9,12,6", dem)
    assert code == 0
    d1, d2 = parse_demands(out)
    assert d1 + d2 == parse_demands(dem.read_text())[0]
    assert "bound=" in err
    assert run(capsys, "split-demand", "1,2", "2,1", dem)[0] == 2


def test_generate_and_sparsify_vc_vi(capsys, tmp_path):
    prefix = tmp_path / "vi"
    code, out, _ = run(capsys, "generate", "vertex-integrity", "--k", 2, "--n", 14, "--a", 2, "--b", 2,
                       "--capacity", "small-support(1,2)", "--seed", 5, "-o", prefix)
    assert code == 0 and len(out.splitlines()) == 2
    net, sep = f"{prefix}.net", f"{prefix}.sep"
    h = tmp_path / "h.net"
    code, _, err = run(capsys, "sparsify-vi", net, "--separator", sep, "-o", h, "--report")
    assert code == 0 and "signatures=" in err
    assert verify_cut_sparsifier(read_network(net), read_network(h)).passed
    code, _, _ = run(capsys, "sparsify-vc", net, "--cover", "0,1", "-o", h)
    assert code == 2  # the components have edges, so {0, 1} is no cover
    assert run(capsys, "sparsify-vi", net, "--separator", "0,1")[0] == 2


def test_tw_reduce(capsys, tmp_path):
    prefix = tmp_path / "tw"
    run(capsys, "generate", "bounded-treewidth", "--k", 3, "--n", 14, "--w", 2, "--seed", 1, "-o", prefix)
    h = tmp_path / "h.net"
    code, _, err = run(capsys, "tw-reduce", f"{prefix}.net", f"{prefix}.td", "-o", h, "--report")
    assert code == 0 and "y_nodes=" in err
    assert run(capsys, "verify-cut", f"{prefix}.net", h)[0] == 0
    assert run(capsys, "tw-reduce", f"{prefix}.net", f"{prefix}.td", "--flow")[0] == 2


def test_generate_rejects_inconsistent_parameters(capsys):
    code, _, err = run(capsys, "generate", "vertex-integrity", "--k", 1, "--n", 3, "--a", 1, "--b", 5)
    assert code == 2 and "exceeds" in err


def test_missing_file_is_an_error(capsys, tmp_path):
    code, _, err = run(capsys, "sparsify-cut", tmp_path / "nope.net")
    assert code == 2 and "error" in err


def test_accept_small_scale_with_summary(capsys, tmp_path):
    summary = tmp_path / "s.jsonl"
    code, out, _ = run(capsys, "accept", "treewidth", "--scale", "0.1", "--summary", summary)
    assert code == 0
    assert out.splitlines()[0].startswith("[PASS] criterion 6")
    assert json.loads(summary.read_text())["number"] == 6


def test_accept_fault_injection_fails(capsys):
    code, out, _ = run(capsys, "accept", "cut", "--scale", "0.05", "--fault-injection")
    assert code == 1
    assert "[FAIL] criterion 1" in out


def test_module_entry_point(tmp_path):
    path = tmp_path / "g.net"
    path.write_text(dump_network(Network([(0, 2, Fraction(1, 2)), (2, 1, 1)], [0, 1])))
    res = subprocess.run([sys.executable, "-m", "exactsparse", "--workers", "1", "signature", str(path)],
                         capture_output=True, text=True, check=True)
    assert res.stdout == "2 3\n"
