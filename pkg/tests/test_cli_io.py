import json

import pytest

from matext import io as mio
from matext.batch import read_jobs, run_batch
from matext.catalog.canon import canonical_string
from matext.catalog.named import named, t9c, uniform, vamos
from matext.cli import main
from matext.core import SparsePavingMatroid, as_matroid
from matext.linrep import t9c_matrix


def run(argv, capsys=None):
    try:
        code = main(argv)
    except SystemExit as e:
        code = e.code
    out = capsys.readouterr() if capsys is not None else None
    return code, out


def test_ksubset_orders_for_n4_k2():
    label = lambda m: "".join(str(i) for i in range(4) if m >> i & 1)  # noqa: E731
    assert [label(m) for m in mio.ksubsets(4, 2, "revlex")] == ["23", "13", "03", "12", "02", "01"]
    assert [label(m) for m in mio.ksubsets(4, 2, "colex")] == ["01", "02", "12", "03", "13", "23"]


def test_uniform_indicator():
    m = mio.parse_indicator(4, 2, "******")
    assert m == uniform(2, 4).matroid
    assert mio.format_indicator(m) == "******"


def test_indicator_wrong_length_and_characters(tmp_path):
    with pytest.raises(mio.FormatError) as e:
        mio.parse_indicator(4, 2, "*****")
    assert "C(4,2) = 6" in str(e.value)
    p = tmp_path / "m.txt"
    p.write_text("4 2 ******\n4 2 **x***\n")
    with pytest.raises(mio.FormatError) as e:
        mio.read_indicator_file(p)
    assert e.value.line == 2


def test_indicator_rejects_non_matroid():
    # bases 01 and 23 only violate exchange
    with pytest.raises(mio.FormatError):
        mio.parse_indicator(4, 2, "*0000*")


def test_json_vamos_ingest(tmp_path):
    p = tmp_path / "v.json"
    p.write_text(json.dumps({"name": "vamos", "n": 8, "rank": 4,
                             "circuit_hyperplanes": [[0, 1, 2, 3], [0, 1, 4, 5], [2, 3, 6, 7],
                                                     [4, 5, 6, 7], [2, 3, 4, 5]]}))
    [m] = mio.ingest(p)
    assert m == vamos()


def test_json_needs_one_defining_field():
    with pytest.raises(mio.FormatError):
        mio.matroid_from_dict({"n": 4, "rank": 2})
    with pytest.raises(mio.FormatError):
        mio.matroid_from_dict({"n": 4, "rank": 2, "bases": [[0, 1]], "circuit_hyperplanes": []})
    with pytest.raises(mio.FormatError):
        mio.matroid_from_dict({"n": 4, "rank": 3, "bases": [[0, 1]]})


def test_rank_table_ingest():
    u = uniform(1, 2).matroid
    d = {"n": 2, "rank_table": {"{}": 0, "0": 1, "1": 1, "01": 1}}
    assert mio.matroid_from_dict(d) == u


def test_jsonl_with_line_numbers(tmp_path):
    p = tmp_path / "m.jsonl"
    p.write_text(json.dumps(mio.matroid_to_dict(vamos())) + "\n{not json\n")
    with pytest.raises(mio.FormatError) as e:
        mio.ingest(p)
    assert e.value.line == 2


@pytest.mark.parametrize("name", ["vamos", "t9c", "201827", "ag32"])
@pytest.mark.parametrize("fmt", ["json", "revlex"])
def test_export_ingest_round_trip(tmp_path, name, fmt):
    m = named(name)
    p = tmp_path / ("m.json" if fmt == "json" else "m.txt")
    p.write_text(mio.export(m, fmt) + "\n")
    [back] = mio.ingest(p, fmt)
    assert canonical_string(back) == canonical_string(m)
    assert as_matroid(back).f == as_matroid(m).f


def test_colex_round_trip(tmp_path):
    m = vamos()
    text = mio.format_indicator(m, "colex")
    assert mio.parse_indicator(8, 4, text, "colex") == m.matroid
    assert mio.format_indicator(m, "revlex") != text


def test_cli_exit_codes(capsys):
    assert run(["check", "ak", "named:vamos", "--pairs", "2345,01"], capsys)[0] == 1
    assert run(["check", "ci", "vamos", "--pairs", "0123,0145"], capsys)[0] == 0
    assert run(["check", "ingleton", "vamos"], capsys)[0] == 1
    assert run(["check", "ingleton", "ag32"], capsys)[0] == 0
    assert run(["check", "vamos-config", "vamos"], capsys)[0] == 1
    assert run(["check", "ak", "nonesuch", "--pairs", "0,1"], capsys)[0] == 64
    assert run(["check", "bogus", "vamos"], capsys)[0] == 64
    assert run(["frobnicate"], capsys)[0] == 64


def test_cli_ge_201827_lists_pair(capsys):
    code, out = run(["check", "ge", "--depth", "1", "named:201827"], capsys)
    assert code == 1
    assert "035" in out.out and "146" in out.out


def test_cli_info_and_canon(capsys):
    code, out = run(["info", "p8"], capsys)
    assert code == 0 and "self-dual up to isomorphism: yes" in out.out
    code, out = run(["canon", "vamos"], capsys)
    assert code == 0 and out.out.strip() == canonical_string(vamos())


def test_cli_verify_rep(tmp_path, capsys):
    mat = tmp_path / "a.json"
    mat.write_text(t9c_matrix(3).to_json())
    m = tmp_path / "t9c.json"
    m.write_text(mio.export(t9c()))
    assert run(["verify-rep", "--matrix", str(mat), "--matroid", str(m)], capsys)[0] == 0
    mat.write_text(t9c_matrix(5).to_json())
    code, out = run(["verify-rep", "--matrix", str(mat), "--matroid", str(m)], capsys)
    assert code == 1 and "rank of" in out.out


def test_cli_dump_and_certificate(tmp_path, capsys):
    dump, cert = tmp_path / "lp.txt", tmp_path / "cert.json"
    code, _ = run(["check", "ak", "vamos", "--pairs", "2345,01", "--dump", str(dump),
                   "--certificate", str(cert)], capsys)
    assert code == 1
    assert dump.read_text().startswith("# matext-lp v1")
    assert json.loads(cert.read_text())


def test_cli_enumerate_ttt(tmp_path, capsys):
    out = tmp_path / "ttt.jsonl"
    assert run(["enumerate", "ttt", "--out", str(out)], capsys)[0] == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 181
    back = mio.ingest(out)
    assert all(isinstance(m, SparsePavingMatroid) for m in back)


def test_cli_enumerate_sparse_paving(tmp_path, capsys):
    out = tmp_path / "sp.jsonl"
    assert run(["enumerate", "sparse-paving", "--n", "6", "--k", "3", "--out", str(out)], capsys)[0] == 0
    recs = [json.loads(l) for l in out.read_text().splitlines()]
    assert recs[0]["ch_count"] == 0
    assert len({r["canonical"] for r in recs}) == len(recs)


def test_cli_graph_relax(tmp_path, capsys):
    fam = tmp_path / "fam.jsonl"
    from matext.core import relax
    ms = [vamos(), relax(vamos(), vamos().chs[0])]
    fam.write_text("".join(mio.export(m) + "\n" for m in ms))
    dot = tmp_path / "g.dot"
    assert run(["graph", "relax", "--family", str(fam), "--dot", str(dot)], capsys)[0] == 0
    assert "->" in dot.read_text()


JOBS = [
    {"id": "a", "matroid": "named:vamos", "check": "ak", "params": {"pairs": "2345,01"}},
    {"id": "b", "matroid": "named:ag32", "check": "ingleton", "params": {}},
    {"id": "c", "matroid": "named:nonesuch", "check": "ingleton", "params": {}},
    {"id": "d", "matroid": "named:vamos", "check": "ci", "params": {"pairs": "0123,0145"}},
]


def write_jobs(path, jobs):
    path.write_text("".join(json.dumps(j) + "\n" for j in jobs))


def test_batch_records_in_job_order_and_deterministic(tmp_path):
    jobs = tmp_path / "jobs.jsonl"
    write_jobs(jobs, JOBS)
    one, two = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
    assert run_batch(jobs, one, threads=1) == 4
    assert run_batch(jobs, two, threads=3) == 4
    assert one.read_bytes() == two.read_bytes()
    recs = [json.loads(l) for l in one.read_text().splitlines()]
    assert [r["job"] for r in recs] == ["a", "b", "c", "d"]
    assert [r["exit"] for r in recs] == [1, 0, 64, 0]
    assert recs[2]["verdict"] == "error"


def test_batch_resume_matches_full_run(tmp_path):
    jobs = tmp_path / "jobs.jsonl"
    write_jobs(jobs, JOBS)
    full = tmp_path / "full.jsonl"
    run_batch(jobs, full)
    part = tmp_path / "part.jsonl"
    lines = full.read_text().splitlines(keepends=True)
    part.write_text(lines[0] + lines[1][:20])  # killed while writing the second record
    assert run_batch(jobs, part) == 3
    assert part.read_bytes() == full.read_bytes()
    assert run_batch(jobs, part) == 0


def test_batch_empty_jobfile(tmp_path, capsys):
    jobs = tmp_path / "empty.jsonl"
    jobs.write_text("")
    out = tmp_path / "out.jsonl"
    assert run(["batch", str(jobs), "--out", str(out)], capsys)[0] == 0
    assert out.read_text() == ""
    assert read_jobs(jobs) == []


def test_batch_duplicate_ids_rejected(tmp_path):
    jobs = tmp_path / "jobs.jsonl"
    write_jobs(jobs, [JOBS[0], JOBS[0]])
    with pytest.raises(mio.FormatError):
        read_jobs(jobs)


def test_cli_dual_source(capsys):
    code, out = run(["canon", "dual:p8_2p"], capsys)
    assert code == 0 and out.out.strip() == canonical_string(named("p8_2pp"))
