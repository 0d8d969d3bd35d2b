import subprocess
import sys

import pytest

from robustpart.cli import main
from robustpart.formats import graph_from_text, graph_to_text, partition_from_text
from robustpart.generators import PlantedSpec, gen_planted

from builders import complete, disjoint_union, petersen


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    def write(name, g):
        path = tmp_path / name
        path.write_text(graph_to_text(g))
        return path

    return write


def test_generate_fig1i(tmp_path, capsys):
    target = tmp_path / "g.graph"
    code, out, err = run(["generate", "--family", "fig1i", "--m", 4, "--out", target], capsys)
    assert code == 0 and out == ""
    g = graph_from_text(target.read_text())
    assert g.n == 17 and g.is_regular()
    assert graph_to_text(g) == target.read_text()
    assert "seed: 0" in err


def test_generate_to_stdout_and_truth(tmp_path, capsys):
    truth = tmp_path / "truth.part"
    code, out, _ = run(["generate", "--family", "planted-expanders", "--sizes", "10,10", "--bridge", 2, "--seed", 5, "--truth-out", truth], capsys)
    assert code == 0
    g = graph_from_text(out)
    rp = partition_from_text(truth.read_text())
    assert rp.is_partition_of(g) and rp.k == 2


def test_generate_refuses_unbuilt_family(capsys):
    code, _, err = run(["generate", "--family", "bestposs-bipartite"], capsys)
    assert code == 3 and "capability error" in err


def test_generate_missing_and_bad_parameters(capsys):
    assert run(["generate", "--family", "fig1i"], capsys)[0] == 2
    assert run(["generate", "--family", "fig1i", "--m", 6], capsys)[0] == 2
    assert run(["generate", "--family", "random-regular", "--n", 5, "--degree", 3], capsys)[0] == 2


def test_hamilton_petersen(files, capsys):
    code, out, _ = run(["hamilton", "--graph", files("p.graph", petersen())], capsys)
    assert code == 1 and out == "NON-HAMILTONIAN (exhaustive)\n"


def test_hamilton_finds_cycle(files, capsys):
    code, out, _ = run(["hamilton", "--graph", files("k8.graph", complete(8))], capsys)
    cyc = [int(x) for x in out.split()]
    assert code == 0 and sorted(cyc) == list(range(8)) and cyc[0] == 0 and cyc[1] < cyc[-1]


def test_hamilton_fig1i_methods(tmp_path, capsys):
    target = tmp_path / "f.graph"
    run(["generate", "--family", "fig1i", "--m", 4, "--out", target], capsys)
    code, out, err = run(["hamilton", "--graph", target], capsys)
    assert code == 1 and out == "NON-HAMILTONIAN (exhaustive)\n" and "(k,l)=(2,1)" in err
    code, out, _ = run(["hamilton", "--graph", target, "--method", "pipeline"], capsys)
    assert code == 1 and out.splitlines()[0] == "STABILITY k=2 l=1"
    assert partition_from_text("\n".join(out.splitlines()[1:]) + "\n").k == 2


def test_certify_examples(files, capsys):
    code, out, _ = run(["certify", "--graph", files("k16.graph", complete(16)), "--nu", "1/10", "--tau", "1/4", "--mode", "exact"], capsys)
    assert code == 0 and out == "HOLDS_EXHAUSTIVE\n"
    two = files("two.graph", disjoint_union(complete(8), complete(8)))
    code, out, _ = run(["certify", "--graph", two, "--nu", "1/10", "--tau", "1/4", "--mode", "exact"], capsys)
    assert code == 1 and out.splitlines()[0] == "FAILS" and out.splitlines()[1].startswith("witness ")


def test_certify_bipartite_side(files, capsys):
    from builders import complete_bipartite

    path = files("k88.graph", complete_bipartite(8))
    code, out, _ = run(["certify", "--graph", path, "--nu", "1/16", "--tau", "1/4", "--side-a", "0,1,2,3,4,5,6,7", "--mode", "exact"], capsys)
    assert code == 0 and out == "HOLDS_EXHAUSTIVE\n"


def test_certify_bound_and_environment(files, capsys, monkeypatch):
    big = files("k30.graph", complete(30))
    code, _, err = run(["certify", "--graph", big, "--nu", "1/10", "--tau", "1/4", "--mode", "exact"], capsys)
    assert code == 3 and "22" in err
    monkeypatch.setenv("RPT_EXHAUSTIVE_BOUND", "10")
    k16 = files("k16.graph", complete(16))
    assert run(["certify", "--graph", k16, "--nu", "1/10", "--tau", "1/4", "--mode", "exact"], capsys)[0] == 3
    monkeypatch.setenv("RPT_EXHAUSTIVE_BOUND", "ten")
    assert run(["certify", "--graph", k16, "--nu", "1/10", "--tau", "1/4", "--mode", "exact"], capsys)[0] == 2


def test_partition_and_validate(tmp_path, files, capsys):
    g, _ = gen_planted(PlantedSpec("expanders", (12, 12), bridge=2, seed=2))
    gpath = files("g.graph", g)
    ppath = tmp_path / "g.part"
    code, out, _ = run(["partition", "--graph", gpath, "--out", ppath], capsys)
    assert code == 0
    code, out, _ = run(["validate", "--graph", gpath, "--partition", ppath], capsys)
    assert code == 0 and out.splitlines()[-1] == "VALID"
    rp = partition_from_text(ppath.read_text())
    first, second = (sorted(c.vertices) for c in rp.classes)
    moved = first[-1]
    bad = tmp_path / "bad.part"
    lines = ppath.read_text().splitlines()
    lines[1] = "expander " + " ".join(map(str, first[:-1]))
    lines[2] = "expander " + " ".join(map(str, sorted(second + [moved])))
    bad.write_text("\n".join(lines) + "\n")
    code, out, _ = run(["validate", "--graph", gpath, "--partition", bad], capsys)
    assert code == 1 and out.splitlines()[-1] == "INVALID" and "D4" in out


def test_validate_tour_file(tmp_path, files, capsys):
    g, truth = gen_planted(PlantedSpec("expanders", (15, 15, 15), bridge=3, seed=0))
    gpath = files("g.graph", g)
    tour = tmp_path / "t.paths"
    assert run(["hamilton", "--graph", gpath, "--method", "pipeline", "--tour-out", tour], capsys)[0] == 0
    part = tmp_path / "g.part"
    run(["partition", "--graph", gpath, "--out", part], capsys)
    code, out, _ = run(["validate", "--graph", gpath, "--partition", part, "--tour", tour], capsys)
    assert code == 0 and "T4: pass" in out
    tour.write_text(tour.read_text().splitlines()[0] + "\n")
    code, out, _ = run(["validate", "--graph", gpath, "--partition", part, "--tour", tour], capsys)
    assert code == 1 and "T2: FAIL" in out


def test_longcycle(files, capsys):
    g, _ = gen_planted(PlantedSpec("expanders", (16, 16, 16, 16), bridge=1, seed=0))
    code, out, err = run(["longcycle", "--graph", files("g.graph", g), "--t", 2, "--r", 5, "--eps", "1/10"], capsys)
    assert code == 0 and len(out.split()) >= 32 and "bound 32" in err


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text("3 1\n1 0\n")
    code, _, err = run(["hamilton", "--graph", bad], capsys)
    assert code == 2 and "line 2" in err
    empty = tmp_path / "empty.graph"
    empty.write_text("")
    assert run(["hamilton", "--graph", empty], capsys)[0] == 2
    assert run(["hamilton", "--graph", tmp_path / "missing.graph"], capsys)[0] == 2


def test_argument_errors(files, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["hamilton", "--graph", "x", "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["certify", "--graph", "x", "--nu", "0.1", "--tau", "1/4"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_determinism(tmp_path, capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run(["generate", "--family", "random-regular", "--n", 20, "--degree", 6, "--seed", 11], capsys)
        outs.append(out)
    assert outs[0] == outs[1]
    g = tmp_path / "g.graph"
    g.write_text(outs[0])
    parts = [run(["partition", "--graph", g, "--seed", 3], capsys)[1] for _ in range(2)]
    assert parts[0] == parts[1]


def test_module_entry_point(tmp_path):
    target = tmp_path / "p.graph"
    target.write_text(graph_to_text(petersen()))
    proc = subprocess.run([sys.executable, "-m", "robustpart", "hamilton", "--graph", str(target)], capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout == "NON-HAMILTONIAN (exhaustive)\n"
    assert proc.stderr.startswith("seed: 0")
