import textwrap

import numpy as np
import pytest
from conftest import DATA

from fintripos.doctrine import Predicate
from fintripos.errors import LoadError
from fintripos.finset import finset, format_label, product_n
from fintripos.io import format_predicate, frame_element, load_files, load_framemap, load_workspace
from fintripos.lang import holds, parse_judgment
from fintripos.order import boolean, chain, lower_sets, two_chain, vee_poset
from fintripos.percat import is_per


def test_load_vee_workspace():
    ws = load_workspace(DATA / "vee.manifest")
    assert ws.name == "vee" and ws.mode == "tripos"
    assert ws.frame.id == "low(V)"
    assert list(ws.sets["A"].elements) == ["a0", "a1"]
    assert ws.maps["f"][2].as_dict() == {"a0": "b0", "a1": "b0"}
    rho = ws.preds["rho"]
    assert rho(("a0", "a1")) == "{l}"
    assert is_per(ws.sets["A"], rho)
    assert not is_per(ws.sets["A"], ws.preds["bad"])
    assert set(ws.pers) == {"X", "Y", "Z"} and set(ws.morphisms) == {"p", "s"}
    sig = ws.signature()
    assert holds(sig, parse_judgment("[x:A, y:A] rho(x,y) |- rho(y,x)", sig))


def test_load_framemap():
    ws = load_workspace(DATA / "vee.manifest")
    m = load_framemap(DATA / "collapse.framemap", ws.frame, two_chain())
    assert [m.cod.elements[t] for t in m.table] == ["0", "0", "0", "1", "1"]


def test_lower_set_labels_in_any_order():
    F, _ = lower_sets(vee_poset())
    assert frame_element(F, "{r,l}") == frame_element(F, "{l,r}")
    assert frame_element(F, "{top, l, r}") == F.top
    with pytest.raises(KeyError):
        frame_element(F, "{q}")


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(textwrap.dedent(text).lstrip())
    return p


@pytest.mark.parametrize("F", [two_chain(), chain(3), boolean(2)], ids=lambda F: F.id)
def test_predicate_round_trip(tmp_path, F):
    rng = np.random.default_rng(0)
    A, B = finset("A", 2), finset("B", 3)
    pred = Predicate(product_n([A, B]), F, rng.integers(0, F.n, size=6))
    fid = {"2": "2", "chain3": "chain3"}.get(F.id, "P")
    lines = ["set A", "elements " + " ".join(A.elements), "set B", "elements " + " ".join(B.elements)]
    if fid == "P":
        lines += ["poset P", "elements " + " ".join(F.elements)]
        lines += [f"le {F.elements[i]} {F.elements[j]}" for i in range(F.n) for j in range(F.n) if i != j and F.leq[i, j]]
    lines += [f"pred q on A*B in {fid}"] + format_predicate(pred)
    path = _write(tmp_path, "q.data", "\n".join(lines) + "\n")
    ws = load_files([path])
    back = ws.preds["q"]
    assert list(back.values) == list(pred.values)
    assert back.frame.n == F.n
    assert [format_label(e) for e in back.carrier] == [format_label(e) for e in pred.carrier]


MINIMAL = """\
set A
elements a b
"""


@pytest.mark.parametrize(
    "body,line,needle",
    [
        ("set A\nelements a a\n", 1, "duplicate element"),
        ("set A\nelements a\nset A\nelements b\n", 3, "duplicate set id"),
        ("bogus A\n", 1, "expected one of"),
        (MINIMAL + "map f : A -> A\na |-> a\n", 3, "no image for 'b'"),
        (MINIMAL + "map f : A -> A\na |-> z\nb |-> a\n", 4, "'z' is not an element of A"),
        (MINIMAL + "map f : A -> A\na b\n", 4, "expected '<label> |-> <label>'"),
        (MINIMAL + "pred p on A in 2\na |-> 1\nb |-> 7\n", 5, "'7' is not an element of frame 2"),
        (MINIMAL + "pred p on A in low(Q)\na |-> {}\n", 3, "unknown reference 'Q'"),
        (MINIMAL + "map f : C -> A\n", 3, "unknown reference 'C'"),
        ("poset P\nelements x y\nle x z\n", 3, "unknown element 'z'"),
        (MINIMAL + "per X carrier A rel r\n", 3, "unknown reference 'r'"),
    ],
)
def test_load_errors_carry_line_numbers(tmp_path, body, line, needle):
    path = _write(tmp_path, "bad.data", body)
    with pytest.raises(LoadError) as e:
        load_files([path])
    assert e.value.line == line
    assert needle in str(e.value)
    assert str(path) in str(e.value)


@pytest.mark.parametrize(
    "manifest,line,needle",
    [
        ("mode tripos\n", 1, "must start with a 'workspace' line"),
        ("workspace w\nmode fancy\n", 2, "unrecognized manifest line"),
        ("workspace w\ninclude nowhere.data\n", 2, "not found"),
    ],
)
def test_manifest_errors(tmp_path, manifest, line, needle):
    path = _write(tmp_path, "w.manifest", manifest)
    with pytest.raises(LoadError) as e:
        load_workspace(path)
    assert e.value.line == line and needle in str(e.value)


def test_unknown_frame_in_manifest(tmp_path):
    _write(tmp_path, "d.data", MINIMAL)
    path = _write(tmp_path, "w.manifest", "workspace w\nframe low(Nope)\ninclude d.data\n")
    with pytest.raises(LoadError, match="unknown frame"):
        load_workspace(path)


def test_missing_file():
    with pytest.raises(LoadError, match="cannot read"):
        load_files([DATA / "does-not-exist.data"])


def test_comments_and_blank_lines_ignored(tmp_path):
    path = _write(tmp_path, "c.data", "# header\n\nset A   # trailing\nelements a b # c\n")
    ws = load_files([path])
    assert list(ws.sets["A"].elements) == ["a", "b"]


def test_frame_resolution_fallbacks(tmp_path):
    path = _write(tmp_path, "d.data", MINIMAL + "pred p on A in chain3\na |-> 0\nb |-> 2\n")
    ws = load_files([path])
    assert ws.frame.id == "chain3"
    assert ws.signature().relations["p"].pred.values.tolist() == [0, 2]
