from pathlib import Path

import pytest

from openpaths import errors, fileio
from openpaths.matrix import RMatrix
from openpaths.netgraph import Graph, OpenGraph
from openpaths.qnet import OpenNet, QNet
from openpaths.quantale import INF, TROPICAL, TruncatedLanguage

FIX = Path(__file__).parent / "fixtures"

MATRICES = ["worked_M.json", "worked_N.json", "worked_composite.json",
            "chain_left.json", "chain_right.json"]
GRAPHS = ["loop_G.json", "loop_H.json", "edgeless.json", "trainroutes.json",
          "trainroutes_north.json", "trainroutes_south.json"]
NETS = ["small_net.json", "open_P.json", "open_Q.json", "zigzag_P.json", "zigzag_Q.json"]


@pytest.mark.parametrize("name", MATRICES)
def test_open_matrix_round_trip(name):
    text = (FIX / name).read_text()
    M = fileio.load_open_matrix(FIX / name)
    assert fileio.dumps(fileio.open_matrix_to_obj(M)) == text


def test_plain_matrix_round_trip():
    text = (FIX / "identity.json").read_text()
    assert fileio.dumps(fileio.matrix_to_obj(fileio.load_matrix(FIX / "identity.json"))) == text


@pytest.mark.parametrize("name", GRAPHS)
def test_graph_round_trip(name):
    text = (FIX / name).read_text()
    assert fileio.dumps(fileio.graph_to_obj(fileio.load_graph(FIX / name))) == text


@pytest.mark.parametrize("name", NETS)
def test_net_round_trip(name):
    text = (FIX / name).read_text()
    assert fileio.dumps(fileio.net_to_obj(fileio.load_net(FIX / name))) == text


def test_kinds_are_detected():
    assert isinstance(fileio.load_graph(FIX / "edgeless.json"), Graph)
    assert isinstance(fileio.load_graph(FIX / "loop_G.json"), OpenGraph)
    assert isinstance(fileio.load_net(FIX / "small_net.json"), QNet)
    assert isinstance(fileio.load_net(FIX / "open_P.json"), OpenNet)


def test_plan_files_resolve_relative_leaves():
    expr = fileio.load_expr(FIX / "chain_plan.json")
    assert expr.left.name == "chain_left.json"


def test_infinity_and_rectangular_matrices():
    M = RMatrix(["x"], ["a", "b"], TROPICAL, [[1.5, INF]])
    obj = fileio.matrix_to_obj(M)
    assert obj["entries"] == [[1.5, "inf"]] and obj["columns"] == ["a", "b"]
    assert fileio.matrix_from_obj(fileio.loads(fileio.dumps(obj))).identical(M)


def test_language_entries():
    q = TruncatedLanguage("ab", 2)
    M = RMatrix.square(["u"], q, [[{"a", "ab"}]])
    back = fileio.matrix_from_obj(fileio.loads(fileio.dumps(fileio.matrix_to_obj(M))))
    assert back == M


def test_dumps_layout():
    text = fileio.dumps({"vertices": ["a", "b"], "entries": [[0, "inf"], [1, 2]]})
    assert text == ('{\n  "vertices": ["a", "b"],\n  "entries": [\n'
                    '    [0, "inf"],\n    [1, 2]\n  ]\n}\n')


class TestErrors:
    def test_syntax_error_position(self):
        with pytest.raises(errors.ParseError) as info:
            fileio.loads('{\n  "a": 1,\n  oops\n}', source="bad.json")
        assert info.value.line == 3 and info.value.column == 3
        assert str(info.value).startswith("bad.json:3:3:")

    def test_missing_file(self, tmp_path):
        with pytest.raises(errors.ParseError):
            fileio.load_file(tmp_path / "absent.json")

    def test_missing_key(self):
        with pytest.raises(errors.ParseError, match="entries"):
            fileio.matrix_from_obj({"quantale": "tropical", "vertices": ["a"]})

    def test_ragged_rows(self):
        with pytest.raises(errors.ParseError):
            fileio.matrix_from_obj({"quantale": "tropical", "vertices": ["a", "b"],
                                    "entries": [[0, 1], [2]]})

    def test_bad_literal(self):
        with pytest.raises(errors.ParseError):
            fileio.matrix_from_obj({"quantale": "viterbi", "vertices": ["a"], "entries": [[2]]})

    def test_leg_to_unknown_vertex(self):
        obj = fileio.load_file(FIX / "worked_M.json")
        obj["leg_in"]["1"] = "zz"
        with pytest.raises(errors.ParseError):
            fileio.open_matrix_from_obj(obj)

    def test_net_coefficient_outside_kind(self):
        obj = fileio.load_file(FIX / "small_net.json")
        obj["kind"] = "bounded:2"
        with pytest.raises(errors.ParseError):
            fileio.net_from_obj(obj)

    def test_unknown_expression_op(self):
        with pytest.raises(errors.ParseError):
            fileio.expr_from_obj({"op": "braid"})

    def test_parse_error_exit_code(self):
        assert errors.ParseError("x").exit_code == 2


class TestDot:
    def test_graph_round_trip(self):
        G = fileio.load_graph(FIX / "trainroutes.json")
        back = fileio.graph_from_dot(fileio.graph_to_dot(G))
        assert sorted(back.vertices) == sorted(G.vertices)
        assert sorted(back.edges) == sorted(G.edges)

    def test_edgeless_has_nodes_only(self):
        text = fileio.graph_to_dot(fileio.load_graph(FIX / "edgeless.json"))
        assert '"u";' in text and "->" not in text
        assert list(fileio.graph_from_dot(text).vertices) == ["u", "v"]

    def test_matrix_skips_bottom(self):
        text = fileio.matrix_to_dot(fileio.load_matrix(FIX / "identity.json"))
        assert text.count("->") == 3

    def test_net_arcs(self):
        text = fileio.net_to_dot(fileio.load_net(FIX / "small_net.json"))
        assert '"t:t2" -> "p2" [label="2"];' in text

    def test_unlabelled_edges_get_ids(self):
        G = fileio.graph_from_dot("digraph g {\n  a -> b;\n  b -> a\n}\n")
        assert G.edges == (("e0", "a", "b"), ("e1", "b", "a"))

    def test_rejects_garbage(self):
        with pytest.raises(errors.ParseError) as info:
            fileio.graph_from_dot("digraph g {\n  a -> ;\n}\n")
        assert info.value.line == 2
