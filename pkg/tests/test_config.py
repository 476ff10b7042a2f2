import pytest
from hypothesis import given, settings, strategies as st

from conftest import ALL_FIXTURES
from qgsurgeon.config import (
    AmbientInvariants,
    BlowupStmt,
    ChainStmt,
    ConfigError,
    Configuration,
    ConstructionScript,
    Curve,
    CurveStmt,
    ExpectStmt,
    Expectations,
    K3,
    MeetStmt,
    PointStmt,
    ScriptError,
    format_script,
    intersection_matrix,
    is_valid_name,
    parse_script,
    validate,
)
from qgsurgeon.blowup import run_script


# ------------------------------------------------------------------ ambient

def test_k3_preset_satisfies_noether():
    assert K3.as_dict() == {"k2": 0, "euler": 24, "signature": -16, "chi": 2}
    assert K3.violations() == []


def test_blown_up_shifts_all_three():
    assert K3.blown_up(6) == AmbientInvariants(-6, 30, -22, 2)
    assert K3.blown_up(6).violations() == []


def test_ambient_violations_name_the_identity():
    bad = AmbientInvariants(1, 24, -16, 2).violations()
    assert len(bad) == 1 and "Noether" in bad[0]
    bad = AmbientInvariants(0, 24, -12, 2).violations()
    assert len(bad) == 1 and "signature" in bad[0]


# ------------------------------------------------------------------ curves

@pytest.mark.parametrize("self_int,pa,k", [(0, 1, 0), (-2, 0, 0), (-1, 0, -1), (-4, 0, 2), (3, 2, -1)])
def test_from_genus_uses_adjunction(self_int, pa, k):
    c = Curve.from_genus("C", self_int, pa)
    assert c.k_dot == k
    assert c.violations() == []


def test_curve_violations():
    assert "adjunction" in Curve("C", -2, 1, 0).violations()[0]
    assert any("negative" in v for v in Curve("C", -1, -1, -1).violations())


def test_configuration_builders_and_errors():
    cfg = Configuration(K3).with_curve(Curve.from_genus("A", -2, 0))
    cfg = cfg.with_curve(Curve.from_genus("B", -2, 0)).with_pairing("B", "A", 1)
    assert cfg.pairing("A", "B") == cfg.pairing("B", "A") == 1
    assert cfg.pairing("A", "A") == -2
    assert cfg.neighbours("A") == {"B": 1}
    with pytest.raises(ConfigError):
        cfg.with_curve(Curve.from_genus("A", -1, 0))
    with pytest.raises(ConfigError):
        cfg.with_pairing("A", "A", 1)
    with pytest.raises(ConfigError):
        cfg.with_pairing("A", "Z", 1)
    with pytest.raises(ConfigError):
        cfg.with_pairing("A", "B", -1)
    with pytest.raises(ConfigError):
        cfg.with_point("p", [("A", 0)])
    assert cfg.with_pairing("A", "B", 0).pairings == {}
    cfg = cfg.with_point("p", [("A", 1), ("B", 1)])
    with pytest.raises(ConfigError):
        cfg.with_point("p", [])
    dropped = cfg.without_curve("B")
    assert set(dropped.curves) == {"A"} and dropped.pairings == {}
    assert dropped.points == {"p": (("A", 1),)}


def test_validate_reports_each_problem():
    cfg = Configuration(AmbientInvariants(1, 24, -16, 2), {"C": Curve("C", -2, 1, 0)})
    problems = validate(cfg)
    assert len(problems) == 2


def test_intersection_matrix_symmetric_and_permutes():
    cfg = run_script(parse_script(_fixture("k2_main"))).config
    ids = sorted(cfg.curves)
    m = intersection_matrix(cfg, ids)
    assert all(m[i][j] == m[j][i] for i in range(len(ids)) for j in range(len(ids)))
    perm = list(reversed(ids))
    mp = intersection_matrix(cfg, perm)
    k = len(ids)
    assert all(mp[i][j] == m[k - 1 - i][k - 1 - j] for i in range(k) for j in range(k))
    with pytest.raises(ConfigError):
        intersection_matrix(cfg, ["D1", "D1"])
    with pytest.raises(ConfigError):
        intersection_matrix(cfg, ["nope"])


# ------------------------------------------------------------------ parser

def _fixture(name):
    from qgsurgeon.cli import fixtures_dir

    return (fixtures_dir() / f"{name}.qgs").read_text()


def test_main_fixture_shape():
    s = parse_script(_fixture("k2_main"))
    assert s.base == AmbientInvariants(-1, 25, -17, 2)
    assert len(s.of_type(CurveStmt)) == 10
    assert len(s.of_type(BlowupStmt)) == 5
    assert [c.id for c in s.of_type(ChainStmt)] == ["A", "B", "C"]
    assert s.expectations == Expectations(k2=2, euler=22, chi=2)


def test_torsion_expectation():
    s = parse_script(_fixture("k2_z2"))
    assert s.expectations.torsion == (2,)
    assert parse_script("expect { torsion = 0 }").expectations.torsion == ()
    assert parse_script("expect { torsion = trivial }").expectations.torsion == ()
    assert parse_script("expect { torsion = Z/4 + Z/2 }").expectations.torsion == (2, 4)


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_every_fixture_parses_and_validates(name):
    run = run_script(parse_script(_fixture(name)))
    assert validate(run.config) == []


def test_surface_defaults_to_k3():
    s = parse_script("curve C { self = -2, pa = 0 }")
    assert s.base == K3 and s.base_tag == "K3"
    assert parse_script("").statements == ()


def test_optional_k_field():
    s = parse_script("curve C { self = -2, pa = 0, k = 0 }")
    assert s.statements[0].curve() == Curve("C", -2, 0, 0)


def _err(text):
    with pytest.raises(ScriptError) as exc:
        parse_script(text)
    return exc.value


def test_duplicate_name_has_position():
    e = _err("curve A { self = -2, pa = 0 }\ncurve A { self = -2, pa = 0 }")
    assert e.line == 2 and e.column == 7 and "duplicate" in e.message


def test_names_share_one_namespace():
    e = _err("curve A { self = -2, pa = 0 }\npoint A")
    assert "duplicate" in e.message


def test_forward_reference_rejected():
    e = _err("meet A B\ncurve A { self = -2, pa = 0 }\ncurve B { self = -2, pa = 0 }")
    assert e.line == 1 and "undeclared" in e.message


def test_kind_mismatch_rejected():
    e = _err("point p\nchain C = p")
    assert "point" in e.message and "curve" in e.message


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("curve A { self = -2, pa = 0 }\npoint p on A:0", "below 1"),
        ("curve A { self = -2.5, pa = 0 }", "non-integer"),
        ("curve A { self = -2, pa = -1 }", "below 0"),
        ("curve A { self = -2 }", "self and pa"),
        ("curve A { self = -2, pa = 0, self = -3 }", "twice"),
        ("curve A { self = -2, genus = 0 }", "unknown field"),
        ("frobnicate", "unknown statement"),
        ("curve C { self = -2, pa = 0 }\nsurface K3", "first"),
        ("surface Enriques", "preset"),
        ("surface custom { k2 = 0 }", "lacks"),
        ("curve A { self = -2, pa = 0 } extra", "trailing"),
        ("curve chain { self = -2, pa = 0 }", "keyword"),
        ("expect { torsion = Z/1 }", "order 1"),
        ("curve A { self = -2, pa = 0 }\nmeet A A", "itself"),
        ("curve A { self = -2, pa = 0 }\npoint p on A:1, A:1", "twice"),
        ("chain X =", "empty chain"),
        ("curve A { self = -2; pa = 0 }", "unexpected character"),
    ],
)
def test_parse_errors(text, fragment):
    e = _err(text)
    assert fragment in str(e)
    assert e.line >= 1 and e.column >= 1


def test_bytes_input_must_be_utf8():
    assert parse_script(b"surface K3").base == K3
    with pytest.raises(ScriptError):
        parse_script(b"\xff\xfe")


def test_comments_and_blank_lines_ignored():
    s = parse_script("# header\n\n   \ncurve A { self = -2, pa = 0 }  # trailing\n")
    assert s.of_type(CurveStmt)[0].line == 4


def test_name_rules():
    assert is_valid_name("X4") and is_valid_name("P_1") and is_valid_name("E'")
    assert not is_valid_name("4X") and not is_valid_name("chain") and not is_valid_name("")


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_fixture_roundtrip(name):
    s = parse_script(_fixture(name))
    assert parse_script(format_script(s)).structure() == s.structure()


# a strategy for well-formed scripts: names are declared before use
_names = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,5}", fullmatch=True).filter(is_valid_name)


@st.composite
def scripts(draw):
    base = draw(st.sampled_from([("K3", K3), ("custom", AmbientInvariants(-1, 25, -17, 2))]))
    used = set()

    def fresh():
        n = draw(_names.filter(lambda x: x not in used))
        used.add(n)
        return n

    stmts, curves, points = [], [], []
    for _ in range(draw(st.integers(0, 12))):
        kind = draw(st.sampled_from(["curve", "meet", "point", "blowup", "chain", "expect"]))
        if kind == "curve" or (kind in ("meet", "chain") and len(curves) < 2):
            cid = fresh()
            k = draw(st.none() | st.integers(-5, 5))
            stmts.append(CurveStmt(cid, draw(st.integers(-9, 9)), draw(st.integers(0, 3)), k))
            curves.append(cid)
        elif kind == "meet":
            a, b = draw(st.lists(st.sampled_from(curves), min_size=2, max_size=2, unique=True))
            stmts.append(MeetStmt(a, b, draw(st.integers(1, 4))))
        elif kind == "point" or (kind == "blowup" and not points):
            on = draw(st.lists(st.sampled_from(curves), unique=True, max_size=3)) if curves else []
            pid = fresh()
            stmts.append(PointStmt(pid, tuple((c, draw(st.integers(1, 3))) for c in on)))
            points.append(pid)
        elif kind == "blowup":
            eid = fresh()
            stmts.append(BlowupStmt(points.pop(0), eid))
            curves.append(eid)
        elif kind == "chain":
            members = draw(st.lists(st.sampled_from(curves), min_size=1, max_size=5))
            stmts.append(ChainStmt(fresh(), tuple(members)))
        else:
            tors = draw(st.none() | st.lists(st.integers(2, 9), max_size=3).map(lambda l: tuple(sorted(l))))
            stmts.append(ExpectStmt(Expectations(
                draw(st.none() | st.integers(-9, 9)), draw(st.none() | st.integers(0, 40)),
                draw(st.none() | st.integers(0, 4)), tors)))
    stmts = [s for s in stmts if not (isinstance(s, ExpectStmt) and s.expect == Expectations())]
    return ConstructionScript(base[1], base[0], tuple(stmts))


@settings(max_examples=200, deadline=None)
@given(scripts())
def test_format_parse_roundtrip(script):
    text = format_script(script)
    assert parse_script(text).structure() == script.structure()
    assert format_script(parse_script(text)) == text
