from fractions import Fraction

import pytest

from pmvforge.core.elections import VotingRule
from pmvforge.core.elections import loser
from pmvforge.core.elections import winner
from pmvforge.core.polyhedra import Polyhedron
from pmvforge.core.settings import PmvSetting
from pmvforge.core.settings import PriceTable
from pmvforge.core.settings import SettingFamily
from pmvforge.core.settings import VoteOperationSet
from pmvforge.core.settings import build_cm_copeland
from pmvforge.core.settings import build_cm_pairwise
from pmvforge.core.settings import build_cm_scoring
from pmvforge.core.settings import build_cm_stv
from pmvforge.core.settings import build_cml_scoring
from pmvforge.core.settings import build_family
from pmvforge.core.settings import operation_kind
from pmvforge.core.settings import scoring_winner_polyhedron
from pmvforge.core.settings import vote_ops


@pytest.mark.parametrize(
    "kind, m, a, b, expected",
    [
        ("change", 2, None, None, 2),
        ("change", 3, None, None, 30),
        ("add", 3, None, None, 6),
        ("delete", 3, None, None, 6),
        ("generalized", 3, None, None, 42),
        # 3 rankings prefer 2 to 1, each can move to 5 others
        ("motivated", 3, 1, 2, 15),
        ("motivated", 4, 3, 1, 12 * 23),
    ],
)
def test_vote_ops(kind, m, a, b, expected):
    ops = vote_ops(kind, m, a, b)
    assert ops.kind == kind
    assert len(ops) == expected
    assert len(ops.labels) == expected
    assert len(set(ops.labels)) == expected
    for row in ops.matrix:
        assert sum(row) in (-1, 0, 1)


def test_vote_ops_labels():
    assert vote_ops("add", 2).labels == ("+1>2", "+2>1")
    assert vote_ops("delete", 2).labels == ("-1>2", "-2>1")
    ops = vote_ops("change", 2)
    assert ops.labels == ("1>2 -> 2>1", "2>1 -> 1>2")
    assert ops.matrix[1] == (Fraction(1), Fraction(-1))
    for label in vote_ops("motivated", 3, 1, 2).labels:
        source = label.split(" -> ")[0]
        assert source.index("2") < source.index("1")


@pytest.mark.parametrize(
    "kind, a, b, error_msg",
    [
        ("swap", None, None, "Unknown operation kind 'swap'"),
        ("motivated", None, 2, "two different alternatives"),
        ("motivated", 2, 2, "two different alternatives"),
        ("motivated", 1, 4, "not in 1..3"),
    ],
)
def test_vote_ops_errors(kind, a, b, error_msg):
    with pytest.raises(ValueError, match=error_msg):
        vote_ops(kind, 3, a, b)


def test_vote_operation_set():
    ops = vote_ops("change", 3)
    subset = ops.select(["3>2>1 -> 1>2>3", "1>2>3 -> 3>2>1"])
    assert subset.labels == ("3>2>1 -> 1>2>3", "1>2>3 -> 3>2>1")
    assert subset.matrix[0] == tuple(Fraction(v) for v in [1, 0, 0, 0, 0, -1])
    with pytest.raises(ValueError, match="Unknown operation '1>2>3 -> 1>2>3'"):
        ops.select(["1>2>3 -> 1>2>3"])
    with pytest.raises(ValueError, match="does not change anything"):
        VoteOperationSet("change", [[0, 0]], ["noop"], 2)
    with pytest.raises(ValueError, match="Expected 1 labels, got 2"):
        VoteOperationSet("change", [[1, -1]], ["a", "b"], 2)
    with pytest.raises(ValueError, match="Unknown operation kind"):
        VoteOperationSet("swap", [[1, -1]], ["a"], 2)


def test_vote_operation_set_outflow():
    ops = vote_ops("change", 3)
    subset = ops.select(["3>2>1 -> 1>2>3", "1>2>3 -> 3>2>1"])
    assert subset.outflow() == ((0, (0, 1)), (5, (1, 0)))
    assert vote_ops("add", 3).outflow() == ()
    outflow = dict(vote_ops("delete", 2).outflow())
    assert outflow == {0: (1, 0), 1: (0, 1)}
    # every change takes one vote from exactly one ranking
    totals = [0] * len(ops)
    for _, coefficients in ops.outflow():
        totals = [t + c for t, c in zip(totals, coefficients)]
    assert totals == [1] * len(ops)


@pytest.mark.parametrize(
    "label, expected",
    [
        ("1>2 -> 2>1", "change"),
        ("+1>2>3", "add"),
        ("-3>2>1", "delete"),
    ],
)
def test_operation_kind(label, expected):
    assert operation_kind(label) == expected


def test_operation_kind_error():
    with pytest.raises(ValueError, match="Cannot read operation label"):
        operation_kind("1>2")


def test_price_table():
    prices = PriceTable()
    assert prices.price("1>2 -> 2>1") == 1
    assert prices.price("+1>2") is None
    assert prices.price("-1>2") is None

    prices = PriceTable(change={"default": 3, "1>2 -> 2>1": "3/2"}, add=2)
    assert prices.price("1>2 -> 2>1") == Fraction(3, 2)
    assert prices.price("2>1 -> 1>2") == 3
    assert prices.price("+2>1") == 2
    assert PriceTable.from_dict(prices.to_dict()) == prices
    assert prices != PriceTable()
    assert repr(PriceTable()).startswith("PriceTable(")

    # missing kinds are forbidden
    prices = PriceTable.from_dict({"delete": 1})
    assert prices.price("1>2 -> 2>1") is None
    assert prices.price("-1>2") == 1

    with pytest.raises(ValueError, match="must be positive"):
        PriceTable(change=0)


def test_setting(toy):
    assert toy.q == 2
    assert toy.costs == (Fraction(1),)
    assert PmvSetting.from_dict(toy.to_dict()) == toy
    assert toy.to_dict()["A_S"] == [["1", "-1"]]
    assert toy.to_dict()["costs"] == ["1"]

    ops = vote_ops("change", 2)
    source = Polyhedron([[1, -1]], [0])
    with pytest.raises(ValueError, match="differ"):
        PmvSetting("s", source, Polyhedron([[1, 0, 0]], [0]), ops)
    with pytest.raises(ValueError, match="Expected 2 costs"):
        PmvSetting("s", source, source, ops, [1])
    with pytest.raises(ValueError, match="minimum 1"):
        PmvSetting("s", source, source, ops, [2, 3])
    with pytest.raises(ValueError, match="minimum 1"):
        PmvSetting("s", source, source, ops, ["1/2", 1])


def test_setting_family(toy, toy_family):
    assert len(toy_family) == 1
    assert list(toy_family) == [toy]
    assert toy_family.q == 2
    assert SettingFamily.from_dict(toy_family.to_dict()) == toy_family
    single = SettingFamily.from_dict(toy.to_dict())
    assert single.settings == (toy,)
    assert single.rule is None

    family = SettingFamily("toy", None, [toy], budget_scale="1/2")
    assert family.scaled_budget(3) == 6

    with pytest.raises(ValueError, match="at least one setting"):
        SettingFamily("toy", None, [])
    other = build_cm_scoring([1, 0, 0], 1, 2)
    with pytest.raises(ValueError, match="same dimension"):
        SettingFamily("toy", None, [toy, other])


@pytest.mark.parametrize("scores", [(1, 0, 0), (2, 1, 0), (1, 1, 0), (3, 1, 0)])
@pytest.mark.parametrize("a", [1, 2, 3])
def test_scoring_winner_polyhedron(scores, a):
    rule = VotingRule.scoring(scores)
    polyhedron = scoring_winner_polyhedron(scores, a)
    for hist in pytest.histograms(4, 6):
        assert polyhedron.contains(hist) == (winner(rule, hist) == a)


def test_scoring_winner_polyhedron_error():
    with pytest.raises(ValueError, match="not in 1..3"):
        scoring_winner_polyhedron([1, 0, 0], 0)


@pytest.mark.parametrize("scores", [(1, 0, 0), (2, 1, 0)])
@pytest.mark.parametrize("a, b", [(1, 2), (2, 1), (3, 1), (2, 3)])
def test_build_cm_scoring(scores, a, b):
    rule = VotingRule.scoring(scores)
    setting = build_cm_scoring(scores, a, b)
    assert setting.ops.kind == "motivated"
    found = False
    for hist in pytest.histograms(5, 6):
        if setting.source.contains(hist):
            found = True
            assert winner(rule, hist) == a
        if setting.target.contains(hist):
            assert winner(rule, hist) == b
    assert found


@pytest.mark.parametrize("scores", [(1, 0, 0), (2, 1, 0)])
@pytest.mark.parametrize("a, b", [(1, 3), (1, 2), (2, 3), (3, 1)])
def test_build_cml_scoring(scores, a, b):
    rule = VotingRule.scoring(scores)
    setting = build_cml_scoring(scores, a, b)
    for hist in pytest.histograms(5, 6):
        if setting.source.contains(hist):
            assert winner(rule, hist) == a
            assert loser(rule, hist) == b
        if setting.target.contains(hist):
            assert winner(rule, hist) == b


def test_build_cml_scoring_veto():
    with pytest.raises(ValueError, match="Under veto"):
        build_cml_scoring([1, 1, 0], 1, 3)
    with pytest.raises(ValueError, match="must differ"):
        build_cml_scoring([2, 1, 0], 1, 1)


@pytest.mark.parametrize(
    "rule",
    [
        VotingRule.ranked_pairs(3),
        VotingRule.schulze(3),
        VotingRule.maximin(3),
    ],
)
def test_build_cm_pairwise(rule):
    setting = build_cm_pairwise(rule)
    for hist in pytest.histograms(5, 6):
        if setting.source.contains(hist):
            assert winner(rule, hist) == 1
        if setting.target.contains(hist):
            assert winner(rule, hist) == 2


def test_build_cm_pairwise_errors():
    with pytest.raises(ValueError, match="Expected ranked pairs"):
        build_cm_pairwise(VotingRule.borda(3))
    with pytest.raises(ValueError, match="at least 3 alternatives"):
        build_cm_pairwise(VotingRule.schulze(2))


def test_build_cm_stv():
    rule = VotingRule.stv(3)
    setting = build_cm_stv(3)
    for hist in pytest.histograms(6, 6):
        if setting.source.contains(hist):
            assert winner(rule, hist) == 1
        if setting.target.contains(hist):
            assert winner(rule, hist) == 2
    assert len(build_cm_stv(4).source) == 31


@pytest.mark.parametrize(
    "alpha, parity, n",
    [
        ("1/2", "odd", 5),
        ("1/2", "even", 4),
        ("1", "even", 4),
        ("0", "odd", 5),
        ("0", "even", 4),
    ],
)
def test_build_cm_copeland(alpha, parity, n):
    rule = VotingRule.copeland(3, alpha=alpha)
    setting = build_cm_copeland(alpha, parity, 3)
    for hist in pytest.histograms(n, 6):
        if setting.source.contains(hist):
            assert winner(rule, hist) == 1
        if setting.target.contains(hist):
            assert winner(rule, hist) == 2


@pytest.mark.parametrize(
    "alpha, parity, m, error_msg",
    [
        ("2", "odd", 3, r"\[0, 1\]"),
        ("1/2", "many", 3, "Unknown parity 'many'"),
        ("1/2", "odd", 2, "at least 3 alternatives"),
    ],
)
def test_build_cm_copeland_errors(alpha, parity, m, error_msg):
    with pytest.raises(ValueError, match=error_msg):
        build_cm_copeland(alpha, parity, m)


@pytest.mark.parametrize(
    "problem, rule, d, expected",
    [
        ("CM", VotingRule.borda(3), None, 6),
        ("CM", VotingRule.plurality(4), None, 12),
        ("MoV", VotingRule.plurality(3), None, 6),
        ("CML", VotingRule.borda(3), None, 6),
        ("CCAV", VotingRule.borda(3), 2, 1),
        ("e-CCAV", VotingRule.borda(3), 2, 2),
        ("DCDV", VotingRule.plurality(3), 1, 2),
        ("e-DCDV", VotingRule.plurality(3), 1, 2),
        ("CB", VotingRule.borda(3), 3, 1),
        ("e-DB", VotingRule.veto(3), 3, 2),
        ("CM", VotingRule.schulze(3), None, 1),
        ("MoV", VotingRule.stv(4), None, 1),
        ("e-CCAV", VotingRule.maximin(3), 1, 1),
        ("e-DCDV", VotingRule.copeland(3), 2, 1),
    ],
)
def test_build_family(problem, rule, d, expected):
    family = build_family(problem, rule, d=d)
    assert len(family) == expected
    assert family.problem == problem
    assert family.rule == rule
    assert SettingFamily.from_dict(family.to_dict()) == family


def test_build_family_operations():
    family = build_family("MoV", VotingRule.plurality(3))
    assert all(s.ops.kind == "change" for s in family)
    family = build_family("CM", VotingRule.borda(3))
    assert all(s.ops.kind == "motivated" for s in family)
    family = build_family("CCAV", VotingRule.borda(3), d=1)
    assert all(s.ops.kind == "add" for s in family)
    family = build_family("CCDV", VotingRule.borda(3), d=1)
    # deletions must keep at least one vote
    for setting in family:
        assert not setting.target.contains((0,) * 6)
        assert setting.target.contains((1, 0, 0, 0, 0, 0))


def test_build_family_bribery_prices():
    prices = PriceTable(change=2, add=4)
    family = build_family("CB", VotingRule.plurality(3), d=1, prices=prices)
    setting = family.settings[0]
    assert len(setting.ops) == 36
    assert family.budget_scale == 2
    assert sorted(set(setting.costs)) == [1, 2]
    assert family.scaled_budget(4) == 2
    assert family.prices == prices
    assert SettingFamily.from_dict(family.to_dict()).prices == prices
    # only bribery families carry prices
    assert build_family("CM", VotingRule.plurality(3), prices=prices).prices is None
    with pytest.raises(ValueError, match="All operations are forbidden"):
        build_family("CB", VotingRule.plurality(3), d=1, prices=PriceTable(None))


def test_build_family_effective_sources():
    rule = VotingRule.plurality(3)
    constructive = build_family("e-CCAV", rule, d=3)
    for setting in constructive:
        assert not setting.source.contains((0, 0, 0, 0, 1, 0))
    destructive = build_family("e-DCAV", rule, d=3)
    for setting in destructive:
        assert setting.source.contains((0, 0, 0, 0, 1, 0))


def test_build_family_control_construction():
    rule = VotingRule.schulze(3)
    d1 = build_family("e-CCAV", rule, d=1).settings[0]
    d2 = build_family("e-CCAV", rule, d=2).settings[0]
    assert d1.source == d2.target
    assert d1.target == d2.source
    dd2 = build_family("e-DCAV", rule, d=2).settings[0]
    assert dd2.source == d1.source


@pytest.mark.parametrize(
    "problem, rule, d, error_msg",
    [
        ("XYZ", VotingRule.borda(3), None, "Unknown problem 'XYZ'"),
        ("CCAV", VotingRule.borda(3), None, "needs an alternative d"),
        ("CCAV", VotingRule.borda(3), 4, "needs an alternative d"),
        ("CML", VotingRule.veto(3), None, "Under veto"),
        ("CML", VotingRule.schulze(3), None, "only supported for positional"),
        ("CCAV", VotingRule.schulze(3), 1, "only supported for positional"),
        ("e-CB", VotingRule.schulze(3), 1, "only supported for positional"),
        ("e-CCAV", VotingRule.schulze(3), 3, "d in \\[1, 2\\]"),
        ("e-CCAV", VotingRule.copeland(3, alpha=0), 1, "alpha 0"),
        ("CM", VotingRule.plurality_runoff(3), None, "No construction"),
        ("CM", VotingRule.schulze(2), None, "at least 3 alternatives"),
    ],
)
def test_build_family_errors(problem, rule, d, error_msg):
    with pytest.raises(ValueError, match=error_msg):
        build_family(problem, rule, d=d)
