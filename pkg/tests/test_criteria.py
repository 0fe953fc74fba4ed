import pytest

from oracles import oracle_overlaps
from prost import corpus
from prost.criteria import (
    check_linearities,
    check_no_os_or,
    check_spare,
    check_wcr_bounded,
    critical_overlaps,
    run_criteria,
)
from prost.errors import NotATrsError


def test_linearities_p1():
    ll, rl, ne = check_linearities(corpus.load("p1"))
    assert ll and not rl and ne


def test_linearities_p2():
    ll, rl, ne = check_linearities(corpus.load("p2"))
    assert not ll and rl and not ne


def test_linearities_r2_erasing():
    ll, rl, ne = check_linearities(corpus.load("r2"))
    assert not ne


def test_overlaps_r_d_empty():
    assert critical_overlaps(corpus.load("r_d")) == []


def test_overlaps_r1_single_root_class():
    overlaps = critical_overlaps(corpus.load("r1"))
    assert [(o.rule_i, o.rule_j, o.position) for o in overlaps] == [(1, 2, ())]
    assert overlaps[0].root


def test_overlaps_p5_only_at_root():
    overlaps = critical_overlaps(corpus.load("p5"))
    assert overlaps and all(o.root for o in overlaps)
    assert {(o.rule_i, o.rule_j) for o in overlaps} == {(0, 1)}


def test_no_os_or_r1():
    p = corpus.load("r1")
    ll, _, _ = check_linearities(p)
    no, os_, or_ = check_no_os_or(critical_overlaps(p), ll)
    assert not no and os_ and not or_


def test_no_os_or_p4():
    p = corpus.load("p4")
    ll, rl, _ = check_linearities(p)
    assert ll and rl
    no, os_, _ = check_no_os_or(critical_overlaps(p), ll)
    assert os_ and not no


def test_no_os_or_p_rw():
    p = corpus.load("p_rw")
    ll, _, _ = check_linearities(p)
    no, os_, or_ = check_no_os_or(critical_overlaps(p), ll)
    assert no and os_ and or_


def test_wcr_r1_not_joinable():
    assert check_wcr_bounded(corpus.load("r1"), 3) == "no"


def test_wcr_r_d_vacuous():
    assert check_wcr_bounded(corpus.load("r_d"), 2) == "yes"


def test_wcr_no_system_never_no():
    # non-overlapping systems have no critical pairs
    for name in ("r_d", "r2", "r4"):
        p = corpus.load(name)
        if not critical_overlaps(p):
            assert check_wcr_bounded(p, 3) == "yes"


def test_wcr_rejects_probabilistic():
    with pytest.raises(NotATrsError):
        check_wcr_bounded(corpus.load("p_rw"), 3)


def test_spare_p8_ground_constructor():
    result = check_spare(corpus.load("p8"))
    assert result.verdict == "yes"
    assert result.justification == "ground-constructor-arguments"


def test_spare_p9_unknown():
    # conservative: the shipped sufficient conditions cannot certify p9
    assert check_spare(corpus.load("p9")).verdict == "unknown"


def test_spare_right_linear_shortcut():
    result = check_spare(corpus.load("p_rw"))
    assert result.verdict == "yes"
    assert result.justification == "right-linear"


def test_spare_p1_witness():
    result = check_spare(corpus.load("p1"))
    assert result.verdict == "no-witness"
    assert "d(g)" in result.justification or "g" in result.justification


def test_overlap_oracle_agreement_corpus():
    for name in corpus.corpus_names():
        p = corpus.load(name)
        got = {(o.rule_i, o.rule_j, o.position) for o in critical_overlaps(p)}
        assert got == oracle_overlaps(p), name


def test_report_invariants_all_corpus():
    for name in corpus.corpus_names():
        r = run_criteria(corpus.load(name))
        assert r.orthogonal == (r.non_overlapping and r.left_linear)
        assert r.linear == (r.left_linear and r.right_linear)
        if r.non_overlapping:
            assert r.overlay
        if r.right_linear:
            assert r.spare.verdict == "yes"
        if r.non_overlapping and r.trivial_probabilities:
            assert r.wcr_bounded != "no"
