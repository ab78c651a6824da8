import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from causens.core import StrengthMatrix, TrustMatrix
from causens.rules import (AllTrustZero, PairEvidence, apply_rules, combine_pair,
                           trust_floor_filter, wcs)

from oracles import rule_truth_table

TRUST_GRID = (0, 0.5, 1, 1.9, 2.0, 2.1, 9.9, 10.0, 10.1, 50)
STRENGTHS = (0.4, 0.9, 0.55, 0.7)


def pair_matrices(strengths, trusts):
    """Four 2x2 learner matrices carrying the evidence in entry (0, 1)."""
    mes, ts = [], []
    for s, t in zip(strengths, trusts):
        m = np.zeros((2, 2))
        m[0, 1] = s
        tr = np.zeros((2, 2))
        tr[0, 1] = t
        mes.append(StrengthMatrix(m))
        ts.append(TrustMatrix(tr))
    return mes, ts


def test_trust_floor_boundary():
    me = StrengthMatrix(np.array([[0, 0.8], [0.8, 0]]))
    t = TrustMatrix(np.array([[0, 0.9], [1.0, 0]]))
    out = trust_floor_filter(me, t).s
    assert out[0, 1] == 0 and out[1, 0] == 0.8


def test_wcs_examples():
    assert wcs([0.4, 0.6, 0, 0.5], [2, 3, 0, 5]) == pytest.approx(0.51)
    assert wcs([0.4, 0.6, 0, 0.5], [0, 7, 0, 0]) == pytest.approx(0.6)
    assert wcs([0.3] * 4, [4] * 4) == pytest.approx(0.3)
    with pytest.raises(AllTrustZero):
        wcs([0, 0], [0, 0])


def test_rule_examples():
    assert combine_pair(PairEvidence((0.8, 0, 0, 0), (50, 0, 0, 0))) == 0
    assert combine_pair(PairEvidence((0.8, 0.6, 0, 0), (12, 0.5, 0, 0))) > 0
    assert combine_pair(PairEvidence((0.8, 0.6, 0, 0), (8, 1.7, 0, 0))) == 0
    assert combine_pair(PairEvidence((0.5, 0.6, 0.7, 0.8), (1, 1, 1, 1))) == pytest.approx(0.65)


def test_exhaustive_grid_against_truth_table():
    mismatches = 0
    for pattern in itertools.product((0, 1), repeat=4):
        strengths = [s * p for s, p in zip(STRENGTHS, pattern)]
        for trusts in itertools.product(TRUST_GRID, repeat=2):
            # spread two grid values over all four learners in both layouts
            for layout in ((0, 1, 0, 1), (1, 0, 0, 1), (0, 0, 1, 1)):
                t = [trusts[k] for k in layout]
                mes, ts = pair_matrices(strengths, t)
                got = apply_rules(mes, ts).s[0, 1]
                want = rule_truth_table(strengths, t, 10.0, 2.0)
                mismatches += not np.isclose(got, want, rtol=0, atol=1e-12)
    assert mismatches == 0


@given(st.lists(st.floats(0.31, 1.0), min_size=4, max_size=4),
       st.lists(st.floats(0.0, 100.0), min_size=4, max_size=4))
def test_merged_strength_within_learner_range(strengths, trusts):
    mes, ts = pair_matrices(strengths, trusts)
    v = apply_rules(mes, ts).s[0, 1]
    assert 0 <= v <= max(strengths) + 1e-12
    assert v == pytest.approx(rule_truth_table(strengths, trusts, 10.0, 2.0), abs=1e-12)


@given(st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4),
       st.lists(st.floats(0.01, 100.0), min_size=4, max_size=4),
       st.floats(0.01, 100.0))
def test_wcs_is_scale_free(strengths, trusts, c):
    a = wcs(strengths, trusts)
    b = wcs(strengths, [c * t for t in trusts])
    assert a == pytest.approx(b, abs=1e-12)


def test_rule_two_depends_on_absolute_trust():
    ev = PairEvidence((0.8, 0.6, 0, 0), (5, 1.5, 0, 0))
    scaled = PairEvidence(ev.strengths, (10, 3, 0, 0))
    assert combine_pair(ev) == 0
    assert combine_pair(scaled) > 0
