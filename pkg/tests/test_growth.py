"""Stabilization detection against module oracles and hand series."""

from hypothesis import given, settings, strategies as st

import pytest

from iwalab import (
    ElementaryModule,
    InconsistentSeries,
    InsufficientData,
    LambdaPoly,
    PadicContext,
    TowerParams,
)
from iwalab.growth import (
    GrowthEntry,
    GrowthSeries,
    InvariantEstimate,
    detect_stabilization,
    rank_freeze_check,
)

CTX = PadicContext(3, 8)
P1 = TowerParams(3, 1)


def tm(a):
    return LambdaPoly.from_ints([-a, 1], CTX)


def series_of(module, levels):
    return GrowthSeries.from_module(module, levels)


def hand(p, k, rows):
    return GrowthSeries(p, k, [GrowthEntry(*r) for r in rows])


def test_linear_growth_module():
    m = ElementaryModule(CTX, P1, [(tm(3), 1)], ())
    est = detect_stabilization(series_of(m, range(1, 6)))
    assert est.status == "Stabilized"
    assert (est.lambda_, est.mu, est.nu) == (1, 0, 0)
    assert est.n0 == 1
    assert rank_freeze_check(series_of(m, range(1, 6))).ok


def test_mu_growth_module():
    m = ElementaryModule(CTX, P1, [], (1,))
    est = detect_stabilization(series_of(m, range(1, 5)))
    assert est.status == "Stabilized"
    assert (est.lambda_, est.mu, est.nu) == (0, 1, 0)
    report = rank_freeze_check(series_of(m, range(1, 5)))
    assert report.ok
    assert report.note == "NoFreezeObserved"


def test_mu_exponent_detected():
    m = ElementaryModule(CTX, P1, [], (2,))
    est = detect_stabilization(series_of(m, range(1, 5)))
    assert est.mu == 2 and est.lambda_ == 0


def test_mixed_module_invariants():
    m = ElementaryModule(CTX, P1, [(tm(3), 1)], (1,))
    est = detect_stabilization(series_of(m, range(1, 5)))
    assert est.status == "Stabilized"
    assert (est.lambda_, est.mu, est.nu) == (1, 1, 0)
    assert est.n0 == 1


def test_lambda_sums_over_summands():
    m = ElementaryModule(CTX, P1, [(tm(3), 2), (tm(6), 1)], ())
    est = detect_stabilization(series_of(m, range(1, 6)))
    assert est.status == "Stabilized"
    assert est.lambda_ == m.lambda_invariant == 3
    assert est.mu == 0


def test_level_zero_is_ignored():
    # level 0 duplicates level 1 in the tower, so the equal sizes there
    # must not trip the frozen-size scan
    m = ElementaryModule(CTX, P1, [(tm(3), 1)], ())
    est = detect_stabilization(series_of(m, range(0, 5)))
    assert est.status == "Stabilized"
    assert est.n0 == 1


def test_size_frozen_series():
    s = hand(3, 1, [(1, 5, 2), (2, 5, 2), (3, 5, 2)])
    est = detect_stabilization(s)
    assert est.status == "SizeFrozen"
    assert est.n0 == 1
    assert (est.lambda_, est.mu, est.nu) == (0, 0, 5)


def test_frozen_then_growth_is_inconsistent():
    s = hand(3, 1, [(1, 5, 2), (2, 5, 2), (3, 6, 2)])
    with pytest.raises(InconsistentSeries):
        detect_stabilization(s)


def test_shrinking_sizes_are_inconsistent():
    s = hand(3, 1, [(1, 5, 2), (2, 4, 2), (3, 4, 2)])
    with pytest.raises(InconsistentSeries):
        detect_stabilization(s)


def test_rank_exceeding_size_rejected():
    with pytest.raises(InconsistentSeries):
        hand(3, 1, [(1, 1, 2), (2, 2, 2), (3, 3, 2)])


def test_rank_freeze_violation():
    s = hand(3, 1, [(1, 1, 1), (2, 2, 1), (3, 4, 2)])
    report = rank_freeze_check(s)
    assert not report.ok
    assert report.freeze_level == 1


def test_insufficient_data():
    with pytest.raises(InsufficientData):
        detect_stabilization(hand(3, 1, [(1, 1, 1), (2, 2, 1)]))
    flagged = hand(
        3, 1, [(1, 1, 1, False), (2, 2, 1, True), (3, 3, 1, False), (4, 4, 1, False)]
    )
    with pytest.raises(InsufficientData):
        detect_stabilization(flagged)


def test_fully_flagged_module_has_no_clean_points():
    f = LambdaPoly.from_ints([0, 1], CTX)
    m = ElementaryModule(CTX, P1, [(f, 1)], ())
    s = series_of(m, range(1, 5))
    assert not s.clean()
    with pytest.raises(InsufficientData):
        detect_stabilization(s)


def test_non_integral_fit_is_undetermined():
    s = hand(3, 1, [(1, 1, 0), (2, 2, 0), (3, 4, 0)])
    est = detect_stabilization(s)
    assert est.status == "Undetermined"


def test_negative_intercept_is_allowed():
    s = hand(3, 1, [(1, 0, 0), (2, 1, 0), (3, 2, 0), (4, 3, 0)])
    est = detect_stabilization(s)
    assert est.status == "Stabilized"
    assert (est.lambda_, est.mu, est.nu) == (1, 0, -1)


def test_late_outlier_blocks_stabilization():
    s = hand(3, 1, [(1, 1, 0), (2, 2, 0), (3, 3, 0), (7, 99, 0)])
    est = detect_stabilization(s)
    assert est.status == "Undetermined"


def test_strictly_increasing_levels_required():
    with pytest.raises(Exception):
        hand(3, 1, [(2, 1, 0), (2, 2, 0), (3, 3, 0)])


def test_predicted_exponent_matches_module():
    m = ElementaryModule(CTX, P1, [(tm(3), 1)], (1,))
    est = detect_stabilization(series_of(m, range(1, 5)))
    for n in range(1, 6):
        assert est.predicted_exp(n, 3, 1) == m.finite_level(n).size_exp


@settings(max_examples=60, derandomize=True, deadline=None)
@given(
    p=st.sampled_from([3, 5]),
    k=st.integers(min_value=1, max_value=2),
    mu=st.integers(min_value=0, max_value=2),
    lam=st.integers(min_value=0, max_value=3),
    nu=st.integers(min_value=0, max_value=3),
)
def test_detector_recovers_exact_law(p, k, mu, lam, nu):
    if mu == 0 and lam == 0:
        return
    rows = []
    for n in range(k, k + 5):
        e = mu * p ** (n - k) + lam * n + nu
        rows.append(GrowthEntry(n, e, 0))
    est = detect_stabilization(GrowthSeries(p, k, rows))
    assert est.status == "Stabilized"
    assert (est.lambda_, est.mu, est.nu) == (lam, mu, nu)
    assert est.n0 == k
