import numpy as np
import pytest

from vecdual.cone_order import Region, cone_contains
from vecdual.properties import SuiteReport, bridge_suite, random_cone, weak_sets_suite

WEAK_SET_LAWS = {"decomposition_sup", "decomposition_inf", "translation", "absorption",
                 "ws_sum_neutral", "ws_sum_commutative", "ws_sum_associative", "ws_sum_monotone",
                 "winf_precedes_set", "set_precedes_wsup"}


@pytest.mark.parametrize("dim", [2, 3])
def test_random_cones_are_proper(dim):
    rng = np.random.default_rng(0)
    for _ in range(20):
        K = random_cone(dim, rng)
        assert K.has_interior
        assert cone_contains(K, K.interior_point(), Region.INTERIOR)
        # pointed: no nonzero generator has its negative in the cone
        for g in K.generators:
            assert not cone_contains(K, -g)


def test_report_counters():
    rep = SuiteReport("demo", 0)
    rep.record("law", True)
    rep.record("law", False, case=3)
    assert rep.n_failed == 1 and not rep.ok
    assert rep.to_dict()["counts"] == {"law": [2, 1]}


def test_weak_sets_suite_small():
    rep = weak_sets_suite(n2=8, n3=3, seed=5, res2=41, res3=15)
    assert rep.ok, rep.failures
    assert WEAK_SET_LAWS <= set(rep.counts)


def test_bridge_suite_small():
    rep = bridge_suite(n_maps=8, seed=5)
    assert rep.ok, rep.failures
    assert {"psi_bridge", "upward_closed"} <= set(rep.counts)


def test_suites_are_seeded():
    a = weak_sets_suite(n2=3, n3=1, seed=9, res2=21, res3=9).to_dict()
    b = weak_sets_suite(n2=3, n3=1, seed=9, res2=21, res3=9).to_dict()
    assert a == b
