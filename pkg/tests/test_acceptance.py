"""Runs every acceptance criterion through the verification suite.

Each criterion prints one ``criterion N: PASS|FAIL`` line (visible under ``pytest -v``
and ``-s``) and asserts its tolerance and runtime budget.
"""

import pytest

from gravgla import report as rep

BUDGET = {1: 120, 2: 300, 3: 180, 7: 120}  # seconds, where a budget is stated


@pytest.fixture(scope="module")
def suite():
    return rep.run_suite(rep.load_config(seed=0))


def _group(suite, n):
    return [c for c in suite["checks"] if c["criterion"] == n]


def _extra_1(checks):
    w = {c["name"]: c["witness"] for c in checks}
    assert w["ranks.ideal"]["I"][2:] == [10, 16, 6]
    assert w["ranks.slashed"]["Lslash"] == [11, 44, 77, 88, 88]
    assert w["ranks.slashed"]["Pslash"] == [21, 48, 67, 72, 72]
    assert w["ranks.slashed"]["Islash"] == [0, 0, 10, 16, 16] and w["ranks.slashed"]["Islash_total"] == 32
    assert w["ranks.auxiliary"]["left"] == [6, 24, 42, 48, 48]
    assert w["ranks.auxiliary"]["right"] == [16, 28, 32, 32, 32]
    assert w["ranks.hermitian"]["rank"] == 324
    assert w["ranks.clifford_group"]["order"] == 32


def _extra_2(checks):
    w = {c["name"]: c["witness"] for c in checks}
    for name in ("identities.jacobi", "identities.anchor", "identities.ideal_closure", "identities.gauge_i"):
        assert w[name]["instances"] >= 50
    assert w["identities.average"]["frames"] >= 50
    assert w["identities.gauge_def"]["sampled_w"] >= 50
    assert len(w["identities.splitting"]["witnesses"]) == 5


def _extra_3(checks):
    w = {c["name"]: c["witness"] for c in checks}
    assert w["positivity.b_theta0"]["size"] == 144
    assert set(w["positivity.A0"]["degrees"]) == {"0", "1", "2", "3"}


def _extra_4(checks):
    w = {c["name"]: c["witness"] for c in checks}
    assert w["mc.synthetic"]["endo"]["orders"] == [True] * 6
    assert w["mc.synthetic"]["rees"]["orders"] == [True] * 6
    assert w["mc.gravity_fiber"]["orders"] == [True] * 6


def _extra_5(checks):
    assert {c["name"] for c in checks} == {"ricci.minkowski", "ricci.ppwave_harmonic", "ricci.ppwave_nonharmonic"}


def _extra_6(checks):
    (c,) = checks
    assert c["witness"]["ranks"] == [0, 0, 10, 16, 6]


def _extra_7(checks):
    w = {c["name"]: c["witness"] for c in checks}
    assert w["pde.energy"]["relative_drift"] <= 1e-10
    assert w["pde.energy"]["steps"] == 1000 and w["pde.energy"]["N"] == 256
    assert all(abs(r - 4.0) <= 0.3 for r in w["pde.convergence"]["ratios"])
    assert w["pde.burgers"]["max_error"] <= 1e-3


EXTRA = {1: _extra_1, 2: _extra_2, 3: _extra_3, 4: _extra_4, 5: _extra_5, 6: _extra_6, 7: _extra_7}


@pytest.mark.parametrize("n", range(1, 8))
def test_criterion(suite, n, capsys):
    checks = _group(suite, n)
    ok = bool(checks) and all(c["status"] == "pass" for c in checks)
    try:
        EXTRA[n](checks)
    except (AssertionError, KeyError):
        ok = False
    runtime = sum(c["runtime"] for c in checks)
    if n in BUDGET and runtime > BUDGET[n]:
        ok = False
    with capsys.disabled():
        names = ", ".join(c["name"] for c in checks)
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  ({runtime:.1f}s; {names})")
    assert ok, [c for c in checks if c["status"] != "pass"]


def test_every_check_belongs_to_one_criterion(suite):
    assert sorted({c["criterion"] for c in suite["checks"]}) == list(range(1, 8))
    assert len(suite["checks"]) == len(rep.CHECKS)
