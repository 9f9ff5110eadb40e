from __future__ import annotations

from fractions import Fraction

import pytest

from wpverify.errors import UnknownIdentity
from wpverify.identities import (
    admissible,
    br2_rhs1_rest,
    cross_checks,
    get_identity,
    identity_names,
    make_main,
    mutations,
    registry,
    run_mutation,
    sample_env,
    verify,
    verify_seeded,
)
from wpverify.qkernel import materialize, poch, pochs
from wpverify.series import Q, mono
from wpverify.wpbailey import SINGH, TRIVIAL, UNIT, ParamEnv

NAMES = [
    "qgauss", "qwatson", "baileyeq", "wpbt1", "wpbt2", "main", "unit8w7",
    "singhcor", "ab1", "ab2", "br1", "br2", "mz1", "mz2", "mz3",
]
THREE_TERM = {"main", "singhcor", "ab1", "ab2", "br1", "br2", "mz1", "mz2", "unit8w7"}


def test_registry_names():
    assert identity_names() == NAMES
    assert len(registry()) == 15
    for d in registry():
        if d.name in THREE_TERM:
            assert d.n_sides == 3
    # the k = q identity has a two-part left side
    assert get_identity("mz3").n_sides == 4
    assert get_identity("mz3").param("k").value == Q
    with pytest.raises(UnknownIdentity):
        get_identity("nosuch")
    with pytest.raises(UnknownIdentity):
        get_identity("qgauss", "singh")


@pytest.mark.parametrize("name", NAMES)
def test_identity_passes(name):
    d = get_identity(name)
    N = 60 if name in ("qgauss", "qwatson") else 40
    for seed in (1, 2, 3):
        report = verify_seeded(d, seed, N)
        assert report.passed, report


@pytest.mark.parametrize("pair", [TRIVIAL, UNIT, SINGH], ids=lambda p: p.name)
def test_main_for_several_pairs(pair):
    d = make_main(pair)
    for seed in (1, 2, 3):
        assert verify_seeded(d, seed, 40).passed


@pytest.mark.parametrize("name, pair", [("wpbt1", "unit"), ("wpbt2", "unit"), ("wpbt1", "trivial"), ("wpbt2", "mz1")])
def test_transformations_for_other_pairs(name, pair):
    d = get_identity(name, pair)
    for seed in (1, 2):
        assert verify_seeded(d, seed, 30).passed


def test_main_with_singh_agrees_with_singhcor():
    main = make_main(SINGH)
    cor = get_identity("singhcor")
    for seed in (1, 2):
        env = sample_env(main, seed)
        assert verify(main, env, 30).outcome == verify(cor, env, 30).outcome == "pass"


@pytest.mark.parametrize("d, mutation", mutations(), ids=lambda x: getattr(x, "name", x))
def test_mutations_are_caught(d, mutation):
    report = run_mutation(d, mutation, 1, 40)
    assert report.outcome == "mismatch"
    assert 0 <= report.mismatch_index <= 40


def test_one_mutation_per_family():
    assert {d.name for d, _ in mutations()} == set(NAMES)
    assert ("wpbt1", "drop-k-factor") in {(d.name, m) for d, m in mutations()}


def test_cross_checks():
    reports = cross_checks()
    assert len(reports) == 3
    for r in reports:
        assert r.passed, r
    y1 = reports[0]
    assert y1.env["y"] == "1·p^0"
    mz1 = reports[1]
    assert int(mz1.env["k"].split("^")[1]) == int(mz1.env["a"].split("^")[1]) + 1


def test_sampler_is_deterministic():
    for d in registry():
        assert sample_env(d, 7).render() == sample_env(d, 7).render()
    d = get_identity("qgauss")
    assert len({str(sample_env(d, s).render()) for s in range(1, 6)}) > 1


def test_sampler_requirements():
    for seed in range(1, 6):
        br2 = sample_env(get_identity("br2"), seed)
        assert br2["a"].pexp % 4 == 0
        assert br2.root("a", 4) ** 4 == br2["a"]
        main = sample_env(get_identity("main"), seed)
        assert main["a"].pexp >= main["k"].pexp
        mz3 = sample_env(get_identity("mz3"), seed)
        assert mz3["a"].pexp >= 2 and mz3["k"] == Q


def test_br2_uses_gaussian_coefficients():
    d = get_identity("br2")
    env = sample_env(d, 1)
    rest = br2_rhs1_rest(env)
    assert not rest[0].coeff.is_real()
    # a single factor is non-real, the +-i pair together is real
    assert not materialize(poch(rest[0], 2), 40).is_real()
    assert materialize(pochs(rest[:2], 2), 40).is_real()
    lhs, rhs = d.sides(env, 40)
    assert lhs == rhs and lhs.is_real()


def test_inadmissible_env_is_reported():
    d = get_identity("qgauss")
    # argument c/(ab) of valuation 0: the sum never truncates
    env = ParamEnv(a=mono(2, 1), b=mono(3, 1), c=mono(5, 2))
    assert verify(d, env, 10).outcome == "non-truncating"
    # (c; q)_oo with c = 1 is a pole
    env = ParamEnv(a=mono(2, 1), b=mono(3, 1), c=mono(1, 0))
    assert verify(d, env, 10).outcome == "rejected"


# Points where a numerator factor vanishes exactly: both sides stay finite
# but one of them is really 0/0, so the identity need not hold there.
DEGENERATE = [
    ("ab1", dict(a=mono(-4, 2), b=mono(Fraction(3, 2), 6), k=mono(4, 6))),
    ("br2", dict(a=mono(256, -4), b=mono(16, -2), k=mono(-16, -4))),
]


@pytest.mark.parametrize("name,values", DEGENERATE)
def test_degenerate_points_are_not_reported_as_mismatches(name, values):
    d = get_identity(name)
    env = ParamEnv(**values)
    assert admissible(d, env, 30) is not None
    r = verify(d, env, 30)
    assert r.mismatch_index is None and not r.passed
