"""The nine acceptance criteria, each at its stated order and tolerance.

Every criterion records a one-line verdict, printed in the terminal summary.
"""
from __future__ import annotations

import time

from wpverify.cli import main as cli_main
from wpverify.identities import (
    cross_checks,
    get_identity,
    make_main,
    make_wpbt1,
    make_wpbt2,
    mutations,
    run_mutation,
    sample_env,
    sample_pair_env,
    verify_seeded,
)
from wpverify.wpbailey import (
    SINGH,
    TRIVIAL,
    UNIT,
    bailey_lemma_check,
    builtin_pairs,
    construct_andrews_1,
    construct_andrews_2,
    gamma_closed,
    gamma_direct,
    proof_env,
    verify_wp_relation,
)

PAIR_IDENTITIES = ["singhcor", "ab1", "ab2", "br1", "br2", "mz1", "mz2", "mz3", "unit8w7"]


def _failures(reports):
    return [f"{r.name}/seed={r.seed}:{r.outcome}@{r.mismatch_index}" for r in reports if not r.passed]


def test_criterion_1_kernel_soundness(record):
    start = time.perf_counter()
    reports = [verify_seeded(get_identity(n), s, 60) for n in ("qgauss", "qwatson") for s in range(1, 6)]
    elapsed = time.perf_counter() - start
    bad = _failures(reports)
    ok = not bad and elapsed < 30
    record(1, ok, f"q-Gauss and q-Watson, 5 envs each at N=60, {elapsed:.1f}s {bad or ''}")
    assert ok


def test_criterion_2_pair_contracts(record):
    reports = []
    for pair in builtin_pairs():
        for seed in (1, 2, 3):
            reports.append(verify_wp_relation(pair, sample_pair_env(pair, seed), 8, 40, seed=seed))
    bad = _failures(reports)
    record(2, not bad and len(reports) == 27, f"9 pairs x 3 envs, n<=8, N=40 {bad or ''}")
    assert not bad and len(reports) == 27


def test_criterion_3_constructions(record):
    reports = []
    for pair in (TRIVIAL, UNIT, SINGH):
        for construct in (construct_andrews_1, construct_andrews_2):
            new = construct(pair)
            reports.append(verify_wp_relation(new, sample_pair_env(new, 1), 6, 40, seed=1))
    bad = _failures(reports)
    record(3, not bad, f"both constructions on trivial, unit, singh, n<=6, N=40 {bad or ''}")
    assert not bad


def test_criterion_4_bailey_type_transformations(record):
    reports = []
    for make in (make_wpbt1, make_wpbt2):
        for pair in (SINGH, UNIT):
            d = make(pair)
            reports += [verify_seeded(d, s, 40) for s in (1, 2, 3)]
    bad = _failures(reports)
    record(4, not bad, f"wpbt1, wpbt2 with singh and unit pairs, 3 envs, N=40 {bad or ''}")
    assert not bad


def test_criterion_5_main_transformation(record):
    reports = []
    for pair in (TRIVIAL, UNIT, SINGH):
        d = make_main(pair)
        reports += [verify_seeded(d, s, 50) for s in (1, 2, 3)]
    gamma_ok = True
    for seed in (1, 2, 3):
        penv = proof_env(sample_env(make_main(TRIVIAL), seed))
        gamma_ok &= all(gamma_closed(n, penv, 40) == gamma_direct(n, penv, 40) for n in range(7))
    lemma = [bailey_lemma_check(p, sample_env(make_main(p), 1), 40, seed=1) for p in (TRIVIAL, UNIT, SINGH)]
    bad = _failures(reports + lemma)
    ok = not bad and gamma_ok
    record(5, ok, f"main with 3 pairs x 3 envs at N=50; gamma closed form n<=6; Bailey lemma {bad or ''}")
    assert ok


def test_criterion_6_pair_specializations(record):
    reports = [verify_seeded(get_identity(n), s, 40) for n in PAIR_IDENTITIES for s in (1, 2, 3)]
    bad = _failures(reports)
    record(6, not bad, f"9 pair-specific identities x 3 envs at N=40 {bad or ''}")
    assert not bad


def test_criterion_7_specializations(record):
    reports = cross_checks(1, 40)
    bad = _failures(reports)
    record(7, not bad and len(reports) == 3, f"y=1, k=a*sqrt(q), trivial-pair reduction {bad or ''}")
    assert not bad and len(reports) == 3


def test_criterion_8_negative_controls(record):
    reports = [run_mutation(d, m, 1, 40) for d, m in mutations()]
    caught = [r for r in reports if r.outcome == "mismatch" and r.mismatch_index is not None]
    ok = len(caught) == len(reports) == 15
    record(8, ok, f"{len(caught)}/{len(reports)} mutations fail with a finite index")
    assert ok


def test_criterion_9_determinism_and_scale(record, capsys):
    args = ["verify-all", "--order", "40", "--trials", "3", "--format", "json"]
    start = time.perf_counter()
    code1 = cli_main(args)
    first = capsys.readouterr().out
    elapsed = time.perf_counter() - start
    code2 = cli_main(args)
    second = capsys.readouterr().out
    ok = code1 == code2 == 0 and first == second and elapsed < 300
    record(9, ok, f"verify-all --order 40 --trials 3 in {elapsed:.1f}s, identical json: {first == second}")
    assert ok
