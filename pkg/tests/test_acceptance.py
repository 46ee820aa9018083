"""Acceptance criteria, one test each; every test logs a single PASS/FAIL line."""
import time

from copyposets.catalogue import derive_stats
from copyposets.classifier import case_of
from copyposets.verification import (
    exponent_battery,
    golden_table,
    suite_copy_characterization,
    suite_exponent,
    suite_golden,
    suite_monomorphy,
    suite_oracle,
    suite_posets,
    suite_validation_examples,
    suite_witness,
)


def _verdict(log, label, result, limit=None, minimum=0, extra=""):
    ok = result.passed and result.checked >= minimum
    if limit is not None:
        ok = ok and result.seconds < limit
    bound = f", limit {limit:g}s" if limit is not None else ""
    log(f"{'PASS' if ok else 'FAIL'} {label}: {result.checked} checks, {len(result.failures)} failures, "
        f"{result.seconds:.2f}s{bound}{extra}")
    return ok


def test_golden_table(acceptance_log):
    result = suite_golden()
    rows = golden_table()
    assert len(rows) == 21 and {r.name.split()[-1][0] for r in rows} >= {"F", "K", "L"}
    ok = _verdict(acceptance_log, "golden classification table (F, K, L)", result, limit=1.0, minimum=42)
    assert ok, result.failures[:5]


def test_exponent_one(acceptance_log):
    result = suite_exponent()
    battery = exponent_battery()
    cases = {case_of(derive_stats(s)) for s in battery}
    ok = _verdict(acceptance_log, "exponent-one criterion", result, minimum=20,
                  extra=f" over cases {sorted(cases)}")
    assert ok and len(battery) == 20 and cases == {"a1", "a2"}, result.failures[:5]


def test_ideal_oracle_equivalence(acceptance_log):
    result = suite_oracle(seed=0, cases=500)
    ok = _verdict(acceptance_log, "ideal oracle equivalence", result, limit=60.0, minimum=500,
                  extra=f" ({result.notes})")
    assert ok, result.failures[:5]


def test_copy_characterization(acceptance_log):
    result = suite_copy_characterization(seed=0, cases=200)
    ok = _verdict(acceptance_log, "copy characterization", result, minimum=200)
    assert ok, result.failures[:5]


def test_witness_soundness(acceptance_log):
    result = suite_witness(seed=0, pairs=100)
    ok = _verdict(acceptance_log, "witness soundness", result)
    assert ok, result.failures[:5]


def test_monomorphy_sweep(acceptance_log):
    result = suite_monomorphy(seed=0, samples=100_000)
    ok = _verdict(acceptance_log, "monomorphy sweep", result, limit=300.0, minimum=512 + 100_000,
                  extra=f" ({result.notes})")
    assert ok, result.failures[:5]


def test_poset_laws(acceptance_log):
    result = suite_posets(seed=0, singles=1000, pairs=300, transfers=200)
    ok = _verdict(acceptance_log, "poset laws", result, limit=120.0, minimum=1500)
    assert ok, result.failures[:5]


def test_validation_counterexamples(acceptance_log):
    start = time.perf_counter()
    result = suite_validation_examples()
    assert time.perf_counter() - start < 60
    ok = _verdict(acceptance_log, "validation counterexamples", result, minimum=2)
    assert ok, result.failures[:5]
