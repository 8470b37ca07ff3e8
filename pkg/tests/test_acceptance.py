"""Acceptance criteria 1-9.

Each test prints one ``PASS``/``FAIL`` line; run ``pytest tests/test_acceptance.py -v``
or ``python tests/test_acceptance.py`` for the table alone.
"""

import contextlib
import io
import sys
import time

import pytest

from smooth_ideals.cli import main
from smooth_ideals.selftest import run_selftest

SEED = 0
CRITERIA = {
    1: ("identities", "boundary and Newton identities < 1e-9 over 200 cases, under 10 s"),
    2: ("interpolation", "jet residual < 1e-8, projector < 1e-9, order invariance < 1e-9"),
    3: ("classical", "Hermite oracle to 1e-9, Taylor truncation to 1e-12"),
    4: ("oracle", "200 constructed ideals certified, 200 perturbed subspaces rejected"),
    5: ("algebra", "commutative, associative < 1e-8, wspec < 1e-7, decomposition round trip < 1e-8"),
    6: ("transversal", "restrict/section round trips < 1e-9"),
    7: ("limits", "gallery certified, direct evaluation within 1e-5, fat and curvilinear limits within 1e-6"),
    8: ("injectivity", "500 distinct pairs separated by more than 1e-8"),
}


def report(capsys, n: int, ok: bool, text: str):
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {text}")


@pytest.fixture(scope="module")
def selftest():
    results, timings = run_selftest(SEED)
    return {r.name: r for r in results}, timings


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, selftest, capsys):
    results, timings = selftest
    suite, claim = CRITERIA[n]
    res = results[suite]
    ok = res.passed and (suite != "identities" or timings[suite] < 10.0)
    report(capsys, n, ok, f"{claim} | {res.line()} ({timings[suite]:.1f} s)")
    assert res.passed, res.line()
    if suite == "identities":
        assert timings[suite] < 10.0


def _cli_selftest():
    out, err = io.StringIO(), io.StringIO()
    start = time.perf_counter()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(["selftest", "--seed", str(SEED), "--format", "json"])
    return code, out.getvalue(), time.perf_counter() - start


def test_criterion_9(capsys):
    code1, out1, t1 = _cli_selftest()
    code2, out2, t2 = _cli_selftest()
    ok = code1 == 0 and out1 == out2 and max(t1, t2) < 60.0
    report(capsys, 9, ok, f"selftest exit {code1}, {t1:.1f} s and {t2:.1f} s, identical output: {out1 == out2}")
    assert code1 == 0
    assert out1 == out2
    assert max(t1, t2) < 60.0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
