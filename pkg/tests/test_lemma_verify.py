import csv
import json
import math
from dataclasses import replace

import pytest

from magsobolev.errors import DomainError, VerificationError
from magsobolev.lemma_verify import (
    SCAN_HEADER,
    check_scan,
    h_prime_identity_check,
    limit_check,
    monotonicity_scan,
    sign_structure_check,
    verify_all,
    write_json,
    write_scan_csv,
)
from magsobolev.period_integrals import h_prime_closed_form
from magsobolev.profile import gamma_max, oval_shape


@pytest.fixture(scope="module")
def rows_q4():
    return monotonicity_scan(4.0, 200)


def test_scan_q4(rows_q4):
    assert len(rows_q4) == 200
    gmax = gamma_max(4.0)
    assert rows_q4[0].gamma == pytest.approx(gmax / 201)
    assert 2 * math.pi / math.sqrt(6) < rows_q4[-1].M < rows_q4[0].M < math.pi
    assert rows_q4[-1].M == pytest.approx(2 * math.pi / math.sqrt(6), abs=1e-3)
    assert all(r.t1 < r.t2 for r in rows_q4)


def test_scan_detects_non_monotone_row(rows_q4):
    bad = list(rows_q4)
    bad[7] = replace(bad[7], M=bad[6].M + 1e-9)
    with pytest.raises(VerificationError, match="row 7") as info:
        check_scan(bad, 4.0)
    assert info.value.details["row"] == 7


def test_scan_detects_derivative_mismatch(rows_q4):
    bad = list(rows_q4)
    bad[50] = replace(bad[50], M_prime_fd=bad[50].M_prime_analytic * 1.01)
    with pytest.raises(VerificationError, match="differ"):
        check_scan(bad, 4.0)


def test_scan_detects_positive_derivative(rows_q4):
    bad = list(rows_q4)
    bad[3] = replace(bad[3], M_prime_analytic=1.0)
    with pytest.raises(VerificationError, match="analytic"):
        check_scan(bad, 4.0)


def test_scan_rejects_empty_grid():
    with pytest.raises(DomainError):
        monotonicity_scan(4.0, 0)


@pytest.mark.parametrize("q,expected", [(4.0, 2.565100), (6.0, 2.221441), (3.0, 2.809926)])
def test_limit_check(q, expected):
    out = limit_check(q)
    assert out.expected == pytest.approx(expected, abs=1e-6)
    assert out.rel_err <= 1e-5
    assert len(out.raw) == 3


def test_limit_check_reports_raw_values(monkeypatch):
    import magsobolev.lemma_verify as lv
    monkeypatch.setattr(lv, "M", lambda g, q, cfg: 2.0)
    with pytest.raises(VerificationError) as info:
        limit_check(4.0)
    assert set(info.value.details["raw"].values()) == {2.0}


def test_h_prime_identity():
    assert h_prime_identity_check(0.1, 4.0) <= 1e-9
    near = (1 - 1e-12) * gamma_max(4.0)
    assert h_prime_identity_check(near, 4.0) <= 1e-9
    # both sides vanish at the double root t1 = (q+2)/q
    assert h_prime_closed_form(1.5, 4.0) == 0.0


@pytest.mark.parametrize("q", [3.0, 10.0])
def test_h_prime_closed_form_nonpositive(q):
    for frac in (0.01, 0.5, 0.99):
        assert h_prime_closed_form(oval_shape(frac * gamma_max(q), q).t1, q) < 0.0


@pytest.mark.parametrize("q", [2.5, 4.0, 10.0])
def test_sign_structure(q):
    rep = sign_structure_check(0.37 * gamma_max(q), q)
    assert rep.passed and not rep.failures
    assert abs(rep.h_beta_at_t0) <= 1e-10
    assert max(rep.integrand) <= 1e-12
    assert len(rep.t) == 101


def test_sign_structure_flags_violations(monkeypatch):
    import magsobolev.lemma_verify as lv
    monkeypatch.setattr(lv, "psi", lambda t, g, q: -1.0 + 0.0 * t)
    rep = sign_structure_check(0.3 * gamma_max(4.0), 4.0, raise_on_failure=False)
    assert not rep.passed
    assert any("Psi <= 0" in f for f in rep.failures)
    with pytest.raises(VerificationError, match="Psi"):
        sign_structure_check(0.3 * gamma_max(4.0), 4.0)


def test_scan_csv(tmp_path):
    rows = monotonicity_scan(4.0, 10)
    path = tmp_path / "scan.csv"
    write_scan_csv(rows, path)
    with open(path) as fh:
        data = list(csv.reader(fh))
    assert tuple(data[0]) == SCAN_HEADER
    assert len(data) == 11
    assert float(data[1][1]) == rows[0].M


def test_verify_all_json(tmp_path):
    report = verify_all(qs=(3.0, 6.0), n_grid=20, n_gamma=5)
    for entry in report.values():
        assert all(v["passed"] for v in entry.values())
    path = tmp_path / "report.json"
    write_json(report, path)
    assert json.loads(path.read_text())["3.0"]["limit"]["passed"] is True
