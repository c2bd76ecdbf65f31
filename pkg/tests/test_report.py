import json

import pytest

from conedelta import report


def test_linear_fit_exact():
    f = report.linear_fit([(0, 1), (1, 3), (2, 5), (3, 7)])
    assert f.slope == pytest.approx(2) and f.intercept == pytest.approx(1)
    assert f.residual_rms == pytest.approx(0, abs=1e-14)


def test_outlier_raises_rms():
    base = [(0, 1), (1, 3), (2, 5), (3, 7)]
    assert report.linear_fit(base[:3] + [(3, 9)]).residual_rms > report.linear_fit(base).residual_rms


def test_fit_errors():
    for pts in ([(0, 1), (1, 2)], [(1, 1), (1, 2), (2, 3)], [1, 2, 3]):
        with pytest.raises(report.FitError):
            report.linear_fit(pts)
    with pytest.raises(report.FitError):
        report.loglog_exponent([(1, 1), (2, 0), (3, 1)])


def test_loglog_exponent():
    f = report.loglog_exponent([(x, x**3) for x in (0.5, 1.0, 2.0, 4.0)])
    assert f.exponent == pytest.approx(3, abs=1e-12)


def test_richardson():
    limit = report.richardson([(0.2, 1 + 3 * 0.04), (0.1, 1 + 3 * 0.01)], 2)
    assert limit == pytest.approx(1, abs=1e-12)
    assert report.richardson([(0.2, 5.0), (0.1, 5.0)], 2) == 5.0
    assert report.richardson([(0.4, 1 + 0.4), (0.2, 1 + 0.2), (0.1, 1.1)], 1) == pytest.approx(1)
    with pytest.raises(ValueError):
        report.richardson([(0.3, 1.0), (0.2, 1.0), (0.1, 1.0)], 2)
    with pytest.raises(ValueError):
        report.richardson([(0.1, 1.0)], 2)


def test_report_json():
    rep = report.VerificationReport(provenance={"seed": 1})
    rep.add(report.ReportEntry("constants", {"x": 1 / 3}, {}, {}, True, 0.01))
    rep.add(report.ReportEntry("tail_law", {"x": 2.0}, {}, {}, False, 0.02))
    assert rep.overall is False
    d = json.loads(rep.to_json())
    assert list(d) == ["criteria_version", "overall", "entries", "provenance"]
    assert d["entries"][0]["measured"]["x"] == 1 / 3
    assert "runtime" not in json.loads(rep.to_json(include_runtime=False))["entries"][0]
    assert rep.to_json() == rep.to_json()
    with pytest.raises(ValueError):
        rep.add(report.ReportEntry("constants", {}, {}, {}, True, 0.0))
    assert rep.summary_lines()[1].startswith("FAIL")


def test_empty_report_is_not_a_pass():
    assert report.VerificationReport().overall is False


def test_criteria_table_covers_every_check():
    from conedelta import checks
    assert set(checks.CHECKS) == set(report.CRITERIA) == set(report.FULL_SUITE)
    assert set(report.QUICK_SUITE) <= set(report.FULL_SUITE)
