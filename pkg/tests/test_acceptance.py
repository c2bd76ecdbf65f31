"""One test per acceptance criterion; each prints a PASS/FAIL line with its key measurements."""

import pytest

from conedelta import checks

CRITERIA = [
    (1, "constants", "constants"),
    (2, "circle_minimum", "minimum and curvature of mu1"),
    (3, "tail_law", "tail exponent of mu1"),
    (4, "second_state", "second circle eigenvalue"),
    (5, "harmonic", "harmonic approximation"),
    (6, "sandwich", "Neumann/Dirichlet sandwich"),
    (7, "oscillation_count", "oscillation-count oracle"),
    (8, "counting_law", "counting law"),
    (9, "direct", "direct axisymmetric cross-check"),
    (10, "identities", "identity suite"),
]


def _brief(entry):
    m = entry.measured
    if entry.check_id == "harmonic":
        return "; ".join(f"n={r['n']} icpt_err={r['intercept_error']:.1e} slope_err={r['slope_rel_error']:.3f} "
                         f"exp={r['residual_exponent']:.2f}" for r in m["rows"])
    if entry.check_id == "sandwich":
        return "; ".join(f"n={r['n']} gap_exp={r['gap_exponent']:.2f}" for r in m["rows"])
    if entry.check_id == "counting_law":
        return "; ".join(f"gamma={r['gamma']} ratios={[round(x, 3) for x in r['ratios']]}" for r in m["rows"])
    if entry.check_id == "direct":
        return (f"E1={m['energies']['0.02']:.5f} rel_err={m['energy_rel_error']:.3f} "
                f"centroid={m['centroid']:.3f} richardson_closer={m['parts']['richardson']}")
    if entry.check_id == "second_state":
        return f"absent={m['absent_flags']} mu2={[round(x, 5) for x in m['mu2']]} floor={m['floor']}"
    if entry.check_id == "oscillation_count":
        return "; ".join(f"h={r['h']} matrix={r['matrix']} exact={r['exact']}" for r in m["rows"])
    keys = [k for k, v in m.items() if isinstance(v, float)][:4]
    return " ".join(f"{k}={m[k]:.6g}" for k in keys)


@pytest.mark.parametrize("number,check_id,title", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, check_id, title, record_criterion):
    entry = checks.CHECKS[check_id]()
    status = "PASS" if entry.passed else "FAIL"
    record_criterion(f"criterion {number:>2} {status}  {title}: {_brief(entry)} ({entry.runtime:.2f} s)")
    assert entry.passed, entry.measured
