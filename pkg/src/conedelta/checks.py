"""The verification checks; every expected value and tolerance comes from ``report.CRITERIA``."""

from __future__ import annotations

import math
import time

import numpy as np
from scipy.optimize import minimize_scalar

from . import axisym, circle, constants, effective, report, schrod1d, specfun
from .report import CRITERIA, ReportEntry

SQRT2 = math.sqrt(2.0)


def _entry(check_id, measured, passed, runtime, notes=""):
    c = CRITERIA[check_id]
    limit = c["tolerance"].get("runtime")
    measured = dict(measured)
    measured["runtime_ok"] = limit is None or runtime < limit
    return ReportEntry(check_id, measured, c["expected"], c["tolerance"], bool(passed) and measured["runtime_ok"],
                       runtime, notes)


def check_constants() -> ReportEntry:
    crit = CRITERIA["constants"]
    t0 = time.perf_counter()
    c = constants.solve_model_constants()
    dt = time.perf_counter() - t0
    tol = crit["tolerance"]
    errs = {k: abs(getattr(c, k) - v) for k, v in crit["expected"].items()}
    ok = all(e <= tol["value"] for e in errs.values()) and c.residual <= tol["residual"]
    return _entry("constants", {**c.as_dict(), "max_error": max(errs.values())}, ok, dt)


def curvature_fd(f, x: float, step: float) -> float:
    return (f(x + step) - 2.0 * f(x) + f(x - step)) / step**2


def check_circle_minimum() -> ReportEntry:
    tol = CRITERIA["circle_minimum"]["tolerance"]
    t0 = time.perf_counter()
    c = effective.model_constants()

    def mu(R):
        return circle.mu1_values(float(R), SQRT2, cache=None)

    res = minimize_scalar(mu, bounds=(0.5 * c.xi0, 2.0 * c.xi0), method="bounded",
                          options={"xatol": 1e-10})
    loc, val = float(res.x), float(res.fun)
    curv = curvature_fd(mu, loc, tol["fd_step"])
    target = 8.0 * c.a1**2
    dt = time.perf_counter() - t0
    ok = (abs(loc - c.xi0) <= tol["location"] and abs(val + 2.0 * c.a0) <= tol["value"]
          and abs(curv / target - 1.0) <= tol["curvature_rel"])
    return _entry("circle_minimum", {"location": loc, "value": val, "curvature": curv,
                                     "xi0": c.xi0, "minus_2a0": -2.0 * c.a0, "curvature_target": target}, ok, dt)


def check_tail_law() -> ReportEntry:
    exp = CRITERIA["tail_law"]["expected"]
    t0 = time.perf_counter()
    R = np.asarray(exp["radii"])
    v = np.abs(circle.mu1_values(R, SQRT2, cache=None) + 0.5 + 0.25 / R**2)
    fit = report.loglog_exponent(list(zip(R, v)))
    dt = time.perf_counter() - t0
    lo, hi = exp["band"]
    return _entry("tail_law", {"exponent": fit.exponent, "remainders": v.tolist()}, lo <= fit.exponent <= hi, dt)


def check_second_state() -> ReportEntry:
    exp = CRITERIA["second_state"]["expected"]
    t0 = time.perf_counter()
    absent = [circle.second_eigenvalue(bR / SQRT2, SQRT2).present for bR in exp["absent_beta_R"]]
    present = [circle.second_eigenvalue(bR / SQRT2, SQRT2) for bR in exp["present_beta_R"]]
    floor = -SQRT2**2 / 4.0
    dt = time.perf_counter() - t0
    ok = not any(absent) and all(s.present and s.mu2 > floor for s in present)
    return _entry("second_state", {"absent_flags": absent, "mu2": [s.mu2 for s in present], "floor": floor}, ok, dt)


def dirichlet_levels(hs, n_max: int) -> dict[float, list[effective.EffectivePrediction]]:
    return {h: effective.eigen_bounds(effective.from_h(h, n_max=n_max), n_max) for h in hs}


def check_harmonic() -> ReportEntry:
    crit = CRITERIA["harmonic"]
    exp, tol = crit["expected"], crit["tolerance"]
    t0 = time.perf_counter()
    c = effective.model_constants()
    ns = exp["n"]
    data = dirichlet_levels(sorted(set(exp["h_fit"]) | set(exp["h_resid"])), max(ns))
    rows, ok = [], True
    for n in ns:
        fit = report.linear_fit([(h, data[h][n - 1].upper) for h in exp["h_fit"]])
        slope_target = 2.0 * (2 * n - 1) * c.a1
        resid = [(h, abs(data[h][n - 1].upper - data[h][n - 1].harmonic)) for h in exp["h_resid"]]
        e = report.loglog_exponent(resid).exponent
        lo, hi = exp["exponent_band"]
        row = {
            "n": n,
            "intercept": fit.intercept,
            "intercept_error": abs(fit.intercept + 2.0 * c.a0),
            "slope": fit.slope,
            "slope_rel_error": abs(fit.slope / slope_target - 1.0),
            "residual_exponent": e,
        }
        row["pass"] = (row["intercept_error"] <= tol["intercept"] and row["slope_rel_error"] <= tol["slope_rel"]
                       and lo <= e <= hi)
        ok &= row["pass"]
        rows.append(row)
    dt = time.perf_counter() - t0
    return _entry("harmonic", {"rows": rows}, ok, dt)


def check_sandwich() -> ReportEntry:
    exp = CRITERIA["sandwich"]["expected"]
    t0 = time.perf_counter()
    data = dirichlet_levels(exp["h"], max(exp["n"]))
    rows, ok = [], True
    # single slack constant c with lower <= upper + c h^{3/2} across the run
    excess = [max(0.0, p.lower - p.upper) / p.h**1.5 for h in exp["h"] for p in data[h]]
    c_fit = max(excess)
    for n in exp["n"]:
        gaps = [(h, abs(data[h][n - 1].upper - data[h][n - 1].lower)) for h in exp["h"]]
        ordered = all(data[h][n - 1].lower <= data[h][n - 1].upper + c_fit * h**1.5 for h in exp["h"])
        if all(g > 0 for _, g in gaps):
            e = report.loglog_exponent(gaps).exponent
        else:
            e = float("nan")
        row = {"n": n, "gaps": [g for _, g in gaps], "gap_exponent": e,
               "pass": ordered and e >= exp["min_gap_exponent"]}
        ok &= row["pass"]
        rows.append(row)
    dt = time.perf_counter() - t0
    return _entry("sandwich", {"fitted_slack": c_fit, "rows": rows}, ok, dt)


def model_operator_count(h: float) -> tuple[int, int]:
    """Matrix count and explicit zero count for the critical inverse-square model.

    Operator -h^2 u'' - u/(4x^2) - h^2 1_(A,B) on (A, inf), Dirichlet at A,
    counted below -h^2, with A = 1/(2 sqrt h), B = 1/(2h).
    """
    A, B = 0.5 / math.sqrt(h), 0.5 / h

    def U(x):
        return -0.25 / x**2 - h * h * ((x > A) & (x < B))

    E = -h * h
    x_max = schrod1d.truncation_end(U, E, h, A, x_cap=20.0 * B)
    grid = schrod1d.Grid1D.with_step(A, x_max, schrod1d.counting_step(h, E, 0.0))
    op = schrod1d.discretize(grid, U, h, potential_id="inverse-square")
    return schrod1d.count_below(op, E), schrod1d.model_count_exact(A, B, h)


def check_oscillation_count() -> ReportEntry:
    crit = CRITERIA["oscillation_count"]
    t0 = time.perf_counter()
    rows = []
    for h in crit["expected"]["h"]:
        matrix, exact = model_operator_count(h)
        rows.append({"h": h, "matrix": matrix, "exact": exact})
    dt = time.perf_counter() - t0
    ok = all(abs(r["matrix"] - r["exact"]) <= crit["tolerance"]["count"] for r in rows)
    return _entry("oscillation_count", {"rows": rows}, ok, dt)


def check_counting_law() -> ReportEntry:
    exp = CRITERIA["counting_law"]["expected"]
    t0 = time.perf_counter()
    lo, hi = exp["ratio_band"]
    rows, ok = [], True
    for gamma, C in exp["params"]:
        counts, ratios = [], []
        for h in exp["h"]:
            n, w = effective.counting_Q(effective.from_h(h), C, gamma)
            counts.append(n)
            ratios.append(n / w)
        dev = [abs(r - 1.0) for r in ratios]
        row = {"gamma": gamma, "C": C, "counts": counts, "ratios": ratios,
               "final_in_band": lo <= ratios[-1] <= hi,
               "monotone": all(b <= a for a, b in zip(dev[:-1], dev[1:]))}
        row["pass"] = row["final_in_band"] and row["monotone"]
        ok &= row["pass"]
        rows.append(row)
    dt = time.perf_counter() - t0
    return _entry("counting_law", {"rows": rows}, ok, dt)


def _band_distance(x: float, lo: float, hi: float) -> float:
    return max(lo - x, 0.0, x - hi)


def check_direct() -> ReportEntry:
    crit = CRITERIA["direct"]
    exp, tol = crit["expected"], crit["tolerance"]
    t0 = time.perf_counter()
    c = effective.model_constants()
    h = exp["h"]
    pred = -2.0 * c.a0 + 2.0 * c.a1 * h
    bounds = effective.eigen_bounds(effective.from_h(h, n_max=1), 1)[0]
    band = (min(bounds.lower, bounds.upper, pred), max(bounds.lower, bounds.upper, pred))
    energies, centroid = {}, None
    for s in exp["spacings"]:
        op = axisym.assemble(h, axisym.AxiGrid(spacing=s))
        vals, vecs, _ = axisym.lowest_eigs(op, 1, return_vectors=True)
        energies[s] = float(vals[0])
        if s == min(exp["spacings"]):
            centroid = axisym.localization_profile(op, vecs[:, 0])
    fine = energies[min(energies)]
    extrap = report.richardson(list(energies.items()), 2)
    dists = {s: _band_distance(e, *band) for s, e in energies.items()}
    d_ext = _band_distance(extrap, *band)
    measured = {
        "energies": {str(k): v for k, v in energies.items()},
        "prediction": pred,
        "energy_rel_error": abs(fine / pred - 1.0),
        "centroid": centroid[0],
        "z_spread": centroid[1],
        "r_spread": centroid[2],
        "xi0": c.xi0,
        "richardson": extrap,
        "band": list(band),
        "band_distance_inputs": [dists[s] for s in exp["spacings"]],
        "band_distance_richardson": d_ext,
    }
    checks = {
        "energy": measured["energy_rel_error"] <= tol["energy_rel"],
        "centroid": abs(centroid[0] - c.xi0) <= tol["centroid"],
        "richardson": d_ext < min(dists.values()),
    }
    measured["parts"] = checks
    dt = time.perf_counter() - t0
    return _entry("direct", measured, all(checks.values()), dt)


def check_identities() -> ReportEntry:
    exp, tol = CRITERIA["identities"]["expected"], CRITERIA["identities"]["tolerance"]
    t0 = time.perf_counter()
    x = np.geomspace(*exp["wronskian_range"], 2001)
    i0, i1, k0, k1 = specfun.scaled_bessel(x)
    wr = float(np.max(np.abs(x * (i0 * k1 + i1 * k0) - 1.0)))
    rng = np.random.default_rng(exp["seed"])
    R = rng.uniform(0.05, 20.0, exp["pairs"])
    beta = rng.uniform(0.2, 5.0, exp["pairs"])
    lhs = np.array([circle.mu1_values(r, b, cache=None) for r, b in zip(R, beta)])
    rhs = np.array([b * b * circle.mu1_values(b * r, 1.0, cache=None) for r, b in zip(R, beta)])
    scaling = float(np.max(np.abs(lhs / rhs - 1.0)))
    y = np.geomspace(1e-4, 100.0, 200)
    rt = float(np.max(np.abs(specfun.h_product(0, specfun.h0_inverse(y)) / y - 1.0)))
    dt = time.perf_counter() - t0
    ok = wr <= tol["wronskian"] and scaling <= tol["scaling_rel"] and rt <= tol["round_trip"]
    return _entry("identities", {"wronskian": wr, "scaling": scaling, "round_trip": rt}, ok, dt)


CHECKS = {
    "constants": check_constants,
    "circle_minimum": check_circle_minimum,
    "tail_law": check_tail_law,
    "second_state": check_second_state,
    "harmonic": check_harmonic,
    "sandwich": check_sandwich,
    "oscillation_count": check_oscillation_count,
    "counting_law": check_counting_law,
    "direct": check_direct,
    "identities": check_identities,
}


def run_suite(ids) -> report.VerificationReport:
    rep = report.VerificationReport(provenance={
        "constants": effective.model_constants().as_dict(),
        "rho": effective.choose_rho(),
        "policies": {
            "bisection_tol": "1e-9 max(1, |E|)",
            "counting_step": "(pi/20) h / sqrt(max(E - min U, 1))",
            "truncation": f"WKB decay 1e-{int(schrod1d.WKB_DECADES)}, cap {schrod1d.DEFAULT_X_CAP}",
            "axisym_shift": axisym.DEFAULT_SHIFT,
        },
        "seed": CRITERIA["identities"]["expected"]["seed"],
    })
    for cid in ids:
        rep.add(CHECKS[cid]())
    return rep
