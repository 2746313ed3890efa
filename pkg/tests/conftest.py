import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# Acceptance tests map onto numbered criteria; the terminal summary prints
# one PASS/FAIL line per criterion so a full run can be audited at a glance.
ACCEPTANCE_CRITERIA = {
    "test_family_constants_and_critical_weights": (
        1,
        "family constants and critical weights",
    ),
    "test_series_matches_quadrature_oracles": (
        2,
        "series engine against independent quadrature",
    ),
    "test_quadratic_term_vanishes_at_critical_weight": (
        3,
        "exact criticality of the quadratic term",
    ),
    "test_convergence_phenomenology_m2": (
        4,
        "convergence phenomenology on the m=2 grid",
    ),
    "test_near_critical_slope_plateau": (
        5,
        "near-critical slope plateau",
    ),
    "test_dimension_effect_on_crossover": (
        6,
        "dimension effect on the crossover",
    ),
    "test_cube_limit_law_moments": (
        7,
        "cube-root limit law at the critical weight",
    ),
    "test_cube_limit_law_covariance_stability": (
        7,
        "cube-root limit law at the critical weight",
    ),
    "test_solver_never_beaten_by_grid_oracle": (
        8,
        "intrinsic-mean solver against a dense grid oracle",
    ),
    "test_simulation_output_is_bit_reproducible": (
        9,
        "bit-reproducible simulation output",
    ),
}

_acceptance_outcomes = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    entry = ACCEPTANCE_CRITERIA.get(name)
    if entry is None:
        return
    index, label = entry
    rec = _acceptance_outcomes.setdefault(index, {"label": label, "ok": True})
    if report.failed:
        rec["ok"] = False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for index in sorted(_acceptance_outcomes):
        rec = _acceptance_outcomes[index]
        verdict = "PASS" if rec["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {index} ({rec['label']}): {verdict}")
