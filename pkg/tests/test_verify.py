import json
import math
import random

import pytest

from subsetflow import (
    CheckResult,
    FlowConfig,
    GeometryError,
    ScanConfig,
    ScanReport,
    bound_suite,
    convergence_study,
    hausdorff_distance,
    lipschitz_scan,
    make_subset,
    matching_diagnostic,
)
from subsetflow.verify import perturb_point, perturb_subset, sample_subset, sample_tuple


def small_cfg(space, n=3, samples=8, seed=7, **flow):
    return ScanConfig(space=space, n=n, samples=samples, seed=seed,
                      flow=FlowConfig(**flow) if flow else FlowConfig())


def line_set(line, *vals):
    return make_subset(line, [line.point((v,)) for v in vals], 0.0)


# ---------------------------------------------------------------------------
# config and report plumbing


def test_scan_config_validation(plane):
    with pytest.raises(GeometryError):
        ScanConfig(space=plane, n=1, samples=5, seed=0)
    with pytest.raises(GeometryError):
        ScanConfig(space=plane, n=3, samples=0, seed=0)
    with pytest.raises(GeometryError):
        ScanConfig(space=plane, n=3, samples=5, seed=0, perturbation_scale=0.0)
    with pytest.raises(GeometryError):
        ScanConfig(space=plane, n=3, samples=5, seed=0, perturbation_scale=1.0)


def test_check_result_json_hides_nonfinite():
    row = CheckResult(name="x", trials=0, worst=-math.inf, threshold=1.0, passed=True)
    assert row.to_json()["worst"] is None
    row2 = CheckResult(name="y", trials=3, worst=0.5, threshold=1.0, passed=True)
    assert row2.to_json()["worst"] == 0.5


def test_report_csv_shape(plane):
    report = bound_suite(small_cfg(plane, samples=2))
    lines = report.to_csv().splitlines()
    assert lines[0] == "name,trials,worst,threshold,pass"
    assert len(lines) == len(report.checks) + 1
    assert all(line.count(",") == 4 for line in lines[1:])


def test_report_overall_pass_logic(plane):
    report = bound_suite(small_cfg(plane, samples=2))
    assert report.overall_pass == all(c.passed for c in report.checks)


# ---------------------------------------------------------------------------
# samplers


@pytest.mark.parametrize("key", ["euclidean-2", "hyperboloid-2", "star-tree"])
def test_sample_tuple_separation(all_spaces, key):
    space = all_spaces[key]
    rng = random.Random("septest")
    for _ in range(10):
        x = sample_tuple(space, 4, rng)
        for i in range(3):
            for j in range(i + 1, 4):
                assert space.distance(x.coords[i], x.coords[j]) > 0.0


def test_sample_subset_cardinality(plane):
    rng = random.Random("card")
    for _ in range(10):
        a = sample_subset(plane, 4, rng)
        assert 1 <= len(a) <= 4


def test_perturb_point_stays_on_sheet(hyper):
    rng = random.Random("sheet")
    for i in range(25):
        p = hyper.random_point(rng)
        q = perturb_point(hyper, p, 0.1, rng)
        data = q.data
        # Minkowski norm must certify sheet membership
        assert data[0] > 0
        minkowski = data[0] ** 2 - sum(v * v for v in data[1:])
        assert minkowski == pytest.approx(1.0, abs=1e-9)


def test_perturb_subset_keeps_size_bound(star_tree):
    rng = random.Random("perturbset")
    for _ in range(10):
        a = sample_subset(star_tree, 4, rng)
        b = perturb_subset(a, 0.05, rng)
        assert 1 <= len(b) <= len(a)
        assert b.space == a.space


# ---------------------------------------------------------------------------
# suites


@pytest.mark.parametrize("key", ["euclidean-2", "star-tree"])
def test_bound_suite_passes_small(all_spaces, key):
    report = bound_suite(small_cfg(all_spaces[key], samples=6))
    failing = [c.name for c in report.checks if not c.passed]
    assert report.overall_pass, f"failing rows: {failing}"
    names = [c.name for c in report.checks]
    assert len(names) == len(set(names))
    assert "flow_nonexpansive" in names
    assert "merge_time_bound" in names


def test_bound_suite_deterministic(plane):
    cfg = small_cfg(plane, samples=4)
    a = json.dumps(bound_suite(cfg).to_json(), sort_keys=True)
    b = json.dumps(bound_suite(cfg).to_json(), sort_keys=True)
    assert a == b


def test_lipschitz_scan_deterministic_and_sane(plane):
    cfg = small_cfg(plane, n=3, samples=12)
    r1 = lipschitz_scan(cfg)
    r2 = lipschitz_scan(cfg)
    assert json.dumps(r1.to_json(), sort_keys=True) == json.dumps(r2.to_json(), sort_keys=True)
    assert len(r1.checks) == 1
    row = r1.checks[0]
    assert row.name == "lipschitz_ratio"
    assert row.passed
    assert row.worst <= row.threshold


def test_lipschitz_scan_seed_changes_draws(plane):
    a = lipschitz_scan(ScanConfig(space=plane, n=3, samples=12, seed=1))
    b = lipschitz_scan(ScanConfig(space=plane, n=3, samples=12, seed=2))
    assert a.checks[0].worst != b.checks[0].worst


# ---------------------------------------------------------------------------
# convergence study


def test_convergence_time_zero(plane):
    report = convergence_study(small_cfg(plane, samples=2), 0.0)
    assert report.overall_pass
    by_name = {c.name: c for c in report.checks}
    assert by_name["cauchy_reaches_tolerance"].worst == 0.0


def test_convergence_rejects_negative_time(plane):
    with pytest.raises(GeometryError):
        convergence_study(small_cfg(plane, samples=2), -0.5)


def test_convergence_smooth_regime(plane):
    cfg = ScanConfig(space=plane, n=4, samples=2, seed=13,
                     flow=FlowConfig(sweeps_per_run=16, max_doublings=8))
    report = convergence_study(cfg, 0.01)
    assert report.overall_pass
    by_name = {c.name: c for c in report.checks}
    for seq in by_name["cauchy_monotone"].data:
        assert all(b <= a + 1e-10 for a, b in zip(seq, seq[1:]))


def test_convergence_collapse_regime(plane):
    report = convergence_study(small_cfg(plane, n=3, samples=2), 8.0)
    assert report.overall_pass


# ---------------------------------------------------------------------------
# matching diagnostic


def test_matching_identity(line):
    a = line_set(line, 0.0, 1.0)
    pairs = matching_diagnostic(a, a)
    assert pairs is not None
    assert all(line.distance(a.points[i], a.points[j]) == 0.0 for i, j in pairs)


def test_matching_within_hausdorff(line):
    a = line_set(line, 0.0, 10.0)
    b = line_set(line, 1.0, 10.5)
    pairs = matching_diagnostic(a, b)
    d = hausdorff_distance(a, b)
    assert pairs is not None
    assert max(line.distance(a.points[i], b.points[j]) for i, j in pairs) <= d + 1e-12


def test_matching_greedy_failure_case(line):
    # greedy grabs (4,3) first, stranding 0 with 7 at distance 7 while the
    # Hausdorff distance is only 3, so the diagnostic must decline
    a = line_set(line, 0.0, 4.0)
    b = line_set(line, 3.0, 7.0)
    assert matching_diagnostic(a, b) is None


def test_matching_size_mismatch(line):
    with pytest.raises(GeometryError):
        matching_diagnostic(line_set(line, 0.0), line_set(line, 0.0, 1.0))


def test_matching_space_mismatch(line, plane):
    with pytest.raises(GeometryError):
        matching_diagnostic(line_set(line, 0.0), make_subset(plane, [plane.point((0.0, 0.0))], 0.0))
