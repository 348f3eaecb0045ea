import pytest

from cubecocycle.families import generate, group_action, parse_family
from cubecocycle.verification import (
    CHECK_ANCHORS,
    CHECKS,
    STATUS_FAIL,
    STATUS_PASS,
    Report,
    SuiteConfig,
    SuiteContext,
    coefficient_report,
    failures,
    norm_scan_frame,
    run_suite,
    sample_pairs,
    select_checks,
    validation_report,
)
from cubecocycle.zw import z_grid


def _config(**kwargs):
    settings = {"max_pairs": 12, "jobs": 2, "progress": False}
    settings.update(kwargs)
    return SuiteConfig(**settings)


def test_sample_pairs():
    pairs, sampled = sample_pairs(3, 100)
    assert len(pairs) == 9 and not sampled
    first, sampled = sample_pairs(10, 20, seed=4)
    again, _ = sample_pairs(10, 20, seed=4)
    assert sampled
    assert first == again
    assert first == sorted(first)


def test_select_checks():
    assert len(select_checks()) == len(CHECK_ANCHORS)
    chosen = select_checks(["cocycle.inverse", "complex.validate"])
    assert [c.id for c in chosen] == ["complex.validate", "cocycle.inverse"]
    with pytest.raises(ValueError):
        select_checks(["cocycle.nonsense"])


def test_suite_on_segment(segment3):
    report = run_suite(segment3, "segment(3)", _config(max_pairs=16))
    assert report.passed, failures(report)
    assert not report.partial
    checks = {r.check for r in report.records}
    assert "cocycle.tree_sparsity" in checks
    assert "representation.equivariance" not in checks


def test_suite_on_square_with_group(square):
    action = group_action(parse_family("square"), square)
    report = run_suite(square, "square", _config(max_pairs=16), action)
    assert report.passed, failures(report)
    checks = {r.check for r in report.records}
    assert "representation.base_coefficient" in checks
    assert "cocycle.tree_norm_bound" not in checks


def test_sampled_suite_is_partial(grid23):
    report = run_suite(
        grid23,
        "grid(2x3)",
        _config(),
        check_ids=["complex.validate", "cocycle.monomial_law"],
    )
    assert report.passed, failures(report)
    assert report.partial
    assert report.sampling["pairs_checked"] == 12
    assert report.sampling["pairs_total"] == 144


def test_invalid_complex_stops_after_validation(unfilled_square):
    report = run_suite(unfilled_square, "unfilled", _config())
    assert [r.check for r in report.records] == ["complex.validate"]
    record = report.records[0]
    assert record.status == STATUS_FAIL
    assert record.witness["failure"] == "squares"


def test_validation_report(square):
    report = validation_report(square, "square")
    assert report.command == "validate"
    assert [r.check for r in report.records] == [
        "complex.validate",
        "hyperplanes.two_sided",
    ]
    assert report.passed


def test_report_store(tmp_path, segment3):
    report = run_suite(
        segment3,
        "segment(3)",
        _config(),
        check_ids=["complex.validate", "cocycle.inverse"],
    )
    path = str(tmp_path / "reports" / "segment.json")
    report.save(path)
    loaded = Report.load(path)
    assert loaded.command == "verify"
    assert loaded.config["family"] == "segment(3)"
    assert len(loaded.records) == len(report.records)
    assert {r.status for r in loaded.records} == {STATUS_PASS}
    assert loaded.summary()["by_check"]["cocycle.inverse"]["pass"] == 12
    assert loaded.to_dict()["schema_version"] == "1.0"


def test_norm_scan_frame(tree23):
    points = z_grid(2, 3, 0.8)
    frame = norm_scan_frame(
        tree23, "tree(2,3)", points, [(0, 14), (3, 9)], progress=False
    )
    assert len(frame) == 2 * len(points)
    assert frame["pass"].all()
    assert (frame["norm"] <= frame["tree_bound"] + 1e-9).all()
    assert frame.loc[frame["z_re"] == 0, "norm"].max() == pytest.approx(1)


def test_coefficient_report(segment3):
    document = coefficient_report(segment3, 0, 3)
    assert document["distance"] == 3
    assert document["agree"]
    assert len(document["entries"]) == 13
    assert coefficient_report(segment3, 2, 2)["entries"] == []


def test_each_check_has_one_anchor():
    ids = [c.id for c in CHECKS]
    anchors = [c.anchor for c in CHECKS]
    assert len(set(ids)) == len(ids)
    assert len(set(anchors)) == len(anchors)
    assert CHECK_ANCHORS == dict(zip(ids, anchors))


def test_default_sample_points():
    config = SuiteConfig()
    assert config.exact_points == 5
    assert len(config.float_points) == 20
    assert max(abs(z) for z in config.float_points) <= 0.9 + 1e-12


TREE_CHECKS = [
    "cocycle.tree_monomial",
    "cocycle.tree_sparsity",
    "cocycle.tree_norm_bound",
    "cocycle.monomial_law",
]


@pytest.mark.parametrize("seed", range(10))
def test_random_tree_laws(seed):
    n = 20 * (seed + 1)
    family = f"random_tree({n},{seed})"
    tree = generate(parse_family(family), validate=False)
    report = run_suite(
        tree, family, _config(max_pairs=6, seed=seed), check_ids=TREE_CHECKS
    )
    assert report.passed, failures(report)
    assert {r.check for r in report.records} == set(TREE_CHECKS)


def test_tree_norm_radii(tree23):
    ctx = SuiteContext(tree23, "tree(2,3)", _config())
    radii = sorted({round(abs(p.z), 12) for p in ctx.tree_points})
    assert radii == [round(0.1 * i, 12) for i in range(1, 10)]
    assert max(abs(p.z) for p in ctx.norm_points) == pytest.approx(0.95)


@pytest.mark.parametrize(
    "fixture", ["grid443", "tree22_product", "grid33", "cube3"]
)
def test_monomial_law_on_products(request, fixture):
    complex_ = request.getfixturevalue(fixture)
    checks = ["cocycle.monomial_law", "cocycle.sparsity"]
    report = run_suite(
        complex_, fixture, _config(max_pairs=8), check_ids=checks
    )
    assert report.passed, failures(report)
    assert len(report.records) == 16
