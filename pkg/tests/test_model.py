import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invlearn.errors import SpecificationError
from invlearn.model import (
    L1,
    SQUARED,
    ConstraintHierarchy,
    InverseProblem,
    ObservationSummary,
    PolyhedralRegion,
    problem_from_json,
    problem_to_json,
    push_observation,
    total_loss,
    validate,
)

TRIANGLE = PolyhedralRegion(
    A=np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]),
    b=np.array([0.0, 0.0, -1.0]))


def make_problem(points, loss=SQUARED, relevant=(0, 1, 2), preferred=()):
    return InverseProblem(
        region=TRIANGLE,
        hierarchy=ConstraintHierarchy(relevant=frozenset(relevant),
                                      preferred=frozenset(preferred), m=3),
        observations=ObservationSummary.from_points(points),
        loss=loss)


def test_region_rejects_zero_row():
    with pytest.raises(SpecificationError):
        PolyhedralRegion(A=np.array([[0.0, 0.0]]), b=np.array([1.0]))


def test_push_mean_update():
    s = ObservationSummary.from_points([[2.0, 2.0], [2.0, 2.0]], retain=False)
    s2 = push_observation(s, [5.0, 5.0])
    assert s2.count == 3
    assert s2.centroid == pytest.approx([3.0, 3.0])


def test_push_c2_update():
    s = ObservationSummary.from_points([[1.0, 0.0]], retain=False)
    s2 = push_observation(s, [3.0, 0.0])
    assert s2.c2 == pytest.approx(2.0)


def test_push_onto_empty():
    s = push_observation(ObservationSummary.empty(2), [1.0, 4.0])
    assert s.count == 1
    assert s.centroid == pytest.approx([1.0, 4.0])
    assert s.c2 == 0.0


def test_total_loss_squared():
    s = ObservationSummary.from_points([[1.0, 3.0], [3.0, 1.0]])
    assert total_loss(s, [0.0, 0.0]) == pytest.approx(20.0)
    assert total_loss(s, s.centroid) == pytest.approx(4.0)


def test_total_loss_l1():
    s = ObservationSummary.from_points([[1.0, 5.0], [3.0, 1.0], [2.0, 9.0]])
    assert total_loss(s, [2.0, 5.0], kind=L1) == pytest.approx(10.0)


def test_l1_requires_points():
    s = ObservationSummary(count=2, centroid=np.array([1.0, 1.0]), c2=3.0)
    with pytest.raises(SpecificationError):
        total_loss(s, [0.0, 0.0], kind=L1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.floats(-50, 50), min_size=3, max_size=3),
                min_size=1, max_size=12),
       st.lists(st.floats(-50, 50), min_size=3, max_size=3))
def test_aggregation_identity(point_list, z):
    pts = np.array(point_list)
    z = np.array(z)
    s = ObservationSummary.from_points(pts)
    direct = float(np.sum((pts - z) ** 2))
    agg = total_loss(s, z)
    assert agg == pytest.approx(direct, rel=1e-10, abs=1e-9)


def test_streaming_equals_batch():
    rng = np.random.default_rng(4)
    pts = rng.normal(size=(9, 3))
    batch = ObservationSummary.from_points(pts)
    s = ObservationSummary.empty(3, retain=True)
    for x in pts:
        s = push_observation(s, x)
    assert s.count == batch.count
    assert s.centroid == pytest.approx(batch.centroid, abs=1e-9)
    assert s.c2 == pytest.approx(batch.c2, abs=1e-9)
    assert s.median == pytest.approx(batch.median)


def test_median_minimizes_l1():
    rng = np.random.default_rng(8)
    pts = rng.normal(size=(7, 2))
    s = ObservationSummary.from_points(pts)
    base = total_loss(s, s.median, kind=L1)
    for delta in (0.05, -0.05, 0.3):
        for j in range(2):
            z = s.median.copy()
            z[j] += delta
            assert total_loss(s, z, kind=L1) >= base - 1e-12


def test_validate_clean_triangle():
    assert validate(make_problem([[0.2, 0.3]])) == []


def test_validate_infeasible_region():
    region = PolyhedralRegion(A=np.array([[1.0], [-1.0]]),
                              b=np.array([1.0, 0.0]))
    p = InverseProblem(region=region,
                       hierarchy=ConstraintHierarchy(relevant=frozenset({0}),
                                                     m=2),
                       observations=ObservationSummary.from_points([[0.5]]))
    assert "region infeasible" in validate(p)


def test_validate_preferred_subset():
    p = make_problem([[0.2, 0.3]], relevant=(0,), preferred=(1,))
    assert "preferred not subset of relevant" in validate(p)


def test_json_round_trip():
    p = make_problem([[0.2, 0.3], [0.4, 0.1]], preferred=(1,))
    q = problem_from_json(problem_to_json(p))
    np.testing.assert_allclose(q.region.A, p.region.A)
    np.testing.assert_allclose(q.observations.points, p.observations.points)
    assert q.hierarchy.relevant == p.hierarchy.relevant
    assert q.hierarchy.preferred == p.hierarchy.preferred
    assert q.loss == p.loss


def test_json_summary_only_round_trip():
    p = InverseProblem(
        region=TRIANGLE,
        hierarchy=ConstraintHierarchy(relevant=frozenset({0, 1, 2}), m=3),
        observations=ObservationSummary(count=5,
                                        centroid=np.array([0.3, 0.2]),
                                        c2=1.25))
    q = problem_from_json(problem_to_json(p))
    assert q.observations.count == 5
    assert q.observations.c2 == pytest.approx(1.25)
    assert q.observations.points is None
