import numpy as np
import pytest

from invlearn.errors import InfeasibleError
from invlearn.projection import ProjectionSpec, project_point

TRIANGLE_G = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
TRIANGLE_H = np.array([0.0, 0.0, -1.0])


def test_axis_projection():
    spec = ProjectionSpec(target=[2.0, 2.0], eq_A=[[1.0, 0.0]], eq_b=[0.0],
                          ineq_A=np.eye(2), ineq_b=np.zeros(2))
    res = project_point(spec)
    assert res.point == pytest.approx([0.0, 2.0])
    assert res.sq_distance == pytest.approx(4.0)


def test_segment_projection():
    spec = ProjectionSpec(target=[0.6, 0.6], eq_A=[[1.0, 0.0]], eq_b=[0.0],
                          ineq_A=[[0.0, 1.0], [-1.0, -1.0]],
                          ineq_b=[0.0, -1.0])
    res = project_point(spec)
    assert res.point == pytest.approx([0.0, 0.6])
    assert res.sq_distance == pytest.approx(0.36)


def test_inconsistent_equalities_raise():
    spec = ProjectionSpec(target=[0.0], eq_A=[[1.0], [1.0]], eq_b=[0.0, 1.0])
    with pytest.raises(InfeasibleError) as err:
        project_point(spec)
    assert err.value.residual is not None


def test_active_indices_reported():
    spec = ProjectionSpec(target=[-1.0, -1.0], ineq_A=TRIANGLE_G,
                          ineq_b=TRIANGLE_H)
    res = project_point(spec)
    assert res.point == pytest.approx([0.0, 0.0], abs=1e-8)
    assert res.active == [0, 1]


def test_idempotence():
    rng = np.random.default_rng(3)
    for _ in range(25):
        c = rng.normal(size=2)
        res = project_point(ProjectionSpec(target=c, ineq_A=TRIANGLE_G,
                                           ineq_b=TRIANGLE_H))
        res2 = project_point(ProjectionSpec(target=res.point,
                                            ineq_A=TRIANGLE_G,
                                            ineq_b=TRIANGLE_H))
        assert res2.point == pytest.approx(res.point, abs=1e-9)
        assert res2.sq_distance <= 1e-16


def test_lipschitz():
    rng = np.random.default_rng(9)
    for _ in range(30):
        a = rng.normal(scale=2.0, size=2)
        b = rng.normal(scale=2.0, size=2)
        pa = project_point(ProjectionSpec(target=a, ineq_A=TRIANGLE_G,
                                          ineq_b=TRIANGLE_H)).point
        pb = project_point(ProjectionSpec(target=b, ineq_A=TRIANGLE_G,
                                          ineq_b=TRIANGLE_H)).point
        assert np.linalg.norm(pa - pb) <= np.linalg.norm(a - b) + 1e-9


def test_interior_target_unchanged():
    res = project_point(ProjectionSpec(target=[0.2, 0.2], ineq_A=TRIANGLE_G,
                                       ineq_b=TRIANGLE_H))
    assert res.point == pytest.approx([0.2, 0.2])
    assert res.active == []


def test_matches_cvxpy_on_random_polyhedra():
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(21)
    for _ in range(15):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(3, 8))
        G = rng.normal(size=(m, n))
        h = G @ rng.normal(size=n) - rng.uniform(0.1, 1.0, size=m)
        c = rng.normal(scale=2.0, size=n)
        res = project_point(ProjectionSpec(target=c, ineq_A=G, ineq_b=h))
        z = cp.Variable(n)
        prob = cp.Problem(cp.Minimize(cp.sum_squares(z - c)), [G @ z >= h])
        prob.solve()
        assert res.sq_distance == pytest.approx(prob.value, abs=1e-6)
        assert res.point == pytest.approx(z.value, abs=1e-4)
