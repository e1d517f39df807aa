import numpy as np
import pytest

from invlearn.errors import SpecificationError
from invlearn.geometry import (
    EMPTY,
    MULTI,
    SINGLETON,
    active_set,
    cone_contains,
    cone_meets_normalization,
    excitation_report,
    identifiability_report,
    is_single_ray,
    observation_aligned_parameter,
    parameter_polytope,
    stationarity_residual,
)
from invlearn.model import NormalizationSet, PolyhedralRegion

TRIANGLE = PolyhedralRegion(
    A=np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]),
    b=np.array([0.0, 0.0, -1.0]))
SIMPLEX = NormalizationSet()


def test_active_set_vertex():
    assert active_set(TRIANGLE, [0.0, 0.0]).indices == (0, 1)


def test_active_set_edge():
    assert active_set(TRIANGLE, [0.0, 0.6]).indices == (0,)


def test_active_set_hypotenuse():
    assert active_set(TRIANGLE, [0.5, 0.5]).indices == (2,)


def test_cone_contains_own_generator():
    assert cone_contains([[1.0, 0.0]], [1.0, 0.0])


def test_cone_contains_negative_case():
    assert not cone_contains([[1.0, 0.0], [-1.0, -1.0]], [0.5, 0.5])


def test_cone_contains_combination():
    assert cone_contains([[1.0, 0.0], [0.0, 1.0]], [0.3, 0.7])


def test_cone_contains_random_combinations():
    rng = np.random.default_rng(12)
    for _ in range(25):
        G = rng.normal(size=(3, 4))
        lam = rng.uniform(0, 2, size=3)
        theta = G.T @ lam
        assert cone_contains(G, theta)


def test_cone_meets_simplex_absent():
    assert cone_meets_normalization([[-1.0, -1.0]], SIMPLEX) is None


def test_cone_meets_simplex_ray():
    theta = cone_meets_normalization([[1.0, 0.0]], SIMPLEX)
    assert theta == pytest.approx([1.0, 0.0])


def test_cone_meets_simplex_normalized():
    theta = cone_meets_normalization([[1.0, 1.0]], SIMPLEX)
    assert theta == pytest.approx([0.5, 0.5])


def test_parameter_polytope_vertex_spans_simplex():
    pp = parameter_polytope(TRIANGLE, [0.0, 0.0], SIMPLEX)
    assert not pp.empty
    assert pp.lower_bounds == pytest.approx([0.0, 0.0], abs=1e-7)
    assert pp.upper_bounds == pytest.approx([1.0, 1.0], abs=1e-7)


def test_parameter_polytope_single_point():
    pp = parameter_polytope(TRIANGLE, [0.0, 1.0], SIMPLEX)
    assert pp.active == (0, 2)
    assert pp.lower_bounds == pytest.approx([1.0, 0.0], abs=1e-7)
    assert pp.upper_bounds == pytest.approx([1.0, 0.0], abs=1e-7)


def test_parameter_polytope_interior_empty():
    pp = parameter_polytope(TRIANGLE, [0.2, 0.2], SIMPLEX)
    assert pp.empty


def test_parameter_polytope_requires_feasible_point():
    with pytest.raises(SpecificationError):
        parameter_polytope(TRIANGLE, [-1.0, -1.0], SIMPLEX)


def test_single_ray_vertex_multi():
    assert is_single_ray([[0.0, 0.0]], TRIANGLE, SIMPLEX) == MULTI


def test_single_ray_shared_face_singleton():
    assert is_single_ray([[0.0, 0.3], [0.0, 0.7]], TRIANGLE, SIMPLEX) == SINGLETON


def test_single_ray_incompatible_face_empty():
    assert is_single_ray([[0.5, 0.5]], TRIANGLE, SIMPLEX) == EMPTY


def test_excitation_shared_normal_singular():
    K = 4
    rep = excitation_report([np.array([1.0, 0.0])] * K)
    assert rep.S == pytest.approx(np.diag([0.0, K]))
    assert not rep.S_positive_definite
    assert rep.S_null_space.shape == (2, 1)
    assert abs(rep.S_null_space[0, 0]) == pytest.approx(1.0)


def test_excitation_orthogonal_normals_pd():
    rep = excitation_report([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
    assert rep.S == pytest.approx(np.eye(2))
    assert rep.S_positive_definite


def test_excitation_interior_point_pd():
    rep = excitation_report([None], n=2)
    assert rep.S == pytest.approx(np.eye(2))
    assert rep.S_positive_definite


def test_excitation_rejects_non_unit_normal():
    with pytest.raises(SpecificationError):
        excitation_report([np.array([2.0, 0.0])])


def test_stationarity_zero_on_active_normal():
    assert stationarity_residual(TRIANGLE, [0.0, 0.6], [1.0, 0.0]) == pytest.approx(0.0, abs=1e-9)


def test_stationarity_orthogonal_parameter():
    assert stationarity_residual(TRIANGLE, [0.0, 0.6], [0.0, 1.0]) == pytest.approx(1.0)


def test_stationarity_interior():
    assert stationarity_residual(TRIANGLE, [0.2, 0.2], [1.0, 0.0]) == pytest.approx(1.0)


def test_residual_zero_iff_cone_member():
    rng = np.random.default_rng(17)
    for _ in range(20):
        theta = rng.dirichlet(np.ones(2))
        z = [0.0, 0.0] if rng.random() < 0.5 else [0.0, 0.5]
        resid = stationarity_residual(TRIANGLE, z, theta)
        idx = active_set(TRIANGLE, z).indices
        member = cone_contains(TRIANGLE.A[list(idx), :], theta)
        assert (resid <= 1e-7) == member


def test_aligned_parameter_prefers_small_coordinate():
    pp = parameter_polytope(TRIANGLE, [0.0, 0.0], SIMPLEX)
    theta = observation_aligned_parameter(pp, [0.2, 0.8])
    assert theta == pytest.approx([1.0, 0.0], abs=1e-7)


def test_aligned_parameter_singleton():
    pp = parameter_polytope(TRIANGLE, [0.0, 1.0], SIMPLEX)
    theta = observation_aligned_parameter(pp, [0.4, 0.4])
    assert theta == pytest.approx([1.0, 0.0], abs=1e-7)


def test_aligned_parameter_tie_break():
    pp = parameter_polytope(TRIANGLE, [0.0, 0.0], SIMPLEX)
    theta = observation_aligned_parameter(pp, [0.5, 0.5])
    assert theta == pytest.approx([1.0, 0.0], abs=1e-7)


def test_polytope_samples_rationalize_forward_problem():
    from invlearn.simplex import LpSpec, solve_lp
    rng = np.random.default_rng(23)
    for z in ([0.0, 0.0], [0.0, 1.0]):
        pp = parameter_polytope(TRIANGLE, z, SIMPLEX)
        for theta in pp.sample(rng, 8):
            out = solve_lp(LpSpec(c=theta, ineq_A=TRIANGLE.A,
                                  ineq_b=TRIANGLE.b))
            assert out.objective == pytest.approx(float(theta @ z), abs=1e-7)


def test_full_report_composition():
    rep = identifiability_report([[0.0, 0.3], [0.0, 0.7]], TRIANGLE, SIMPLEX)
    assert rep.single_ray_verdict == SINGLETON
    assert rep.cone_ranks == [1, 1]
    assert not rep.S_positive_definite  # both normals share the x-axis ray
    assert rep.to_dict()["single_ray_verdict"] == SINGLETON
