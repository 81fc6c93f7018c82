import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipdist import (
    FiniteMetricSpace,
    MetricAxiomError,
    MetricStructureError,
    PointMap,
    check_metric,
    dilation,
    is_epsilon_isometry,
    lipschitz_cost,
    validate_metric,
)
from lipdist.constructions import DiscretizationParams, canonical_interval_map

from strategies import lattice_spaces, permuted

LOG2 = math.log(2)


def space(dist, name="S"):
    dist = np.asarray(dist, dtype=float)
    return FiniteMetricSpace(name, tuple(str(i) for i in range(len(dist))), dist)


def two_point(d, name):
    return space([[0, d], [d, 0]], name)


# -- FiniteMetricSpace and validate_metric -----------------------------------

def test_equilateral_triangle_is_valid():
    assert validate_metric(space([[0, 1, 1], [1, 0, 1], [1, 1, 0]])) == []


def test_triangle_violation_reported_at_0_1_2():
    v = validate_metric(space([[0, 1, 3], [1, 0, 1], [3, 1, 0]]))
    assert [(x.axiom, x.indices) for x in v] == [("triangle", (0, 1, 2))]


def test_coincident_points_violate_positivity():
    v = validate_metric(space([[0, 0], [0, 0]]))
    assert [(x.axiom, x.indices) for x in v] == [("positivity", (0, 1))]


def test_asymmetric_and_nonzero_diagonal_and_nonfinite():
    axioms = {x.axiom for x in validate_metric(space([[0, 1], [2, 0]]))}
    assert "symmetry" in axioms
    axioms = {x.axiom for x in validate_metric(space([[1, 1], [1, 0]]))}
    assert "zero-diagonal" in axioms
    axioms = {x.axiom for x in validate_metric(space([[0, np.inf], [np.inf, 0]]))}
    assert "finite" in axioms


def test_coords_mismatch_is_reported():
    s = FiniteMetricSpace("c", ("a", "b"), np.array([[0, 2.0], [2.0, 0]]), np.array([[0, 0], [1, 0.0]]))
    assert [x.axiom for x in validate_metric(s)] == ["coords"]


def test_triangle_tolerance_absorbs_rounding():
    eps = 1e-13
    assert validate_metric(space([[0, 1, 2 + eps], [1, 0, 1], [2 + eps, 1, 0]])) == []


def test_check_metric_raises_with_violations():
    with pytest.raises(MetricAxiomError) as exc:
        check_metric(space([[0, 1, 3], [1, 0, 1], [3, 1, 0]]))
    assert exc.value.violations[0].axiom == "triangle"


@pytest.mark.parametrize("dist, labels", [
    ([[0, 1, 2], [1, 0, 1]], ("a", "b")),
    ([[0, 1], [1, 0]], ("a",)),
    (np.zeros((0, 0)), ()),
])
def test_structural_errors_raise_on_construction(dist, labels):
    with pytest.raises(MetricStructureError):
        FiniteMetricSpace("bad", labels, np.asarray(dist, dtype=float))


def test_space_arrays_are_read_only():
    s = space([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        s.dist[0, 1] = 5.0


def test_space_helpers():
    s = FiniteMetricSpace.from_points("line", [0.0, 0.25, 1.0])
    assert s.diameter() == 1.0
    assert list(s.eccentricity()) == [1.0, 0.75, 1.0]
    assert list(s.spectrum()) == [0.25, 0.75, 1.0]
    assert s.scaled(2.0).diameter() == 2.0
    assert s.index("1") == 1


# -- PointMap ------------------------------------------------------------------

def test_point_map_rejects_non_bijection():
    s = space([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        PointMap(s, s, (0, 0))
    with pytest.raises(ValueError):
        PointMap(s, space([[0, 1, 1], [1, 0, 1], [1, 1, 0]]), (0, 1))


def test_point_map_inverse_and_composition():
    s = space([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    f = PointMap(s, s, (2, 0, 1))
    assert f.then(f.inverse()).perm == (0, 1, 2)
    assert f("0") == "2"


# -- dilation / lipschitz_cost / is_epsilon_isometry -------------------------

def test_dilation_of_identity_is_one():
    s = space([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert dilation(PointMap.identity(s)) == 1.0


def test_dilation_two_point_scaling():
    assert dilation(PointMap(two_point(1, "A"), two_point(2, "B"), (0, 1))) == 2.0


def test_one_point_space_has_cost_zero():
    s = space([[0.0]])
    rep = lipschitz_cost(PointMap.identity(s))
    assert (rep.dil_forward, rep.dil_inverse, rep.cost) == (1.0, 1.0, 0.0)


def test_canonical_map_11_to_22():
    f = canonical_interval_map("11", "22", DiscretizationParams(2, 2))
    assert list(f.source.dist[0]) == [0, 0.25, 0.375, 0.5, 0.75]
    assert list(f.target.dist[0]) == [0, 0.25, 0.3125, 0.5, 0.625]
    assert dilation(f) == pytest.approx(1.5, rel=1e-15)
    rep = lipschitz_cost(f)
    assert rep.dil_inverse == pytest.approx(2.0, rel=1e-15)
    assert rep.cost == pytest.approx(1.0986122886681098, abs=1e-12)
    # the forward dilation is attained on the pair (3/8, 1/2)
    i, j = f.source.index("I2.1"), f.source.index("I1.0")
    ratio = f.target.dist[f.perm[i], f.perm[j]] / f.source.dist[i, j]
    assert ratio == pytest.approx(1.5, rel=1e-15)


def test_lipschitz_cost_two_point_scaling():
    rep = lipschitz_cost(PointMap(two_point(1, "A"), two_point(2, "B"), (0, 1)))
    assert rep.dil_forward == 2.0 and rep.dil_inverse == 0.5
    assert rep.cost == pytest.approx(2 * LOG2, abs=1e-15)


def test_is_epsilon_isometry_examples():
    s = space([[0, 1], [1, 0]])
    assert is_epsilon_isometry(PointMap.identity(s), 0.0)
    scale = PointMap(two_point(1, "A"), two_point(2, "B"), (0, 1))
    assert not is_epsilon_isometry(scale, LOG2)
    assert is_epsilon_isometry(canonical_interval_map("11", "22", DiscretizationParams(2, 2)), 2 * LOG2)
    with pytest.raises(ValueError):
        is_epsilon_isometry(PointMap.identity(s), -1.0)


# -- properties ------------------------------------------------------------------

perms = st.integers(0, 10**6)


def _perm(n, code):
    return tuple(np.random.default_rng(code).permutation(n))


@given(lattice_spaces(min_n=3, max_n=6), st.data())
def test_submultiplicativity(X, data):
    n = X.n
    Y = data.draw(lattice_spaces(n=n, name="Y"))
    Z = data.draw(lattice_spaces(n=n, name="Z"))
    f = PointMap(X, Y, _perm(n, data.draw(perms)))
    g = PointMap(Y, Z, _perm(n, data.draw(perms)))
    assert dilation(f.then(g)) <= dilation(f) * dilation(g) * (1 + 1e-12)


@given(lattice_spaces(min_n=2, max_n=6), lattice_spaces(min_n=2, max_n=6, name="Y"), perms)
def test_cost_symmetric_in_inverse_and_dilation_product(X, Y, code):
    if X.n != Y.n:
        Y = FiniteMetricSpace("Y", X.labels, X.dist * 1.5)
    f = PointMap(X, Y, _perm(X.n, code))
    rep, inv = lipschitz_cost(f), lipschitz_cost(f.inverse())
    assert rep.cost == pytest.approx(inv.cost, abs=1e-12)
    assert rep.dil_forward * rep.dil_inverse >= 1 - 1e-12
    assert dilation(PointMap.identity(X)) == 1.0


@given(lattice_spaces(min_n=2, max_n=6), perms, st.sampled_from([0.25, 0.5, 3.0, 10.0]))
def test_scaling_covariance(X, code, c):
    Y = permuted(X, _perm(X.n, code))
    f = PointMap(X, Y, _perm(X.n, code))
    Yc = FiniteMetricSpace(Y.name, Y.labels, Y.dist * c)
    a, b = lipschitz_cost(f), lipschitz_cost(PointMap(X, Yc, f.perm))
    assert b.dil_forward == pytest.approx(c * a.dil_forward, rel=1e-12)
    assert b.dil_inverse == pytest.approx(a.dil_inverse / c, rel=1e-12)


@given(lattice_spaces(min_n=2, max_n=6), perms)
def test_permuted_copy_has_isometric_bijection(X, code):
    perm = _perm(X.n, code)
    f = PointMap(X, permuted(X, perm), perm)
    assert lipschitz_cost(f).cost == 0.0
    assert is_epsilon_isometry(f, 0.0)
