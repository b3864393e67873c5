"""Tests for the univariate expansions: given basis, FPCA and DCT."""

import json

import numpy as np
import pytest

from fda_engine.core.models import make_dense
from fda_engine.core.serializer import save_fundata
from fda_engine.errors import NumericError, ValidationError
from fda_engine.expansions.base import (
    ExpansionResult,
    gram_matrix,
    is_orthonormal,
    orthonormalize,
    reconstruct,
)
from fda_engine.expansions.dct import expand_dct, pooled_drop_mask
from fda_engine.expansions.dispatch import expand
from fda_engine.expansions.fpca import expand_fpca, fix_signs
from fda_engine.expansions.given import expand_given
from fda_engine.expansions.specs import DctSpec, FpcaSpec, GivenSpec, parse_expansion_specs
from fda_engine.ops.products import scalar_product
from fda_engine.sim.basis import eval_basis
from fda_engine.sim.simulate import sim_fundata

T = np.linspace(0, 1, 1001)


def _monomials(t, k=3):
    return make_dense([t], np.stack([t**p for p in range(k)]))


def _images(n=20, shape=(16, 12), seed=0):
    rng = np.random.default_rng(seed)
    axes = [np.linspace(0, 1, shape[0]), np.linspace(0, 2, shape[1])]
    return make_dense(axes, rng.normal(size=(n, *shape)))


# ---------------------------------------------------------------------------
# Given basis
# ---------------------------------------------------------------------------


class TestGiven:
    def test_orthonormal_projection(self):
        basis = eval_basis("fourier", 5, T)
        coef = np.random.default_rng(1).normal(size=(7, 5))
        data = make_dense([T], coef @ basis.X)
        result = expand_given(data, basis, ortho=True)
        assert result.orthonormal
        np.testing.assert_allclose(result.scores, coef, atol=1e-8)

    def test_least_squares_projection(self):
        basis = _monomials(T)
        coef = np.array([[1.0, -2.0, 0.5], [0.0, 3.0, 1.0]])
        data = make_dense([T], coef @ basis.X)
        result = expand_given(data, basis)
        assert not result.orthonormal
        np.testing.assert_allclose(result.scores, coef, atol=1e-8)

    def test_singular_basis(self):
        t = np.linspace(0, 1, 51)
        basis = make_dense([t], np.stack([t, 2 * t]))
        data = make_dense([t], np.stack([t]))
        with pytest.raises(NumericError):
            expand_given(data, basis)

    def test_supplied_scores_shape(self):
        basis = _monomials(T)
        data = make_dense([T], np.zeros((2, T.size)))
        with pytest.raises(ValidationError):
            expand_given(data, basis, scores=np.zeros((2, 4)))
        result = expand_given(data, basis, scores=np.ones((2, 3)))
        np.testing.assert_array_equal(result.scores, np.ones((2, 3)))

    def test_grids_must_match(self):
        basis = _monomials(np.linspace(0, 1, 11))
        data = make_dense([T], np.zeros((1, T.size)))
        with pytest.raises(ValidationError):
            expand_given(data, basis)


class TestOrthonormalize:
    def test_fit_unchanged_and_gram_identity(self):
        basis = _monomials(T, k=4)
        coef = np.random.default_rng(2).normal(size=(5, 4))
        data = make_dense([T], coef @ basis.X)
        result = expand_given(data, basis)
        ortho = orthonormalize(result)
        assert ortho.orthonormal
        np.testing.assert_allclose(gram_matrix(ortho.functions), np.eye(4), atol=1e-10)
        np.testing.assert_allclose(reconstruct(ortho), reconstruct(result), atol=1e-10)
        np.testing.assert_allclose(reconstruct(ortho), data.X, atol=1e-8)

    def test_is_orthonormal(self):
        assert is_orthonormal(eval_basis("fourier", 4, T))
        assert not is_orthonormal(_monomials(T))

    def test_result_shape_checked(self):
        with pytest.raises(ValidationError):
            ExpansionResult(scores=np.zeros((2, 2)), functions=_monomials(T))


# ---------------------------------------------------------------------------
# FPCA
# ---------------------------------------------------------------------------


class TestFpca:
    @pytest.fixture(scope="class")
    def sim(self):
        t = np.linspace(0, 1, 101)
        return sim_fundata([t], [5], ["fourier"], "linear", 2000, seed=3)

    def test_eigenvalues_recovered(self, sim):
        result = expand_fpca(sim.data, npc=5)
        np.testing.assert_allclose(result.values, sim.true_values, rtol=0.15)

    def test_eigenfunctions_recovered(self, sim):
        result = expand_fpca(sim.data, npc=3)
        sp = scalar_product(result.functions, sim.true_functions.extract_obs([0, 1, 2]))
        assert np.all(np.abs(sp) >= 0.95)

    def test_functions_orthonormal_under_rule(self, sim):
        result = expand_fpca(sim.data, npc=5)
        np.testing.assert_allclose(gram_matrix(result.functions), np.eye(5), atol=1e-10)
        assert result.orthonormal

    def test_pve_truncation(self, sim):
        assert expand_fpca(sim.data, pve=0.5).n_components == 2
        assert expand_fpca(sim.data, pve=0.99).n_components == 5

    def test_scores_are_projections(self, sim):
        result = expand_fpca(sim.data, npc=5)
        np.testing.assert_allclose(reconstruct(result), sim.data.X, atol=1e-8)

    def test_midpoint_rule_fills_last_point(self, sim):
        result = expand_fpca(sim.data, npc=3, rule="midpoint")
        assert np.all(np.isfinite(result.functions.X))
        np.testing.assert_allclose(
            gram_matrix(result.functions, "midpoint"), np.eye(3), atol=1e-10
        )

    def test_rank_one_data(self):
        t = np.linspace(0, 1, 51)
        a = np.array([1.0, -2.0, 0.5, 3.0])
        data = make_dense([t], np.outer(a, np.sin(np.pi * t)))
        result = expand_fpca(data, pve=0.99)
        assert result.n_components == 1
        with pytest.raises(ValidationError):
            expand_fpca(data, npc=2)

    def test_constant_zero_data(self):
        data = make_dense([np.linspace(0, 1, 11)], np.zeros((3, 11)))
        with pytest.raises(NumericError):
            expand_fpca(data)

    def test_rejects_images_and_missing(self):
        with pytest.raises(ValidationError):
            expand_fpca(_images())
        data = make_dense([[0.0, 0.5, 1.0]], [[1.0, np.nan, 2.0], [0.0, 1.0, 2.0]])
        with pytest.raises(ValidationError):
            expand_fpca(data)

    def test_fix_signs(self):
        v = np.array([[0.1, -0.2], [-0.9, 0.3]])
        fixed = fix_signs(v)
        np.testing.assert_array_equal(fixed, [[-0.1, -0.2], [0.9, 0.3]])


# ---------------------------------------------------------------------------
# DCT
# ---------------------------------------------------------------------------


class TestDct:
    def test_lossless_without_threshold(self):
        data = _images()
        result = expand_dct(data, q_thresh=0.0)
        assert result.n_components == 16 * 12
        assert np.max(np.abs(reconstruct(result) - data.X)) <= 1e-8

    def test_threshold_keeps_at_most_ten_percent(self):
        data = _images()
        result = expand_dct(data, q_thresh=0.9)
        assert result.scores.nnz <= 0.1 * data.X.size

    def test_error_monotone_in_threshold(self):
        data = _images()
        errors = [
            np.linalg.norm(reconstruct(expand_dct(data, q_thresh=q)) - data.X)
            for q in (0.0, 0.3, 0.6, 0.9)
        ]
        assert all(a <= b + 1e-9 for a, b in zip(errors, errors[1:]))

    def test_three_dimensional(self):
        rng = np.random.default_rng(4)
        axes = [np.linspace(0, 1, 6), np.linspace(0, 1, 5), np.linspace(0, 1, 4)]
        data = make_dense(axes, rng.normal(size=(3, 6, 5, 4)))
        result = expand_dct(data)
        assert np.max(np.abs(reconstruct(result) - data.X)) <= 1e-8

    def test_scores_are_sparse(self):
        result = expand_dct(_images(), q_thresh=0.5)
        assert result.scores.format == "csr"

    def test_orthonormal_flag_reflects_rule(self):
        # cosine vectors are orthonormal for equal cell weights, not for trapezoid ends
        assert not expand_dct(_images(), rule="trapezoidal").orthonormal

    def test_rejects_curves_and_uneven_grids(self):
        with pytest.raises(ValidationError):
            expand_dct(make_dense([T], np.zeros((2, T.size))))
        axes = [np.array([0.0, 0.1, 0.5]), np.linspace(0, 1, 4)]
        with pytest.raises(ValidationError):
            expand_dct(make_dense(axes, np.zeros((1, 3, 4))))

    def test_threshold_range(self):
        with pytest.raises(ValidationError):
            expand_dct(_images(), q_thresh=1.0)

    def test_pooled_drop_mask(self):
        magnitudes = np.arange(10, dtype=float)[::-1]
        assert not pooled_drop_mask(magnitudes, 0.0).any()
        np.testing.assert_array_equal(np.flatnonzero(~pooled_drop_mask(magnitudes, 0.9)), [0])
        assert pooled_drop_mask(magnitudes, 0.5).sum() == 5
        assert pooled_drop_mask(np.ones(4), 0.99).sum() == 3

    def test_tied_magnitudes_respect_fraction(self):
        rng = np.random.default_rng(5)
        image = rng.normal(size=(4, 4))
        axes = [np.linspace(0, 1, 4), np.linspace(0, 1, 4)]
        data = make_dense(axes, np.stack([image, image, image]))
        result = expand_dct(data, q_thresh=0.9)
        assert result.scores.nnz <= 0.1 * data.X.size


# ---------------------------------------------------------------------------
# Specs
# ---------------------------------------------------------------------------


class TestSpecs:
    def test_parse_mixed_specs(self):
        specs = parse_expansion_specs([
            {"type": "fpca", "npc": 3},
            {"type": "fpca"},
            {"type": "dct", "qThresh": 0.9},
        ])
        assert isinstance(specs[0], FpcaSpec) and specs[0].npc == 3
        assert specs[1].pve == 0.99
        assert isinstance(specs[2], DctSpec) and specs[2].q_thresh == 0.9

    def test_invalid_specs(self):
        for raw in (
            [{"type": "spline"}],
            [{"type": "fpca", "pve": 1.5}],
            [{"type": "dct", "qThresh": 1.0}],
            [{"type": "fpca", "npc": 0}],
            [{"type": "fpca", "bogus": 1}],
        ):
            with pytest.raises(ValidationError):
                parse_expansion_specs(raw)

    def test_given_from_file(self, tmp_path):
        basis = _monomials(np.linspace(0, 1, 21))
        save_fundata(basis, tmp_path / "basis.json")
        raw = json.loads('[{"type": "given", "functionsFile": "basis.json"}]')
        (spec,) = parse_expansion_specs(raw, base_dir=tmp_path)
        assert isinstance(spec, GivenSpec)
        np.testing.assert_array_equal(spec.functions.X, basis.X)

    def test_given_needs_functions(self):
        with pytest.raises(ValidationError):
            parse_expansion_specs([{"type": "given"}])

    def test_dispatch(self):
        data = make_dense([T], np.outer([1.0, -1.0, 2.0], np.sin(np.pi * T)))
        assert expand(FpcaSpec(npc=1), data).n_components == 1
        spec = GivenSpec(functions=eval_basis("fourier", 3, T), ortho=True)
        assert expand(spec, data).n_components == 3
