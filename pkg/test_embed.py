#!/usr/bin/env python3
"""
CCA embedding tests
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from groundkit.errors import DimensionError, TrainingError
from groundkit.learners import CcaModel, Embedding, ModelFactory, cca_cost, cosine_cost, embed, fit_cca


def paired_views(n=400, latent=3, dx=6, dy=5, noise=0.05, seed=0):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, latent)) * np.array([3.0, 2.0, 1.0])[:latent]
    x = z @ rng.normal(size=(latent, dx)) + noise * rng.normal(size=(n, dx))
    y = z @ rng.normal(size=(latent, dy)) + noise * rng.normal(size=(n, dy))
    return x, y


def test_identical_views_are_fully_correlated():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(200, 5))
    model = fit_cca(x, x.copy(), k=5, reg=1e-9)
    assert_allclose(model.correlations, np.ones(5), atol=1e-6)


def test_independent_views_have_low_correlation():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(500, 10))
    y = rng.normal(size=(500, 10))
    model = fit_cca(x, y, k=3)
    assert np.all(model.correlations < 0.35)


def test_linear_map_gives_top_correlation_near_one():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(300, 4))
    a = rng.normal(size=(4, 4)) + 4 * np.eye(4)
    y = x @ a + 0.01 * rng.normal(size=(300, 4))
    model = fit_cca(x, y, k=2)
    assert model.correlations[0] > 0.99
    assert np.all(np.diff(model.correlations) <= 0)


def test_embedding_has_unit_norm():
    x, y = paired_views()
    for power in (0.0, 4.0):
        model = fit_cca(x, y, k=3, eig_power=power)
        for row in x[:10]:
            e = embed(model, row, "x")
            assert e.normalizable
            assert np.linalg.norm(e.vector) == pytest.approx(1.0)


def test_paired_rows_embed_closer_than_random_partners():
    x, y = paired_views(n=300)
    model = fit_cca(x, y, k=3)
    ex = model.embed_many(x, "x")
    ey = model.embed_many(y, "y")
    sims = ex @ ey.T
    partner = np.diag(sims)
    beaten = (sims < partner[:, None]).sum(axis=1) / (len(x) - 1)
    assert beaten.mean() >= 0.95


def test_cosine_cost_examples():
    a = Embedding(vector=np.array([1.0, 0.0]))
    assert cosine_cost(a, a).cost == pytest.approx(0.0)
    assert cosine_cost(a, Embedding(vector=np.array([-1.0, 0.0]))).cost == pytest.approx(2.0)
    assert cosine_cost(a, Embedding(vector=np.array([0.0, 1.0]))).cost == pytest.approx(1.0)


def test_degenerate_embedding_costs_two():
    x, y = paired_views()
    model = fit_cca(x, y, k=3)
    e = embed(model, model.mean_x, "x")
    assert not e.normalizable
    result = cca_cost(model, model.mean_x, y[0])
    assert result.cost == 2.0 and result.degenerate


def test_swapping_views_swaps_projections():
    x, y = paired_views(seed=4)
    model = fit_cca(x, y, k=3)
    swapped = fit_cca(y, x, k=3)
    assert_allclose(model.correlations, swapped.correlations, atol=1e-8)
    for row in y[:5]:
        a = embed(model, row, "y").vector
        b = embed(swapped, row, "x").vector
        assert_allclose(np.abs(a), np.abs(b), atol=1e-6)


def test_duplicated_rows_leave_fit_unchanged():
    x, y = paired_views(n=120, seed=5)
    once = fit_cca(x, y, k=3)
    twice = fit_cca(np.vstack([x, x]), np.vstack([y, y]), k=3)
    assert_allclose(once.proj_x, twice.proj_x, atol=1e-6)
    assert_allclose(once.proj_y, twice.proj_y, atol=1e-6)


def test_fit_errors():
    x, y = paired_views()
    with pytest.raises(DimensionError):
        fit_cca(x, y, k=6)
    with pytest.raises(DimensionError):
        fit_cca(x, y[:-1], k=2)
    rank_deficient = np.hstack([x, x[:, :1]])
    with pytest.raises(TrainingError, match="reg > 0"):
        fit_cca(rank_deficient, y, k=2)
    # a ridge makes the same data usable
    assert fit_cca(rank_deficient, y, k=2, reg=1e-3).k == 2


def test_embed_rejects_wrong_dimension():
    x, y = paired_views()
    model = fit_cca(x, y, k=3)
    with pytest.raises(DimensionError):
        embed(model, y[0], "x")


def test_model_reloads_through_factory(tmp_path):
    x, y = paired_views()
    model = fit_cca(x, y, k=2)
    path = tmp_path / "cca.json"
    model.save(path)
    loaded = CcaModel.load(path)
    assert isinstance(ModelFactory.from_dict(model.to_dict()), CcaModel)
    assert cca_cost(loaded, x[0], y[0]).cost == pytest.approx(cca_cost(model, x[0], y[0]).cost)
