import numpy as np
import pytest

from ldfm.pca import DegenerateDataError, apply_pca, fit_pca


def test_rank_one_data_needs_one_component():
    direction = np.array([1.0, 2.0, -1.0])
    weights = np.linspace(-3, 3, 20)
    x = np.outer(direction, weights) + 5.0
    model = fit_pca(x, 0.95)
    assert model.n_components == 1
    assert model.explained_variance_ratio[0] == pytest.approx(1.0)


def test_full_variance_keeps_rank_many_components():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(6, 50))
    model = fit_pca(x, 1.0)
    centered = x - x.mean(axis=1, keepdims=True)
    assert model.n_components == np.linalg.matrix_rank(centered)


def test_rank_deficient_full_variance():
    rng = np.random.default_rng(1)
    basis = rng.normal(size=(10, 3))
    x = basis @ rng.normal(size=(3, 40))
    model = fit_pca(x, 1.0)
    assert model.n_components == 3


def test_variance_accounting_oracle():
    """Retained components must carry >= 95% of the centered energy."""
    rng = np.random.default_rng(42)
    x = rng.normal(size=(10, 50)) * np.linspace(3.0, 0.2, 10)[:, None]
    model = fit_pca(x, 0.95)
    z = apply_pca(model, x)
    centered = x - x.mean(axis=1, keepdims=True)
    reconstructed = model.components @ z
    residual_energy = np.linalg.norm(centered - reconstructed) ** 2
    total_energy = np.linalg.norm(centered) ** 2
    assert residual_energy / total_energy <= 0.05 + 1e-12
    assert model.explained_variance_ratio.sum() >= 0.95


def test_component_count_is_minimal():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(8, 60)) * np.linspace(4.0, 0.5, 8)[:, None]
    model = fit_pca(x, 0.9)
    if model.n_components > 1:
        assert model.explained_variance_ratio[:-1].sum() < 0.9


def test_apply_centering():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(4, 30))
    model = fit_pca(x, 0.99)
    mean_replicated = np.tile(x.mean(axis=1, keepdims=True), (1, 7))
    assert np.allclose(apply_pca(model, mean_replicated), 0.0, atol=1e-10)


def test_apply_empty_matrix():
    rng = np.random.default_rng(6)
    x = rng.normal(size=(5, 20))
    model = fit_pca(x, 0.95)
    out = apply_pca(model, np.zeros((5, 0)))
    assert out.shape == (model.n_components, 0)


def test_train_projection_is_centered_and_contractive():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(7, 45))
    model = fit_pca(x, 0.9)
    z = apply_pca(model, x)
    assert np.max(np.abs(z.mean(axis=1))) <= 1e-8
    centered = x - x.mean(axis=1, keepdims=True)
    assert np.linalg.norm(z) <= np.linalg.norm(centered) + 1e-12


def test_model_invariants():
    rng = np.random.default_rng(10)
    x = rng.normal(size=(9, 40))
    model = fit_pca(x, 0.85)
    r = model.n_components
    assert np.allclose(model.components.T @ model.components, np.eye(r), atol=1e-8)
    ratios = model.explained_variance_ratio
    assert np.all(ratios > 0)
    assert np.all(np.diff(ratios) <= 1e-15)
    assert ratios.sum() <= 1.0 + 1e-8


def test_sign_convention_and_determinism():
    rng = np.random.default_rng(11)
    x = rng.normal(size=(6, 35))
    first = fit_pca(x, 0.95)
    second = fit_pca(x, 0.95)
    assert np.array_equal(first.components, second.components)
    largest = np.abs(first.components).argmax(axis=0)
    picked = first.components[largest, np.arange(first.n_components)]
    assert np.all(picked > 0)


def test_standardize_flag():
    rng = np.random.default_rng(13)
    x = rng.normal(size=(4, 50)) * np.array([[100.0], [1.0], [0.01], [1.0]])
    model = fit_pca(x, 0.95, standardize=True)
    assert model.scale is not None
    z = apply_pca(model, x)
    assert z.shape[1] == 50


def test_degenerate_data():
    with pytest.raises(DegenerateDataError):
        fit_pca(np.full((3, 10), 2.5), 0.95)


def test_bad_arguments():
    rng = np.random.default_rng(14)
    x = rng.normal(size=(3, 10))
    with pytest.raises(ValueError):
        fit_pca(x, 0.0)
    with pytest.raises(ValueError):
        fit_pca(x, 1.5)
    with pytest.raises(ValueError):
        fit_pca(x[:, :1], 0.95)
    model = fit_pca(x, 0.95)
    with pytest.raises(ValueError):
        apply_pca(model, rng.normal(size=(4, 5)))
