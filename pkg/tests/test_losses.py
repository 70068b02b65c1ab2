import numpy as np
import numpy.testing as npt
import pytest

from protodiag.data import PairBatch
from protodiag.errors import ConfigError, DataError, DimensionError
from protodiag.losses import (
    LossConfig,
    binary_cross_entropy,
    categorical_ce,
    categorical_ce_with_logits,
    combined_loss,
    compactness,
    distance_loss,
    distance_loss_from_features,
    pair_similarity,
    proto_class_loss,
    proto_loss_lcb,
    proto_loss_terms,
    prototype_assignment,
    prototype_norms,
    separation,
)
from protodiag.network import HeadKind, ModelShape, init_weights
from protodiag.tensor import Tensor, backward


def test_identical_features_have_similarity_one(rng: np.random.Generator) -> None:
    features = rng.uniform(size=(4, 100))

    similarity = pair_similarity(Tensor(features), Tensor(features.copy()), gamma_d=1.0)

    npt.assert_allclose(similarity.data, np.ones(4))


def test_similarity_decreases_with_distance() -> None:
    fs = Tensor(np.zeros((3, 2)))
    ft = Tensor(np.array([[0.1, 0.0], [1.0, 0.0], [10.0, 0.0]]))

    similarity = pair_similarity(fs, ft, gamma_d=1.0).data

    assert np.all((similarity > 0.0) & (similarity <= 1.0))
    assert similarity[0] > similarity[1] > similarity[2]
    npt.assert_allclose(similarity[1], 2.0 * (1.0 - 1.0 / (1.0 + np.exp(-1.0))))
    with pytest.raises(DimensionError):
        pair_similarity(fs, Tensor(np.zeros((3, 3))), gamma_d=1.0)


def test_bce_is_finite_at_saturated_probabilities() -> None:
    loss = binary_cross_entropy(Tensor(np.array([1.0, 0.0])), np.array([0, 1]))

    assert np.isfinite(loss.item())
    npt.assert_allclose(loss.item(), -np.log(1e-12), rtol=1e-4)


def test_bce_of_perfect_predictions_is_near_zero() -> None:
    loss = binary_cross_entropy(Tensor(np.array([1.0, 0.0])), np.array([1, 0]))

    assert loss.item() < 1e-9


@pytest.mark.parametrize(("same_class", "closer"), [(1, True), (0, False)])
def test_distance_gradient_moves_pairs_by_their_flag(rng: np.random.Generator, same_class: int, closer: bool) -> None:
    fs = Tensor(rng.uniform(size=(1, 100)), requires_grad=True)
    ft = Tensor(rng.uniform(size=(1, 100)))
    before = np.linalg.norm(fs.data - ft.data)

    backward(distance_loss_from_features(fs, ft, np.array([same_class]), gamma_d=0.5))
    assert fs.grad is not None
    after = np.linalg.norm(fs.data - 1e-3 * fs.grad - ft.data)

    assert after != before
    assert (after < before) == closer


def test_distance_loss_over_a_pair_batch(rng: np.random.Generator) -> None:
    params = init_weights(ModelShape(HeadKind.PROTOTYPICAL, 2), rng)
    windows = rng.normal(size=(2, 2048))
    batch = PairBatch(
        source=windows,
        target=windows[::-1].copy(),
        same_class=np.array([1, 0]),
        source_labels=np.array([0, 1]),
        target_labels=np.array([0, 0]),
    )

    loss = distance_loss(batch, params, LossConfig())
    backward(loss)

    assert loss.shape == ()
    assert loss.item() > 0.0
    assert params["conv1.weight"].grad is not None
    assert params["prototypes"].grad is None


def test_pair_batch_flags_must_match_labels() -> None:
    with pytest.raises(DataError):
        PairBatch(np.zeros((1, 2048)), np.zeros((1, 2048)), np.array([1]), np.array([0]), np.array([1]))


def test_categorical_losses_agree() -> None:
    logits = Tensor(np.array([[2.0, 0.5, -1.0], [0.0, 0.0, 0.0]]))
    labels = np.array([0, 2])
    probs = np.exp(logits.data) / np.exp(logits.data).sum(axis=1, keepdims=True)
    expected = -np.mean(np.log(probs[[0, 1], labels]))

    npt.assert_allclose(categorical_ce_with_logits(logits, labels).item(), expected)
    npt.assert_allclose(categorical_ce(Tensor(probs), labels).item(), expected)
    npt.assert_allclose(categorical_ce_with_logits(Tensor(np.zeros(4)), 3).item(), np.log(4.0))
    with pytest.raises(DataError):
        categorical_ce_with_logits(logits, np.array([0, 3]))


def test_separation_counts_each_unordered_pair_once() -> None:
    prototypes = Tensor(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]))

    # |c0-c1| = 1, |c0-c2| = 2, |c1-c2| = 3
    assert separation(prototypes).item() == pytest.approx(6.0)
    assert separation(Tensor(np.ones((1, 2)))).item() == 0.0
    assert prototype_norms(prototypes).item() == pytest.approx(3.0)


def test_compactness_uses_the_true_class_prototype() -> None:
    prototypes = Tensor(np.array([[0.0, 0.0], [1.0, 1.0]]))
    projected = Tensor(np.array([[0.5, -0.5], [1.0, 3.0]]))

    assert compactness(projected, prototypes, np.array([0, 1])).item() == pytest.approx((1.0 + 2.0) / 2)


def test_prototype_assignment_prefers_the_nearest_prototype() -> None:
    prototypes = Tensor(np.array([[0.0, 0.0], [3.0, 0.0]]))

    assignment = prototype_assignment(Tensor(np.array([0.5, 0.0])), prototypes, gamma_s=1.0).data

    npt.assert_allclose(assignment.sum(), 1.0)
    assert assignment[0] > assignment[1]


def test_prototype_assignment_ignores_a_shared_distance_offset(rng: np.random.Generator) -> None:
    projected, prototypes = rng.normal(size=(4, 5)), rng.normal(size=(5, 5))
    # an extra coordinate of 3 against prototypes at 0 adds 9 to every squared distance
    shifted = np.hstack([projected, np.full((4, 1), 3.0)])
    padded = np.hstack([prototypes, np.zeros((5, 1))])

    assignment = prototype_assignment(Tensor(projected), Tensor(prototypes), gamma_s=1.0).data
    offset = prototype_assignment(Tensor(shifted), Tensor(padded), gamma_s=1.0).data

    npt.assert_allclose(assignment.sum(axis=-1), 1.0, atol=1e-9)
    npt.assert_allclose(offset, assignment, rtol=1e-9, atol=1e-12)


def test_separation_term_pushes_prototypes_apart(rng: np.random.Generator) -> None:
    cfg = LossConfig()
    prototypes = Tensor(rng.normal(size=(5, 5)), requires_grad=True)
    before = separation(prototypes).item()

    backward(separation(prototypes) * -cfg.lambda2)
    assert prototypes.grad is not None
    after = separation(Tensor(prototypes.data - 1e-2 * prototypes.grad)).item()

    assert after > before


def test_lcb_combines_terms_with_their_weights(rng: np.random.Generator) -> None:
    projected, prototypes = Tensor(rng.normal(size=(4, 3))), Tensor(rng.normal(size=(3, 3)))
    labels = np.array([0, 1, 2, 1])
    cfg = LossConfig(lambda1=0.2, lambda2=0.3, lambda3=0.4)

    terms = proto_loss_terms(projected, prototypes, labels, cfg.gamma_s)
    expected = (
        terms.classification.item()
        + 0.2 * terms.compactness.item()
        - 0.3 * terms.separation.item()
        + 0.4 * terms.norms.item()
    )

    npt.assert_allclose(proto_loss_lcb(projected, prototypes, labels, cfg).item(), expected)
    npt.assert_allclose(
        proto_loss_lcb(projected, prototypes, labels, LossConfig(lambda1=0, lambda2=0, lambda3=0)).item(),
        terms.classification.item(),
    )


@pytest.mark.parametrize(("lam", "expected"), [(0.0, 4.0), (1.0, 2.0), (0.25, 3.5)])
def test_combined_loss_interpolates(lam: float, expected: float) -> None:
    assert combined_loss(Tensor(2.0), Tensor(4.0), lam).item() == pytest.approx(expected)


def test_combined_loss_rejects_lambda_outside_unit_interval() -> None:
    with pytest.raises(ConfigError):
        combined_loss(1.0, 1.0, 1.5)


@pytest.mark.parametrize(
    "kwargs",
    [{"gamma_d": 0.0}, {"gamma_s": -1.0}, {"lam": -0.1}, {"lam": 1.1}, {"lambda1": -0.01}, {"lambda3": -1.0}],
)
def test_loss_config_validation(kwargs: dict[str, float]) -> None:
    with pytest.raises(ConfigError):
        LossConfig(**kwargs)


def test_prototype_class_loss_matches_the_direct_formula(rng: np.random.Generator) -> None:
    for _ in range(10):
        projected, prototypes = rng.normal(size=5), rng.normal(size=(4, 5))
        label, gamma = int(rng.integers(4)), float(rng.uniform(0.2, 3.0))
        distances = ((projected - prototypes) ** 2).sum(axis=1)
        expected = -np.log(np.exp(-gamma * distances[label]) / np.exp(-gamma * distances).sum())

        loss = proto_class_loss(Tensor(projected), Tensor(prototypes), label, gamma)

        npt.assert_allclose(loss.item(), expected, rtol=0, atol=1e-10)
