import numpy as np
import pytest

from kerrkit.models.schemas import KernelFamily, KernelSpec, SolverStatus, SplitTag
from kerrkit.services import kernels, svm
from kerrkit.services.datasets import scale_for, split
from kerrkit.utils.errors import DomainError, ShapeMismatchError, SizeGuardError


def _rbf_gram(points: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * np.sum((points[:, None, :] - points[None, :, :]) ** 2, axis=-1))


def test_two_point_identity_gram():
    model = svm.train_svm(np.eye(2), [0, 1], c_reg=10.0)
    assert model.status == SolverStatus.CONVERGED
    np.testing.assert_allclose(model.alphas, [1.0, 1.0], atol=1e-9)
    np.testing.assert_allclose(model.dual_coefs, [-1.0, 1.0], atol=1e-9)
    assert model.bias == pytest.approx(0.0, abs=1e-9)
    labels, values = svm.predict(model, np.eye(2))
    assert labels.tolist() == [0, 1]
    np.testing.assert_allclose(values, [-1.0, 1.0], atol=1e-9)


def test_box_constraint_binds():
    model = svm.train_svm(np.eye(2), [0, 1], c_reg=0.25)
    np.testing.assert_allclose(model.alphas, [0.25, 0.25])


@pytest.mark.parametrize("seed", range(6))
def test_smo_matches_reference_qp(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 13))
    points = rng.normal(size=(n, 3))
    labels = np.zeros(n, dtype=int)
    labels[rng.choice(n, size=n // 2, replace=False)] = 1
    gram = _rbf_gram(points)
    c_reg = [0.1, 1.0, 10.0][seed % 3]

    smo = svm.train_svm(gram, labels, c_reg, tol=1e-10)
    qp = svm.brute_force_qp(gram, labels, c_reg)
    assert svm.dual_objective(smo, gram, labels) == pytest.approx(svm.dual_objective(qp, gram, labels), abs=1e-6)
    assert svm.kkt_violation(smo, gram, labels) < 1e-8

    gap = svm.primal_objective(qp, gram, labels) - svm.dual_objective(qp, gram, labels)
    assert abs(gap) < 1e-6 * max(1.0, abs(svm.dual_objective(qp, gram, labels)))

    f_qp = svm.decision_function(qp, gram)
    decided = np.abs(f_qp) > 1e-6
    f_smo = svm.decision_function(smo, gram)
    np.testing.assert_array_equal(np.sign(f_smo[decided]), np.sign(f_qp[decided]))


def test_brute_force_size_guard():
    with pytest.raises(SizeGuardError) as exc:
        svm.brute_force_qp(np.eye(17), [0, 1] * 8 + [1], 1.0)
    assert exc.value.limit == svm.BRUTE_FORCE_LIMIT


def test_not_converged_status():
    rng = np.random.default_rng(0)
    points = rng.normal(size=(30, 2))
    labels = (points[:, 0] > 0).astype(int)
    model = svm.train_svm(_rbf_gram(points), labels, 10.0, max_passes=1)
    assert model.status == SolverStatus.NOT_CONVERGED
    assert not model.converged
    assert model.iterations == 1


def test_rejects_bad_inputs():
    with pytest.raises(DomainError):
        svm.train_svm(np.eye(3), [1, 1, 1], 1.0)
    with pytest.raises(DomainError):
        svm.train_svm(np.eye(2), [0, 1], 0.0)
    with pytest.raises(DomainError):
        svm.train_svm(np.eye(2), [0, 2], 1.0)
    with pytest.raises(ShapeMismatchError):
        svm.train_svm(np.eye(3), [0, 1], 1.0)
    with pytest.raises(DomainError):
        svm.train_svm(np.array([[1.0, 0.5], [0.0, 1.0]]), [0, 1], 1.0)


def test_indefinite_gram_is_refused():
    gram = np.array([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(DomainError):
        svm.train_svm(gram, [0, 1], 1.0)


def test_slightly_indefinite_gram_is_shifted():
    gram = np.ones((2, 2)) - 1e-10 * np.eye(2)
    model = svm.train_svm(gram, [0, 1], 1.0)
    assert model.status == SolverStatus.CONVERGED


def test_decision_function_shape_mismatch():
    model = svm.train_svm(np.eye(2), [0, 1], 1.0)
    with pytest.raises(ShapeMismatchError):
        svm.decision_function(model, np.ones((4, 3)))


def test_confusion_layout_and_scores():
    cm = svm.confusion([0, 0, 1, 1], [0, 1, 1, 1])
    assert cm.tolist() == [[1, 1], [0, 2]]
    assert svm.f1_score([[40, 10], [10, 40]]) == pytest.approx(0.8)
    assert svm.accuracy([[40, 10], [10, 40]]) == pytest.approx(0.8)


def test_f1_without_positives_is_zero():
    assert svm.f1_score([[10, 0], [0, 0]]) == 0.0
    report = svm.report([0, 0, 0], [0, 0, 0], SplitTag.TEST)
    assert report.f1 == 0.0
    assert report.accuracy == 1.0
    assert report.size == 3


def test_circles_are_separated_by_rbf(small_circles):
    spec = KernelSpec(family=KernelFamily.RBF, params={"sigma": 0.5})
    data = scale_for(small_circles, spec)
    plan = split(data)
    x = data.features
    gram = kernels.gram(x[plan.train_idx], spec)
    model = svm.train_svm(gram, data.labels[plan.train_idx], 10.0, spec=spec, train_ref=data.fingerprint)

    train_report = svm.evaluate(model, gram.values, data.labels[plan.train_idx], SplitTag.TRAIN)
    test_cross = kernels.cross_gram(x[plan.test_idx], x[plan.train_idx], spec)
    test_report = svm.evaluate(model, test_cross, data.labels[plan.test_idx], SplitTag.TEST)
    assert train_report.f1 > 0.95
    assert test_report.f1 > 0.85
    assert model.train_ref == data.fingerprint


def test_model_json_dict():
    model = svm.train_svm(np.eye(2), [0, 1], 10.0)
    payload = model.to_json_dict()
    assert payload["c_reg"] == 10.0
    assert payload["support_idx"] == [0, 1]


def _separable_problem(seed=4, n=24):
    rng = np.random.default_rng(seed)
    points = rng.normal(size=(n, 2))
    labels = (points[:, 0] + 0.3 * points[:, 1] > 0).astype(int)
    held = rng.normal(size=(10, 2))
    cross = np.exp(-0.5 * np.sum((held[:, None, :] - points[None, :, :]) ** 2, axis=-1))
    return _rbf_gram(points), labels, cross


def test_label_flip_negates_decision_values():
    gram, labels, cross = _separable_problem()
    model = svm.train_svm(gram, labels, 5.0, tol=1e-10)
    flipped = svm.train_svm(gram, 1 - labels, 5.0, tol=1e-10)

    f, f_flipped = svm.decision_function(model, cross), svm.decision_function(flipped, cross)
    np.testing.assert_allclose(f_flipped, -f, atol=1e-6)
    decided = np.abs(f) > 1e-4
    pred, pred_flipped = svm.predict(model, cross)[0], svm.predict(flipped, cross)[0]
    np.testing.assert_array_equal(pred_flipped[decided], 1 - pred[decided])


@pytest.mark.parametrize("scale", [0.25, 4.0])
def test_gram_scale_with_inverse_c_keeps_predictions(scale):
    gram, labels, cross = _separable_problem(seed=9)
    model = svm.train_svm(gram, labels, 2.0, tol=1e-10)
    scaled = svm.train_svm(scale * gram, labels, 2.0 / scale, tol=1e-10)

    np.testing.assert_allclose(scaled.alphas, np.asarray(model.alphas) / scale, atol=1e-6)
    f, f_scaled = svm.decision_function(model, cross), svm.decision_function(scaled, scale * cross)
    np.testing.assert_allclose(f_scaled, f, atol=1e-6)
    np.testing.assert_array_equal(svm.predict(scaled, scale * cross)[0], svm.predict(model, cross)[0])


def test_reference_qp_leaves_global_solver_options_alone():
    from cvxopt import solvers

    before = dict(solvers.options)
    gram, labels, _ = _separable_problem(n=12)
    svm.brute_force_qp(gram, labels, 1.0)
    assert dict(solvers.options) == before
