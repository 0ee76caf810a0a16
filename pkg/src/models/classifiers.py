"""Built-in classifiers of the evaluation harness.

They follow the scikit-learn estimator interface and use fixed hyperparameters, so accuracies
only depend on the data and the fold plan.
"""

from typing import Callable, Dict, Protocol

import numpy as np
from scipy.special import logsumexp, softmax
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.metrics import pairwise_distances

from src.errors import UnknownClassifier


class Classifier(Protocol):
    def fit(self, X: np.ndarray, y: np.ndarray) -> "Classifier": ...

    def predict(self, X: np.ndarray) -> np.ndarray: ...


class KNNClassifier(ClassifierMixin, BaseEstimator):
    """k-nearest-neighbors with Euclidean distances. Equidistant neighbors are taken in the
    order of the training instances, a tied vote goes to the smallest class id."""

    def __init__(self, n_neighbors: int = 5):
        self.n_neighbors = n_neighbors

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KNNClassifier":
        self.X_ = np.asarray(X, dtype=float)
        self.y_ = np.asarray(y, dtype=int)
        self.classes_ = np.unique(self.y_)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        distances = pairwise_distances(np.asarray(X, dtype=float), self.X_)
        k = min(self.n_neighbors, self.X_.shape[0])
        neighbors = np.argsort(distances, axis=1, kind="stable")[:, :k]
        n_classes = int(self.y_.max()) + 1
        votes = np.zeros((neighbors.shape[0], n_classes), dtype=int)
        np.add.at(votes, (np.arange(neighbors.shape[0])[:, None], self.y_[neighbors]), 1)
        return np.argmax(votes, axis=1)


class LogisticRegressionGD(ClassifierMixin, BaseEstimator):
    """Multinomial logistic regression trained by full-batch gradient descent.

    Inputs are standardized with the statistics of the training data, so a fixed learning rate
    works on unscaled data as well.
    """

    def __init__(self, epochs: int = 500, learning_rate: float = 0.1, l2: float = 1e-4):
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.l2 = l2

    def _standardized(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean_) / self.scale_

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LogisticRegressionGD":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.classes_ = np.unique(y)
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        Z = self._standardized(X)

        n, d = Z.shape
        n_classes = int(y.max()) + 1
        targets = np.eye(n_classes)[y]
        self.coef_ = np.zeros((d, n_classes))
        self.intercept_ = np.zeros(n_classes)
        for _ in range(self.epochs):
            probabilities = softmax(Z @ self.coef_ + self.intercept_, axis=1)
            residual = (probabilities - targets) / n
            self.coef_ -= self.learning_rate * (Z.T @ residual + self.l2 * self.coef_)
            self.intercept_ -= self.learning_rate * residual.sum(axis=0)
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return self._standardized(X) @ self.coef_ + self.intercept_

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.decision_function(X), axis=1)


class GaussianNaiveBayes(ClassifierMixin, BaseEstimator):
    def __init__(self, var_floor: float = 1e-9):
        self.var_floor = var_floor

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GaussianNaiveBayes":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.classes_ = np.unique(y)
        n_classes = int(y.max()) + 1
        self.theta_ = np.zeros((n_classes, X.shape[1]))
        self.var_ = np.ones((n_classes, X.shape[1]))
        # classes absent from the training data never win
        self.log_prior_ = np.full(n_classes, -np.inf)
        for c in self.classes_:
            members = X[y == c]
            self.theta_[c] = members.mean(axis=0)
            self.var_[c] = np.maximum(members.var(axis=0), self.var_floor)
            self.log_prior_[c] = np.log(members.shape[0] / X.shape[0])
        return self

    def predict_joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        log_likelihood = -0.5 * (
            np.log(2.0 * np.pi * self.var_).sum(axis=1)[None, :]
            + (((X[:, None, :] - self.theta_[None, :, :]) ** 2) / self.var_[None, :, :]).sum(
                axis=2
            )
        )
        return log_likelihood + self.log_prior_[None, :]

    def predict_log_proba(self, X: np.ndarray) -> np.ndarray:
        joint = self.predict_joint_log_likelihood(X)
        return joint - logsumexp(joint, axis=1, keepdims=True)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_joint_log_likelihood(X), axis=1)


CLASSIFIERS: Dict[str, Callable[[], Classifier]] = {
    "knn5": lambda: KNNClassifier(n_neighbors=5),
    "logreg": LogisticRegressionGD,
    "gnb": GaussianNaiveBayes,
}


def build_classifier(name: str) -> Classifier:
    if name not in CLASSIFIERS:
        raise UnknownClassifier(f"unknown classifier: {name}, expected one of {list(CLASSIFIERS)}")
    return CLASSIFIERS[name]()
