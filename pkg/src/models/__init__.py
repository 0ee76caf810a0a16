from .classifiers import (
    CLASSIFIERS,
    Classifier,
    GaussianNaiveBayes,
    KNNClassifier,
    LogisticRegressionGD,
    build_classifier,
)
