#!/usr/bin/env python

from setuptools import find_packages, setup

setup(
    name="featurecraft",
    version="0.0.1",
    description="Meta-learning and causal feature engineering for tabular classification data",
    author="",
    author_email="",
    install_requires=[
        "hydra-core",
        "hydra-colorlog",
        "numpy",
        "pandas",
        "scipy",
        "scikit-learn",
        "joblib",
        "tabulate",
        "rich",
        "pyrootutils",
    ],
    packages=find_packages(exclude=["tests", "tests.*"]),
    entry_points={"console_scripts": ["featurecraft = src.cli:main"]},
)
