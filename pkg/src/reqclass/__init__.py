"""Requirements classification: preprocessing, features, classifiers and evaluation."""

__version__ = "0.1.0"
