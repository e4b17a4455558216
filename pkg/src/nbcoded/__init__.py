"""nbcoded: encoder + Naive Bayes network-attack classifiers."""

__version__ = "0.1.0"
