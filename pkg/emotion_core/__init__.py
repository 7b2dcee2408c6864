"""Emotion Core - Emotional Score analysis and emotion-regularized matrix factorization."""

__version__ = "1.0.0"
