"""CLI subcommands. Each module exposes ``register(subparsers, parents)``."""
from emotion_core.commands import compare, emotion, evaluate, ingest, plot, train, viz

SUBCOMMANDS = (ingest, emotion, train, evaluate, compare, viz, plot)
