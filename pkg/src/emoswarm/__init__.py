"""Emotion-expressive swarm behaviors for unicycle robots."""

__version__ = "0.1.0"
