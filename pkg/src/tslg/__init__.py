"""Testing-scenario library generation and accelerated evaluation."""

__version__ = "0.1.0"
