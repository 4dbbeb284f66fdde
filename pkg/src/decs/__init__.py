"""DEX comparison service: replayable swap benchmarking against a baseline router."""

__version__ = "0.1.0"
