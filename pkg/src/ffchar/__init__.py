"""ffchar: exact character-sum experiments over the polynomial ring F_q[t]."""

__version__ = "0.1.0"
