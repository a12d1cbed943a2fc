"""Answer-set solving with conflict-driven nogood learning, inconsistency
reasons, meta-program encodings, and chained unit evaluation."""

__version__ = "0.1.0"
