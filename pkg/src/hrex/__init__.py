"""Zero-shot hyper-relational fact extraction and evaluation."""

__version__ = "0.1.0"
