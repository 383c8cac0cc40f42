"""Self-hosted teaching-assistant engine.

Three pipelines behind one router: retrieval-grounded conceptual Q&A,
adaptive Bloom-tagged quiz generation, and stepwise sandboxed code
tutoring, plus an evaluation harness for coverage and robustness metrics.
All model calls go through a pluggable backend gateway; a deterministic
mock backend keeps every pipeline testable offline.
"""

__version__ = "0.1.0"
