"""ChronoLint: code-quality history reconstruction for git repositories."""

__version__ = "0.1.0"
