"""Context-driven health assessment of indoor lighting measurements."""

__version__ = "0.1.0"
