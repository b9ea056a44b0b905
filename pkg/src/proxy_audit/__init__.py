"""White-box proxy-use auditing for expression-language models."""

__version__ = "0.1.0"
