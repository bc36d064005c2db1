"""disco - constraint discovery for inductive logic programming."""

__version__ = "0.1.0"
