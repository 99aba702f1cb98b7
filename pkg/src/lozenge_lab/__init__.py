"""Circle actions of orbifold groups, hyperbolic blow-ups and lozenge models."""
__version__ = "0.1.0"
