"""Floquet engineering of spin models on driven XY chains."""
__version__ = "0.1.0"
