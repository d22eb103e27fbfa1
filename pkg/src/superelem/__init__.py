"""superelem: exact computations with Witt vectors, Dieudonne modules,
elementary supergroup algebras, their Ext rings and Steenrod operations."""

__version__ = "1.0.0"
