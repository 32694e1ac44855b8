"""Typed graph repair: constraints in, repair programs out."""
