"""Orthogonal and fractional orthogonal derivatives in two variables."""
