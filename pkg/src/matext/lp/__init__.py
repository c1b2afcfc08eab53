"""Exact-rational LP feasibility for polymatroid extension chains."""
