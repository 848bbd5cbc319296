"""Deterministic Dicke-state, symmetric-state and compression circuit synthesis."""
