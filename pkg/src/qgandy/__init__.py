"""Exact simulation of classical and quantum cellular automata with Godel indexing."""
