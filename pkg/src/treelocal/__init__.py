"""Finite-radius constructions for groups acting on trees."""
