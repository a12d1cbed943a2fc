"""Shared saturation fixture: non-3-colorability with guess/check/saturate."""

SATURATION_3COL = """
r(X) v g(X) v b(X) :- node(X).
sat :- r(X), r(Y), edge(X,Y).
sat :- g(X), g(Y), edge(X,Y).
sat :- b(X), b(Y), edge(X,Y).
r(X) :- node(X), sat.
g(X) :- node(X), sat.
b(X) :- node(X), sat.
"""
