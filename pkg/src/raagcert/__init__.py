"""Structural graph theory of RAAG automorphisms and certified rigidity of
SOut(F_n)-actions on Out(A_Γ)."""

__version__ = "0.1.0"
