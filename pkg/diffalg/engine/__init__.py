"""The algebra engine: polynomials, Groebner bases, graded modules and the invariants built on them."""
