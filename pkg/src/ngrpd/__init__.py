"""Desk-scale checkers for finite sites, simplicial groupoid objects,
graph-cover monodromy, and simplicial localization.

Subpackages by concern:

- ``fincat``: finite sites (categories with covers and finite limits) and the
  axiom audit;
- ``gset``: finite and free group actions as a site;
- ``simp``: ordinal maps, finite simplicial sets, truncated simplicial objects,
  and mapping-space computation;
- ``grpd``: groupoid-condition, fibration, hypercover, and weak-equivalence
  checkers; path objects; fibration-structure audits;
- ``galois``: based graphs, finite covers, monodromy, and the action/cover
  round trip;
- ``localization``: marked relative categories, hammock components, the span
  model, and the comparison between them;
- ``cli``: the ``ngrpd`` command-line entry point.
"""

__version__ = "0.1.0"
