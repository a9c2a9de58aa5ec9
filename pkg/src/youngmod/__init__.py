"""GF(2) Young modules and basic Schur algebras for small symmetric groups."""
