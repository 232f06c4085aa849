"""lenskit: lenses and lunes in pairwise intersecting circles."""
