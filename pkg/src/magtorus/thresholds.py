"""Shared numerical tolerance policy.

Every inertia count, simplicity verdict and criticality test in the package
goes through the constants below, so that a "zero eigenvalue" or a "simple
eigenvalue" means the same thing everywhere.
"""

# |eigenvalue| <= ZERO_EIG_REL * max(1, spectral radius) counts as zero.
ZERO_EIG_REL = 1e-9

# an eigenvalue is simple when min(gap below, gap above) exceeds
# SIMPLE_GAP_REL * max(1, spectral radius).
SIMPLE_GAP_REL = 1e-7

# eigendecomposition residual / orthonormality budget.
EIG_RESIDUAL_REL = 1e-10

# singular values <= PINV_CUT_REL * sigma_max are treated as rank deficiency.
PINV_CUT_REL = 1e-10

# criticality / gradient residual: max edge |Im(h_rs conj(psi_r) psi_s)|
# relative to the spectral norm of the base matrix.
CRITICAL_REL = 1e-9

# entries of a unit-norm eigenvector at most SUPPORT_ZERO_ABS are "zero"
# for the purpose of support detection.
SUPPORT_ZERO_ABS = 1e-8

# planar linkage: closure residual allowance relative to sum(b).
LINKAGE_RESIDUAL_REL = 1e-9

# planar linkage: signed sums smaller than this multiple of sum(b) make
# the link-length vector degenerate.
LINKAGE_GENERIC_REL = 1e-12

# strictness margin for open inequalities (triangle, nonemptiness).
STRICT_MARGIN_REL = 1e-12

# strict support: |h_rs| must exceed this on every edge.
STRICT_SUPPORT_ABS = 1e-12

# default central-difference step for finite-difference oracles (radians).
FD_STEP = 1e-5

# grid search accepts a refined candidate when |gradient| <= this.
REFINE_GRAD_TOL = 1e-8

# torus distance below which two sampled points are the same point.
DEDUP_TORUS_DIST = 1e-6

# torus distance for matching grid-search candidates against the atlas.
MATCH_TORUS_DIST = 1e-4
