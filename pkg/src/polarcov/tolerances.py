"""Default numerical tolerances.

Every public function that compares floating point quantities takes its
tolerance as a keyword argument defaulting to one of these values.
"""

#: Absolute bound on max-entry residuals such as ``S.T @ J @ S - J``.
TOL_SYMP = 1e-10

#: Smallest eigenvalue accepted as strictly positive.
TOL_PD = 1e-12

#: Absolute band around quantum/purity thresholds (inclusive side is quantum).
TOL_QUANT = 1e-9

#: Smallest singular value of ``[T, T']`` accepted for a Lagrangian frame.
TOL_TRANS = 1e-8
