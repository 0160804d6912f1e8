"""Numerical tolerances shared by every invariant check."""

NORM = 1e-9  # |‖v‖ - 1| for state vectors
HERM = 1e-10  # max |A - A†| element-wise
UNIT = 1e-9  # max |U U† - I| element-wise
IDEM = 1e-9  # max |P² - P| element-wise
TRACE = 1e-9  # |tr ρ - 1|
PSD = 1e-9  # smallest eigenvalue allowed is -PSD
RANK = 1e-6  # |tr P - round(tr P)|

# sin θ below this counts as "same ray": the rotation generator degenerates to δ·I
PARALLEL = 1e-12
# sin θ below this triggers one extra Gram-Schmidt pass on Φ_⊥
REORTHOGONALIZE = 1e-6
# deficits at or below this are treated as numerical zero when fitting slopes
DEFICIT_FLOOR = 1e-12
