"""Published rounded values used for printed-precision comparisons.

Tables are 4x4, rows in setting order xy = 00, 01, 10, 11 and columns in
outcome order ab = 00, 01, 10, 11.  They are rounded to three (occasionally
four) decimals, so comparisons use :data:`PRINTED_TOL`.
"""

PRINTED_TOL = 1e-3

# Tsirelson-point quantum distribution
TABLE_QUANTUM = [
    [0.427, 0.073, 0.073, 0.427],
    [0.427, 0.073, 0.073, 0.427],
    [0.427, 0.073, 0.073, 0.427],
    [0.073, 0.427, 0.427, 0.073],
]

# maximally biased equal-bias box allowed by the IC necessary conditions
TABLE_IC = [
    [0.500, 0.146, 0.146, 0.207],
    [0.646, 0.000, 0.000, 0.354],
    [0.646, 0.000, 0.000, 0.354],
    [0.293, 0.354, 0.354, 0.000],
]

# maximally biased equal-bias box allowed by macroscopic locality
TABLE_ML = [
    [0.427, 0.0737, 0.0737, 0.427],
    [0.427, 0.0737, 0.0737, 0.427],
    [0.427, 0.0737, 0.0737, 0.427],
    [0.073, 0.427, 0.427, 0.073],
]

# equal-bias parameters behind TABLE_IC as reported
IC_REPORTED = {"p": 0.646469, "c": [0.5, 0.646469, 0.646469, 0.292893]}

P_IC_REPORTED = 0.646469
P_ML_REPORTED = 0.500226
