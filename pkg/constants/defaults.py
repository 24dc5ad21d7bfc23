from math import pi

# Canonical configuration: 300 K bath, prolate particle quoted as polarizability volumes.
TEMPERATURE_K = 300.0
ALPHA_VOLUMES_M3 = (1.0e-25, 0.5e-25, 0.5e-25)
OMEGA_RAD = pi / 2

# Sphere-grid band limit for the two-sphere rate integral.
RATE_GRID_ORDER = 8
RATE_REFINEMENT_STEP = 4
RATE_DRIFT_TOLERANCE = 1e-9

# Partial waves use L = 2 * l_max + 4 unless told otherwise.
LMAX = 3
LMAX_LIMIT = 6
PARTIAL_WAVE_REFINEMENT_STEP = 2
PARTIAL_WAVE_DRIFT_TOLERANCE = 1e-8

GRID_ORDER_MIN = 1
GRID_ORDER_MAX = 64

PLANCK_CUTOFF_X = 40.0
PLANCK_RELTOL = 1e-12
PLANCK_RELTOL_FLOOR = 1e-13

# Every randomised check in `verify` draws from this seed.
VERIFY_SEED = 20240917

SCAN_STEPS = 11
SCAN_RANGES = {
    "TEMPERATURE": (30.0, 300.0),
    "OMEGA": (0.1, 1.5),
    "ANISOTROPY": (0.25e-25, 1.0e-25),
}

CSV_SCHEMA = "# rotodec-csv v1"
THREADS_ENV = "ROTODEC_THREADS"

# Equal two-angle superposition traced by `evolve`; Λ(π/2) ≈ 1.3e-2 1/s at the canonical config.
EVOLVE_ANGLES_RAD = (0.0, pi / 2)
EVOLVE_TIMES_S = (0.0, 10.0, 20.0, 40.0, 80.0, 160.0)

# CoherenceGrid validation
HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-10

# Gauss–Laguerre order of the non-separable k-integral in lambda_llprime.
K_QUADRATURE_ORDER = 32
