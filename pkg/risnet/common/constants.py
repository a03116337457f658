"""File with constants used in the simulator."""

# Channel estimation protocols understood by the package.
PROTOCOL_DFT = "dft"
PROTOCOL_DE = "de"
PROTOCOL_PERFECT = "perfect"
PROTOCOLS = (PROTOCOL_DFT, PROTOCOL_DE, PROTOCOL_PERFECT)

# Path loss model beta = C0 / d^alpha, C0 is an attenuation at 1 m.
PATH_LOSS_C0_DB = 30.0
PATH_LOSS_EXPONENT_BS_RIS = 2.0
PATH_LOSS_EXPONENT_RIS_USER = 2.8
PATH_LOSS_EXPONENT_BS_USER = 3.5

# Rician factor kappa = intercept - slope * d, clamped at 0 (linear scale).
KAPPA_INTERCEPT = 13.0
KAPPA_SLOPE = 0.03

# Default layout: RISs and users on arcs around the BS.
RIS_ARC_RADIUS = 250.0
USER_ARC_RADIUS = 400.0
ARC_SPAN_DEGREES = 30.0

# Array and carrier defaults, spacings in wavelengths.
WAVELENGTH = 0.1
ANTENNA_SPACING = 0.5
ELEMENT_SPACING = 0.5

# Power and block defaults.
P_MAX = 10.0
NOISE_POWER_DBM = -94.0
COHERENCE_BLOCK = 2000.0

# Projected gradient ascent defaults.
PGA_EPSILON = 1e-6
PGA_MU0 = 1.0
PGA_BACKTRACK_BETA = 0.5
PGA_BACKTRACK_C = 1e-4
PGA_MAX_ITERS = 500
PGA_FD_STEP = 1e-5
PGA_MIN_STEP = 1e-12

# Genetic algorithm defaults.
GA_POPULATION = 50
GA_GENERATIONS = 100
GA_CROSSOVER_RATE = 0.9
GA_MUTATION_RATE = 0.1
GA_MUTATION_SIGMA = 0.3
GA_ELITISM = 2
GA_TOURNAMENT_SIZE = 3

# Monte-Carlo defaults.
MC_PRESET_SAMPLES = 2000
ICSI_PRESET_REALIZATIONS = 5

# Monte-Carlo samples are drawn in batches of this size, the batch layout
# does not depend on the number of workers.
MC_CHUNK = 250

# Gradient evaluations are batched over this many RIS elements.
GRADIENT_CHUNK = 256

# Tags mixed into seeds so that every random stream is distinct.
STREAM_DIRECT = 1
STREAM_RIS = 2
STREAM_NOISE_DFT = 3
STREAM_NOISE_DE = 4
STREAM_PHASES = 5
STREAM_GA = 6
STREAM_SAMPLE = 7
STREAM_REALIZATION = 8

# Environment variable with the default worker count.
THREADS_ENV = "RISNET_THREADS"

# Deviation above which a reference value is reported as a mismatch.
BALLPARK_TOLERANCE = 0.25
