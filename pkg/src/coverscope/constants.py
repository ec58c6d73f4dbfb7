CORPUS_DIR: str = "corpus"
CORPUS_FILE_NAME: str = "appendix.txt"
CORPUS_ENV_VAR: str = "COVERSCOPE_CORPUS"
OPTIONS_ENV_VAR: str = "COVERSCOPE_OPTIONS"

# Disqualification scan bounds
SINGLE_MAX_N: int = 600
SURVEY_MAX_N: int = 16

# Certificate checking depth
AUDIT_PERIODS: int = 10
IDENTITY_J_MAX: int = 25
COVERLESS_AUDIT_N_MAX: int = 200

# Primality testing
TRIAL_DIVISION_BOUND: int = 1000
PROTH_BASE_CANDIDATES: int = 1000
PROBABILISTIC_ROUNDS: int = 40

# Miller-Rabin is deterministic below each bound with the listed bases
DETERMINISTIC_MR_BASES: list[tuple[int, list[int]]] = [
    (2047, [2]),
    (1373653, [2, 3]),
    (25326001, [2, 3, 5]),
    (3215031751, [2, 3, 5, 7]),
    (2152302898747, [2, 3, 5, 7, 11]),
    (3474749660383, [2, 3, 5, 7, 11, 13]),
    (341550071728321, [2, 3, 5, 7, 11, 13, 17]),
    (3825123056546413051, [2, 3, 5, 7, 11, 13, 17, 19, 23]),
    (318665857834031151167461, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]),
    (3317044064679887385961981, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41]),
]
DETERMINISTIC_MR_LIMIT: int = DETERMINISTIC_MR_BASES[-1][0]

# Above this, prime moduli get their order from the divisors of d - 1
ORDER_LINEAR_SCAN_LIMIT: int = 1_000_000

# Corpus line tags
KIND_TAGS: dict[str, str] = {
    "S": "sierpinski-cover",
    "R": "riesel-cover",
    "B": "both-covers",
    "S4": "sierpinski-coverless",
    "R2": "riesel-coverless",
}

SIGN_SPELLINGS: dict[str, int] = {
    "s": 1,
    "r": -1,
}

EXIT_OK: int = 0
EXIT_REFUTED: int = 1
EXIT_USAGE: int = 2
