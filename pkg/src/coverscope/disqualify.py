from functools import lru_cache

import numpy as np
from loguru import logger

from coverscope import constants
from coverscope.arith import is_prime, multiplicative_order, small_primes
from coverscope.data import Candidate, DisqualificationRecord, PrimalityMethod, PrimalityResult, Sign
from coverscope.errors import DomainError


@lru_cache(maxsize=None)
def _sieve_primes() -> tuple[tuple[int, int, dict[int, int]], ...]:
    # (p, order of 2 mod p, discrete logs base 2 mod p)
    rows = []
    for p in small_primes(constants.TRIAL_DIVISION_BOUND)[1:]:
        b = multiplicative_order(2, p)
        logs = {}
        x = 1
        for j in range(b):
            logs[x] = j
            x = (2 * x) % p
        rows.append((p, b, logs))
    return tuple(rows)


def _forced_divisors(candidate: Candidate, n_max: int) -> np.ndarray:
    """Smallest sieve prime dividing k*2^n + sign for each n (0 where none does)."""
    forced = np.zeros(n_max + 1, dtype=np.int64)
    for p, b, logs in reversed(_sieve_primes()):
        if candidate.k % p == 0:
            continue
        c = logs.get((-int(candidate.sign) * pow(candidate.k, -1, p)) % p)
        if c is not None:
            forced[c::b] = p
    return forced


def first_prime_exponent(
    candidate: Candidate,
    n_max: int,
    verbose: bool = False,
    proth_base_candidates: int = constants.PROTH_BASE_CANDIDATES,
    probabilistic_rounds: int = constants.PROBABILISTIC_ROUNDS,
) -> DisqualificationRecord:
    """Scan n = 1..n_max in order for the first prime k*2^n + sign.

    In verbose mode the record keeps one primality result per scanned n, so minimality of the
    answer can be re-checked.
    """
    if n_max < 1:
        raise DomainError(f"Scan bound must be at least 1, got {n_max}")

    forced = _forced_divisors(candidate, n_max)
    trail: list[PrimalityResult] | None = [] if verbose else None
    for n in range(1, n_max + 1):
        term = candidate.term(n)
        p = int(forced[n])
        if p and term != p:
            result = PrimalityResult(number=term, n=n, method=PrimalityMethod.TRIAL_DIVISION, is_prime=False, witness=p)
        else:
            result = is_prime(
                term,
                prefer_proth=candidate.sign is Sign.SIERPINSKI,
                proth_base_candidates=proth_base_candidates,
                probabilistic_rounds=probabilistic_rounds,
            ).model_copy(update={"n": n})
        if trail is not None:
            trail.append(result)
        if result.is_prime:
            logger.info(f"{candidate.label()}: prime at n = {n} ({result.method.value})")
            return DisqualificationRecord(
                candidate=candidate, n_found=n, primality=result, n_searched=n, trail=trail
            )

    logger.info(f"{candidate.label()}: no prime for n <= {n_max}")
    return DisqualificationRecord(candidate=candidate, n_searched=n_max, trail=trail)


def survey_range(k_min: int, k_max: int, sign, n_max: int, **kwargs) -> list[DisqualificationRecord]:
    if k_min < 1 or k_min % 2 == 0 or k_max % 2 == 0:
        raise DomainError(f"Survey bounds must be odd and positive, got {k_min}, {k_max}")
    if k_min > k_max:
        raise DomainError(f"Empty survey range {k_min}..{k_max}")
    sign = Sign.parse(sign)
    return [first_prime_exponent(Candidate(k=k, sign=sign), n_max, **kwargs) for k in range(k_min, k_max + 1, 2)]
