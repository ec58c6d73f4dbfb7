import math
import random
from functools import lru_cache

import numpy as np
from loguru import logger

from coverscope import constants
from coverscope.data import PrimalityMethod, PrimalityResult, Sign
from coverscope.errors import DomainError


def mod_pow(base: int, exp: int, modulus: int) -> int:
    if modulus < 2:
        raise DomainError(f"Modulus must be at least 2, got {modulus}")
    if base < 0 or exp < 0:
        raise DomainError(f"Base and exponent must be natural numbers, got {base}, {exp}")
    return pow(base, exp, modulus)


def lcm_all(values: list[int]) -> int:
    if not values:
        raise DomainError("lcm of an empty list is undefined")
    for value in values:
        if value < 1:
            raise DomainError(f"lcm needs positive values, got {value}")
    return math.lcm(*values)


@lru_cache(maxsize=None)
def small_primes(limit: int) -> tuple[int, ...]:
    """All primes strictly below limit."""
    if limit < 3:
        return ()
    sieve = np.ones(limit, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit - 1) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return tuple(int(p) for p in np.flatnonzero(sieve))


def _prime_divisors(n: int) -> list[int]:
    divisors = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            divisors.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        divisors.append(n)
    return divisors


def multiplicative_order(base: int, d: int) -> int:
    """Least b >= 1 with base^b = 1 (mod d)."""
    if d < 2:
        raise DomainError(f"Modulus must be at least 2, got {d}")
    if math.gcd(base, d) != 1:
        raise DomainError(f"{base} has no multiplicative order modulo {d}: gcd is {math.gcd(base, d)}")

    if d > constants.ORDER_LINEAR_SCAN_LIMIT and is_prime(d).is_prime:
        order = d - 1
        for p in _prime_divisors(d - 1):
            while order % p == 0 and pow(base, order // p, d) == 1:
                order //= p
        logger.debug(f"Order of {base} mod prime {d} from the divisors of d - 1: {order}")
        return order

    x = base % d
    b = 1
    while x != 1:
        x = (x * base) % d
        b += 1
        if b >= d:
            raise DomainError(f"No order of {base} found below {d}")
    return b


def find_offset(k: int, sign: int, d: int, b: int) -> int | None:
    """Least c in 0..b-1 with d | k*2^c + sign, or None."""
    sign = Sign.parse(sign)
    if d < 3 or d % 2 == 0:
        raise DomainError(f"Divisor must be odd and at least 3, got {d}")
    if b < 1:
        raise DomainError(f"Period must be positive, got {b}")
    target = -int(sign) % d
    x = k % d
    for c in range(b):
        if x == target:
            return c
        x = (x * 2) % d
    return None


def jacobi(a: int, n: int) -> int:
    """The Jacobi symbol (a|n) for odd positive n."""
    if n < 1 or n % 2 == 0:
        raise DomainError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a, t = a % n, 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def proth_form(number: int) -> tuple[int, int] | None:
    """(k, m) with number = k*2^m + 1, k odd and 2^m > k; None when number has no such form."""
    if number < 3:
        return None
    m = number - 1
    e = (m & -m).bit_length() - 1
    k = m >> e
    if k >= 1 << e:
        return None
    return k, e


def _small_factor(n: int) -> int | None:
    for p in small_primes(constants.TRIAL_DIVISION_BOUND):
        if p * p > n and p != n:
            return None
        if n % p == 0:
            return p
    return None


def _strong_probable_prime(n: int, a: int) -> bool:
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = pow(x, 2, n)
        if x == n - 1:
            return True
    return False


def _proth(n: int, candidates: int) -> PrimalityResult | None:
    # A quadratic non-residue a makes the test decisive: a^((n-1)/2) = -1 iff n is prime
    if is_square(n):
        return PrimalityResult(number=n, method=PrimalityMethod.PROTH, is_prime=False, witness=math.isqrt(n))
    a = 3
    for _ in range(candidates):
        if a >= n:
            return None
        symbol = jacobi(a, n)
        if symbol == 0:
            return PrimalityResult(number=n, method=PrimalityMethod.PROTH, is_prime=False, witness=a)
        if symbol == -1:
            prime = pow(a, (n - 1) // 2, n) == n - 1
            return PrimalityResult(number=n, method=PrimalityMethod.PROTH, is_prime=prime, witness=a)
        a += 2
    logger.warning(f"No quadratic non-residue among {candidates} Proth bases for a {n.bit_length()}-bit number")
    return None


def _probabilistic(n: int, rounds: int) -> PrimalityResult:
    # Seeded by n so that repeated runs give identical results
    rng = random.Random(n)
    a = 2
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        if not _strong_probable_prime(n, a):
            return PrimalityResult(
                number=n,
                method=PrimalityMethod.MILLER_RABIN_PROBABILISTIC,
                is_prime=False,
                witness=a,
                rounds=rounds,
            )
    logger.warning(f"A {n.bit_length()}-bit number is only a probable prime ({rounds} Miller-Rabin rounds)")
    return PrimalityResult(
        number=n,
        method=PrimalityMethod.MILLER_RABIN_PROBABILISTIC,
        is_prime=True,
        witness=a,
        rounds=rounds,
    )


def is_prime(
    n: int,
    prefer_proth: bool = False,
    proth_base_candidates: int = constants.PROTH_BASE_CANDIDATES,
    probabilistic_rounds: int = constants.PROBABILISTIC_ROUNDS,
) -> PrimalityResult:
    """Decide primality of n, recording the method and its witness.

    Trial division by the primes below the trial bound settles every n below its square.
    Beyond that, Miller-Rabin with a fixed base set is deterministic up to
    ``constants.DETERMINISTIC_MR_LIMIT``; larger numbers of the form k*2^m + 1 with 2^m > k
    get Proth's test, and anything else gets seeded probabilistic Miller-Rabin, flagged as such.
    With ``prefer_proth`` every Proth-form number gets the Proth test (and so a Proth witness).
    """
    if n < 0:
        raise DomainError(f"Primality is defined for natural numbers, got {n}")
    if n < 2:
        return PrimalityResult(number=n, method=PrimalityMethod.TRIAL_DIVISION, is_prime=False, witness=n)

    factor = _small_factor(n)
    if factor is not None and factor != n:
        return PrimalityResult(number=n, method=PrimalityMethod.TRIAL_DIVISION, is_prime=False, witness=factor)

    if prefer_proth and proth_form(n) is not None:
        result = _proth(n, proth_base_candidates)
        if result is not None:
            return result

    if factor == n or n < constants.TRIAL_DIVISION_BOUND**2:
        return PrimalityResult(number=n, method=PrimalityMethod.TRIAL_DIVISION, is_prime=True, witness=n)

    if n < constants.DETERMINISTIC_MR_LIMIT:
        bases = next(bases for bound, bases in constants.DETERMINISTIC_MR_BASES if n < bound)
        for a in bases:
            if not _strong_probable_prime(n, a):
                return PrimalityResult(
                    number=n, method=PrimalityMethod.MILLER_RABIN_DETERMINISTIC, is_prime=False, witness=a
                )
        return PrimalityResult(
            number=n, method=PrimalityMethod.MILLER_RABIN_DETERMINISTIC, is_prime=True, witness=bases[-1]
        )

    if proth_form(n) is not None:
        result = _proth(n, proth_base_candidates)
        if result is not None:
            return result

    return _probabilistic(n, probabilistic_rounds)


def check_proth_witness(result: PrimalityResult) -> bool:
    """Re-check a Proth prime claim with one modular exponentiation."""
    if result.method is not PrimalityMethod.PROTH or not result.is_prime:
        return False
    n = result.number
    return proth_form(n) is not None and pow(result.witness, (n - 1) // 2, n) == n - 1
