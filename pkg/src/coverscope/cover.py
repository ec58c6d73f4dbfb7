import math

import numpy as np
from loguru import logger

from coverscope import __version__
from coverscope.arith import find_offset, is_prime, lcm_all, multiplicative_order
from coverscope.data import AuditReport, Candidate, CoverCertificate, CoverEntry, CoverFailure, ResiduePredicate
from coverscope.errors import DomainError, VerificationError


def _check_candidate(candidate: Candidate):
    if candidate.k < 3:
        raise DomainError(f"Covers are defined for odd k >= 3, got {candidate.k}")


def build_entry(candidate: Candidate, d: int) -> CoverEntry | CoverFailure:
    """The congruence n = c (mod b) on which d divides every term, or a no-offset report."""
    if d < 3 or d % 2 == 0:
        raise DomainError(f"Cover divisors must be odd and at least 3, got {d}")
    _check_candidate(candidate)

    # d | k leaves every term congruent to the sign
    if candidate.k % d == 0:
        return CoverFailure(reason="no-offset", divisor=d)

    b = multiplicative_order(2, d)
    c = find_offset(candidate.k, candidate.sign, d, b)
    if c is None:
        return CoverFailure(reason="no-offset", divisor=d)
    return CoverEntry(d=d, b=b, c=c)


def check_induction_identity(candidate: Candidate, entry: CoverEntry, j_max: int) -> bool:
    k, sign, d, b, c = candidate.k, int(candidate.sign), entry.d, entry.b, entry.c
    step = (1 << b) - 1
    for j in range(j_max + 1):
        head = k << (b * j + c)
        left = head * step
        right = head + sign
        whole = (k << (b * (j + 1) + c)) + sign
        if whole != left + right:
            logger.debug(f"Identity does not hold for d = {d} at j = {j}")
            return False
        if left % d != 0 or right % d != 0:
            logger.debug(f"{d} does not divide both summands at j = {j}")
            return False
    return True


def _fill_table(entries: list[CoverEntry], lcm: int) -> np.ndarray:
    # First matching entry in cover order claims each residue
    residues = np.arange(lcm)
    table = np.full(lcm, -1, dtype=np.int64)
    for index, entry in enumerate(entries):
        claim = (residues % entry.b == entry.c) & (table < 0)
        table[claim] = index
    return table


def build_certificate(
    candidate: Candidate,
    divisors: list[int],
    predicate: ResiduePredicate | None = None,
) -> CoverCertificate | CoverFailure:
    """Certificate that the divisors cover every residue (or every residue the predicate selects)."""
    if not divisors:
        raise DomainError("A cover needs at least one divisor")

    entries = []
    for d in divisors:
        entry = build_entry(candidate, d)
        if isinstance(entry, CoverFailure):
            logger.info(f"{candidate.label()}: {entry.describe()}")
            return entry
        entries.append(entry)

    periods = [entry.b for entry in entries]
    if predicate is not None:
        periods.append(predicate.modulus)
    lcm = lcm_all(periods)

    table = _fill_table(entries, lcm)
    if predicate is None:
        required = np.ones(lcm, dtype=bool)
    else:
        required = np.array([predicate.holds(r) for r in range(lcm)], dtype=bool)
        table[~required] = -1

    uncovered = np.flatnonzero((table < 0) & required)
    if uncovered.size:
        failure = CoverFailure(reason="uncovered-residue", residue=int(uncovered[0]), lcm=lcm)
        logger.info(f"{candidate.label()}: {failure.describe()}")
        return failure

    flags = [is_prime(entry.d).is_prime for entry in entries]
    for entry, flag in zip(entries, flags):
        if not flag:
            logger.warning(f"Cover divisor {entry.d} is not prime")

    counts = np.bincount(table[table >= 0], minlength=len(entries))
    logger.debug(f"{candidate.label()}: covered modulo {lcm} with {len(entries)} congruences")
    return CoverCertificate(
        k=candidate.k,
        sign=candidate.sign,
        entries=entries,
        lcm=lcm,
        table=table.tolist(),
        witness_counts=counts.tolist(),
        divisor_primality_flags=flags,
        predicate=predicate,
        tool_version=__version__,
    )


def verify_cover(candidate: Candidate, divisors: list[int]) -> CoverCertificate | CoverFailure:
    return build_certificate(candidate, divisors)


def witness(certificate: CoverCertificate, n: int) -> int:
    if n < 1:
        raise DomainError(f"The sequence starts at n = 1, got {n}")
    slot = certificate.table[n % certificate.lcm]
    if slot < 0:
        raise DomainError(f"n = {n} lies outside the residues the certificate covers ({certificate.predicate.value})")
    return certificate.entries[slot].d


def certificate_defect(certificate: CoverCertificate) -> str | None:
    """What stops a finite audit of the stored table from carrying over to every n, or None.

    Each divisor must repeat with a period dividing L, the residue predicate (if any) must be
    periodic mod L, and every residue the predicate requires must have a witness.
    """
    lcm, predicate = certificate.lcm, certificate.predicate
    if predicate is not None and lcm % predicate.modulus != 0:
        return f"L = {lcm} is not a multiple of {predicate.modulus}"
    for entry in certificate.entries:
        if entry.d < 3 or entry.b < 1:
            return f"Entry ({entry.d}, {entry.b}, {entry.c}) is out of range"
        if lcm % entry.b != 0 or pow(2, entry.b, entry.d) != 1:
            return f"{entry.d} does not divide 2^{entry.b} - 1 with b | L"
    for r, slot in enumerate(certificate.table):
        if slot < 0 and (predicate is None or predicate.holds(r)):
            return f"Residue {r} mod {lcm} has no witness"
    return None


def audit_certificate(certificate: CoverCertificate, n_max: int) -> AuditReport:
    """Check exactly, for n = 1..n_max, that the witness is a proper factor of the term."""
    if n_max < 1:
        raise DomainError(f"Audit bound must be at least 1, got {n_max}")
    defect = certificate_defect(certificate)
    if defect is not None:
        return AuditReport(passed=False, checked=0, detail=defect)
    k, sign = certificate.k, int(certificate.sign)
    checked = 0
    for n in range(1, n_max + 1):
        if certificate.predicate is not None and not certificate.predicate.holds(n):
            continue
        term = (k << n) + sign
        d = witness(certificate, n)
        checked += 1
        if not 1 < d < term or term % d != 0:
            return AuditReport(
                passed=False,
                checked=checked,
                first_failure=n,
                detail=f"{d} is not a proper factor of {k}*2^{n}{sign:+d}",
            )
    return AuditReport(passed=True, checked=checked)


def check_periods(certificate: CoverCertificate) -> bool:
    """Each period b is the least b >= 1 with d | 2^b - 1."""
    for entry in certificate.entries:
        if pow(2, entry.b, entry.d) != 1:
            return False
        if any(pow(2, j, entry.d) == 1 for j in range(1, entry.b)):
            return False
    return True


def check_mod_reduction(certificate: CoverCertificate, n_max: int) -> bool:
    """Every clause agrees on n and n mod lcm, so checking residues 0..lcm-1 suffices."""
    lcm = certificate.lcm
    for n in range(n_max + 1):
        for entry in certificate.entries:
            if entry.covers(n) != entry.covers(n % lcm):
                return False
    return True


def witness_clauses(certificate: CoverCertificate) -> list[tuple[int, int, int]]:
    """The witness function as ordered clauses (b, c, d): n mod b = c gives d."""
    return [(entry.b, entry.c, entry.d) for entry in certificate.entries]


def generate_family(candidate: Candidate, divisors: list[int], i: int) -> Candidate:
    """k + 2*i*P, P the product of the divisors, re-verified with the same congruences."""
    if i < 1:
        raise DomainError(f"Family index must be at least 1, got {i}")
    base = verify_cover(candidate, divisors)
    if isinstance(base, CoverFailure):
        raise VerificationError(f"{candidate.label()}: {base.describe()}")

    member = Candidate(k=candidate.k + 2 * i * math.prod(divisors), sign=candidate.sign)
    fresh = verify_cover(member, divisors)
    if isinstance(fresh, CoverFailure):
        raise VerificationError(f"{member.label()}: {fresh.describe()}")
    if fresh.entries != base.entries or fresh.table != base.table:
        raise VerificationError(f"{member.label()} does not share the congruences of {candidate.label()}")
    logger.info(f"Family member {i} of {candidate.k}: {member.k}")
    return member
