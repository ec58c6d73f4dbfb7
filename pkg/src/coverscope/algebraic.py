from loguru import logger

from coverscope.cover import build_certificate, certificate_defect, witness
from coverscope.data import (
    AlgebraicCertificate,
    AuditReport,
    Candidate,
    CoverCertificate,
    CoverFailure,
    FourthPowerCase,
    ResiduePredicate,
    Sign,
    SquareCase,
)
from coverscope.errors import DomainError, VerificationError

Case = FourthPowerCase | SquareCase


def _check_proper(factor: int, term: int, what: str) -> int:
    if not 1 < factor < term or term % factor != 0:
        raise VerificationError(f"{what} {factor} is not a proper factor of the term")
    return factor


def fourth_power_factor(case: FourthPowerCase, n: int) -> int:
    """A*2^(2m) + B*2^m + 1 with m = floor(n/4), a proper factor of i^4*2^n + 1 when n = 2 (mod 4)."""
    if n < 2 or n % 4 != 2:
        raise DomainError(f"The fourth-power factorization needs n = 2 (mod 4), got {n}")
    m = n // 4
    assert m == (n - 2) // 4
    factor = (case.A << (2 * m)) + (case.B << m) + 1
    return _check_proper(factor, (case.k << n) + 1, "Fourth-power factor")


def fourth_power_cofactor(case: FourthPowerCase, n: int) -> int:
    if n < 2 or n % 4 != 2:
        raise DomainError(f"The fourth-power factorization needs n = 2 (mod 4), got {n}")
    m = n // 4
    return (case.A << (2 * m)) - (case.B << m) + 1


def square_factor(case: SquareCase, n: int) -> int:
    """a*2^(n/2) + 1, a proper factor of a^2*2^n - 1 when n is even."""
    if n < 2 or n % 2 != 0:
        raise DomainError(f"The square factorization needs even n >= 2, got {n}")
    factor = (case.a << (n // 2)) + 1
    return _check_proper(factor, (case.k << n) - 1, "Square factor")


def square_cofactor(case: SquareCase, n: int) -> int:
    if n < 2 or n % 2 != 0:
        raise DomainError(f"The square factorization needs even n >= 2, got {n}")
    return (case.a << (n // 2)) - 1


def algebraic_factor(case: Case, n: int) -> int:
    if isinstance(case, FourthPowerCase):
        return fourth_power_factor(case, n)
    return square_factor(case, n)


def verify_partial_cover(
    candidate: Candidate,
    divisors: list[int],
    residue_predicate: ResiduePredicate | str,
) -> CoverCertificate | CoverFailure:
    return build_certificate(candidate, divisors, ResiduePredicate(residue_predicate))


def _check_case(candidate: Candidate, case: Case):
    expected = Sign.SIERPINSKI if isinstance(case, FourthPowerCase) else Sign.RIESEL
    if candidate.sign is not expected:
        raise DomainError(f"A {type(case).__name__} describes a {expected.name.lower()} sequence")
    if candidate.k != case.k:
        raise DomainError(f"k = {candidate.k} is not the power of the case's root")


def _audit_coverless(certificate: CoverCertificate, case: Case, n_max: int) -> AuditReport:
    k, sign = certificate.k, int(certificate.sign)
    for n in range(1, n_max + 1):
        term = (k << n) + sign
        if case.predicate.holds(n):
            d = witness(certificate, n)
        else:
            try:
                d = algebraic_factor(case, n)
            except VerificationError as e:
                return AuditReport(passed=False, checked=n - 1, first_failure=n, detail=str(e))
        if not 1 < d < term or term % d != 0:
            return AuditReport(
                passed=False,
                checked=n - 1,
                first_failure=n,
                detail=f"{d} is not a proper factor of k*2^{n}{sign:+d}",
            )
    return AuditReport(passed=True, checked=n_max)


def verify_coverless(candidate: Candidate, case: Case, n_max: int) -> AuditReport:
    """Every term up to n_max gets a proper factor from the partial cover or the algebraic family."""
    _check_case(candidate, case)
    certificate = verify_partial_cover(candidate, case.partial_cover, case.predicate)
    if isinstance(certificate, CoverFailure):
        raise VerificationError(f"Partial cover fails: {certificate.describe()}")
    report = _audit_coverless(certificate, case, n_max)
    logger.info(f"{candidate.label()}: coverless audit to n = {n_max} {'passed' if report.passed else 'failed'}")
    return report


def certify_coverless(candidate: Candidate, case: Case, n_max: int) -> AlgebraicCertificate | CoverFailure:
    _check_case(candidate, case)
    certificate = verify_partial_cover(candidate, case.partial_cover, case.predicate)
    if isinstance(certificate, CoverFailure):
        return certificate
    report = _audit_coverless(certificate, case, n_max)
    if not report.passed:
        raise VerificationError(report.detail)

    if isinstance(case, FourthPowerCase):
        return AlgebraicCertificate(
            k=candidate.k,
            sign=candidate.sign,
            kind="fourth_power",
            root=case.i,
            A=case.A,
            B=case.B,
            partial_cover_certificate=certificate,
            audited_n_max=n_max,
        )
    return AlgebraicCertificate(
        k=candidate.k,
        sign=candidate.sign,
        kind="square",
        root=case.a,
        partial_cover_certificate=certificate,
        audited_n_max=n_max,
    )


def audit_algebraic_certificate(certificate: AlgebraicCertificate, n_max: int | None = None) -> AuditReport:
    """Re-check an emitted certificate from its stored data, without recomputing periods or offsets."""
    case = certificate.case
    partial = certificate.partial_cover_certificate
    if case.k != certificate.k or partial.k != certificate.k or partial.sign != certificate.sign:
        return AuditReport(passed=False, checked=0, detail="Root, partial cover and k disagree")
    if partial.predicate is not case.predicate:
        return AuditReport(passed=False, checked=0, detail="Partial cover certifies the wrong residues")
    defect = certificate_defect(partial)
    if defect is not None:
        return AuditReport(passed=False, checked=0, detail=defect)
    return _audit_coverless(partial, case, n_max or certificate.audited_n_max)
