import json

import pytest

from coverscope import cover
from coverscope.data import AuditReport, Candidate, CoverCertificate, CoverEntry, CoverFailure, Sign
from coverscope.errors import DomainError, VerificationError


def test_selfridge_witness_table(selfridge_certificate):
    assert isinstance(selfridge_certificate, CoverCertificate)
    assert selfridge_certificate.lcm == 36
    assert [(e.d, e.b, e.c) for e in selfridge_certificate.entries] == [
        (3, 2, 0),
        (5, 4, 1),
        (7, 3, 1),
        (13, 12, 11),
        (19, 18, 15),
        (37, 36, 27),
        (73, 9, 3),
    ]
    assert sum(selfridge_certificate.witness_counts) == 36
    assert all(selfridge_certificate.divisor_primality_flags)


def test_witness(selfridge_certificate):
    assert cover.witness(selfridge_certificate, 3) == 73
    assert cover.witness(selfridge_certificate, 7) == 7
    assert cover.witness(selfridge_certificate, 27) == 37
    assert cover.witness(selfridge_certificate, 36) == 3
    assert cover.witness(selfridge_certificate, 39) == 73
    with pytest.raises(DomainError):
        cover.witness(selfridge_certificate, 0)


def test_certificate_is_deterministic(selfridge, selfridge_cover, selfridge_certificate):
    again = cover.verify_cover(selfridge, selfridge_cover)
    assert again.model_dump_json() == selfridge_certificate.model_dump_json()


def test_certificate_json(selfridge_certificate, tmp_path):
    document = json.loads(selfridge_certificate.model_dump_json())
    assert document["k"] == "78557"
    assert document["entries"][-1] == {"d": "73", "b": 9, "c": 3}

    path = tmp_path / "78557_s_certificate.json"
    selfridge_certificate.save(path)
    assert CoverCertificate.read(path) == selfridge_certificate


def test_riesel_cover(riesel_certificate):
    assert riesel_certificate.lcm == 24
    assert [(e.d, e.b, e.c) for e in riesel_certificate.entries] == [
        (3, 2, 0),
        (5, 4, 1),
        (7, 3, 2),
        (13, 12, 7),
        (17, 8, 7),
        (241, 24, 3),
    ]


@pytest.mark.parametrize(
    "k, lcm",
    [("271129", 24), ("1777613", 72), ("15511380746462593381", 64)],
)
def test_sierpinski_covers(constants, k, lcm):
    certificate = cover.verify_cover(Candidate(k=k, sign=Sign.SIERPINSKI), constants.COVERS[(k, "s")])
    assert isinstance(certificate, CoverCertificate)
    assert certificate.lcm == lcm
    assert cover.audit_certificate(certificate, 10 * lcm).passed


def test_fermat_factor_cover(constants):
    certificate = cover.verify_cover(
        Candidate(k=15511380746462593381, sign=Sign.SIERPINSKI), constants.COVERS[("15511380746462593381", "s")]
    )
    assert [(e.d, e.b, e.c) for e in certificate.entries] == [
        (3, 2, 1),
        (5, 4, 2),
        (17, 8, 4),
        (257, 16, 8),
        (641, 64, 32),
        (65537, 32, 16),
        (6700417, 64, 0),
    ]


def test_truncated_cover_names_uncovered_residue(selfridge, selfridge_cover):
    failure = cover.verify_cover(selfridge, selfridge_cover[:-1])
    assert failure == CoverFailure(reason="uncovered-residue", residue=3, lcm=36)

    failure = cover.verify_cover(selfridge, [3, 5, 7])
    assert failure.reason == "uncovered-residue"
    assert failure.lcm == 12
    assert failure.residue == 3


def test_swapped_covers_fail(constants):
    k = constants.BOTH_K
    on_plus_side = cover.verify_cover(Candidate(k=k, sign=Sign.SIERPINSKI), constants.BOTH_COVERS["R"])
    assert on_plus_side.reason == "uncovered-residue"
    assert on_plus_side.residue == 0
    on_minus_side = cover.verify_cover(Candidate(k=k, sign=Sign.RIESEL), constants.BOTH_COVERS["S"])
    assert on_minus_side == CoverFailure(reason="no-offset", divisor=7)


def test_both_covers_verify_under_their_own_sign(constants):
    k = constants.BOTH_K
    plus = cover.verify_cover(Candidate(k=k, sign=Sign.SIERPINSKI), constants.BOTH_COVERS["S"])
    minus = cover.verify_cover(Candidate(k=k, sign=Sign.RIESEL), constants.BOTH_COVERS["R"])
    assert plus.lcm == 180
    assert minus.lcm == 48


def test_build_entry():
    candidate = Candidate(k=78557, sign=Sign.SIERPINSKI)
    assert cover.build_entry(candidate, 73) == CoverEntry(d=73, b=9, c=3)
    assert cover.build_entry(Candidate(k=21, sign=Sign.SIERPINSKI), 3) == CoverFailure(reason="no-offset", divisor=3)
    with pytest.raises(DomainError):
        cover.build_entry(candidate, 4)
    with pytest.raises(DomainError):
        cover.build_entry(Candidate(k=1, sign=Sign.SIERPINSKI), 3)


def test_composite_divisor_is_flagged(selfridge, selfridge_cover):
    # 9 divides 78557*2^4 + 1, but every residue is already claimed
    certificate = cover.verify_cover(selfridge, selfridge_cover + [9])
    assert certificate.entries[-1] == CoverEntry(d=9, b=6, c=4)
    assert certificate.divisor_primality_flags == [True] * 7 + [False]
    assert certificate.witness_counts[-1] == 0


def test_audit(selfridge_certificate, riesel_certificate):
    assert cover.audit_certificate(selfridge_certificate, 360) == AuditReport(passed=True, checked=360)
    assert cover.audit_certificate(riesel_certificate, 240).passed


def test_audit_catches_tampered_table(selfridge_certificate):
    table = list(selfridge_certificate.table)
    table[5] = 0
    tampered = selfridge_certificate.model_copy(update={"table": table})
    report = cover.audit_certificate(tampered, 36)
    assert not report.passed
    assert report.first_failure == 5


def test_audit_catches_wrong_period(selfridge_certificate):
    entries = list(selfridge_certificate.entries)
    entries[-1] = CoverEntry(d=73, b=8, c=3)
    tampered = selfridge_certificate.model_copy(update={"entries": entries})
    report = cover.audit_certificate(tampered, 360)
    assert not report.passed
    assert report.checked == 0


def test_certificate_defect(selfridge_certificate, riesel_certificate):
    assert cover.certificate_defect(selfridge_certificate) is None
    assert cover.certificate_defect(riesel_certificate) is None
    entries = list(selfridge_certificate.entries)
    entries[0] = CoverEntry(d=3, b=0, c=0)
    tampered = selfridge_certificate.model_copy(update={"entries": entries})
    assert cover.certificate_defect(tampered) == "Entry (3, 0, 0) is out of range"


def test_induction_identity(selfridge, selfridge_certificate, riesel_certificate):
    for entry in selfridge_certificate.entries:
        assert cover.check_induction_identity(selfridge, entry, 25)
    for entry in riesel_certificate.entries:
        assert cover.check_induction_identity(riesel_certificate.candidate, entry, 25)
    assert not cover.check_induction_identity(selfridge, CoverEntry(d=73, b=9, c=4), 25)


def test_periods_and_mod_reduction(selfridge_certificate):
    assert cover.check_periods(selfridge_certificate)
    assert cover.check_mod_reduction(selfridge_certificate, 360)

    entries = list(selfridge_certificate.entries)
    entries[-1] = CoverEntry(d=73, b=18, c=3)
    assert not cover.check_periods(selfridge_certificate.model_copy(update={"entries": entries}))


def test_witness_clauses(selfridge_certificate):
    clauses = cover.witness_clauses(selfridge_certificate)
    assert clauses[0] == (2, 0, 3)
    assert clauses[-1] == (9, 3, 73)


def test_generate_family(selfridge, selfridge_cover):
    assert cover.generate_family(selfridge, selfridge_cover, 1).k == 140179427
    assert cover.generate_family(selfridge, selfridge_cover, 2).k == 280280297
    with pytest.raises(DomainError):
        cover.generate_family(selfridge, selfridge_cover, 0)
    with pytest.raises(VerificationError):
        cover.generate_family(selfridge, [3, 5, 7], 1)
