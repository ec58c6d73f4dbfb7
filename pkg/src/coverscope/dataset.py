import os
import time
from pathlib import Path

from loguru import logger
from pydantic import ValidationError

from coverscope import constants
from coverscope.algebraic import certify_coverless
from coverscope.cover import audit_certificate, check_induction_identity, verify_cover
from coverscope.data import (
    Candidate,
    CorpusKind,
    CorpusRecord,
    CorpusReport,
    CoverFailure,
    FourthPowerCase,
    Options,
    RecordResult,
    Sign,
    SquareCase,
)
from coverscope.errors import CorpusParseError, DomainError, VerificationError

_TAG_OF_KIND = {kind: tag for tag, kind in constants.KIND_TAGS.items()}


def _parse_number(token: str, line: int, what: str) -> int:
    if not (token.isascii() and token.isdigit()):
        raise CorpusParseError(line, f"{what} must be a decimal number, got {token!r}")
    return int(token)


def _parse_cover(text: str, line: int) -> list[int]:
    if not text:
        raise CorpusParseError(line, "Empty cover")
    return [_parse_number(token, line, "Cover divisor") for token in text.split(",")]


def _parse_keyed(tokens: list[str], line: int) -> dict[str, str]:
    fields = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep:
            key, sep, value = token.partition(":")
        if not sep:
            raise CorpusParseError(line, f"Expected key=value, got {token!r}")
        if key in fields:
            raise CorpusParseError(line, f"Repeated field {key!r}")
        fields[key] = value
    return fields


def parse_record(text: str, line: int) -> CorpusRecord | None:
    """Parse one corpus line; None for blank and comment lines."""
    body, _, note = text.partition("#")
    tokens = body.split()
    if not tokens:
        return None
    note = note.strip()

    tag, rest = tokens[0], tokens[1:]
    if tag not in constants.KIND_TAGS:
        raise CorpusParseError(line, f"Unknown kind tag {tag!r}")
    kind = CorpusKind(constants.KIND_TAGS[tag])

    root = None
    if kind in (CorpusKind.SIERPINSKI_COVER, CorpusKind.RIESEL_COVER):
        if len(rest) != 2:
            raise CorpusParseError(line, f"{tag} records have a k and one cover")
        k = _parse_number(rest[0], line, "k")
        covers = {"S" if kind is CorpusKind.SIERPINSKI_COVER else "R": _parse_cover(rest[1], line)}

    elif kind is CorpusKind.BOTH_COVERS:
        if len(rest) != 3:
            raise CorpusParseError(line, "B records have a k and two covers, tagged R: and S:")
        k = _parse_number(rest[0], line, "k")
        fields = _parse_keyed(rest[1:], line)
        if set(fields) != {"R", "S"}:
            raise CorpusParseError(line, f"B covers must be tagged R: and S:, got {sorted(fields)}")
        covers = {tag: _parse_cover(value, line) for tag, value in fields.items()}

    else:
        # S4 stores k beside its root; R2 stores only the root and k = root^2 is computed
        k_token = rest[0] if rest and "=" not in rest[0] else None
        fields = _parse_keyed(rest[1:] if k_token is not None else rest, line)
        if set(fields) != {"root", "partial"}:
            raise CorpusParseError(line, f"{tag} records need root= and partial=, got {sorted(fields)}")
        if kind is CorpusKind.SIERPINSKI_COVERLESS and k_token is None:
            raise CorpusParseError(line, "S4 records carry k before root=")
        root = _parse_number(fields["root"], line, "root")
        power = 4 if kind is CorpusKind.SIERPINSKI_COVERLESS else 2
        k = _parse_number(k_token, line, "k") if k_token is not None else root**power
        covers = {"S" if kind is CorpusKind.SIERPINSKI_COVERLESS else "R": _parse_cover(fields["partial"], line)}

    try:
        return CorpusRecord(kind=kind, k=k, covers=covers, root=root, note=note, line=line)
    except ValidationError as e:
        raise CorpusParseError(line, str(e.errors()[0]["msg"])) from e


def parse_corpus(text: str) -> list[CorpusRecord]:
    records = []
    for number, line in enumerate(text.splitlines(), start=1):
        record = parse_record(line, number)
        if record is not None:
            records.append(record)
    return records


def load_corpus(path: Path) -> list[CorpusRecord]:
    path = Path(path)
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CorpusParseError(data.count(b"\n", 0, e.start) + 1, "invalid UTF-8") from e
    records = parse_corpus(text)
    logger.info(f"Loaded {len(records)} corpus records from {path}")
    return records


def bundled_corpus_path(options: Options | None = None) -> Path:
    override = os.environ.get(constants.CORPUS_ENV_VAR)
    if override:
        return Path(override)
    if options is not None and options.corpus:
        return Path(options.corpus)
    return Path(__file__).parent / constants.CORPUS_DIR / constants.CORPUS_FILE_NAME


def _join(divisors: list[int]) -> str:
    return ",".join(str(d) for d in divisors)


def serialize_record(record: CorpusRecord) -> str:
    tag = _TAG_OF_KIND[record.kind.value]
    if record.kind is CorpusKind.BOTH_COVERS:
        fields = [str(record.k), f"R:{_join(record.covers['R'])}", f"S:{_join(record.covers['S'])}"]
    elif record.kind is CorpusKind.SIERPINSKI_COVERLESS:
        fields = [str(record.k), f"root={record.root}", f"partial={_join(record.covers['S'])}"]
    elif record.kind is CorpusKind.RIESEL_COVERLESS:
        fields = [f"root={record.root}", f"partial={_join(record.covers['R'])}"]
    else:
        (divisors,) = record.covers.values()
        fields = [str(record.k), _join(divisors)]
    text = " ".join([tag, *fields])
    if record.note:
        text = f"{text}  # {record.note}"
    return text


def serialize_corpus(records: list[CorpusRecord]) -> str:
    return "".join(f"{serialize_record(record)}\n" for record in records)


def _verify_cover_record(record: CorpusRecord, sign: Sign, options: Options) -> RecordResult:
    candidate = Candidate(k=record.k, sign=sign)
    result = verify_cover(candidate, record.cover_for(sign))
    if isinstance(result, CoverFailure):
        return RecordResult(
            line=record.line, kind=record.kind, k=record.k, sign=sign, passed=False, detail=result.describe()
        )

    report = audit_certificate(result, options.audit_periods * result.lcm)
    if not report.passed:
        return RecordResult(
            line=record.line,
            kind=record.kind,
            k=record.k,
            sign=sign,
            passed=False,
            lcm=result.lcm,
            detail=f"Audit failed at n = {report.first_failure}: {report.detail}",
        )

    for entry in result.entries:
        if not check_induction_identity(candidate, entry, options.identity_j_max):
            return RecordResult(
                line=record.line,
                kind=record.kind,
                k=record.k,
                sign=sign,
                passed=False,
                lcm=result.lcm,
                detail=f"Induction identity fails for divisor {entry.d}",
            )

    return RecordResult(
        line=record.line,
        kind=record.kind,
        k=record.k,
        sign=sign,
        passed=True,
        lcm=result.lcm,
        detail=f"{len(result.entries)} congruences, audited to n = {report.checked}",
    )


def _verify_coverless_record(record: CorpusRecord, options: Options) -> RecordResult:
    (sign,) = record.signs
    candidate = Candidate(k=record.k, sign=sign)
    divisors = record.cover_for(sign)
    if record.kind is CorpusKind.SIERPINSKI_COVERLESS:
        case = FourthPowerCase.from_root(record.root, divisors)
    else:
        case = SquareCase(a=record.root, partial_cover=divisors)

    try:
        result = certify_coverless(candidate, case, options.coverless_audit_n_max)
    except VerificationError as e:
        return RecordResult(line=record.line, kind=record.kind, k=record.k, sign=sign, passed=False, detail=str(e))
    if isinstance(result, CoverFailure):
        return RecordResult(
            line=record.line,
            kind=record.kind,
            k=record.k,
            sign=sign,
            passed=False,
            lcm=result.lcm,
            detail=f"Partial cover fails: {result.describe()}",
        )
    return RecordResult(
        line=record.line,
        kind=record.kind,
        k=record.k,
        sign=sign,
        passed=True,
        lcm=result.partial_cover_certificate.lcm,
        detail=f"{case.predicate.value} cover plus algebraic factor, audited to n = {result.audited_n_max}",
    )


def verify_record(record: CorpusRecord, options: Options | None = None) -> list[RecordResult]:
    """One result per sign the record claims, each timed separately."""
    options = options or Options()
    results = []
    for sign in record.signs:
        start = time.perf_counter()
        try:
            if record.kind.coverless:
                result = _verify_coverless_record(record, options)
            else:
                result = _verify_cover_record(record, sign, options)
        except DomainError as e:
            result = RecordResult(line=record.line, kind=record.kind, k=record.k, sign=sign, passed=False, detail=str(e))
        milliseconds = round((time.perf_counter() - start) * 1000)
        results.append(result.model_copy(update={"milliseconds": milliseconds}))
    return results


def verify_corpus(records: list[CorpusRecord], options: Options | None = None) -> CorpusReport:
    options = options or Options()
    results = []
    for record in records:
        for result in verify_record(record, options):
            if result.passed:
                logger.info(f"Line {result.line}: {result.k} ({result.sign.tag}) verified, L = {result.lcm}")
            else:
                logger.warning(f"Line {result.line}: {result.k} ({result.sign.tag}) failed: {result.detail}")
            results.append(result)
    return CorpusReport(results=results)
