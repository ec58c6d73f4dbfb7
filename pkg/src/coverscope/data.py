import os
from enum import Enum, IntEnum
from pathlib import Path
from typing import Annotated, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, ValidationError, model_validator

from coverscope import constants
from coverscope.errors import DomainError


def _to_int(value) -> int:
    if isinstance(value, bool):
        raise ValueError(f"Expected an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        text = value.strip()
        if text.isascii() and text.lstrip("+-").isdigit():
            return int(text)
    raise ValueError(f"Expected an integer or a decimal string, got {value!r}")


# Exact integers of any size; decimal strings in JSON
BigInt = Annotated[int, PlainValidator(_to_int), PlainSerializer(lambda v: str(v), return_type=str, when_used="json")]


class Sign(IntEnum):
    SIERPINSKI = 1
    RIESEL = -1

    @classmethod
    def parse(cls, value) -> "Sign":
        if isinstance(value, Sign):
            return value
        if isinstance(value, str):
            text = value.strip().lower()
            if text in constants.SIGN_SPELLINGS:
                return cls(constants.SIGN_SPELLINGS[text])
            if text in ("+1", "1", "-1"):
                return cls(int(text))
        elif isinstance(value, int) and not isinstance(value, bool) and value in (1, -1):
            return cls(value)
        raise DomainError(f"Sign must be one of s, r (got {value!r})")

    @property
    def letter(self) -> str:
        return "s" if self is Sign.SIERPINSKI else "r"

    @property
    def tag(self) -> str:
        return self.letter.upper()


class Candidate(BaseModel):
    """An odd positive k and the sequence k*2^n + sign it names."""

    model_config = ConfigDict(frozen=True)

    k: BigInt
    sign: Sign

    @model_validator(mode="after")
    def check_k_odd_positive(self):
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError(f"k must be odd and positive, got {self.k}")
        return self

    @classmethod
    def of(cls, k, sign) -> "Candidate":
        """Build a candidate from loosely typed input, raising DomainError on bad values."""
        try:
            return cls(k=k, sign=Sign.parse(sign))
        except ValidationError as e:
            raise DomainError(str(e.errors()[0]["msg"])) from e

    def term(self, n: int) -> int:
        return (self.k << n) + self.sign

    def label(self) -> str:
        return f"{self.k}*2^n{'+' if self.sign is Sign.SIERPINSKI else '-'}1"


class PrimalityMethod(str, Enum):
    TRIAL_DIVISION = "trial-division"
    PROTH = "proth"
    MILLER_RABIN_DETERMINISTIC = "miller-rabin-deterministic"
    MILLER_RABIN_PROBABILISTIC = "miller-rabin-probabilistic"


class PrimalityResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    number: BigInt
    n: int | None = None
    method: PrimalityMethod
    is_prime: bool
    witness: BigInt
    rounds: int = 0

    @model_validator(mode="after")
    def check_method(self):
        if self.method is PrimalityMethod.MILLER_RABIN_PROBABILISTIC and self.rounds < constants.PROBABILISTIC_ROUNDS:
            raise ValueError(f"Probabilistic results need at least {constants.PROBABILISTIC_ROUNDS} rounds")
        if self.method is PrimalityMethod.PROTH:
            m = self.number - 1
            e = (m & -m).bit_length() - 1
            if m < 2 or (m >> e) >= (1 << e):
                raise ValueError(f"{self.number} is not of the form k*2^m + 1 with 2^m > k")
        return self


class CoverEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    d: BigInt
    b: int
    c: int

    def covers(self, n: int) -> bool:
        return n % self.b == self.c


class ResiduePredicate(str, Enum):
    MOD4_NE_2 = "mod4ne2"
    ODD = "odd"

    @property
    def modulus(self) -> int:
        return 4 if self is ResiduePredicate.MOD4_NE_2 else 2

    def holds(self, n: int) -> bool:
        if self is ResiduePredicate.MOD4_NE_2:
            return n % 4 != 2
        return n % 2 == 1


class CoverFailure(BaseModel):
    model_config = ConfigDict(frozen=True)

    reason: Literal["no-offset", "uncovered-residue"]
    divisor: BigInt | None = None
    residue: int | None = None
    lcm: int | None = None

    def describe(self) -> str:
        if self.reason == "no-offset":
            return f"divisor {self.divisor} divides no term of the sequence"
        return f"residue {self.residue} mod {self.lcm} is not covered"


class CoverCertificate(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: BigInt
    sign: Sign
    entries: list[CoverEntry]
    lcm: int
    table: list[int]
    witness_counts: list[int]
    divisor_primality_flags: list[bool]
    predicate: ResiduePredicate | None = None
    tool_version: str

    @model_validator(mode="after")
    def check_shape(self):
        if len(self.table) != self.lcm:
            raise ValueError(f"Residue table has {len(self.table)} slots for lcm {self.lcm}")
        if len(self.witness_counts) != len(self.entries) or len(self.divisor_primality_flags) != len(self.entries):
            raise ValueError("Per-entry columns do not match the number of entries")
        lowest = -1 if self.predicate else 0
        for slot in self.table:
            if not lowest <= slot < len(self.entries):
                raise ValueError(f"Residue table refers to entry {slot} of {len(self.entries)}")
        return self

    @property
    def candidate(self) -> Candidate:
        return Candidate(k=self.k, sign=self.sign)

    @property
    def divisors(self) -> list[int]:
        return [entry.d for entry in self.entries]

    @classmethod
    def read(cls, path: Path):
        return cls.model_validate_json(Path(path).read_text())

    def save(self, path: Path):
        with open(path, "w") as f:
            f.write(self.model_dump_json(indent=2))


class AuditReport(BaseModel):
    passed: bool
    checked: int
    first_failure: int | None = None
    detail: str = ""


class FourthPowerCase(BaseModel):
    """k = i^4: for n = 4m + 2 the term is 4x^4 + 1 with x = i*2^m."""

    model_config = ConfigDict(frozen=True)

    i: BigInt
    partial_cover: list[BigInt]
    A: BigInt
    B: BigInt

    @model_validator(mode="after")
    def check_coefficients(self):
        if self.A != 2 * self.i * self.i or self.B != 2 * self.i:
            raise ValueError(f"Coefficients must be A = 2i^2, B = 2i for i = {self.i}")
        return self

    @classmethod
    def from_root(cls, i: int, partial_cover: list[int]) -> "FourthPowerCase":
        return cls(i=i, partial_cover=partial_cover, A=2 * i * i, B=2 * i)

    @property
    def k(self) -> int:
        return self.i**4

    @property
    def predicate(self) -> ResiduePredicate:
        return ResiduePredicate.MOD4_NE_2


class SquareCase(BaseModel):
    """k = a^2: for even n the term is (a*2^(n/2))^2 - 1."""

    model_config = ConfigDict(frozen=True)

    a: BigInt
    partial_cover: list[BigInt]

    @property
    def k(self) -> int:
        return self.a * self.a

    @property
    def predicate(self) -> ResiduePredicate:
        return ResiduePredicate.ODD


class AlgebraicCertificate(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: BigInt
    sign: Sign
    kind: Literal["fourth_power", "square"]
    root: BigInt
    A: BigInt | None = None
    B: BigInt | None = None
    partial_cover_certificate: CoverCertificate
    audited_n_max: int

    @property
    def case(self) -> FourthPowerCase | SquareCase:
        divisors = self.partial_cover_certificate.divisors
        if self.kind == "fourth_power":
            return FourthPowerCase(i=self.root, partial_cover=divisors, A=self.A, B=self.B)
        return SquareCase(a=self.root, partial_cover=divisors)

    @classmethod
    def read(cls, path: Path):
        return cls.model_validate_json(Path(path).read_text())

    def save(self, path: Path):
        with open(path, "w") as f:
            f.write(self.model_dump_json(indent=2))


class DisqualificationRecord(BaseModel):
    candidate: Candidate
    n_found: int | None = None
    primality: PrimalityResult | None = None
    n_searched: int
    trail: list[PrimalityResult] | None = None

    @property
    def disqualified(self) -> bool:
        return self.n_found is not None


class CorpusKind(str, Enum):
    SIERPINSKI_COVER = "sierpinski-cover"
    RIESEL_COVER = "riesel-cover"
    BOTH_COVERS = "both-covers"
    SIERPINSKI_COVERLESS = "sierpinski-coverless"
    RIESEL_COVERLESS = "riesel-coverless"

    @property
    def coverless(self) -> bool:
        return self in (CorpusKind.SIERPINSKI_COVERLESS, CorpusKind.RIESEL_COVERLESS)


class CorpusRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: CorpusKind
    k: BigInt
    # Keyed by sign tag, "S" or "R"
    covers: dict[str, list[BigInt]]
    root: BigInt | None = None
    note: str = ""
    line: int = 0

    @model_validator(mode="after")
    def check_record(self):
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError(f"k must be odd and positive, got {self.k}")
        expected = {
            CorpusKind.SIERPINSKI_COVER: {"S"},
            CorpusKind.SIERPINSKI_COVERLESS: {"S"},
            CorpusKind.RIESEL_COVER: {"R"},
            CorpusKind.RIESEL_COVERLESS: {"R"},
            CorpusKind.BOTH_COVERS: {"R", "S"},
        }[self.kind]
        if set(self.covers) != expected:
            raise ValueError(f"{self.kind.value} needs covers tagged {sorted(expected)}, got {sorted(self.covers)}")
        if self.k < 3:
            raise ValueError(f"Covers are defined for odd k >= 3, got {self.k}")
        for tag, divisors in self.covers.items():
            if not divisors:
                raise ValueError(f"Cover {tag} is empty")
            for d in divisors:
                if d < 3 or d % 2 == 0:
                    raise ValueError(f"Cover divisors must be odd and at least 3, got {d}")
        if self.kind.coverless:
            if self.root is None:
                raise ValueError(f"{self.kind.value} needs a root")
            power = 4 if self.kind is CorpusKind.SIERPINSKI_COVERLESS else 2
            if self.root**power != self.k:
                raise ValueError(f"root^{power} does not equal k")
        elif self.root is not None:
            raise ValueError("Only coverless records carry a root")
        return self

    @property
    def signs(self) -> list[Sign]:
        return [Sign.RIESEL if tag == "R" else Sign.SIERPINSKI for tag in sorted(self.covers)]

    def cover_for(self, sign: Sign) -> list[int]:
        return self.covers[sign.tag]


class RecordResult(BaseModel):
    line: int
    kind: CorpusKind
    k: BigInt
    sign: Sign
    passed: bool
    lcm: int | None = None
    detail: str = ""
    milliseconds: int = 0


class CorpusReport(BaseModel):
    results: list[RecordResult]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def save(self, path: Path):
        with open(path, "w") as f:
            f.write(self.model_dump_json(indent=2))


class Options(BaseModel):
    model_config = ConfigDict(extra="forbid")

    single_max_n: int = Field(constants.SINGLE_MAX_N, ge=1)
    survey_max_n: int = Field(constants.SURVEY_MAX_N, ge=1)
    audit_periods: int = Field(constants.AUDIT_PERIODS, ge=1)
    identity_j_max: int = Field(constants.IDENTITY_J_MAX, ge=0)
    coverless_audit_n_max: int = Field(constants.COVERLESS_AUDIT_N_MAX, ge=1)
    proth_base_candidates: int = Field(constants.PROTH_BASE_CANDIDATES, ge=1)
    probabilistic_rounds: int = Field(constants.PROBABILISTIC_ROUNDS, ge=constants.PROBABILISTIC_ROUNDS)
    log_level: str = "WARNING"
    corpus: str | None = None

    @classmethod
    def read(cls, path: Path):
        with open(path, "r") as f:
            dic = yaml.safe_load(f)
        return cls(**(dic or {}))

    @classmethod
    def from_env(cls):
        path = os.environ.get(constants.OPTIONS_ENV_VAR)
        if path:
            return cls.read(Path(path))
        return cls()
