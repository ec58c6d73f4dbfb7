import inspect
import json
import sys
from pathlib import Path

import fire
from loguru import logger
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from coverscope import __version__, constants
from coverscope.algebraic import audit_algebraic_certificate, certify_coverless
from coverscope.cover import audit_certificate, generate_family, verify_cover, witness_clauses
from coverscope.data import (
    AlgebraicCertificate,
    AuditReport,
    Candidate,
    CorpusReport,
    CoverCertificate,
    CoverFailure,
    DisqualificationRecord,
    FourthPowerCase,
    Options,
    ResiduePredicate,
    SquareCase,
)
from coverscope.dataset import bundled_corpus_path, load_corpus, verify_corpus
from coverscope.disqualify import first_prime_exponent, survey_range
from coverscope.errors import CorpusParseError, DomainError, VerificationError

# Flags that are Python keywords, spelled as the command expects them
_FLAG_ALIASES = {"--from": "--k-min", "--to": "--k-max"}


def _configure_logging(level: str):
    logger.remove()
    logger.add(sys.stderr, level=level)


def _parse_divisors(value) -> list[int]:
    # fire hands "3,5,7" over as a tuple and "3" as an int
    if isinstance(value, str):
        value = [token.strip() for token in value.split(",")]
    elif not isinstance(value, (list, tuple)):
        value = [value]
    divisors = []
    for token in value:
        if isinstance(token, bool):
            raise DomainError(f"Cover divisors must be integers, got {token!r}")
        if isinstance(token, str) and token.isascii() and token.isdigit():
            token = int(token)
        if not isinstance(token, int):
            raise DomainError(f"Cover divisors must be integers, got {token!r}")
        divisors.append(token)
    if not divisors:
        raise DomainError("A cover needs at least one divisor")
    return divisors


def _parse_natural(value, what: str) -> int:
    if isinstance(value, str) and value.strip().isascii() and value.strip().isdigit():
        value = int(value)
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise DomainError(f"{what} must be a natural number, got {value!r}")
    return value


def _check_output(output: str) -> str:
    if output not in ("text", "json"):
        raise DomainError(f"Output must be text or json, got {output!r}")
    return output


def _emit_json(document: str):
    sys.stdout.write(document)
    sys.stdout.write("\n")


def _certificate_table(certificate: CoverCertificate) -> Table:
    table = Table(title=f"{certificate.candidate.label()}: L = {certificate.lcm}")
    table.add_column("d", justify="right")
    table.add_column("b", justify="right")
    table.add_column("c", justify="right")
    table.add_column("Residues", justify="right")
    table.add_column("Prime")
    for (b, c, d), count, flag in zip(
        witness_clauses(certificate), certificate.witness_counts, certificate.divisor_primality_flags
    ):
        table.add_row(str(d), str(b), str(c), str(count), "yes" if flag else "no")
    return table


def _disqualification_table(records: list[DisqualificationRecord]) -> Table:
    table = Table()
    table.add_column("k", justify="right")
    table.add_column("n", justify="right")
    table.add_column("Method")
    for record in records:
        if record.disqualified:
            table.add_row(str(record.candidate.k), str(record.n_found), record.primality.method.value)
        else:
            table.add_row(str(record.candidate.k), f"none <= {record.n_searched}", "")
    return table


def _corpus_table(report: CorpusReport) -> Table:
    table = Table()
    table.add_column("Line", justify="right")
    table.add_column("Kind")
    table.add_column("k", overflow="fold")
    table.add_column("Sign")
    table.add_column("L", justify="right")
    table.add_column("ms", justify="right")
    table.add_column("Result", overflow="fold")
    for result in report.results:
        table.add_row(
            str(result.line),
            result.kind.value,
            str(result.k),
            result.sign.tag,
            "" if result.lcm is None else str(result.lcm),
            str(result.milliseconds),
            "ok" if result.passed else f"FAILED: {result.detail}",
        )
    return table


class CLI:
    """Verify Sierpinski and Riesel claims, and disqualify candidates by finding primes."""

    def __init__(self, options: Options | None = None):
        self._options = options or Options()
        self._console = Console(soft_wrap=True)
        self.exit_code = constants.EXIT_OK

    def _refuted(self, message: str, output: str = "text"):
        if output == "json":
            _emit_json(json.dumps({"passed": False, "detail": message}, indent=2))
        else:
            self._console.print(message, markup=False)
        self.exit_code = constants.EXIT_REFUTED

    def _report_failure(self, failure: CoverFailure, output: str):
        if output == "json":
            _emit_json(failure.model_dump_json(indent=2))
            self.exit_code = constants.EXIT_REFUTED
        else:
            self._refuted(f"Not verified: {failure.describe()}")

    def _report_audit(self, report: AuditReport, output: str):
        if output == "json":
            _emit_json(report.model_dump_json(indent=2))
            if not report.passed:
                self.exit_code = constants.EXIT_REFUTED
        elif report.passed:
            self._console.print(f"Audit passed: {report.checked} terms checked")
        elif report.first_failure is None:
            self._refuted(f"Audit failed: {report.detail}")
        else:
            self._refuted(f"Audit failed at n = {report.first_failure}: {report.detail}")

    def verify(
        self,
        k,
        sign,
        cover,
        partial: str | None = None,
        root=None,
        audit_n=None,
        out: str | None = None,
        output: str = "text",
    ):
        """Check that the cover proves k Sierpinski (s) or Riesel (r) and print its certificate."""
        output = _check_output(output)
        candidate = Candidate.of(k, sign)
        divisors = _parse_divisors(cover)
        if (partial is None) != (root is None):
            raise DomainError("--partial and --root go together")

        if partial is not None:
            predicate = ResiduePredicate(partial) if partial in ("mod4ne2", "odd") else None
            if predicate is None:
                raise DomainError(f"--partial must be mod4ne2 or odd, got {partial!r}")
            root = _parse_natural(root, "--root")
            if predicate is ResiduePredicate.MOD4_NE_2:
                case = FourthPowerCase.from_root(root, divisors)
            else:
                case = SquareCase(a=root, partial_cover=divisors)
            n_max = self._options.coverless_audit_n_max if audit_n is None else _parse_natural(audit_n, "--audit-n")
            try:
                result = certify_coverless(candidate, case, n_max)
            except VerificationError as e:
                self._refuted(f"Not verified: {e}", output)
                return
        else:
            result = verify_cover(candidate, divisors)

        if isinstance(result, CoverFailure):
            self._report_failure(result, output)
            return

        if isinstance(result, CoverCertificate):
            n_max = self._options.audit_periods * result.lcm if audit_n is None else _parse_natural(audit_n, "--audit-n")
            report = audit_certificate(result, n_max) if n_max else AuditReport(passed=True, checked=0)
            if not report.passed:
                self._report_audit(report, output)
                return

        if out is not None:
            result.save(Path(out))
            logger.info(f"Wrote certificate to {out}")

        if output == "json":
            _emit_json(result.model_dump_json(indent=2))
        elif isinstance(result, CoverCertificate):
            self._console.print(_certificate_table(result))
            self._console.print(f"Verified: {candidate.label()} is composite for every n >= 1 (L = {result.lcm})")
        else:
            partial_certificate = result.partial_cover_certificate
            self._console.print(_certificate_table(partial_certificate))
            self._console.print(
                f"Verified: {candidate.label()} is covered for {partial_certificate.predicate.value} n "
                f"and factors algebraically otherwise, audited to n = {result.audited_n_max}"
            )

    def verify_dataset(self, path: str | None = None, out: str | None = None, output: str = "text"):
        """Verify every record of a corpus file, the bundled one by default."""
        output = _check_output(output)
        corpus = Path(path) if path is not None else bundled_corpus_path(self._options)
        records = load_corpus(corpus)
        report = verify_corpus(records, self._options)
        if out is not None:
            report.save(Path(out))

        if output == "json":
            _emit_json(report.model_dump_json(indent=2))
        else:
            self._console.print(_corpus_table(report))
            failed = sum(not result.passed for result in report.results)
            self._console.print(f"{len(report.results) - failed} passed, {failed} failed")
        if not report.passed:
            self.exit_code = constants.EXIT_REFUTED

    def disqualify(self, k, sign, max_n=None, trail: bool = False, output: str = "text"):
        """Search k*2^n + sign for its first prime."""
        output = _check_output(output)
        candidate = Candidate.of(k, sign)
        n_max = self._options.single_max_n if max_n is None else _parse_natural(max_n, "--max-n")
        record = first_prime_exponent(
            candidate,
            n_max,
            verbose=trail,
            proth_base_candidates=self._options.proth_base_candidates,
            probabilistic_rounds=self._options.probabilistic_rounds,
        )

        if output == "json":
            _emit_json(record.model_dump_json(indent=2, exclude_none=True))
        else:
            self._console.print(_disqualification_table([record]))
        if not record.disqualified:
            self.exit_code = constants.EXIT_REFUTED

    def survey(self, k_min, k_max, sign, max_n=None, output: str = "text"):
        """First primes for every odd k in k_min..k_max (spelled --from and --to)."""
        output = _check_output(output)
        n_max = self._options.survey_max_n if max_n is None else _parse_natural(max_n, "--max-n")
        records = survey_range(
            _parse_natural(k_min, "--from"),
            _parse_natural(k_max, "--to"),
            sign,
            n_max,
            proth_base_candidates=self._options.proth_base_candidates,
            probabilistic_rounds=self._options.probabilistic_rounds,
        )

        if output == "json":
            _emit_json(json.dumps([json.loads(record.model_dump_json(exclude_none=True)) for record in records], indent=2))
        else:
            self._console.print(_disqualification_table(records))
            survivors = [str(record.candidate.k) for record in records if not record.disqualified]
            self._console.print(f"Survivors: {', '.join(survivors) if survivors else 'none'}")

    def family(self, k, sign, cover, i, output: str = "text"):
        """k + 2*i*P for the product P of the cover, with a fresh certificate."""
        output = _check_output(output)
        candidate = Candidate.of(k, sign)
        divisors = _parse_divisors(cover)
        try:
            member = generate_family(candidate, divisors, _parse_natural(i, "--i"))
        except VerificationError as e:
            self._refuted(f"Not verified: {e}", output)
            return
        certificate = verify_cover(member, divisors)

        if output == "json":
            _emit_json(certificate.model_dump_json(indent=2))
        else:
            self._console.print(_certificate_table(certificate))
            self._console.print(f"Verified: {member.k}")

    def audit(self, file: str, n_max=None, output: str = "text"):
        """Re-check a saved certificate's divisibility facts without recomputing orders."""
        output = _check_output(output)
        text = Path(file).read_text()
        if "kind" in json.loads(text):
            certificate = AlgebraicCertificate.model_validate_json(text)
            limit = None if n_max is None else _parse_natural(n_max, "--n-max")
            report = audit_algebraic_certificate(certificate, limit)
        else:
            certificate = CoverCertificate.model_validate_json(text)
            limit = self._options.audit_periods * certificate.lcm if n_max is None else _parse_natural(n_max, "--n-max")
            report = audit_certificate(certificate, limit)
        self._report_audit(report, output)


def _command_parameters(command: str) -> set[str] | None:
    method = getattr(CLI, command, None)
    if command.startswith("_") or not callable(method):
        return None
    return {name for name in inspect.signature(method).parameters if name != "self"}


def _normalize(argv: list[str]) -> list[str]:
    normalized = []
    for token in argv:
        flag, sep, value = token.partition("=")
        if flag in _FLAG_ALIASES:
            token = _FLAG_ALIASES[flag] + sep + value
        normalized.append(token)
    normalized[0] = normalized[0].replace("-", "_")
    return normalized


def _unknown_flags(argv: list[str], parameters: set[str]) -> list[str]:
    unknown = []
    for token in argv[1:]:
        if not token.startswith("--") or token in ("--help", "--"):
            continue
        name = token[2:].partition("=")[0].replace("-", "_")
        if name not in parameters:
            unknown.append(token)
    return unknown


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["--version"]:
        print(__version__)
        return constants.EXIT_OK

    try:
        options = Options.from_env()
    except (ValidationError, OSError) as e:
        print(f"coverscope: bad options file: {e}", file=sys.stderr)
        return constants.EXIT_USAGE
    _configure_logging(options.log_level)

    if not argv or argv[0].startswith("-"):
        print("usage: coverscope {verify,verify-dataset,disqualify,survey,family,audit} [flags]", file=sys.stderr)
        return constants.EXIT_USAGE

    argv = _normalize(argv)
    parameters = _command_parameters(argv[0])
    if parameters is None:
        print(f"coverscope: unknown command {argv[0]!r}", file=sys.stderr)
        return constants.EXIT_USAGE
    unknown = _unknown_flags(argv, parameters)
    if unknown:
        print(f"coverscope: unknown flags for {argv[0]}: {' '.join(unknown)}", file=sys.stderr)
        return constants.EXIT_USAGE

    cli = CLI(options)
    try:
        fire.Fire(cli, command=argv, name="coverscope")
    except (DomainError, CorpusParseError, ValidationError, json.JSONDecodeError) as e:
        print(f"coverscope: {e}", file=sys.stderr)
        return constants.EXIT_USAGE
    except FileNotFoundError as e:
        print(f"coverscope: {e}", file=sys.stderr)
        return constants.EXIT_USAGE
    except SystemExit as e:
        # fire signals usage errors by exiting with 2
        return e.code if isinstance(e.code, int) else constants.EXIT_USAGE
    return cli.exit_code
