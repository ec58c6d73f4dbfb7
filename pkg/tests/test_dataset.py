from collections import Counter

import pytest

from coverscope import dataset
from coverscope.data import CorpusKind, CorpusRecord, Options, Sign
from coverscope.errors import CorpusParseError


@pytest.fixture(scope="session")
def bundled_records():
    return dataset.load_corpus(dataset.bundled_corpus_path())


def test_parse_cover_record():
    (record,) = dataset.parse_corpus("S 78557 3,5,7,13,19,37,73")
    assert record.kind is CorpusKind.SIERPINSKI_COVER
    assert record.k == 78557
    assert record.covers == {"S": [3, 5, 7, 13, 19, 37, 73]}
    assert record.signs == [Sign.SIERPINSKI]
    assert record.line == 1


def test_parse_both_covers_record():
    (record,) = dataset.parse_corpus(
        "B 143665583045350793098657 R:3,5,13,17,97,241,257 S:3,7,11,19,31,37,61,73,109,151,331,1321"
    )
    assert record.kind is CorpusKind.BOTH_COVERS
    assert record.cover_for(Sign.RIESEL) == [3, 5, 13, 17, 97, 241, 257]
    assert record.cover_for(Sign.SIERPINSKI)[-1] == 1321
    assert record.signs == [Sign.RIESEL, Sign.SIERPINSKI]


def test_parse_coverless_records(constants):
    fourth, square = dataset.parse_corpus(
        "S4 4008735125781478102999926000625 root=44745755 partial=3,17,97,241,257,673  # no cover known\n"
        f"R2 root={constants.SQUARE_ROOT} partial=7,17\n"
    )
    assert fourth.kind is CorpusKind.SIERPINSKI_COVERLESS
    assert fourth.root == 44745755
    assert fourth.note == "no cover known"
    assert square.kind is CorpusKind.RIESEL_COVERLESS
    assert square.k == constants.SQUARE_ROOT**2
    assert square.line == 2


@pytest.mark.parametrize(
    "text",
    [
        "X 78557 3,5,7",
        "S 78558 3,5,7",
        "S 78557",
        "S 78557 3,,5",
        "S 7855x 3,5,7",
        "B 78557 R:3,5 T:3,5",
        "S4 4008735125781478102999926000626 root=44745755 partial=3,17",
        "S4 root=44745755 partial=3,17",
        "R2 root=7",
        "S 78557 3,5,\u00b2",
        "S 78557 3,5,\u0663",
        "S 1 3,5",
        "S 271129 4,5,7,13,17,241",
        "S 271129 1,3,5,7,13,17,241",
    ],
)
def test_malformed_lines(text):
    with pytest.raises(CorpusParseError):
        dataset.parse_corpus(text)


def test_parse_error_names_line():
    with pytest.raises(CorpusParseError) as excinfo:
        dataset.parse_corpus("# header\n\nS 78557 3,5,7\nS 78557 \n")
    assert excinfo.value.line == 4
    assert str(excinfo.value).startswith("line 4:")


def test_bundled_corpus_is_complete(bundled_records):
    counts = Counter(record.kind for record in bundled_records)
    assert counts == {
        CorpusKind.SIERPINSKI_COVER: 19,
        CorpusKind.RIESEL_COVER: 5,
        CorpusKind.BOTH_COVERS: 5,
        CorpusKind.SIERPINSKI_COVERLESS: 2,
        CorpusKind.RIESEL_COVERLESS: 1,
    }
    ks = [record.k for record in bundled_records]
    for k in (78557, 271129, 509203, 15511380746462593381):
        assert k in ks


def test_round_trip():
    path = dataset.bundled_corpus_path()
    lines = [" ".join(line.split()) for line in path.read_text().splitlines()]
    expected = [line for line in lines if line and not line.startswith("#")]
    serialized = dataset.serialize_corpus(dataset.load_corpus(path))
    assert [" ".join(line.split()) for line in serialized.splitlines()] == expected


def test_bundled_corpus_path_overrides(monkeypatch, tmp_path):
    monkeypatch.delenv("COVERSCOPE_CORPUS", raising=False)
    assert dataset.bundled_corpus_path().name == "appendix.txt"
    assert dataset.bundled_corpus_path(Options(corpus=str(tmp_path / "a.txt"))) == tmp_path / "a.txt"
    monkeypatch.setenv("COVERSCOPE_CORPUS", str(tmp_path / "b.txt"))
    assert dataset.bundled_corpus_path(Options(corpus=str(tmp_path / "a.txt"))) == tmp_path / "b.txt"


def test_options_file(options_file):
    options = Options.read(options_file)
    assert options.audit_periods == 2
    assert options.survey_max_n == 8
    assert options.probabilistic_rounds == 40


def test_verify_bundled_corpus(bundled_records):
    report = dataset.verify_corpus(bundled_records)
    assert report.passed
    # Both-covers records give one result per sign
    assert len(report.results) == len(bundled_records) + 5
    lcms = {(result.k, result.sign): result.lcm for result in report.results}
    assert lcms[(78557, Sign.SIERPINSKI)] == 36
    assert lcms[(143665583045350793098657, Sign.RIESEL)] == 48
    assert lcms[(143665583045350793098657, Sign.SIERPINSKI)] == 180
    assert lcms[(4008735125781478102999926000625, Sign.SIERPINSKI)] == 48
    assert [result.line for result in report.results] == sorted(result.line for result in report.results)


def test_verify_truncated_corpus(truncated_corpus_file):
    records = dataset.load_corpus(truncated_corpus_file)
    report = dataset.verify_corpus(records, Options(audit_periods=2))
    assert not report.passed
    assert [result.passed for result in report.results] == [True, False, True]
    failed = report.results[1]
    assert failed.k == 78557
    assert "residue 3" in failed.detail


def test_verify_swapped_corpus(swapped_corpus_file):
    report = dataset.verify_corpus(dataset.load_corpus(swapped_corpus_file))
    assert [result.sign for result in report.results] == [Sign.RIESEL, Sign.SIERPINSKI]
    assert not any(result.passed for result in report.results)


def test_verify_empty_corpus():
    report = dataset.verify_corpus(dataset.parse_corpus("# nothing here\n"))
    assert report.results == []
    assert report.passed


def test_load_corpus_rejects_invalid_utf8(tmp_path):
    path = tmp_path / "corpus.txt"
    path.write_bytes(b"S 78557 3,5,7,13,19,37,73\nS 271129 3,5,\xff\n")
    with pytest.raises(CorpusParseError) as excinfo:
        dataset.load_corpus(path)
    assert excinfo.value.line == 2
    assert excinfo.value.message == "invalid UTF-8"


def test_bad_record_fails_alone(constants):
    good = dataset.parse_corpus(f"S 78557 {','.join(map(str, constants.COVERS[('78557', 's')]))}")[0]
    # Built without validation, as a record handed in by another caller could be
    bad = CorpusRecord.model_construct(
        kind=CorpusKind.SIERPINSKI_COVER, k=271129, covers={"S": [4, 5, 7]}, root=None, note="", line=2
    )
    report = dataset.verify_corpus([good, bad])
    assert [result.passed for result in report.results] == [True, False]
    assert "odd and at least 3" in report.results[1].detail
