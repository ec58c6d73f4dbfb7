from pathlib import Path

import pytest

from coverscope.cover import verify_cover
from coverscope.data import Candidate, FourthPowerCase, Sign, SquareCase

ROOT = Path(__file__).parent.parent


@pytest.fixture(scope="session")
def constants():
    class Constants:
        TEST_DATA_DIR = "data"
        OPTIONS_FILE = "data/options.yaml"
        TRUNCATED_CORPUS_FILE = "data/truncated_corpus.txt"
        SWAPPED_CORPUS_FILE = "data/swapped_corpus.txt"

        COVERS = {
            ("78557", "s"): [3, 5, 7, 13, 19, 37, 73],
            ("271129", "s"): [3, 5, 7, 13, 17, 241],
            ("1777613", "s"): [3, 5, 7, 13, 17, 19, 109, 433],
            ("15511380746462593381", "s"): [3, 5, 17, 257, 641, 65537, 6700417],
            ("509203", "r"): [3, 5, 7, 13, 17, 241],
        }
        BOTH_K = 143665583045350793098657
        BOTH_COVERS = {
            "R": [3, 5, 13, 17, 97, 241, 257],
            "S": [3, 7, 11, 19, 31, 37, 61, 73, 109, 151, 331, 1321],
        }

        FOURTH_POWER_ROOTS = {
            44745755: [3, 17, 97, 241, 257, 673],
            734110615000775: [3, 17, 257, 641, 65537, 6700417],
        }
        SQUARE_ROOT = 3896845303873881175159314620808887046066972469809
        SQUARE_PARTIAL = [
            7, 17, 31, 41, 71, 97, 113, 127, 151, 241, 257, 281, 337, 641, 673, 1321, 14449, 29191, 65537, 6700417
        ]

    return Constants()


@pytest.fixture(scope="session")
def test_data_dir(constants):
    return ROOT / constants.TEST_DATA_DIR


@pytest.fixture(scope="session")
def options_file(constants):
    return ROOT / constants.OPTIONS_FILE


@pytest.fixture(scope="session")
def truncated_corpus_file(constants):
    return ROOT / constants.TRUNCATED_CORPUS_FILE


@pytest.fixture(scope="session")
def swapped_corpus_file(constants):
    return ROOT / constants.SWAPPED_CORPUS_FILE


@pytest.fixture(scope="session")
def selfridge():
    return Candidate(k=78557, sign=Sign.SIERPINSKI)


@pytest.fixture(scope="session")
def selfridge_cover(constants):
    return constants.COVERS[("78557", "s")]


@pytest.fixture(scope="session")
def selfridge_certificate(selfridge, selfridge_cover):
    return verify_cover(selfridge, selfridge_cover)


@pytest.fixture(scope="session")
def riesel_certificate(constants):
    return verify_cover(Candidate(k=509203, sign=Sign.RIESEL), constants.COVERS[("509203", "r")])


@pytest.fixture(scope="session")
def fourth_power_cases(constants):
    return [FourthPowerCase.from_root(i, partial) for i, partial in constants.FOURTH_POWER_ROOTS.items()]


@pytest.fixture(scope="session")
def square_case(constants):
    return SquareCase(a=constants.SQUARE_ROOT, partial_cover=constants.SQUARE_PARTIAL)
