import pytest

from jpegbench.adapters import AdapterRegistry
from jpegbench.analysis import StatisticalPolicy, TierPolicy, summarize
from jpegbench.corpus import load_corpus
from jpegbench.fixtures import make_descriptor, make_strict_decode, write_fixture_corpus

import _matrix


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    write_fixture_corpus(root)
    return root


@pytest.fixture(scope="session")
def fixture_corpus(corpus_dir):
    return load_corpus(corpus_dir)


@pytest.fixture(scope="session")
def matrix_doc():
    return _matrix.load_matrix()


@pytest.fixture(scope="session")
def fivecpu_results(matrix_doc):
    return _matrix.expand_matrix(matrix_doc)


@pytest.fixture(scope="session")
def fivecpu_summary(fivecpu_results):
    return summarize(fivecpu_results, StatisticalPolicy(), TierPolicy())


@pytest.fixture
def make_entry():
    """Factory for probed synthetic adapter entries on a private registry."""

    def build(name="strictpil", decode=None, eligibility_reason="eligible", note=None, layout="rgb"):
        registry = AdapterRegistry()
        return registry.register(
            make_descriptor(name, eligibility_reason, note),
            decode if decode is not None else make_strict_decode(),
            layout=layout,
        )

    return build
