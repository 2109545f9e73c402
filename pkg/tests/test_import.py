"""Test basic imports."""

import namedcurves
from namedcurves import __main__


def test_example():
    assert namedcurves.__version__
    assert __main__
