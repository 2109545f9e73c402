"""Shared structuring of the configuration value types."""

import cattr


def _setup_converter() -> cattr.Converter:
    return cattr.Converter()


#: cattr Converter to use
CONVERTER = _setup_converter()
