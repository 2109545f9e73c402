"""Atomic file output shared by the library and the command line."""

import contextlib
import os
import tempfile


@contextlib.contextmanager
def atomic_open(path: str, mode: str = "wt"):
    """Open a temporary file next to ``path`` and move it into place on success."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode) as tmpf:
            yield tmpf
        os.replace(tmp_path, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp_path)
        raise


def atomic_write_bytes(path: str, data: bytes):
    """Write ``data`` to ``path`` through a temporary file."""
    with atomic_open(path, "wb") as outputf:
        outputf.write(data)
