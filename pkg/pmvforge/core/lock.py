from contextlib import contextmanager
import os
import warnings

from filelock import FileLock
from filelock import Timeout

import audeer


# Scans of several processes append to the same file,
# lock files get group-write access.
_LOCK_FILE_MODE = 0o664


@contextmanager
def scan_lock(
    path: str,
    *,
    timeout: float = 10,
    warn: bool = True,
):
    """Lock a scan file while rows are appended.

    The lock is held on a hidden file
    next to the scan file,
    ``scan.csv`` is locked by ``.scan.csv.lock``.
    Missing folders are created.

    Args:
        path: scan file
        timeout: maximum time in seconds
            before giving up acquiring the lock
        warn: if ``True``
            a warning is shown
            before waiting for the lock

    Yields:
        path of the lock file

    Raises:
        :class:`filelock.Timeout`: if a timeout is reached

    """
    lock_file = _lock_file(path)
    file_lock = FileLock(lock_file, timeout=timeout, mode=_LOCK_FILE_MODE)
    acquired = False
    if warn:
        try:
            file_lock.acquire(timeout=0)
            acquired = True
        except Timeout:
            warnings.warn(
                f"Scan file '{audeer.path(path)}' is locked by '{lock_file}'; "
                f"retrying for {timeout}s."
            )
    if not acquired:
        file_lock.acquire(timeout=timeout)
    try:
        yield lock_file
    finally:
        file_lock.release()


def _lock_file(path: str) -> str:
    path = audeer.path(path)
    folder = audeer.mkdir(os.path.dirname(path))
    return audeer.path(folder, f".{os.path.basename(path)}.lock")
