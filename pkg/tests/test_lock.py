import os
import re
import stat
import threading
import time

import filelock
import pytest

import audeer

from pmvforge.core.lock import scan_lock


event = threading.Event()


def append(path, wait, sleep, timeout):
    if wait:
        event.wait()  # wait for another thread to hold the lock
    try:
        with scan_lock(path, warn=False, timeout=timeout):
            if not wait:
                event.set()  # notify waiting threads
            time.sleep(sleep)
            with open(path, "a") as fp:
                fp.write("row\n")
    except filelock.Timeout:
        return 0
    return 1


@pytest.mark.parametrize(
    "same_file, timeout, expected",
    [
        (False, 10, [1, 1]),
        (True, 10, [1, 1]),
        (True, 0, [1, 0]),
    ],
)
def test_scan_lock(tmpdir, same_file, timeout, expected):
    first = audeer.path(tmpdir, "scan-0.csv")
    second = first if same_file else audeer.path(tmpdir, "scan-1.csv")
    event.clear()
    result = audeer.run_tasks(
        append,
        [
            ([first, False, 0.2, 10], {}),
            ([second, True, 0, timeout], {}),
        ],
        num_workers=2,
    )
    assert result == expected
    rows = 0
    for path in {first, second}:
        with open(path) as fp:
            rows += len(fp.readlines())
    assert rows == sum(expected)


def test_scan_lock_file(tmpdir):
    path = audeer.path(tmpdir, "sub", "scan.csv")
    with scan_lock(path, warn=False) as lock_file:
        assert lock_file == audeer.path(tmpdir, "sub", ".scan.csv.lock")
        assert os.path.exists(lock_file)
    assert not os.path.exists(path)


@pytest.mark.skipif(os.name != "posix", reason="POSIX file permissions required")
def test_scan_lock_permissions(tmpdir):
    path = audeer.path(tmpdir, "scan.csv")
    with scan_lock(path, warn=False) as lock_file:
        assert os.stat(lock_file).st_mode & stat.S_IWGRP


def test_scan_lock_warning_and_failure(tmpdir):
    path = audeer.path(tmpdir, "scan.csv")
    lock_file = audeer.path(tmpdir, ".scan.csv.lock")
    lock_error_msg = f"The file lock '{lock_file}' could not be acquired."
    warning_msg = f"Scan file '{path}' is locked by '{lock_file}'; retrying for 0.2s."
    with scan_lock(path):
        with pytest.warns(UserWarning, match=re.escape(warning_msg)):
            with pytest.raises(filelock.Timeout, match=re.escape(lock_error_msg)):
                with scan_lock(path, timeout=0.2):
                    pass
