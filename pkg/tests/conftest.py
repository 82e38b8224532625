from __future__ import annotations

import mpmath as mp
import pytest


@pytest.fixture(autouse=True)
def _fresh_precision():
    # Each test starts from the same mpmath context regardless of test order.
    with mp.workdps(40):
        yield
