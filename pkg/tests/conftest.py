from __future__ import annotations

import os

import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("CURRENTCOH_EXTENDED", "") not in ("", "0"):
        return
    skip = pytest.mark.skip(reason="extended run; set CURRENTCOH_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)
