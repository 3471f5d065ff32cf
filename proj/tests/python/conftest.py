import os
import shutil

import pytest


@pytest.fixture
def cli():
    path = os.environ.get("UQEVAL_CLI") or shutil.which("uqeval")
    if not path:
        pytest.skip("uqeval command line tool not available")
    return path
