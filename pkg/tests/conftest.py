import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kainen import catalog  # noqa: E402

EXAMPLES = Path(__file__).resolve().parents[1] / "src" / "kainen" / "data"


@pytest.fixture(scope="session", autouse=True)
def _isolated_cache(tmp_path_factory):
    root = tmp_path_factory.mktemp("kainen-cache")
    old = os.environ.get(catalog.CACHE_ENV)
    os.environ[catalog.CACHE_ENV] = str(root)
    catalog.set_cache_dir(None)
    catalog.clear_memo()
    yield root
    catalog.clear_memo()
    if old is None:
        os.environ.pop(catalog.CACHE_ENV, None)
    else:
        os.environ[catalog.CACHE_ENV] = old


@pytest.fixture
def data_dir():
    return EXAMPLES
