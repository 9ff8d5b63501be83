import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shallow_un.kernel import available_backends  # noqa: E402

BACKENDS = sorted(available_backends())


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def data_dir():
    return Path(__file__).parent / "data"
