import numpy as np
import pytest

from varosc import _backend, _fallback, averages, symbol

BACKENDS = [_fallback]
if _backend.kernels is not _fallback:
    BACKENDS.append(_backend.kernels)


@pytest.fixture(params=BACKENDS, ids=lambda k: k.NAME)
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    monkeypatch.setattr(averages, "kernels", request.param)
    monkeypatch.setattr(symbol, "kernels", request.param)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
