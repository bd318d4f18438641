import itertools

import pytest
from hypothesis import HealthCheck, settings

from abcertify.config import BEAMS, MAGNETS, get_config

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


ALL_COMBOS = list(itertools.product(sorted(MAGNETS), sorted(BEAMS)))


@pytest.fixture(scope="session")
def cfg():
    """The headline configuration: K2 magnet, E1 beam."""
    return get_config("k2", "e1")


@pytest.fixture(scope="session")
def cfg_k1e1():
    return get_config("k1", "e1")


@pytest.fixture(scope="session", params=ALL_COMBOS, ids=lambda c: f"{c[0]}-{c[1]}")
def any_cfg(request):
    magnet, beam = request.param
    return get_config(magnet, beam)


@pytest.fixture(scope="session")
def field_model(cfg):
    from abcertify.fields import FieldModel

    return FieldModel(cfg)


@pytest.fixture(scope="session")
def field_model_fixed(cfg):
    from abcertify.fields import FieldModel

    return FieldModel(cfg, method="fixed")


@pytest.fixture
def config_file(tmp_path):
    """Write a key = value config file and return its path."""

    def _write(text, name="override.cfg"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write
