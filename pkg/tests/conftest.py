import json
import pathlib

import pytest
from hypothesis import HealthCheck, settings

from rayrenorm.fixtures import cubic, quartic
from rayrenorm.poly import poly_to_json_dict
from rayrenorm.verify import RunConfig, build_context

settings.register_profile(
    "suite", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


@pytest.fixture(scope="session")
def cubic_ctx():
    return build_context(RunConfig(poly=""), P=cubic())


@pytest.fixture(scope="session")
def quartic_ctx():
    return build_context(RunConfig(poly=""), P=quartic())


@pytest.fixture(scope="session")
def poly_files(tmp_path_factory) -> dict[str, pathlib.Path]:
    """Fixture polynomials serialized to disk for the CLI tests."""
    root = tmp_path_factory.mktemp("polys")
    out = {}
    for name, P in (("cubic", cubic()), ("quartic", quartic())):
        path = root / f"{name}.json"
        path.write_text(json.dumps(poly_to_json_dict(P)))
        out[name] = path
    return out
