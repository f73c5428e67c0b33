"""测试共享夹具：隔离配置并提供常用的群与 G-集合"""

import os
import sys

import pytest
from PyQt5.QtCore import QSettings

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from equicat.config_manager import SIZE_CAPS_ENV, config_manager
from equicat.groups import standard_group
from equicat.gsets import regular_gset, trivial_gset


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """每个测试使用临时 ini 作为用户设置，且不受环境变量影响"""
    monkeypatch.delenv(SIZE_CAPS_ENV, raising=False)
    settings = QSettings(str(tmp_path / "equicat.ini"), QSettings.IniFormat)
    monkeypatch.setattr(config_manager, "settings", settings)
    config_manager.clear_overrides()
    yield config_manager
    config_manager.clear_overrides()


@pytest.fixture
def z2():
    return standard_group("Z2")


@pytest.fixture
def z3():
    return standard_group("Z3")


@pytest.fixture
def s3():
    return standard_group("S3")


@pytest.fixture
def klein():
    return standard_group("Z2xZ2")


@pytest.fixture
def z2_regular(z2):
    return regular_gset(z2)


@pytest.fixture
def s3_regular(s3):
    return regular_gset(s3)


@pytest.fixture
def trivial_points():
    def make(n):
        return trivial_gset(standard_group("trivial"), n)
    return make
