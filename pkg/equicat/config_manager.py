"""
配置管理模块
统一管理默认配置、用户设置与环境变量覆盖
"""

import copy
import json
import os
from typing import Any, Dict

from PyQt5.QtCore import QSettings

from .error_handler import GroupTooLarge, SizeCap, log_warning

SIZE_CAPS_ENV = 'EQUICAT_SIZE_CAPS'


class ConfigManager:
    """配置管理器 - 默认配置 < 用户设置 < 环境变量 < 进程内覆盖"""

    def __init__(self, settings: QSettings = None):
        self.settings = settings if settings is not None else QSettings('Equicat', 'equicat')
        self.defaults = self.load_config_file()
        self._overrides: Dict[str, Any] = {}
        self.reload()

    def load_config_file(self) -> Dict[str, Any]:
        """加载包内的默认配置文件"""
        config_file = os.path.join(os.path.dirname(__file__), 'config.json')
        if os.path.exists(config_file):
            try:
                with open(config_file, 'r', encoding='utf-8') as f:
                    return json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                log_warning(f"加载配置文件失败: {e}")
        return {}

    def reload(self):
        """重新合并所有配置层"""
        self.config_data = copy.deepcopy(self.defaults)
        self.merge_user_settings()
        self.merge_environment()
        for key, value in self._overrides.items():
            self.set_nested_value(self.config_data, key, value)

    def merge_user_settings(self):
        """合并用户设置（QSettings 中的值以 JSON 文本保存）"""
        for key in self.settings.allKeys():
            self.set_nested_value(self.config_data, key, self._decode(self.settings.value(key)))

    def merge_environment(self):
        """环境变量覆盖尺寸上限表"""
        raw = os.environ.get(SIZE_CAPS_ENV)
        if not raw:
            return
        try:
            caps = json.loads(raw)
        except json.JSONDecodeError as e:
            log_warning(f"{SIZE_CAPS_ENV} 不是合法 JSON，已忽略: {e}")
            return
        if not isinstance(caps, dict):
            log_warning(f"{SIZE_CAPS_ENV} 必须是 JSON 对象，已忽略")
            return
        for name, value in caps.items():
            self.set_nested_value(self.config_data, f'caps.{name}', value)

    @staticmethod
    def _decode(value):
        if isinstance(value, str):
            try:
                return json.loads(value)
            except json.JSONDecodeError:
                return value
        return value

    def set_nested_value(self, data, key, value):
        """设置嵌套值"""
        keys = key.split('.')
        current = data
        for k in keys[:-1]:
            if k not in current or not isinstance(current[k], dict):
                current[k] = {}
            current = current[k]
        current[keys[-1]] = value

    def get(self, key: str, default: Any = None) -> Any:
        """获取配置值，支持点号分隔的嵌套键"""
        value = self.config_data
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def set(self, key: str, value: Any):
        """持久化用户设置"""
        self.settings.setValue(key, json.dumps(value))
        self.settings.sync()
        self.reload()

    def override(self, key: str, value: Any):
        """进程内覆盖，不写入用户设置"""
        self._overrides[key] = value
        self.reload()

    def clear_overrides(self):
        self._overrides.clear()
        self.reload()

    def reset_to_defaults(self):
        """清空用户设置"""
        self.settings.clear()
        self.settings.sync()
        self.reload()

    def get_caps_config(self) -> Dict[str, Any]:
        """获取尺寸上限表"""
        return dict(self.get('caps', {}))

    def get_performance_config(self) -> Dict[str, Any]:
        return {
            'max_workers': self.get('performance.max_workers', 1),
            'cache_lattices': self.get('performance.cache_lattices', True),
        }

    def get_checks_config(self) -> Dict[str, Any]:
        return self.get('checks', {})

    def export_config(self) -> Dict[str, Any]:
        """导出当前生效的配置"""
        return copy.deepcopy(self.config_data)


# 全局配置管理器实例
config_manager = ConfigManager()


def get_config(key: str, default: Any = None) -> Any:
    """获取配置的便捷函数"""
    return config_manager.get(key, default)


def set_config(key: str, value: Any):
    """设置配置的便捷函数"""
    config_manager.set(key, value)


def get_caps_config() -> Dict[str, Any]:
    return config_manager.get_caps_config()


def get_performance_config() -> Dict[str, Any]:
    return config_manager.get_performance_config()


def enforce_cap(name: str, value: int, what: str = ""):
    """
    检查尺寸上限

    Args:
        name: 上限表中的键
        value: 实际大小
        what: 出错时的描述

    Raises:
        GroupTooLarge: 群阶超过上限
        SizeCap: 其他上限
    """
    cap = get_caps_config().get(name)
    if cap is None or value <= int(cap):
        return
    message = f"{what or name} 大小 {value} 超过上限 {cap}（可用 {SIZE_CAPS_ENV} 调整）"
    if name == 'group_order':
        raise GroupTooLarge(message)
    raise SizeCap(message)
