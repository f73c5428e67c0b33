"""
工具模块
JSON 文件读写与可复现的报告序列化
"""

import json
import os
from typing import Any, Dict, Optional

from .error_handler import FileOperationError, log_info


def dump_report(data: Any, indent: Optional[int] = 2) -> str:
    """按固定键序序列化，保证相同输入得到逐字节相同的输出"""
    return json.dumps(data, indent=indent, sort_keys=True, ensure_ascii=False)


class FileManager:
    """文件管理器"""

    @staticmethod
    def save_json(file_path: str, data: Dict[str, Any], indent: Optional[int] = 2) -> str:
        """原子写入 JSON 文件（先写临时文件，再重命名）"""
        if not file_path or not isinstance(file_path, str):
            raise FileOperationError("文件路径不能为空且必须是字符串")

        abs_path = os.path.abspath(file_path)
        if not abs_path.endswith('.json'):
            raise FileOperationError("文件扩展名必须是.json")

        directory = os.path.dirname(abs_path)
        if directory:
            os.makedirs(directory, exist_ok=True)

        temp_path = abs_path + '.tmp'
        try:
            with open(temp_path, 'w', encoding='utf-8') as f:
                f.write(dump_report(data, indent))
                f.write('\n')
            os.replace(temp_path, abs_path)
        except OSError as e:
            if os.path.exists(temp_path):
                try:
                    os.remove(temp_path)
                except OSError:
                    pass
            raise FileOperationError(f"保存文件失败: {abs_path}: {e}") from e

        log_info(f"已写入 {abs_path}")
        return abs_path

    @staticmethod
    def load_json(file_path: str) -> Any:
        """加载 JSON 文件"""
        if not file_path:
            raise FileOperationError("文件路径不能为空")
        if not os.path.isfile(file_path):
            raise FileOperationError(f"文件不存在: {file_path}")
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise FileOperationError(f"加载文件失败: {file_path}: {e}") from e
