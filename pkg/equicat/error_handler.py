"""
错误处理模块
提供统一的异常层次、日志记录和命令级错误处理
"""

import sys
import os
import traceback
import logging
from datetime import datetime
from functools import wraps
from typing import List

from PyQt5.QtCore import QObject, Qt, pyqtSignal


class EquicatError(Exception):
    """所有计算错误的基类"""
    pass


class ValidationError(EquicatError):
    """输入数据违反公理或结构约束"""
    pass


class FileOperationError(EquicatError):
    """文件读写错误"""
    pass


# 群与 G-集合
class NotAssociative(ValidationError):
    pass


class NoIdentity(ValidationError):
    pass


class NoInverse(ValidationError):
    pass


class GroupTooLarge(EquicatError):
    pass


class SubgroupMismatch(ValidationError):
    pass


class EmptySubset(ValidationError):
    pass


# 连通度公式
class InfinityClash(EquicatError):
    """+∞ 与 −∞ 相加"""
    pass


class MonotonicityViolation(ValidationError):
    pass


class MissingEntry(EquicatError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotFiniteDimensional(EquicatError):
    pass


# 有限范畴
class UnitLawFailure(ValidationError):
    pass


class AssocFailure(ValidationError):
    pass


class TypeMismatch(ValidationError):
    pass


class UnknownObject(ValidationError):
    pass


class MixedDegree(ValidationError):
    pass


class NotLoopFree(ValidationError):
    pass


# 等变结构
class UnitAxiomFailure(ValidationError):
    pass


class CocycleFailure(ValidationError):
    pass


class NaturalityFailure(ValidationError):
    pass


class InvalidCoset(ValidationError):
    pass


class NonEquivariantEdge(ValidationError):
    pass


class IndexMismatch(ValidationError):
    pass


class InvalidTransformation(ValidationError):
    pass


class WitnessFailure(EquicatError):
    """同构见证验证失败，消息中带第一个不一致的单元"""
    pass


# 同调
class BoundaryNotSquareZero(ValidationError):
    pass


# 命令行
class UnknownCheck(EquicatError):
    pass


class SizeCap(EquicatError):
    pass


class ErrorHandler(QObject):
    """统一错误处理器"""

    error_occurred = pyqtSignal(str, str)  # 错误类型, 错误消息

    def __init__(self):
        super().__init__()
        self.logger = logging.getLogger('equicat')
        self.error_count = 0
        self.error_occurred.connect(self._count_error, Qt.DirectConnection)

    def _count_error(self, error_type, message):
        self.error_count += 1

    def setup_logging(self, log_dir=None, file_level="INFO", console_level="ERROR"):
        """设置日志记录"""
        if log_dir is None:
            current_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
            log_dir = os.path.join(current_dir, "logs")
        os.makedirs(log_dir, exist_ok=True)
        log_file = os.path.join(log_dir, f"equicat_{datetime.now().strftime('%Y%m%d')}.log")

        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(getattr(logging, str(file_level).upper(), logging.INFO))

        console_handler = logging.StreamHandler()
        console_handler.setLevel(getattr(logging, str(console_level).upper(), logging.ERROR))

        formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')
        file_handler.setFormatter(formatter)
        console_handler.setFormatter(formatter)

        # 只重置本包的日志器，不动根日志器
        for handler in self.logger.handlers[:]:
            self.logger.removeHandler(handler)
        self.logger.setLevel(logging.DEBUG)
        self.logger.addHandler(file_handler)
        self.logger.addHandler(console_handler)
        self.logger.propagate = False
        return log_file

    def handle_exception(self, exc_type, exc_value, exc_traceback):
        """处理未捕获的异常"""
        if issubclass(exc_type, KeyboardInterrupt):
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return

        error_msg = ''.join(traceback.format_exception(exc_type, exc_value, exc_traceback))
        try:
            self.logger.error(f"未捕获的异常: {error_msg}")
        except UnicodeEncodeError:
            safe_msg = error_msg.encode('ascii', 'replace').decode('ascii')
            self.logger.error(f"Uncaught exception: {safe_msg}")

        self.error_occurred.emit("系统错误", str(exc_value))
        print(f"equicat: 意外错误: {exc_value}", file=sys.stderr)

    def log_error(self, error_msg, context=""):
        """记录错误日志并发射信号"""
        full_msg = f"{context}: {error_msg}" if context else error_msg
        self.logger.error(full_msg)
        self.error_occurred.emit(context or "错误", str(error_msg))


# 全局错误处理器实例
error_handler = ErrorHandler()


def handle_errors(error_message="操作失败", reraise=False):
    """
    命令错误处理装饰器

    被包装的函数返回退出码；已知错误记录日志后返回 2。
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except EquicatError as e:
                error_handler.log_error(f"{type(e).__name__}: {e}", func.__name__)
                if reraise:
                    raise
                print(f"错误: {error_message} - {type(e).__name__}: {e}", file=sys.stderr)
                return 2
        return wrapper
    return decorator


def setup_global_error_handler(log_dir=None, file_level="INFO", console_level="ERROR"):
    """设置全局错误处理和文件日志"""
    log_file = error_handler.setup_logging(log_dir, file_level, console_level)
    sys.excepthook = error_handler.handle_exception
    return log_file


class ErrorCollector:
    """批量检查中的错误收集器"""

    def __init__(self):
        self.errors: List[str] = []

    def add_error(self, error_msg):
        self.errors.append(error_msg)

    def has_errors(self):
        return len(self.errors) > 0

    def summary(self):
        """错误摘要"""
        if not self.has_errors():
            return ""
        if len(self.errors) == 1:
            return self.errors[0]
        error_list = "\n".join(f"• {error}" for error in self.errors)
        return f"共 {len(self.errors)} 个错误:\n{error_list}"


# 便捷的日志记录函数
def log_info(message):
    """记录信息日志"""
    error_handler.logger.info(message)


def log_warning(message):
    """记录警告日志"""
    error_handler.logger.warning(message)


def log_error(message):
    """记录错误日志"""
    error_handler.logger.error(message)


def log_debug(message):
    """记录调试日志"""
    error_handler.logger.debug(message)
