#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
等变范畴值图工具 - 命令行入口
"""

import sys
import os

# 添加当前目录到Python路径
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from equicat.cli import main


if __name__ == '__main__':
    sys.exit(main())
