#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
等变范畴值图工具包
"""

__version__ = "0.1.0"
__description__ = "有限 G-范畴值图的构造、等变连通度界与可复现的验证"

from .groups import Group, Subgroup, SubgroupLattice, standard_group, subgroup_lattice
from .gsets import GSet, coset_gset, regular_gset
from .bounds import ExtInt, ConnFunction, CocartData, VertexConn, bm_bound, dual_bm_bound
from .fincat import FinCat, Functor, CatDiagram, IsoWitness
from .equivariant import GAction, GDiagram, validate_g_structure
from .constructions import grothendieck, hom_category, matching_data, reedy_quasi_fibrant, total_fiber_model
from .simplicial import homology, nerve
from .checks import CHECKS, run_check
from .config_manager import ConfigManager, config_manager
from .error_handler import EquicatError, ValidationError, error_handler

__all__ = [
    'Group',
    'Subgroup',
    'SubgroupLattice',
    'standard_group',
    'subgroup_lattice',
    'GSet',
    'coset_gset',
    'regular_gset',
    'ExtInt',
    'ConnFunction',
    'CocartData',
    'VertexConn',
    'bm_bound',
    'dual_bm_bound',
    'FinCat',
    'Functor',
    'CatDiagram',
    'IsoWitness',
    'GAction',
    'GDiagram',
    'validate_g_structure',
    'grothendieck',
    'hom_category',
    'matching_data',
    'reedy_quasi_fibrant',
    'total_fiber_model',
    'homology',
    'nerve',
    'CHECKS',
    'run_check',
    'ConfigManager',
    'config_manager',
    'EquicatError',
    'ValidationError',
    'error_handler',
]
