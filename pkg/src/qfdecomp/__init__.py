"""Quantifier-free types, realized-type censuses and congruence decompositions of finite structures."""

from .core import (FamilyParams, GaifmanGraph, Partition, Signature, Structure, components_over, gaifman,
                   generate, load_partition, load_structure, save_partition, save_structure, validate)
from .decomp import (CongruenceVerdict, SimKey, component_partition, count_sim_classes, find_decomposition,
                     is_congruence, ma_degree, naive_is_congruence, satisfies_budget, sim_equivalent, sim_key)
from .qftypes import (CensusReport, DeltaSpec, QfType, census, census_extended_base, expand_with_unary,
                      naive_qf_type, qf_type)

__version__ = "0.1.0"
