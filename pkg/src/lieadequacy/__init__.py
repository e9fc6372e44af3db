"""Exact adequacy checks for symmetric powers of SL2(q) and GL2(q)."""

from .gf import FieldCtx, FieldElem, field_new
from .matgrp import GroupCtx, enumerate_group
from .rep import Representation, end_module, envelope_dimension, sym_power
from .cohom import H1Result, h1_bruteforce, h1_dimension, hom_to_additive
from .adequacy import AdequacyReport, adequacy_from_normal, check_adequacy, check_big_sl2, sweep
from .weights import RootSystemCtx, WeightMultiset, audit_p_large, freudenthal, root_system, weyl_dim

__version__ = "0.1.0"
