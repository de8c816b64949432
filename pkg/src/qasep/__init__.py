"""Two-species asymmetric exclusion on an open segment with reflecting ends:
exact Laurent-polynomial matrices, the U_q[gl(3)] symmetry, the reversible
measure and a Gillespie simulator to check it numerically.
"""

from .config import Configuration, PositionRep, Sector, SiteState, all_configurations, decode, enumerate_sector, index
from .generator import ProcessParams, generator, jumps, perk_schultz
from .laurent import LaurentPoly, evaluate, parse, q_binomial, q_multinomial, q_number, render
from .measure import SectorMeasure, measure_conjugate, measure_occupation, measure_position, sector_measure
from .operators import QVector, SparseQMatrix
from .simulate import EmpiricalMeasure, SimConfig, run, tv_distance
from .symmetry import RelationReport, RelationResult, build_R, rep_global

__version__ = "0.1.0"

__all__ = [
    "Configuration", "PositionRep", "Sector", "SiteState", "all_configurations", "decode", "enumerate_sector", "index",
    "ProcessParams", "generator", "jumps", "perk_schultz",
    "LaurentPoly", "evaluate", "parse", "q_binomial", "q_multinomial", "q_number", "render",
    "SectorMeasure", "measure_conjugate", "measure_occupation", "measure_position", "sector_measure",
    "QVector", "SparseQMatrix",
    "EmpiricalMeasure", "SimConfig", "run", "tv_distance",
    "RelationReport", "RelationResult", "build_R", "rep_global",
]
