"""Link-condition checks for complexes glued from dihedral Artin building blocks."""

__version__ = "0.1.0"

from .coxeter import CoxeterMatrix, ReflectionRep, coxeter_abc_infinite, element_order, word_matrix
from .dihedral import DihedralBlock, beta_of, symmetric_alpha, table1, theta_of, trigeqn_residual
from .errors import DomainError
from .links import (
    ArtinDefiningGraph,
    DeltaAssignment,
    LGraphParams,
    block_link,
    combined_link,
    l_graph,
    l_graph_diameter_formula,
)
from .metric_graph import (
    CycleWitness,
    Edge,
    MetricGraph,
    brute_force_systole,
    diameter,
    is_cat1,
    shortest_path,
    systole,
)
from .verdict import (
    CurvatureVerdict,
    check,
    enumerate_amn2,
    excluded_triples,
    solve_deltas,
    triples_check,
)
