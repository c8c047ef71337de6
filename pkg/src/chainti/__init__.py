"""Degree-based topological indices of random molecular chains."""

from .chains import (FAMILIES, ChainFamily, ChainState, IncrementFamily, LinkDistribution,
                     alpha_vector, attach, get_family, initial_chain, three_chains, verify_0mp)
from .graph import Graph, GraphError, new_graph
from .hexpr import parse, to_index_function
from .indices import IndexFunction, builtin, topological_index, vertex_power_sum
from .montecarlo import kde, run_experiment, simulate_chain, summarize
from .oracle import enumerate_exact
from .theory import (abc_constants, clt_statistic, exact_distribution, martingale_value, mgf,
                     moments)

__version__ = "0.1.0"
