"""k-product decomposition of matrices and recognition of 2-level slack matrices."""

from .decompose import (
    FactorizationTree,
    factorize,
    irreducible_partition,
    is_independent_partition,
    mutual_information,
    mutual_information_oracle,
    queyranne_min,
    recognize_1product,
    recognize_kproduct,
)
from .matrix_core import RationalMatrix, is_isomorphic, make_nonredundant, parse_matrix, rank
from .matroid import (
    MatroidSumTree,
    base_polytope_slack,
    bases,
    dual,
    hypersimplex_slack,
    is_hypersimplex_slack,
    recognize_matroid_slack,
)
from .perfect_graph import Graph, bron_kerbosch, recognize_stab_slack, stab_slack
from .polyhedra import is_slack_matrix, polytope_dim
from .products import augment_factor, find_special_tuples, k_product, one_product

__version__ = "0.1.0"
