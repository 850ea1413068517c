"""Fair Slepian-Wolf rate allocation via the Shapley value of the entropy game."""

from .core import (
    BitSourceModel,
    CapExceededError,
    EntropyOracle,
    ModelError,
    OracleLedger,
    RateVector,
    TableModel,
    conditional_entropy,
    dual_entropy,
    entropy,
    load_fixture,
    load_instance,
    mutual_information,
    restrict_model,
    verify_polymatroid,
)
from .decomposition import (
    Partition,
    core_dimension,
    direct_sum,
    finest_decomposer,
    is_decomposer,
    shapley_decomposed,
)
from .polyhedron import (
    check_core,
    check_dual_base,
    check_slepian_wolf,
    edmonds_greedy,
    enumerate_extreme_points,
)
from .shapley import shapley_by_permutations, shapley_direct, shapley_sampled

__version__ = "0.1.0"
