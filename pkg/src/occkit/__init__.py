"""occkit: exact organized-complexity and semantic-information toolkit.

Encode, execute and exhaustively minimize stochastic finite-state circuit
machines; compile state machines into them; evaluate semantic information
quantities on explicit rational distributions.
"""

from .bitio import BitReader, BitString, BitWriter, gamma_decode, gamma_encode
from .circuit import AND, NOT, OR, Circuit, synth_from_table, truth_table
from .codec import (
    CODEC_VERSION,
    decode_conditional,
    decode_oc_circuit,
    decode_structured,
    encode_conditional,
    encode_oc_circuit,
    encode_structured,
    load_circuit,
    save_circuit,
)
from .dist import (
    FiniteDistribution,
    dyadic_approximation,
    renyi_entropy,
    restrict,
    shannon_entropy,
    statistical_distance,
)
from .epsmachine import (
    EpsilonMachine,
    compile_machine,
    dyadicize,
    process_distribution,
    stationary,
    statistical_complexity,
)
from .ocmachine import (
    ConditionalOcCircuit,
    ConditionalOcLogic,
    Macro,
    OcCircuit,
    OcLogic,
    StructuredOcCircuit,
    conditional_distribution,
    expand,
    output_distribution,
    run,
    run_conditional,
    step,
)
from .search import (
    SearchBudget,
    SearchResult,
    baseline_circuit,
    conditional_oc_search,
    oc_search,
    oc_search_many,
    soc_search,
)
from .semantics import (
    ChannelMatrix,
    capacity_objective,
    conditional_sa,
    conditionalize_logic,
    effectiveness,
    sa,
    si,
    ssoc_demo,
)

__version__ = "0.1.0"
