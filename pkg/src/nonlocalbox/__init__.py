"""Two-party, two-setting, two-outcome correlation boxes and the IC / ML tests."""

from .box import (
    TSIRELSON,
    CorrelationBox,
    EqualBiasBox,
    NsParams,
    Party,
    biasness,
    biasness_percent,
    box_from_equal_bias,
    box_from_ns_params,
    chsh_value,
    correlators,
    marginal,
    pr_box,
    quantum_tsirelson_box,
    signed_chsh,
    uniform_box,
)
from .criteria import (
    CriterionKind,
    CriterionReport,
    check_no_signaling,
    ic_check,
    ic_check_equal_bias,
    ml_check,
    ml_check_equal_bias,
    ml_equal_bias_d,
)
from .macro import MacroConfig, MacroResult, simulate_macroscopic, theoretical_sign_chsh
from .optimizer import (
    BiasMaxResult,
    OptimizerOptions,
    distance_to_quantum,
    max_equal_bias,
    max_single_bias_ns,
)

__version__ = "0.1.0"
