"""True-time-delay array split-beampattern synthesis toolkit."""

from .core import (
    ArrayConfig,
    Beampattern,
    PsiGrid,
    SystemConfig,
    beampattern_of_config,
    beampattern_of_precoder,
    compose,
    config_from_json_dict,
    config_to_json_dict,
    gain_at,
    gain_at_directions,
    precoder_matrix,
    subcarrier_freqs,
    wrap_sine,
    zero_config,
)
from .dictionary import GeneratorDictionary, build_dictionary, load, lookup, postprocess_center, save
from .evaluation import (
    EvalReport,
    EvalScenario,
    ase_per_subband,
    ase_per_subcarrier,
    direction_grid,
    ecdf,
    monte_carlo,
    runtime_bench,
    spectral_efficiency,
    upper_bound_se,
)
from .hdb import (
    GeneratorSet,
    decompose,
    generator_bands,
    generator_set,
    make_hdb_synthesizer,
    scale_shift,
    synthesize,
)
from .solvers import (
    SolverParams,
    constant_direction_config,
    default_max_delay,
    delay_grid,
    exhaustive_oracle,
    fold_delay_periods,
    jpta_approx,
    make_jpta_synthesizer,
    objective,
    register_synthesizer,
)
from .splitbeam import (
    DirectionMap,
    dirichlet_gain,
    expand_directions,
    ideal_split_precoder,
    subband_of,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayConfig",
    "Beampattern",
    "DirectionMap",
    "EvalReport",
    "EvalScenario",
    "GeneratorDictionary",
    "GeneratorSet",
    "PsiGrid",
    "SolverParams",
    "SystemConfig",
    "ase_per_subband",
    "ase_per_subcarrier",
    "beampattern_of_config",
    "beampattern_of_precoder",
    "build_dictionary",
    "compose",
    "config_from_json_dict",
    "config_to_json_dict",
    "constant_direction_config",
    "decompose",
    "default_max_delay",
    "delay_grid",
    "direction_grid",
    "dirichlet_gain",
    "ecdf",
    "exhaustive_oracle",
    "expand_directions",
    "fold_delay_periods",
    "gain_at",
    "gain_at_directions",
    "generator_bands",
    "generator_set",
    "ideal_split_precoder",
    "jpta_approx",
    "load",
    "lookup",
    "make_hdb_synthesizer",
    "make_jpta_synthesizer",
    "monte_carlo",
    "objective",
    "postprocess_center",
    "precoder_matrix",
    "register_synthesizer",
    "runtime_bench",
    "save",
    "scale_shift",
    "spectral_efficiency",
    "subband_of",
    "subcarrier_freqs",
    "synthesize",
    "upper_bound_se",
    "wrap_sine",
    "zero_config",
]
