"""Monogamy of negativity and discord for noisy three- and four-qubit states."""
from .analytic import delta_n
from .channels import NoiseSpec, apply_noise, evolve_array, evolve_kets
from .correlations import (
    CONSTRAINED,
    EXACT,
    DiscordOptions,
    MonogamyReport,
    discord,
    monogamy_score,
    negativity,
)
from .experiments import (
    ChannelOracle,
    discriminate,
    dynamics_terminal,
    fraction_scan,
    profile_census,
    terminal_average,
    trace_dynamics,
)
from .qcore import DensityMatrix, Ket, partial_trace, partial_transpose, von_neumann_entropy
from .states import GGHZParams, GWParams, make_gghz, make_gw, make_state, sample

__version__ = "0.1.0"
