"""
Transporte de ergotropia entre dois sistemas quânticos
"""

from .cycles import CycleTrace, run_cycles, swap_with_error
from .ensemble import dispersion_stats, ensemble_statistics, run_ensemble
from .ergotropy import Hamiltonian, ergotropic_gap, ergotropy, ergotropy_gain
from .errors import TransportError
from .models import (
    CycleConfig,
    CycleRecord,
    DispersionStats,
    EnsembleConfig,
    ExperimentSpec,
    RectangleFit,
    RunMetadata,
    SummaryReport,
    TransportSample,
)
from .states import BipartiteState, DensityMatrix

__version__ = "0.1.0"

__all__ = [
    'BipartiteState', 'DensityMatrix', 'Hamiltonian',
    'ergotropy', 'ergotropic_gap', 'ergotropy_gain',
    'run_ensemble', 'ensemble_statistics', 'dispersion_stats',
    'run_cycles', 'swap_with_error', 'CycleTrace',
    'EnsembleConfig', 'CycleConfig', 'TransportSample', 'CycleRecord',
    'RectangleFit', 'DispersionStats', 'ExperimentSpec', 'RunMetadata', 'SummaryReport',
    'TransportError',
]
