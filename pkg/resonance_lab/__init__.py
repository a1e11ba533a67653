from resonance_lab.operator_space import (
    AffinePoint, MatrixOperator, SpectralData, resolvent, resonance_points_at, spectral_data,
)
from resonance_lab.laurent import (
    LaurentSeries, ResonanceOperators, laurent_coefficients, pole_order, resonance_operators,
    verify_laurent_identities,
)
from resonance_lab.resonance_structure import (
    UpsilonFiltration, depth, jordan_structure, semisimplicity_check, upsilon_filtration,
)
from resonance_lab.eigenpath import (
    Eigenpath, assumption_check, branching_report, conjugate_paths, monodromy_cycles,
    path_order, trace_eigenpaths,
)
from resonance_lab.projection_decomposition import (
    beta_alpha, cycle_projections, schmidt_reconstruction,
)
from resonance_lab.spectral_flow import (
    FlowReport, resonance_index, spectral_flow_oracle, ssf_report, total_resonance_index,
)
from resonance_lab.tangency import (
    ResonantCurve, lax_tangency_check, resonant_curve, tangency_order,
)


__all__ = [
    'AffinePoint',
    'MatrixOperator',
    'SpectralData',
    'resolvent',
    'resonance_points_at',
    'spectral_data',
    'LaurentSeries',
    'ResonanceOperators',
    'laurent_coefficients',
    'pole_order',
    'resonance_operators',
    'verify_laurent_identities',
    'UpsilonFiltration',
    'depth',
    'jordan_structure',
    'semisimplicity_check',
    'upsilon_filtration',
    'Eigenpath',
    'assumption_check',
    'branching_report',
    'conjugate_paths',
    'monodromy_cycles',
    'path_order',
    'trace_eigenpaths',
    'beta_alpha',
    'cycle_projections',
    'schmidt_reconstruction',
    'FlowReport',
    'resonance_index',
    'spectral_flow_oracle',
    'ssf_report',
    'total_resonance_index',
    'ResonantCurve',
    'lax_tangency_check',
    'resonant_curve',
    'tangency_order',
]
