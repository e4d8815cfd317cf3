"""Maxwell fields from kinetic moments: retarded integrals, wave propagator, null frame."""

from src.fields.cone import ConeGrid, cone_nodes, initial_sphere_nodes, shell_rule
from src.fields.frame import (
    FieldSample,
    NullFrame,
    cross_identities_check,
    lorentz_force_bound_ratio,
    lorentz_force_scan,
    null_decompose,
)
from src.fields.glassey_strauss import (
    RetardedTerms,
    field_at,
    field_decay_scan,
    gs_field_terms,
    gs_kernel_a,
    gs_kernel_b,
    gs_residual,
    gs_residual_study,
    initial_data_terms,
    kernel_means_scan,
    kernel_sphere_integral,
    retarded_terms,
    wave_sources,
)
from src.fields.sources import FreeTransportGaussian, ModulatedGaussian, MomentSource, ZeroSource, make_source
from src.fields.wave import (
    RadialBump,
    ScalarField,
    ZeroField,
    homogeneous_wave,
    radial_wave_fd,
    wave_residual,
    wave_residual_study,
)

__all__ = [
    "ConeGrid",
    "FieldSample",
    "FreeTransportGaussian",
    "ModulatedGaussian",
    "MomentSource",
    "NullFrame",
    "RadialBump",
    "RetardedTerms",
    "ScalarField",
    "ZeroField",
    "ZeroSource",
    "cone_nodes",
    "cross_identities_check",
    "field_at",
    "field_decay_scan",
    "gs_field_terms",
    "gs_kernel_a",
    "gs_kernel_b",
    "gs_residual",
    "gs_residual_study",
    "homogeneous_wave",
    "initial_data_terms",
    "initial_sphere_nodes",
    "kernel_means_scan",
    "kernel_sphere_integral",
    "lorentz_force_bound_ratio",
    "lorentz_force_scan",
    "make_source",
    "null_decompose",
    "radial_wave_fd",
    "retarded_terms",
    "shell_rule",
    "wave_residual",
    "wave_residual_study",
    "wave_sources",
]
