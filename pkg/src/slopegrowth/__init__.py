"""Slope-resolved growth rates of subgroups of F_k x F_m acting on products of trees."""
from .words import Alphabet, GeneratorMap, ReducedWord, apply_map, invert, multiply, parse_word, reduce
from .action import (
    ProductGroupSpec,
    Displacement,
    ElementRecord,
    completeness_horizon,
    displacement,
    displacement_histogram,
    enumerate_elements,
    example31,
    example41,
    example51,
    preset,
)
from .spectrum import (
    Binning,
    SlopeSpectrum,
    annulus_count,
    build_spectrum,
    free_sphere_size,
    load_spectrum,
    save_spectrum,
    slope_annulus_count,
    spectrum_from_histogram,
)
from .rates import (
    NEG_INF,
    RateEstimate,
    RateProfile,
    build_profile,
    check_cos_sin_bound,
    check_interior_condition,
    concavity_audit,
    delta_eps_theta,
    delta_global,
    delta_theta,
    estimate_rate,
    find_theta_star,
    psi,
    regular_growth_check,
)

__version__ = "0.1.0"
