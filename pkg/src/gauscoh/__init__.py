"""Coherence resource theory for quantum Gaussian states, channels and superchannels."""

from .channels import (
    ChoiParams,
    GaussianChannel,
    apply_channel,
    choi_state,
    compose_channels,
    constant_channel,
    displacement_channel,
    identity_channel,
    is_incoherent_channel,
    is_unitary_channel,
    random_channel,
    random_incoherent_channel,
    tensor_channels,
    validate_channel,
)
from .coherence import (
    CoherenceResult,
    OptimizerOptions,
    check_additivity,
    check_monotonicity,
    coherence_of_channel,
    cr_channel,
    cr_constant_analytic,
    cr_displacement_analytic,
)
from .states import (
    GaussianState,
    char_function,
    coherent_state,
    cr_state,
    entropy,
    f_thermal,
    is_incoherent_state,
    mean_photon_numbers,
    tensor_states,
    thermal_state,
    vacuum_state,
    validate_state,
)
from .superchannels import (
    GaussianSuperchannel,
    apply_superchannel,
    decompose_superchannel,
    identity_superchannel,
    is_incoherent_superchannel,
    random_incoherent_superchannel,
    random_superchannel,
    validate_superchannel,
)
from .symplectic import (
    TnStructure,
    classify_Tn,
    hermitian_psd,
    parity_form,
    scaled_orthogonal_factor,
    symplectic_eigenvalues,
    symplectic_form,
)

__version__ = "0.1.0"
