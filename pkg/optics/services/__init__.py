from .media import (
    Film,
    GOLD_PERMITTIVITY_795NM,
    LayerStack,
    Medium,
    drude_permittivity,
    kretschmann_stack,
)
from .prism import (
    PrismGeometry,
    external_to_internal_angle,
    internal_to_external_angle,
    prism_face_transmission,
)
from .resonance import (
    DipCurve,
    find_resonance,
    reflectivity_sweep,
    resonance_angle_closed_form,
)
from .transfer_matrix import (
    TmLayerParams,
    characteristic_matrix,
    exit_index_response,
    reflection_coefficient,
    reflectivity,
    tm_layer_params,
)
