from .energy import energy, softmax_energy_identity_check, confidence_map, UncertaintyMap
from .aggregate import tta_aggregate, RENORM_TOLERANCE
from .render import render_axial_montage, axial_montage, unit_range
