from .filters import gaussian_kernel1d, gaussian_filter_3d
from .spatial import (DeformationField, make_deformation_field, elastic_deform, rotate_case, random_rotation,
                      draw_rotation_angle)
from .intensity import brightness_offsets, random_brightness, shift_brightness
from .tta import TtaVariant, tta_apply, tta_invert, NUM_VARIANTS
from .policy import AugmentParams, augment_case
