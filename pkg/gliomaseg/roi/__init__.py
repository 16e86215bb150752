from .bbox import BBox3, mask_bbox, nonzero_bbox, expand_bbox
from .crop import CropRecord, plan_crop, crop_case, restore_to_original, roi_bbox
