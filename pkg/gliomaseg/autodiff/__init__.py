from .tensor import Tensor, Tape, as_tensor, backward, record
from .ops import (add, sub, mul, div, neg, scale, exp, log, maximum_const, clip, log_cosh, reduce_sum, reduce_mean,
                  concat_channels, broadcast_channels, reshape, take_channels)
from .conv import conv3d, conv_transpose3d, max_pool3d, conv_output_dims, SAME, VALID
from .resample import upsample_linear2x, linear_upsample_matrix
from .params import ParamSet, he_uniform
from .gradcheck import finite_diff_check, compare_gradients, numeric_gradient, analytic_gradient, relative_errors
