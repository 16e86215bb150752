from .activations import relu, elu, sigmoid, softmax_channels, ACTIVATIONS
from .norm import instance_norm, InstanceNormLayer
from .attention import channel_attention, channel_coefficients, attention_gate, gate_coefficients, AttentionGateParams
from .blocks import conv_block1, conv_block2, ConvBlock1Params, ConvBlock2Params
