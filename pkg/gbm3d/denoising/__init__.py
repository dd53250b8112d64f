from .aggregation import aggregate_blocks
from .stage1 import MatchedVolume, WeightField, assemble_volume, filter_shifted, filter_volume, tv_weights, \
    uniform_weights, aggregate, run_trial, stage1_denoise, blocks_to_volume, volume_to_blocks
from .stage2 import GroupStack, WienerEstimate, build_group_stack, wiener_filter_groups, wiener_filter_group, \
    run_wiener_trial, stage2_denoise
from .pipeline import PatchPlan, Denoiser, plan_patches, extract_patches, stitch_patches, denoise
