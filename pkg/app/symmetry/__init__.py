from app.symmetry.breaking import (
    SeparationVariant,
    break_ideal_bf,
    break_invariant,
    break_invariant_by_distance,
    break_mgop,
    permutation_rule,
    point_rule,
    separation_distance,
)
from app.symmetry.group import GroupElement, LayerMap, SymmetryGroup, enumerate_group
from app.symmetry.operators import (
    BetaBlock,
    PointFlip,
    Swap,
    SymmetryOp,
    apply_perm,
    apply_point,
    beta_blocks,
    group_size,
)

__all__ = [
    "BetaBlock",
    "GroupElement",
    "LayerMap",
    "PointFlip",
    "SeparationVariant",
    "Swap",
    "SymmetryGroup",
    "SymmetryOp",
    "apply_perm",
    "apply_point",
    "beta_blocks",
    "break_ideal_bf",
    "break_invariant",
    "break_invariant_by_distance",
    "break_mgop",
    "enumerate_group",
    "group_size",
    "permutation_rule",
    "point_rule",
    "separation_distance",
]
