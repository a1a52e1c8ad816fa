"""Varying-focal-length RGB-D dataset synthesis and depth evaluation tools."""

from .ambiguity import AmbiguityPair, PlaneScene, conjugate_depth, generate_pair
from .geometry import (
    ColoredPointCloud,
    Intrinsics,
    RecenteringSpec,
    RgbdFrame,
    RigidMotion,
    apply_motion,
    backproject,
    project,
    recenter,
    recentering_translation,
    rotation_about_axis,
)
from .holefill import NeighborhoodClass, classify, fill
from .metrics import MetricsReport, berhu_loss, evaluate, mse_loss
from .receptive_field import CountMap, LayerSpec, count_map
from .reprojection import SparseRgbdFrame, splat
from .rgbd_io import load_rgbd, save_rgbd

__version__ = "0.1.0"
