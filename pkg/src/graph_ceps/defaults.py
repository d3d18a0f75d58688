"""Shipped default configuration: a desk-scale living-room experiment.

The 13-channel, 5-group arrangement below is a representative example of a
room with five multi-microphone devices (three 3-mic devices, two 2-mic
devices).  It is a plausible stand-in, not a calibrated description of any
measured deployment; treat the coordinates and the channel-to-group
assignment as illustrative defaults only.
"""

from __future__ import annotations

from .simulate import ArrayLayout, CorpusConfig, SceneSpec, make_layout
from .topology import MicArrayGraph, build_graph

DEFAULT_ALPHA = 0.01

DEFAULT_GROUPS = (
    (1, 2, 3),
    (4, 5, 6),
    (7, 8, 9),
    (10, 11),
    (12, 13),
)

# Device clusters around a roughly 6 m x 5 m room; mics within a device are
# a few decimeters apart so that within-group power ratios carry information.
DEFAULT_MIC_POSITIONS = (
    (0.7, 1.0), (1.0, 1.4), (1.3, 0.9),     # group I
    (4.7, 0.9), (5.0, 1.3), (5.3, 1.0),     # group II
    (2.7, 4.1), (3.0, 3.7), (3.3, 4.2),     # group III
    (0.9, 3.2), (1.2, 3.7),                 # group IV
    (4.8, 3.6), (5.2, 3.3),                 # group V
)

# Household scenes distinguished by source position, spectral band, and the
# depth/rate of their slow level modulation.
DEFAULT_SCENES = (
    SceneSpec("vacuuming", (2.2, 1.2), (400.0, 6000.0), -18.0, mod_depth_db=3.0, mod_rate_hz=0.4),
    SceneSpec("dishwashing", (4.8, 1.7), (800.0, 5200.0), -22.0, mod_depth_db=4.0, mod_rate_hz=1.1),
    SceneSpec("cooking", (3.1, 3.4), (300.0, 2500.0), -20.0, mod_depth_db=3.5, mod_rate_hz=0.7),
    SceneSpec("chatting", (1.1, 3.9), (150.0, 1800.0), -24.0, mod_depth_db=4.0, mod_rate_hz=1.7),
    SceneSpec("watching_tv", (5.3, 3.8), (100.0, 3400.0), -21.0, mod_depth_db=3.0, mod_rate_hz=0.9),
)

DEFAULT_SIGMA_GRID_S = (0.0, 0.01, 0.03, 0.1, 0.3, 1.0)
DEFAULT_TRIALS = 5
DEFAULT_MASTER_SEED = 17


def default_topology(alpha: float = DEFAULT_ALPHA) -> MicArrayGraph:
    """13-channel, 5-group connection graph with weak cross-group weight."""
    return build_graph(13, DEFAULT_GROUPS, alpha)


def default_layout() -> ArrayLayout:
    return make_layout(DEFAULT_MIC_POSITIONS, DEFAULT_GROUPS)


def default_corpus_config(master_seed: int = DEFAULT_MASTER_SEED) -> CorpusConfig:
    return CorpusConfig(
        scenes=DEFAULT_SCENES,
        layout=default_layout(),
        clips_per_scene=20,
        train_fraction=0.7,
        sample_rate=16000,
        clip_seconds=8.0,
        noise_floor_db=-40.0,
        diffuse_db=-9.0,
        position_jitter_m=0.15,
        level_jitter_db=1.5,
        master_seed=master_seed,
    )
