"""ISI-free modulation codes for diffusion molecular channels.

Build the constraint graph of a channel with ``k`` slots of memory and ``N``
molecule types, compute its constrained-coding capacity, synthesize
delay-limited prefix codes that approach it, and run them as streaming
encoders/decoders.
"""

from .capacity import CapacityResult, adjacency_matrix, channel_capacity, count_paths, spectral_radius
from .codec import ModulationCode, decode, encode, mcsk_code, validate_code
from .graph import (
    GAP,
    ChannelSpec,
    build_constraint_graph,
    build_continuation_tree,
    enumerate_states,
    is_isi_free,
)
from .synthesis import brute_force_synthesize, synthesize

__version__ = "0.1.0"
