"""Random temporal graphs: reachability thresholds, foremost trees,
optimal spanners, and gossip simulators.

The library is organised around immutable :class:`~tempograph.core.TemporalGraph`
values: ``gen`` samples them from the random models, ``core`` answers
reachability questions about them, ``foremost`` grows time-optimal spanning
trees and instruments their growth, ``spanner`` builds minimum-size
temporal spanners, ``gossip`` simulates rumor spreading, and ``harness``
runs seeded Monte Carlo experiments over all of the above.  The
``tempograph`` CLI exposes each experiment type as a subcommand.
"""

from .core import (ArrivalMap, TemporalGraph, TemporalPath,
                   earliest_arrival_sweep, is_temporal_sink,
                   is_temporal_source, is_temporally_connected, read_graph,
                   restrict, reverse_time, temporal_source_exists,
                   two_hop_source_check, verify_spanner, write_graph)
from .foremost import (ForemostTree, NotTemporalSourceError, Trajectory,
                       foremost_tree, foremost_tree_multilabel,
                       reference_curve, reverse_foremost_tree,
                       trajectory_deviation, truncate_trajectory,
                       truncation_caps)
from .gen import (CallSequence, RngStream, any_call_sequence,
                  co_call_sequence, sample_complete, sample_fnp,
                  sample_poisson)
from .gossip import (GossipMilestones, KnowledgeState, any_milestones,
                     co_milestones, simulate_gossip)
from .harness import (ExperimentRow, PropertyId, SweepGrid,
                      crossing_factor, estimate_probability,
                      evaluate_property, threshold_sweep,
                      trajectory_experiment)
from .spanner import (NoGoodSquareError, SpannerCertificate, Square,
                      build_optimal_spanner, find_good_square, pivot_windows,
                      spanner_size_lower_bound, square_count)

__version__ = "0.1.0"
