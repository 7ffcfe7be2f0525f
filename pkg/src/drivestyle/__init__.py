"""Driving-style classification with interval type-2 fuzzy inference.

Kinematic features from smoothed trajectories are classified by a Mamdani
system whose rules come from several experts' judgments aggregated with an
ordered weighted average. Clustering baselines and descriptive statistics
support the comparison.
"""
from .clustering import ClusterModel, assign_style_labels, fit_clusters, internal_validation
from .errors import (AmbiguousOrdering, ConfigError, DataError, DegenerateCovariance,
                     DegenerateInput, DriveStyleError, EmptySeries, EmptySet,
                     IncompleteJudgments, InvalidParameters, InvalidQuantifier, LengthMismatch,
                     NoRuleFired, NonFiniteInput, NonUniformSampling, NumericalError,
                     SingleCluster, SingularCovariance, TooShort, WindowTooShort)
from .experts import (JudgmentTable, OwaWeights, aggregate_opinions, build_rulebase,
                      consequent_from_value, map_term, owa_weights, read_judgments)
from .features import FeatureVector, KinematicSeries, extract_features, split_windows
from .filters import EkfConfig, SgConfig, Trajectory, derivative_series, ekf_smooth, sg_smooth
from .it2 import (IT2TrapezoidSet, Interval, LinguisticVariable, MembershipInterval,
                  TrapezoidParams, km_centroid, km_weighted_average, membership_interval)
from .mamdani import Rule, RuleBase, fuzzify, infer_t1, infer_t2, label_output
from .partitions import INPUT_ORDER, STYLES, collapse_fou, default_variables, load_partitions
from .pipeline import PipelineConfig, run_pipeline
from .stats import DescriptiveSummary, describe, describe_by_class

__version__ = "0.1.0"
