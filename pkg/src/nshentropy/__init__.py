from __future__ import annotations

from ._src.adapter import Adapter as Adapter
from ._src.barcode import Barcode as Barcode
from ._src.barcode import Interval as Interval
from ._src.barcode import is_finite as is_finite
from ._src.barcode import is_normalized as is_normalized
from ._src.barcode import is_origin as is_origin
from ._src.barcode import merge_barcodes as merge_barcodes
from ._src.barcode import normalize as normalize
from ._src.barcode import project_origin as project_origin
from ._src.barcode import psi as psi
from ._src.barcode import scale_barcode as scale_barcode
from ._src.barcode import truncate_absolute as truncate_absolute
from ._src.barcode import truncate_relative as truncate_relative
from ._src.config import Config as Config
from ._src.config import ConfigDict as ConfigDict
from ._src.entropy import MAX_RELATIVE_ERROR as MAX_RELATIVE_ERROR
from ._src.entropy import EntropyReport as EntropyReport
from ._src.entropy import bottleneck_hypothesis_holds as bottleneck_hypothesis_holds
from ._src.entropy import bound_table as bound_table
from ._src.entropy import entropy_difference as entropy_difference
from ._src.entropy import entropy_stability_bound as entropy_stability_bound
from ._src.entropy import filter_stability_bound as filter_stability_bound
from ._src.entropy import max_average_length as max_average_length
from ._src.entropy import persistent_entropy as persistent_entropy
from ._src.entropy import relative_bound as relative_bound
from ._src.entropy import shannon_entropy as shannon_entropy
from ._src.entropy import shannon_stability_bound as shannon_stability_bound
from ._src.errors import InputError as InputError
from ._src.errors import PreconditionError as PreconditionError
from ._src.fixtures import circle_sample as circle_sample
from ._src.fixtures import pattern_cloud as pattern_cloud
from ._src.fixtures import pattern_family as pattern_family
from ._src.jobs import JobConfig as JobConfig
from ._src.jobs import run as run
from ._src.metric import Matching as Matching
from ._src.metric import bottleneck as bottleneck
from ._src.metric import matching as matching
from ._src.metric import pad as pad
from ._src.metric import relative_error as relative_error
from ._src.metric import wasserstein as wasserstein
from ._src.missing import MISSING as MISSING
from ._src.missing import AllowMissing as AllowMissing
from ._src.policy import DropPolicyConfig as DropPolicyConfig
from ._src.policy import InfPolicyConfig as InfPolicyConfig
from ._src.policy import PhiPolicyConfig as PhiPolicyConfig
from ._src.policy import TauPolicyConfig as TauPolicyConfig
from ._src.policy import inf_policy_registry as inf_policy_registry
from ._src.registry import Registry as Registry
from ._src.registry import RegistryConfig as RegistryConfig
from ._src.rips import DistanceMatrix as DistanceMatrix
from ._src.rips import FilteredComplex as FilteredComplex
from ._src.rips import Simplex as Simplex
from ._src.rips import betti_numbers as betti_numbers
from ._src.rips import diameter as diameter
from ._src.rips import pairwise_distances as pairwise_distances
from ._src.rips import persistence as persistence
from ._src.rips import rips_complex as rips_complex
from ._src.summary import AliveProfile as AliveProfile
from ._src.summary import StepFunction as StepFunction
from ._src.summary import es_function as es_function
from ._src.summary import feature_ranking as feature_ranking
from ._src.summary import l1_distance as l1_distance
from ._src.summary import l1_norm as l1_norm
from ._src.summary import nes_function as nes_function
from ._src.summary import pooled_tes_function as pooled_tes_function
from ._src.summary import tes_function as tes_function
