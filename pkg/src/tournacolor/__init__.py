"""Colouring tournaments that exclude a fixed pattern, with checkable stages."""

from .core import (Coloring, EmbeddingCertificate, Tournament, VertexSet, directed_density,
                   greedy_log_transitive, is_transitive, random_tournament, substitute, verify_coloring)
from .errors import TournaError
from .patterns import (CATALOG, catalog, find_constellation_ordering, find_galaxy_ordering,
                       is_constellation_ordering, is_galaxy_ordering, zeta_map)
from .sequences import MSequence, SequenceParams, validate_sequence
from .oracles import contains_subtournament, exact_chromatic, max_transitive_exact
from .engine import (EngineConfig, color_h_free, color_with_fallback, find_l_sequence, poly_trans,
                     strict_constants)

__version__ = "0.1.0"
