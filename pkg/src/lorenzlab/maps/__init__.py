from .analysis import NonFlatConstants, fit_nonflat_constants, nonflat_violations
from .base import COLLISION_TOL, PRECISION_CAP, ItineraryWord, LorenzMap, Orbit, iterate_word
from .codec import dump_map, format_float, load_map
from .iterated import ClosedFormMap, IteratedMapDescriptor
from .restricted import RestrictedMap, restrict_rescale
from .standard import StandardFamilyMap

__all__ = [
    "COLLISION_TOL",
    "ClosedFormMap",
    "ItineraryWord",
    "IteratedMapDescriptor",
    "LorenzMap",
    "NonFlatConstants",
    "Orbit",
    "PRECISION_CAP",
    "RestrictedMap",
    "StandardFamilyMap",
    "dump_map",
    "fit_nonflat_constants",
    "format_float",
    "iterate_word",
    "load_map",
    "nonflat_violations",
    "restrict_rescale",
]
