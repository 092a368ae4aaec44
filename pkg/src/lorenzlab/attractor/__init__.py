from .geometry import GeometryReport, LevelGeometry, geometry_report, level_geometry
from .levels import LevelRecord, LevelStructure, build_levels, cycle_intervals, first_return_time, return_times
from .measure import birkhoff_measure, level_masses, physical_measure, window_masses

__all__ = [
    "GeometryReport",
    "LevelGeometry",
    "LevelRecord",
    "LevelStructure",
    "birkhoff_measure",
    "build_levels",
    "cycle_intervals",
    "first_return_time",
    "geometry_report",
    "level_geometry",
    "level_masses",
    "physical_measure",
    "return_times",
    "window_masses",
]
