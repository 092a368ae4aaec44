from .loader import load_model, load_yaml
from .types import ExperimentConfig, ProjectConfig, bins_for

__all__ = ["ExperimentConfig", "ProjectConfig", "bins_for", "load_model", "load_yaml"]
