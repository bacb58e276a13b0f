from .ablation import AblationRow, run_ablation, write_reports
from .config import ExperimentConfig, NoiseModel, PoseSampler, config_from_dict, load_config
from .io import load_cmap, load_cset, save_cmap, save_cset
from .scene import corrupt_map, generate_scene

__all__ = [
    "AblationRow",
    "ExperimentConfig",
    "NoiseModel",
    "PoseSampler",
    "config_from_dict",
    "corrupt_map",
    "generate_scene",
    "load_cmap",
    "load_config",
    "load_cset",
    "run_ablation",
    "save_cmap",
    "save_cset",
    "write_reports",
]
