"""Experiment configuration: one JSON document, validated against a schema."""

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from ..correspondence import MODES
from ..geometry import CameraIntrinsics, load_mesh
from ..geometry import shapes
from ..loss_math import LossConfig
from ..pnp import RansacConfig


@dataclass(frozen=True)
class PoseSampler:
    translation_min: tuple = (-0.02, -0.02, 0.55)
    translation_max: tuple = (0.02, 0.02, 0.75)


@dataclass(frozen=True)
class NoiseModel:
    coord_sigma: float = 0.0
    outlier_rate: float = 0.0
    outlier_scale: float = 0.5
    codec_quantize: bool = False

    @property
    def is_zero(self):
        return self.coord_sigma == 0 and self.outlier_rate == 0 and not self.codec_quantize


@dataclass(frozen=True)
class CorrespondenceOptions:
    d_bar: object = "auto"
    dbar_surfaces: str = "both"
    max_interp: int = 1000


DEFAULT_CAMERA = CameraIntrinsics(fx=320.0, fy=320.0, cx=64.0, cy=64.0, width=128, height=128)


@dataclass(frozen=True)
class ExperimentConfig:
    mesh: str
    symmetric: bool = False
    camera: CameraIntrinsics = DEFAULT_CAMERA
    pose_sampler: PoseSampler = PoseSampler()
    noise: NoiseModel = NoiseModel()
    modes: tuple = MODES
    scenes: int = 20
    seed: int = 0
    threads: int = 1
    correspondence: CorrespondenceOptions = CorrespondenceOptions()
    ransac: RansacConfig = RansacConfig()
    loss: LossConfig = LossConfig()
    auc_max_threshold: float = 0.10
    svg: bool = False
    base_dir: Path = field(default=Path("."), compare=False)

    def __post_init__(self):
        if self.scenes < 1:
            raise ValueError("scenes must be >= 1")
        if not self.modes:
            raise ValueError("modes must not be empty")
        bad = [m for m in self.modes if m not in MODES]
        if bad:
            raise ValueError(f"unknown modes {bad}")

    def with_overrides(self, seed=None, threads=None):
        changes = {}
        if seed is not None:
            changes["seed"] = seed
        if threads is not None:
            changes["threads"] = threads
        return replace(self, **changes) if changes else self

    def load_mesh(self):
        if self.mesh.startswith("builtin:"):
            return shapes.builtin(self.mesh.split(":", 1)[1])
        path = Path(self.mesh)
        if not path.is_absolute():
            path = self.base_dir / path
        return load_mesh(path)

    def to_dict(self):
        """Plain-JSON view (the form stored alongside results)."""
        r = self.ransac
        return {
            "mesh": self.mesh,
            "symmetric": self.symmetric,
            "camera": {k: getattr(self.camera, k) for k in ("fx", "fy", "cx", "cy", "width", "height")},
            "pose_sampler": {
                "translation_min": list(self.pose_sampler.translation_min),
                "translation_max": list(self.pose_sampler.translation_max),
            },
            "noise": {
                "coord_sigma": self.noise.coord_sigma,
                "outlier_rate": self.noise.outlier_rate,
                "outlier_scale": self.noise.outlier_scale,
                "codec_quantize": self.noise.codec_quantize,
            },
            "modes": list(self.modes),
            "scenes": self.scenes,
            "seed": self.seed,
            "correspondence": {
                "d_bar": self.correspondence.d_bar,
                "dbar_surfaces": self.correspondence.dbar_surfaces,
                "max_interp": self.correspondence.max_interp,
            },
            "ransac": {
                "iterations": r.iterations,
                "threshold": r.threshold,
                "sample_size": r.sample_size,
                "refine": r.refine,
                "scoring": r.scoring,
                "score_all_sources": r.score_all_sources,
            },
            "loss": {"sigma": self.loss.sigma, "gamma": self.loss.gamma},
            "auc_max_threshold": self.auc_max_threshold,
            "svg": self.svg,
        }


def schema():
    return json.loads(resources.files("hcce").joinpath("data/config.schema.json").read_text())


def config_from_dict(doc, base_dir="."):
    try:
        jsonschema.validate(doc, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(k) for k in exc.absolute_path) or "<root>"
        raise ValueError(f"invalid config at {where}: {exc.message}") from None
    cam = doc.get("camera")
    ps = doc.get("pose_sampler", {})
    default_ps = PoseSampler()
    sampler = PoseSampler(
        tuple(ps.get("translation_min", default_ps.translation_min)),
        tuple(ps.get("translation_max", default_ps.translation_max)),
    )
    if np.any(np.asarray(sampler.translation_min) > np.asarray(sampler.translation_max)):
        raise ValueError("translation_min exceeds translation_max")
    return ExperimentConfig(
        mesh=doc["mesh"],
        symmetric=doc.get("symmetric", False),
        camera=CameraIntrinsics(**cam) if cam else DEFAULT_CAMERA,
        pose_sampler=sampler,
        noise=NoiseModel(**doc.get("noise", {})),
        modes=tuple(doc.get("modes", MODES)),
        scenes=doc.get("scenes", 20),
        seed=doc.get("seed", 0),
        threads=doc.get("threads", 1),
        correspondence=CorrespondenceOptions(**doc.get("correspondence", {})),
        ransac=RansacConfig(**doc.get("ransac", {})),
        loss=LossConfig(**doc.get("loss", {})),
        auc_max_threshold=doc.get("auc_max_threshold", 0.10),
        svg=doc.get("svg", False),
        base_dir=Path(base_dir),
    )


def load_config(path):
    path = Path(path)
    with open(path) as fh:
        doc = json.load(fh)
    return config_from_dict(doc, base_dir=path.parent)
