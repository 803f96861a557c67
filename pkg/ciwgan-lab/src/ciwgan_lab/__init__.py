"""ciwgan-lab: toy-scale categorical waveform GAN training and export.

Trains a generator whose latent input is uniform noise plus a 4-way
categorical code, with a Q-network recovering the code from generated
audio. Exports generated WAVs and channel-averaged intermediate-layer
audio with JSONL manifests that downstream analysis toolkits ingest.
"""

from .data import load_dataset
from .errors import CheckpointMismatchError, DataError, LabError, TrainingDivergedError
from .generate import LayerTapConfig, extract_layer_audio, generate, load_generator, reduce_tap
from .latent import (
    LatentSpec,
    generation_codes,
    make_generator_seeded,
    sample_one_hot,
    sample_z,
)
from .models import (
    OUTPUT_SAMPLES,
    SAMPLE_RATE,
    TAP_LAYERS,
    TAP_LENGTHS,
    Discriminator,
    Generator,
    QNetwork,
    build_models,
)
from .train import TrainConfig, TrainResult, train
from .wavio import read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "LatentSpec",
    "sample_z",
    "sample_one_hot",
    "generation_codes",
    "make_generator_seeded",
    "Generator",
    "Discriminator",
    "QNetwork",
    "build_models",
    "OUTPUT_SAMPLES",
    "SAMPLE_RATE",
    "TAP_LAYERS",
    "TAP_LENGTHS",
    "TrainConfig",
    "TrainResult",
    "train",
    "generate",
    "extract_layer_audio",
    "load_generator",
    "reduce_tap",
    "LayerTapConfig",
    "load_dataset",
    "read_wav",
    "write_wav",
    "LabError",
    "DataError",
    "CheckpointMismatchError",
    "TrainingDivergedError",
]
