"""Latent input construction: uniform noise plus a 4-way categorical code.

Training uses strictly one-hot codes; generation sets the active slot to
``generation_scale`` (2 by default), outside the (-1, 1) range seen in
training, which makes the encoded acoustic property dominate the output.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .errors import LabError


@dataclass
class LatentSpec:
    z_dim: int = 96
    c_dim: int = 4
    generation_scale: float = 2.0

    def __post_init__(self) -> None:
        if self.c_dim != 4:
            raise LabError(f"c_dim is fixed at 4, got {self.c_dim}")
        if self.z_dim < 1:
            raise LabError(f"z_dim must be positive, got {self.z_dim}")

    @property
    def total_dim(self) -> int:
        return self.z_dim + self.c_dim


def sample_z(n: int, spec: LatentSpec, generator: torch.Generator) -> torch.Tensor:
    """n uniform(-1, 1) noise vectors."""
    return torch.rand(n, spec.z_dim, generator=generator) * 2.0 - 1.0


def sample_one_hot(n: int, spec: LatentSpec, generator: torch.Generator) -> torch.Tensor:
    """n strictly one-hot training codes."""
    idx = torch.randint(0, spec.c_dim, (n,), generator=generator)
    codes = torch.zeros(n, spec.c_dim)
    codes[torch.arange(n), idx] = 1.0
    return codes


def generation_codes(spec: LatentSpec) -> torch.Tensor:
    """The four generation codes: one slot at generation_scale, rest zero."""
    return torch.eye(spec.c_dim) * spec.generation_scale


def make_generator_seeded(seed: int) -> torch.Generator:
    gen = torch.Generator()
    gen.manual_seed(seed)
    return gen
