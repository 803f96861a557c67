"""Generator, discriminator, and Q-network for 16384-sample waveforms.

The generator maps (z ++ c) through a dense reshape and five stride-4
transposed convolutions (kernel 25) to a tanh-bounded waveform at 16 kHz.
The discriminator mirrors it with strided convolutions, leaky ReLU, and
phase shuffle; the Q-network reuses the same trunk topology with separate
weights and emits one logit per categorical slot.

Layer numbering follows the upsampling stack: Conv1..Conv5 with output
lengths 64, 256, 1024, 4096, 16384. Taps target Conv2-Conv4, whose lengths
divide the output length exactly, so nearest-repeat upsampling is integral.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from .latent import LatentSpec

OUTPUT_SAMPLES = 16384
SAMPLE_RATE = 16000
KERNEL = 25
STRIDE = 4
TAP_LAYERS = (2, 3, 4)
TAP_LENGTHS = {2: 256, 3: 1024, 4: 4096}


def generator_channels(model_size: int) -> list[int]:
    return [16 * model_size, 8 * model_size, 4 * model_size, 2 * model_size, model_size]


def _init_layer(module: nn.Module, gain: float) -> None:
    """Variance-preserving normal init with zero bias.

    Default init collapses this deep a ReLU stack at small widths (a layer
    whose biases land negative zeroes every activation, making the output
    constant in z), so weights are scaled by the effective fan-in and
    biases start at zero.
    """
    if isinstance(module, nn.ConvTranspose1d):
        fan = module.in_channels * module.kernel_size[0] / module.stride[0]
    elif isinstance(module, nn.Conv1d):
        fan = module.in_channels * module.kernel_size[0]
    elif isinstance(module, nn.Linear):
        fan = module.in_features
    else:
        return
    nn.init.normal_(module.weight, 0.0, gain / math.sqrt(fan))
    if module.bias is not None:
        nn.init.zeros_(module.bias)


class Generator(nn.Module):
    def __init__(self, spec: LatentSpec, model_size: int = 64):
        super().__init__()
        self.spec = spec
        self.model_size = model_size
        chans = generator_channels(model_size)
        self.fc = nn.Linear(spec.total_dim, 16 * chans[0])
        ups = []
        for i in range(4):
            ups.append(
                nn.ConvTranspose1d(chans[i], chans[i + 1], KERNEL, STRIDE, 11,
                                   output_padding=1)
            )
        self.ups = nn.ModuleList(ups)
        self.out = nn.ConvTranspose1d(chans[4], 1, KERNEL, STRIDE, 11, output_padding=1)
        _init_layer(self.fc, math.sqrt(2.0))
        for up in self.ups:
            _init_layer(up, math.sqrt(2.0))
        _init_layer(self.out, 1.0)

    def forward(
        self, latent: torch.Tensor, return_taps: bool = False
    ) -> torch.Tensor | tuple[torch.Tensor, dict[int, torch.Tensor]]:
        h = self.fc(latent).reshape(latent.shape[0], -1, 16)
        h = torch.relu(h)
        taps: dict[int, torch.Tensor] = {}
        for i, up in enumerate(self.ups, start=1):
            h = torch.relu(up(h))
            if i in TAP_LAYERS:
                taps[i] = h
        audio = torch.tanh(self.out(h))
        if return_taps:
            return audio, taps
        return audio


class PhaseShuffle(nn.Module):
    """Randomly shift each item by up to ``radius`` samples, reflect-padded."""

    def __init__(self, radius: int = 2):
        super().__init__()
        self.radius = radius

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if self.radius == 0 or not self.training:
            return x
        shifts = torch.randint(-self.radius, self.radius + 1, (x.shape[0],))
        out = torch.empty_like(x)
        for i, shift in enumerate(shifts.tolist()):
            if shift == 0:
                out[i] = x[i]
            elif shift > 0:
                out[i] = F.pad(x[i], (shift, 0), mode="reflect")[..., : x.shape[-1]]
            else:
                out[i] = F.pad(x[i], (0, -shift), mode="reflect")[..., -x.shape[-1] :]
        return out


class _Trunk(nn.Module):
    """Strided downsampling stack shared (in topology) by D and Q."""

    def __init__(self, model_size: int, phase_shuffle: int):
        super().__init__()
        chans = [1, model_size, 2 * model_size, 4 * model_size, 8 * model_size,
                 16 * model_size]
        self.convs = nn.ModuleList(
            [nn.Conv1d(chans[i], chans[i + 1], KERNEL, STRIDE, 11) for i in range(5)]
        )
        for conv in self.convs:
            _init_layer(conv, math.sqrt(2.0))
        self.shuffle = PhaseShuffle(phase_shuffle)
        self.out_features = 16 * 16 * model_size

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = x
        for i, conv in enumerate(self.convs):
            h = F.leaky_relu(conv(h), 0.2)
            if i < len(self.convs) - 1:
                h = self.shuffle(h)
        return h.flatten(1)


class Discriminator(nn.Module):
    def __init__(self, model_size: int = 64, phase_shuffle: int = 2):
        super().__init__()
        self.model_size = model_size
        self.trunk = _Trunk(model_size, phase_shuffle)
        self.head = nn.Linear(self.trunk.out_features, 1)
        _init_layer(self.head, 1.0)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.trunk(x)).squeeze(1)


class QNetwork(nn.Module):
    """Recovers the categorical code from generated audio (separate trunk)."""

    def __init__(self, spec: LatentSpec, model_size: int = 64):
        super().__init__()
        self.model_size = model_size
        self.trunk = _Trunk(model_size, phase_shuffle=0)
        self.head = nn.Linear(self.trunk.out_features, spec.c_dim)
        _init_layer(self.head, 1.0)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.trunk(x))


def build_models(
    spec: LatentSpec, model_size: int = 64, phase_shuffle: int = 2
) -> tuple[Generator, Discriminator, QNetwork]:
    """Construct the generator / discriminator / Q-network triple."""
    return (
        Generator(spec, model_size),
        Discriminator(model_size, phase_shuffle),
        QNetwork(spec, model_size),
    )
