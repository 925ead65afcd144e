from dataclasses import asdict, dataclass

import numpy as np

from core.abstract import CampaignSpecError
from core.constants import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_NOISE_CLIP,
    NOISE_RESAMPLING,
    POSSIBLE_MODES,
    RNG_ALGORITHM,
)
from core.utils import make_rng

from .circuit import NeuronSpec


@dataclass(frozen=True)
class SimConfig:
    """Neuron dynamics shared by every evaluation

    Args:
        beta (float): Membrane retention factor in (0, 1]. Ignored in `ideal` mode.
        sigma (float): Standard deviation of the Gaussian current noise.
        seed (int): Seed of the counter-based generator.
        mode (str): `ideal` (integrate-and-fire) or `lif` (leaky).
        noise_clip (float | None): Noise samples are clipped to +-noise_clip*sigma.
            `None` keeps the unbounded Gaussian.
        chunk_size (int): Samples evaluated together by the batch simulator.
    """

    beta: float = 1.0
    sigma: float = 0.0
    seed: int = 0
    mode: POSSIBLE_MODES = "ideal"
    noise_clip: float | None = DEFAULT_NOISE_CLIP
    chunk_size: int = DEFAULT_CHUNK_SIZE

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise CampaignSpecError(f"beta must be in (0, 1], got {self.beta}")
        if self.sigma < 0:
            raise CampaignSpecError(f"sigma must be >= 0, got {self.sigma}")
        if self.mode not in ("ideal", "lif"):
            raise CampaignSpecError(f"Unknown neuron mode: {self.mode}")
        if self.noise_clip is not None and self.noise_clip <= 0:
            raise CampaignSpecError(f"noise_clip must be positive, got {self.noise_clip}")
        if self.chunk_size < 1:
            raise CampaignSpecError(f"chunk_size must be >= 1, got {self.chunk_size}")

    @property
    def retention(self) -> float:
        """Decay applied to the membrane between steps (exactly 1.0 in ideal mode)"""
        return 1.0 if self.mode == "ideal" else self.beta

    @property
    def rng_algorithm(self) -> str:
        return RNG_ALGORITHM

    def rng(self, *stream: int) -> np.random.Generator:
        return make_rng(self.seed, *stream)

    def noise(self, rng: np.random.Generator | None, shape) -> np.ndarray | None:
        """Draw one noise sample per entry of `shape` (None when noiseless)

        Raises:
            CampaignSpecError: Noise is on and no generator was given
        """
        if self.sigma == 0:
            return None
        if rng is None:
            # a generator built here would restart the stream on every call
            raise CampaignSpecError(
                f"sigma={self.sigma} needs a noise generator, see `SimConfig.rng`"
            )
        sample = rng.normal(0.0, self.sigma, size=shape)
        if self.noise_clip is not None:
            bound = self.noise_clip * self.sigma
            sample = np.clip(sample, -bound, bound)
        return sample

    def echo(self) -> dict:
        """Configuration echo recorded in the reports"""
        return {
            **asdict(self),
            "retention": self.retention,
            "rng_algorithm": self.rng_algorithm,
            "noise_resampling": NOISE_RESAMPLING,
        }

    @classmethod
    def from_settings(cls, settings: dict, **overrides) -> "SimConfig":
        """Build the config from the `[simulation]` section of the settings"""
        section = {**settings.get("simulation", {}), **overrides}
        beta = float(section.get("beta", 1.0))
        mode = section.get("mode", "ideal")
        if beta < 1.0 and mode == "ideal":
            mode = "lif"
        clip = section.get("noise_clip", DEFAULT_NOISE_CLIP)
        return cls(
            beta=beta,
            sigma=float(section.get("sigma", 0.0)),
            seed=int(section.get("seed", 0)),
            mode=mode,
            noise_clip=None if clip in (None, 0, "none") else float(clip),
            chunk_size=int(section.get("chunk_size", DEFAULT_CHUNK_SIZE)),
        )


def step_neuron(
    v: float,
    current: float,
    spec: NeuronSpec,
    cfg: SimConfig,
    rng: np.random.Generator | None = None,
) -> tuple[float, int]:
    """Advance one neuron by one step

    `V' = beta * V + I + noise`, spike when `V' >= threshold`, then the soft reset
    subtracts the threshold from the potential.

    Args:
        v (float): Potential before the step
        current (float): Summed synaptic current of the step
        spec (NeuronSpec): Neuron
        cfg (SimConfig): Dynamics
        rng (np.random.Generator, optional): Noise source, kept by the caller across
            steps. Required when `cfg.sigma > 0`.

    Returns:
        tuple[float, int]: (potential after the step, spike)

    Raises:
        CampaignSpecError: Noise is on and `rng` is missing
    """
    noise = cfg.noise(rng, None)
    if noise is not None:
        current = current + float(noise)
    v = cfg.retention * v + current
    spike = int(v >= spec.threshold)
    if spike and spec.reset == "soft":
        v -= spec.threshold
    return v, spike
