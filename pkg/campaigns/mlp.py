"""Forward-only MLP demo built from FP8 linear layers."""

from pathlib import Path

import numpy as np
import pandas as pd

from linear.activation import spike_activation
from linear.engine import POSSIBLE_ENGINES, POSSIBLE_REDUCTIONS, linear_forward
from linear.tensor import Fp8Tensor, float_table
from spiking.neuron import SimConfig

from .base import BaseCampaign
from .data_loader import WEIGHTS_FILE, load_samples, load_weights

DEFAULT_SAMPLES = 1000

ACTIVATION = (
    "spike: 1.0 where the pre-activation is positive, else +0 "
    "(OR tree over the magnitude bits gated by NOT sign, 4 levels)"
)


def mlp_forward(
    x: Fp8Tensor,
    layers: list[Fp8Tensor],
    mode: POSSIBLE_REDUCTIONS = "tree",
    engine: POSSIBLE_ENGINES = "spiking",
    cfg: SimConfig = SimConfig(),
    saturate: bool = True,
) -> list[np.ndarray]:
    """Every layer output (the hidden ones after the spike activation)

    Returns:
        list[np.ndarray]: (batch, D_out) codes per layer, logits last
    """
    outputs = []
    for i, w in enumerate(layers):
        y, _ = linear_forward(x, w, mode, engine, cfg, saturate)
        codes = y.array
        if i < len(layers) - 1:
            codes = spike_activation(codes, engine, cfg)
        outputs.append(codes)
        x = Fp8Tensor.from_codes(codes)
    return outputs


def predictions(logits: np.ndarray) -> np.ndarray:
    """Argmax of FP8 logits (nan ranks lowest, ties pick the first)"""
    values = float_table()[logits]
    return np.nan_to_num(values, nan=-np.inf).argmax(axis=-1)


class MlpDemoCampaign(BaseCampaign):
    """Tree-reduced MLP against the order-matched reference forward"""

    name = "mlp-demo"

    def run(self) -> dict:
        layers = load_weights(Path(self.options.get("weights") or WEIGHTS_FILE))
        shapes = [[w.shape[1], w.shape[0]] for w in layers]
        n = int(self.options.get("samples") or DEFAULT_SAMPLES)
        images = self.options.get("images")
        x, source, problem = load_samples(Path(images) if images else None, self.cfg.seed, n)
        if problem:
            self.reporter.warn("Image data unusable, synthetic samples used", problem)
        self.reporter.info(
            f"{x.shape[0]} {source} samples through layers {shapes}", ACTIVATION
        )
        if self.fast_check:
            self.equivalence_proven()

        tree = mlp_forward(x, layers, "tree", self.engine, self.cfg, self.saturate)
        reference = mlp_forward(x, layers, "tree", "oracle", SimConfig(), self.saturate)
        sequential = mlp_forward(x, layers, "sequential", self.engine, self.cfg, self.saturate)

        tree_pred, ref_pred, seq_pred = (predictions(o[-1]) for o in (tree, reference, sequential))
        agreement = float((tree_pred == ref_pred).mean())
        bit_match = float(
            np.concatenate([(t == s).ravel() for t, s in zip(tree, sequential)]).mean()
        )
        seq_agreement = float((tree_pred == seq_pred).mean())

        self.reporter.check(
            "tree-vs-tree argmax agreement",
            agreement == 1.0,
            f"{agreement:.2%} of {x.shape[0]} samples against the oracle forward",
        )
        self.reporter.info(
            f"Tree-vs-sequential activations match {bit_match:.2%}",
            f"argmax agreement {seq_agreement:.2%}; accumulation order changes FP8 rounding",
        )
        self.reporter.increment_stat("evaluations", x.shape[0])
        self.reporter.increment_stat("mismatches", int((tree_pred != ref_pred).sum()))
        self.reporter.add_table(
            "predictions",
            pd.DataFrame({"tree": tree_pred, "reference": ref_pred, "sequential": seq_pred}),
        )

        return {
            "engine": self.reporter.engine,
            "layer_shapes": shapes,
            "data_source": source,
            "samples": int(x.shape[0]),
            "activation": ACTIVATION,
            "argmax_agreement": agreement,
            "tree_vs_sequential_match": bit_match,
            "tree_vs_sequential_argmax": seq_agreement,
        }
