"""Run configuration files: line-based ``key = value`` with # comments.

Unknown keys are fatal so a typo can never silently fall back to a
default. Missing keys take the documented defaults below, which
correspond to the GMM reference run (5 modes, 10 dims, 2000 samples,
beta=1, alpha=1, K=50, 150 epochs of batch 100).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .data import Dataset, gmm_generate, load_idx
from .errors import ConfigError
from .trainer import TrainConfig

_DEFAULTS = {
    "beta": "1.0",
    "alpha": "1.0",
    "k_pseudo": "50",
    "dim_z": "2",
    "hidden": "256,256",
    "batch": "100",
    "epochs": "150",
    "lr": "0.001",
    "adam_beta1": "0.9",
    "adam_beta2": "0.999",
    "seed": "0",
    "nearest_mode": "data",
    "dataset": "gmm",
    "gmm_modes": "5",
    "gmm_dim": "10",
    "gmm_n": "2000",
    "idx_images": "",
    "idx_labels": "",
    "decoder_activation": "auto",
    "output_dir": "swae_out",
}


@dataclass
class RunConfig:
    beta: float
    alpha: float
    k_pseudo: int
    dim_z: int
    hidden: tuple[int, ...]
    batch: int
    epochs: int
    lr: float
    adam_beta1: float
    adam_beta2: float
    seed: int
    nearest_mode: str
    dataset: str
    gmm_modes: int
    gmm_dim: int
    gmm_n: int
    idx_images: str
    idx_labels: str
    decoder_activation: str
    output_dir: str

    def resolved_output_dir(self) -> str:
        """Config value, unless SWAE_OUTPUT_DIR overrides it."""
        return os.environ.get("SWAE_OUTPUT_DIR") or self.output_dir

    def load_dataset(self) -> Dataset:
        if self.dataset == "gmm":
            return gmm_generate(self.gmm_modes, self.gmm_dim, self.gmm_n,
                                self.seed)
        return load_idx(self.idx_images, self.idx_labels)

    def train_config(self, dim_x: int) -> TrainConfig:
        try:
            return TrainConfig(
                dim_x=dim_x, dim_z=self.dim_z, beta=self.beta,
                alpha=self.alpha, k_pseudo=self.k_pseudo, hidden=self.hidden,
                batch_size=self.batch, epochs=self.epochs, lr=self.lr,
                adam_beta1=self.adam_beta1, adam_beta2=self.adam_beta2,
                seed=self.seed, nearest_mode=self.nearest_mode,
                decoder_activation=self.decoder_activation)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _convert(key: str, raw: str, kind, what: str):
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: expected {what}, got {raw!r}") from exc


def parse_run_config(text: str) -> RunConfig:
    values = dict(_DEFAULTS)
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = raw

    cfg = RunConfig(
        beta=_convert("beta", values["beta"], float, "a real"),
        alpha=_convert("alpha", values["alpha"], float, "a real"),
        k_pseudo=_convert("k_pseudo", values["k_pseudo"], int, "an integer"),
        dim_z=_convert("dim_z", values["dim_z"], int, "an integer"),
        hidden=tuple(
            _convert("hidden", w.strip(), int, "an integer")
            for w in values["hidden"].split(",") if w.strip()),
        batch=_convert("batch", values["batch"], int, "an integer"),
        epochs=_convert("epochs", values["epochs"], int, "an integer"),
        lr=_convert("lr", values["lr"], float, "a real"),
        adam_beta1=_convert("adam_beta1", values["adam_beta1"], float,
                            "a real"),
        adam_beta2=_convert("adam_beta2", values["adam_beta2"], float,
                            "a real"),
        seed=_convert("seed", values["seed"], int, "an integer"),
        nearest_mode=values["nearest_mode"],
        dataset=values["dataset"],
        gmm_modes=_convert("gmm_modes", values["gmm_modes"], int,
                           "an integer"),
        gmm_dim=_convert("gmm_dim", values["gmm_dim"], int, "an integer"),
        gmm_n=_convert("gmm_n", values["gmm_n"], int, "an integer"),
        idx_images=values["idx_images"],
        idx_labels=values["idx_labels"],
        decoder_activation=values["decoder_activation"],
        output_dir=values["output_dir"],
    )
    if cfg.dataset not in ("gmm", "idx"):
        raise ConfigError(f"dataset must be gmm or idx, got {cfg.dataset!r}")
    if cfg.dataset == "idx" and (not cfg.idx_images or not cfg.idx_labels):
        raise ConfigError("dataset=idx requires idx_images and idx_labels")
    if cfg.nearest_mode not in ("data", "latent"):
        raise ConfigError(
            f"nearest_mode must be data or latent, got {cfg.nearest_mode!r}")
    if cfg.decoder_activation == "auto":
        cfg.decoder_activation = "sigmoid" if cfg.dataset == "idx" \
            else "identity"
    if cfg.decoder_activation not in ("sigmoid", "identity"):
        raise ConfigError("decoder_activation must be auto, sigmoid "
                          "or identity")
    return cfg


def read_run_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_run_config(text)
