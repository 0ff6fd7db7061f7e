"""Curriculum trainer: four stages of decreasing learning rate, each picking
up the weights of the previous one.

Data comes in as a manifest CSV with input_path/target_path columns pointing
at UBF files: inputs are aligned channel stacks in [-1, 1], targets are
envelope images in [0, 1]. The validation split is drawn at the source-item
level (not the patch level) so patches of one phantom never straddle the
split.
"""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass

import numpy as np
import torch

from .errors import ManifestEmpty, NanLoss, ShapeMismatch
from .losses import LOSS_KINDS, curriculum_loss
from .network import NetworkConfig, build_network, forward_padded
from .ubf import ubf_read


@dataclass(frozen=True)
class CurriculumStage:
    loss_kind: str
    learning_rate: float
    epochs: int

    def __post_init__(self):
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.loss_kind!r}")
        if self.learning_rate <= 0 or self.epochs < 1:
            raise ValueError("learning_rate must be > 0 and epochs >= 1")


def default_curriculum() -> list[CurriculumStage]:
    return [
        CurriculumStage("mse", 1e-3, 25),
        CurriculumStage("mae", 5e-4, 50),
        CurriculumStage("l0.4", 1e-4, 25),
        CurriculumStage("l0.2", 1e-5, 25),
    ]


def validate_stages(stages) -> None:
    kinds = [s.loss_kind for s in stages]
    if kinds != list(LOSS_KINDS):
        raise ValueError(
            f"stages must run exactly {LOSS_KINDS} in order, got {kinds}"
        )
    rates = [s.learning_rate for s in stages]
    if any(b >= a for a, b in zip(rates, rates[1:])):
        raise ValueError("learning rates must be strictly decreasing")


@dataclass(frozen=True)
class TrainingPair:
    input: np.ndarray   # (channels, H, W) in [-1, 1]
    target: np.ndarray  # (H, W) in [0, 1]
    item: str           # source-phantom identity for split grouping

    def __post_init__(self):
        if self.input.ndim != 3 or self.target.ndim != 2:
            raise ShapeMismatch("input must be 3-D, target 2-D")
        if self.input.shape[1:] != self.target.shape:
            raise ShapeMismatch(
                f"input spatial dims {self.input.shape[1:]} vs target "
                f"{self.target.shape}"
            )
        if np.max(np.abs(self.input)) > 1 + 1e-6:
            raise ValueError("input values must lie in [-1, 1]")
        if self.target.min() < -1e-6 or self.target.max() > 1 + 1e-6:
            raise ValueError("target values must lie in [0, 1]")


def load_manifest(path) -> list[TrainingPair]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ManifestEmpty(f"{path}: no training pairs")
    base = os.path.dirname(os.path.abspath(path))

    def _resolve(p):
        return p if os.path.isabs(p) else os.path.normpath(os.path.join(base, p))

    pairs = []
    for row in rows:
        inp, meta = ubf_read(_resolve(row["input_path"]))
        tgt, _ = ubf_read(_resolve(row["target_path"]))
        item = meta.get("item", row["input_path"])
        pairs.append(TrainingPair(np.asarray(inp), np.asarray(tgt), item))
    return pairs


def split_pairs(pairs, val_fraction, seed):
    """Group pairs by source item, hold out ~val_fraction of the items."""
    if val_fraction <= 0:
        return list(pairs), []
    items = sorted({p.item for p in pairs})
    rng = np.random.default_rng(seed)
    rng.shuffle(items)
    n_val = max(1, int(round(val_fraction * len(items))))
    val_items = set(items[:n_val])
    train = [p for p in pairs if p.item not in val_items]
    val = [p for p in pairs if p.item in val_items]
    if not train:
        raise ManifestEmpty("validation split left no training pairs")
    return train, val


def _save_checkpoint(path, model, config: NetworkConfig, stage_idx: int):
    blob = {"model": model.state_dict(), "config": config.to_dict(),
            "stage": stage_idx}
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".ckpt-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            torch.save(blob, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _epoch_pass(model, batches, kind, optimizer=None):
    """One pass over the batches; returns (mean stage loss, mean MSE).

    The MSE is tracked in every stage as a scale-free progress monitor: the
    fractional-power stage losses bottom out at eps^(p/2), so their absolute
    values are not comparable across stages.
    """
    training = optimizer is not None
    model.train(training)
    loss_sum = mse_sum = count = 0
    for xb, yb in batches:
        if training:
            optimizer.zero_grad()
            pred = forward_padded(model, xb)
            loss = curriculum_loss(pred, yb, kind)
        else:
            with torch.no_grad():
                pred = forward_padded(model, xb)
                loss = curriculum_loss(pred, yb, kind)
        if not torch.isfinite(loss):
            raise NanLoss("non-finite loss")
        if training:
            loss.backward()
            optimizer.step()
        n = xb.shape[0]
        loss_sum += float(loss.detach()) * n
        with torch.no_grad():
            mse_sum += float(((pred - yb) ** 2).mean()) * n
        count += n
    return loss_sum / count, mse_sum / count


def _batches(pairs, batch_size, generator=None, device="cpu"):
    order = (torch.randperm(len(pairs), generator=generator).tolist()
             if generator is not None else range(len(pairs)))
    order = list(order)
    for start in range(0, len(order), batch_size):
        chunk = [pairs[i] for i in order[start:start + batch_size]]
        xb = torch.as_tensor(np.stack([p.input for p in chunk]),
                             dtype=torch.float32, device=device)
        yb = torch.as_tensor(np.stack([p.target for p in chunk]),
                             dtype=torch.float32, device=device)
        yield xb, yb


def train(manifest_path, stages, config: NetworkConfig, out_dir, seed=0,
          batch_size=2, val_fraction=0.1, device="cpu"):
    """Run the staged curriculum; returns (final checkpoint path, history).

    Writes loss_log.csv (stage, epoch, split, loss) and one checkpoint per
    stage into out_dir. History rows additionally carry the MSE monitor.
    """
    validate_stages(stages)
    pairs = load_manifest(manifest_path)
    train_pairs, val_pairs = split_pairs(pairs, val_fraction, seed)
    os.makedirs(out_dir, exist_ok=True)

    torch.manual_seed(seed)
    model = build_network(config).to(device)
    gen = torch.Generator().manual_seed(seed)

    history = []
    log_path = os.path.join(out_dir, "loss_log.csv")
    ckpt_path = None
    with open(log_path, "w", newline="", encoding="utf-8") as log:
        writer = csv.writer(log)
        writer.writerow(["stage", "epoch", "split", "loss"])
        for si, stage in enumerate(stages):
            optimizer = torch.optim.AdamW(model.parameters(),
                                          lr=stage.learning_rate,
                                          betas=(0.9, 0.999))
            for epoch in range(stage.epochs):
                try:
                    tr_loss, tr_mse = _epoch_pass(
                        model,
                        _batches(train_pairs, batch_size, gen, device),
                        stage.loss_kind, optimizer)
                except NanLoss:
                    _save_checkpoint(
                        os.path.join(out_dir, f"stage{si}_aborted.pt"),
                        model, config, si)
                    raise NanLoss(
                        f"non-finite loss in stage {si} "
                        f"({stage.loss_kind}), epoch {epoch}"
                    ) from None
                writer.writerow([si, epoch, "train", repr(tr_loss)])
                row = {"stage": si, "epoch": epoch, "loss_kind":
                       stage.loss_kind, "train_loss": tr_loss,
                       "train_mse": tr_mse, "val_loss": None}
                if val_pairs:
                    va_loss, _ = _epoch_pass(
                        model, _batches(val_pairs, batch_size, None, device),
                        stage.loss_kind)
                    writer.writerow([si, epoch, "val", repr(va_loss)])
                    row["val_loss"] = va_loss
                history.append(row)
            ckpt_path = os.path.join(out_dir, f"stage{si}.pt")
            _save_checkpoint(ckpt_path, model, config, si)
    return ckpt_path, history
