"""Fine-tuning: AdamW with linear warmup into a cosine decay.

Defaults are full-scale shaped (lr 5e-5, 750 warmup steps, batch 32,
sequence 1024); the step count is always explicit because full-scale budgets
are not desk-runnable. steps=0 is the identity: the base checkpoint is
re-emitted untouched.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import torch
import torch.nn.functional as F

from bytelm.corpus import load_window_stream
from bytelm.model import VOCAB_SIZE, load_checkpoint, save_checkpoint


@dataclass(frozen=True)
class TrainConfig:
    corpus_path: str
    steps: int
    batch_size: int = 32
    sequence_length: int = 1024
    learning_rate: float = 5e-5
    warmup_steps: int = 750
    seed: int = 0
    log_every: int = 1

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.batch_size < 1 or self.sequence_length < 1:
            raise ValueError("batch_size and sequence_length must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps must be >= 0")


def cosine_with_warmup(step: int, total_steps: int, warmup_steps: int) -> float:
    """LR scale factor: ramps 0 -> 1 over warmup, cosine-decays 1 -> 0 after."""
    if warmup_steps > 0 and step < warmup_steps:
        return (step + 1) / warmup_steps
    if total_steps <= warmup_steps:
        return 1.0
    progress = (step - warmup_steps) / (total_steps - warmup_steps)
    return 0.5 * (1.0 + math.cos(math.pi * progress))


def finetune(
    base_checkpoint: str,
    config: TrainConfig,
    out_checkpoint: str,
    loss_log_path: str | None = None,
) -> list[float]:
    """Train from base_checkpoint on the packed corpus; returns per-step
    losses and writes the tuned checkpoint (loadable by the service)."""
    model, model_name = load_checkpoint(base_checkpoint)

    if config.steps == 0:
        save_checkpoint(out_checkpoint, model, model_name)
        if loss_log_path:
            open(loss_log_path, "w", encoding="utf-8").close()
        return []

    stream = load_window_stream(config.corpus_path)
    seq = config.sequence_length
    if seq > model.config.context:
        raise ValueError(
            f"sequence_length {seq} exceeds model context {model.config.context}")
    if len(stream) < seq + 1:
        raise ValueError(
            f"corpus holds {len(stream)} tokens, need at least {seq + 1} "
            f"for one training sequence")

    generator = torch.Generator()
    generator.manual_seed(config.seed)
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    schedule = torch.optim.lr_scheduler.LambdaLR(
        optimizer,
        lambda step: cosine_with_warmup(step, config.steps, config.warmup_steps))

    log_fh = open(loss_log_path, "w", encoding="utf-8") if loss_log_path else None
    losses: list[float] = []
    model.train()
    try:
        for step in range(config.steps):
            starts = torch.randint(0, len(stream) - seq, (config.batch_size,),
                                   generator=generator)
            batch = torch.stack([stream[s:s + seq + 1] for s in starts])
            inputs, targets = batch[:, :-1], batch[:, 1:]
            logits = model(inputs)
            loss = F.cross_entropy(logits.reshape(-1, VOCAB_SIZE),
                                   targets.reshape(-1))
            step_lr = schedule.get_last_lr()[0]
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            schedule.step()
            losses.append(float(loss.detach()))
            if log_fh and (step % config.log_every == 0
                           or step == config.steps - 1):
                log_fh.write(json.dumps({
                    "step": step,
                    "loss": losses[-1],
                    "lr": step_lr,
                }) + "\n")
    finally:
        if log_fh:
            log_fh.close()
    model.eval()
    save_checkpoint(out_checkpoint, model, model_name)
    return losses
