"""Command line entry points: init, finetune, serve."""

from __future__ import annotations

import click
import torch
import uvicorn

from bytelm.corpus import CorpusFormatError
from bytelm.model import ByteLM, ModelConfig, save_checkpoint
from bytelm.service import create_app
from bytelm.train import TrainConfig, finetune as run_finetune


@click.group()
def main():
    """Byte-level LM gateway: initialize, fine-tune, serve."""


@main.command()
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Where to write the fresh checkpoint.")
@click.option("--dim", default=64, show_default=True, type=int)
@click.option("--heads", default=4, show_default=True, type=int)
@click.option("--layers", default=2, show_default=True, type=int)
@click.option("--context", default=256, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
def init(out, dim, heads, layers, context, seed):
    """Write a freshly initialized checkpoint."""
    torch.manual_seed(seed)
    try:
        config = ModelConfig(dim=dim, heads=heads, layers=layers,
                             context=context)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    model = ByteLM(config)
    save_checkpoint(out, model)
    click.echo(f"initialized {config.model_name()} at {out}")


@main.command()
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--base", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Checkpoint to start from.")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Where to write the tuned checkpoint.")
@click.option("--steps", required=True, type=int,
              help="Optimizer steps to run (0 re-emits the base unchanged).")
@click.option("--batch-size", default=32, show_default=True, type=int)
@click.option("--sequence-length", default=1024, show_default=True, type=int)
@click.option("--learning-rate", default=5e-5, show_default=True, type=float)
@click.option("--warmup-steps", default=750, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--loss-log", type=click.Path(dir_okay=False),
              help="Optional JSONL file of per-step loss and lr.")
def finetune(corpus, base, out, steps, batch_size, sequence_length,
             learning_rate, warmup_steps, seed, loss_log):
    """Fine-tune a checkpoint on a packed-window corpus."""
    try:
        config = TrainConfig(
            corpus_path=corpus,
            steps=steps,
            batch_size=batch_size,
            sequence_length=sequence_length,
            learning_rate=learning_rate,
            warmup_steps=warmup_steps,
            seed=seed,
        )
        losses = run_finetune(base, config, out, loss_log_path=loss_log)
    except (CorpusFormatError, ValueError) as exc:
        raise click.ClickException(str(exc))
    if losses:
        click.echo(f"ran {len(losses)} steps: "
                   f"loss {losses[0]:.4f} -> {losses[-1]:.4f}")
    else:
        click.echo("ran 0 steps: checkpoint re-emitted unchanged")
    click.echo(f"wrote {out}")


@main.command()
@click.option("--checkpoint", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8763, show_default=True, type=int)
def serve(checkpoint, host, port):
    """Serve POST /generate and GET /health for a checkpoint."""
    app = create_app(checkpoint)
    uvicorn.run(app, host=host, port=port)
