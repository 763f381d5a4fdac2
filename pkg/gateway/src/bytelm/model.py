"""A small decoder-only transformer over bytes.

Vocabulary is the 256 byte values plus a BOS marker used at prompt and
window starts. Checkpoints carry the config and a human-readable model name
so the serving layer can report what it loaded.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
from torch import nn

BOS = 256
VOCAB_SIZE = 257


@dataclass(frozen=True)
class ModelConfig:
    dim: int = 64
    heads: int = 4
    layers: int = 2
    context: int = 256

    def __post_init__(self):
        if self.dim < 1 or self.layers < 1 or self.context < 2:
            raise ValueError("dim and layers must be >= 1, context >= 2")
        if self.dim % self.heads != 0:
            raise ValueError(f"dim {self.dim} not divisible by heads {self.heads}")

    def model_name(self) -> str:
        return f"bytelm-{self.dim}d{self.layers}l"


class Block(nn.Module):
    """Pre-norm attention + MLP residual block."""

    def __init__(self, dim: int, heads: int):
        super().__init__()
        self.ln_attn = nn.LayerNorm(dim)
        self.attn = nn.MultiheadAttention(dim, heads, batch_first=True)
        self.ln_mlp = nn.LayerNorm(dim)
        self.mlp = nn.Sequential(
            nn.Linear(dim, 4 * dim),
            nn.GELU(),
            nn.Linear(4 * dim, dim),
        )

    def forward(self, x: torch.Tensor, causal_mask: torch.Tensor) -> torch.Tensor:
        normed = self.ln_attn(x)
        attended, _ = self.attn(normed, normed, normed, attn_mask=causal_mask,
                                need_weights=False)
        x = x + attended
        return x + self.mlp(self.ln_mlp(x))


class ByteLM(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.token_embedding = nn.Embedding(VOCAB_SIZE, config.dim)
        self.position_embedding = nn.Embedding(config.context, config.dim)
        self.blocks = nn.ModuleList(
            Block(config.dim, config.heads) for _ in range(config.layers))
        self.ln_out = nn.LayerNorm(config.dim)
        self.head = nn.Linear(config.dim, VOCAB_SIZE, bias=False)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        """tokens (batch, length) -> logits (batch, length, VOCAB_SIZE)."""
        length = tokens.shape[1]
        if length > self.config.context:
            raise ValueError(
                f"sequence length {length} exceeds context {self.config.context}")
        positions = torch.arange(length, device=tokens.device)
        x = self.token_embedding(tokens) + self.position_embedding(positions)
        mask = torch.triu(
            torch.ones(length, length, dtype=torch.bool, device=tokens.device),
            diagonal=1)
        for block in self.blocks:
            x = block(x, mask)
        return self.head(self.ln_out(x))


def encode_prompt(text: str) -> list[int]:
    return [BOS] + list(text.encode("utf-8"))


def decode_tokens(token_ids: list[int]) -> str:
    return bytes(t for t in token_ids if t < 256).decode("utf-8",
                                                         errors="replace")


def save_checkpoint(path: str, model: ByteLM, model_name: str | None = None) -> None:
    torch.save({
        "model_name": model_name or model.config.model_name(),
        "config": asdict(model.config),
        "state_dict": model.state_dict(),
    }, path)


def load_checkpoint(path: str) -> tuple[ByteLM, str]:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    model = ByteLM(ModelConfig(**payload["config"]))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, payload["model_name"]
