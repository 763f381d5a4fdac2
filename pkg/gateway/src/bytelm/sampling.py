"""Sampling from a ByteLM: greedy at temperature 0, temperature plus nucleus
filtering otherwise. A fixed seed reproduces the whole batch exactly; the n
completions of one request draw from a single RNG stream so they differ from
each other but replay identically."""

from __future__ import annotations

from typing import Sequence

import torch

from bytelm.model import ByteLM, decode_tokens, encode_prompt


class ContextOverflow(ValueError):
    """The prompt fills the model context, leaving no room to generate."""


def truncate_at_stops(text: str, stop_sequences: Sequence[str]) -> str:
    cut = len(text)
    for stop in stop_sequences:
        if not stop:
            continue
        idx = text.find(stop)
        if idx != -1 and idx < cut:
            cut = idx
    return text[:cut]


def _pick(logits: torch.Tensor, temperature: float, top_p: float,
          generator: torch.Generator) -> int:
    if temperature == 0.0:
        return int(torch.argmax(logits))
    probs = torch.softmax(logits / temperature, dim=-1)
    if top_p < 1.0:
        sorted_probs, order = torch.sort(probs, descending=True)
        # smallest prefix with cumulative mass >= top_p, top token always in
        keep = torch.cumsum(sorted_probs, dim=-1) - sorted_probs < top_p
        keep[0] = True
        filtered = torch.zeros_like(probs)
        filtered[order[keep]] = sorted_probs[keep]
        probs = filtered / filtered.sum()
    return int(torch.multinomial(probs, 1, generator=generator))


def generate_texts(
    model: ByteLM,
    prompt: str,
    n: int,
    temperature: float,
    top_p: float = 0.95,
    max_new_tokens: int = 64,
    stop_sequences: Sequence[str] = (),
    seed: int | None = None,
) -> list[str]:
    """Sample n continuations of prompt; always returns exactly n texts,
    truncated at the earliest stop sequence."""
    if n < 1:
        raise ValueError("n must be positive")
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if not 0 < top_p <= 1:
        raise ValueError(f"top_p must be in (0, 1], got {top_p}")
    if max_new_tokens < 1:
        raise ValueError("max_new_tokens must be positive")

    encoded = encode_prompt(prompt)
    if len(encoded) >= model.config.context:
        raise ContextOverflow(
            f"prompt occupies {len(encoded)} of {model.config.context} "
            f"context positions; no room to generate")

    generator = torch.Generator()
    if seed is not None:
        generator.manual_seed(seed)
    else:
        generator.seed()

    texts = []
    with torch.no_grad():
        for _ in range(n):
            token_ids = list(encoded)
            for _ in range(max_new_tokens):
                window = token_ids[-model.config.context:]
                logits = model(torch.tensor([window], dtype=torch.long))[0, -1]
                token_ids.append(_pick(logits, temperature, top_p, generator))
            raw = decode_tokens(token_ids[len(encoded):])
            texts.append(truncate_at_stops(raw, stop_sequences))
    return texts
