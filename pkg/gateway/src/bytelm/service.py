"""HTTP wire: POST /generate and GET /health.

Generation requests are served under a lock, one at a time per model
instance, so concurrent clients queue rather than interleave forward passes.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from bytelm.model import load_checkpoint
from bytelm.sampling import ContextOverflow, generate_texts


class GenerateRequest(BaseModel):
    prompt: str
    n: int = Field(1, ge=1)
    temperature: float = Field(0.2, ge=0.0)
    top_p: float = Field(0.95, gt=0.0, le=1.0)
    max_new_tokens: int = Field(64, ge=1)
    stop_sequences: list[str] = []
    seed: int | None = None


def create_app(checkpoint_path: str) -> FastAPI:
    model, model_name = load_checkpoint(checkpoint_path)
    lock = threading.Lock()
    app = FastAPI(title="bytelm gateway")

    @app.get("/health")
    def health():
        return {"status": "ok", "model": model_name}

    @app.post("/generate")
    def generate(request: GenerateRequest):
        try:
            with lock:
                texts = generate_texts(
                    model,
                    request.prompt,
                    n=request.n,
                    temperature=request.temperature,
                    top_p=request.top_p,
                    max_new_tokens=request.max_new_tokens,
                    stop_sequences=tuple(request.stop_sequences),
                    seed=request.seed,
                )
        except ContextOverflow as exc:
            return JSONResponse(
                status_code=400,
                content={"error": {"code": "context_overflow",
                                   "message": str(exc)}})
        return {"completions": [{"text": text} for text in texts]}

    return app
