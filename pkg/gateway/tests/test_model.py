import pytest
import torch

from bytelm import BOS, VOCAB_SIZE, ByteLM, ModelConfig, load_checkpoint
from bytelm.model import decode_tokens, encode_prompt

from conftest import TINY


def test_vocab_covers_bytes_plus_bos():
    assert VOCAB_SIZE == 257
    assert BOS == 256


def test_forward_shape():
    model = ByteLM(TINY)
    tokens = torch.tensor([encode_prompt("hi")])
    logits = model(tokens)
    assert logits.shape == (1, 3, VOCAB_SIZE)


def test_forward_rejects_overlong_input():
    model = ByteLM(TINY)
    tokens = torch.zeros((1, TINY.context + 1), dtype=torch.long)
    with pytest.raises(ValueError):
        model(tokens)


def test_encode_decode_round_trip():
    text = "def f(x):\n    return x  # é"
    tokens = encode_prompt(text)
    assert tokens[0] == BOS
    assert decode_tokens(tokens[1:]) == text
    # BOS is dropped on decode rather than crashing utf-8
    assert decode_tokens(tokens) == text


def test_checkpoint_round_trip(tmp_path, tiny_checkpoint):
    model, name = load_checkpoint(tiny_checkpoint)
    assert name == "bytelm-32d2l"
    assert model.config == TINY
    reloaded, _ = load_checkpoint(tiny_checkpoint)
    for key, value in model.state_dict().items():
        assert torch.equal(value, reloaded.state_dict()[key])


@pytest.mark.parametrize("kwargs", [
    {"dim": 0},
    {"layers": 0},
    {"context": 1},
    {"dim": 30, "heads": 4},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ModelConfig(**{"dim": 32, "heads": 2, "layers": 2, "context": 64,
                       **kwargs})
