"""Build a tiny local sentence-transformers checkpoint for offline testing.

The result is a real transformer encoder (2 layers, 64-dim, character-level
WordPiece vocab) with randomly initialized weights, saved in the standard
sentence-transformers layout. It is useless for semantic similarity but
exercises the full model-serving path without network access.

Usage: python scripts/make_tiny_model.py OUT_DIR
"""

import string
import sys
import tempfile
from pathlib import Path


def build(out_dir: str) -> str:
    import torch
    from transformers import BertConfig, BertModel, BertTokenizerFast

    try:
        from sentence_transformers import SentenceTransformer, models
    except ImportError:  # pragma: no cover
        raise SystemExit("sentence-transformers is required to build the tiny model")

    with tempfile.TemporaryDirectory() as tmp:
        chars = list(string.ascii_lowercase + string.digits + string.punctuation)
        vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + chars + ["##" + c for c in chars]
        vocab_path = Path(tmp) / "vocab.txt"
        vocab_path.write_text("\n".join(vocab))
        tokenizer = BertTokenizerFast(vocab_file=str(vocab_path), do_lower_case=True)

        torch.manual_seed(0)
        config = BertConfig(
            vocab_size=len(vocab),
            hidden_size=64,
            num_hidden_layers=2,
            num_attention_heads=2,
            intermediate_size=128,
            max_position_embeddings=128,
        )
        hf_dir = Path(tmp) / "hf"
        BertModel(config).save_pretrained(hf_dir)
        tokenizer.save_pretrained(hf_dir)

        word = models.Transformer(str(hf_dir), max_seq_length=64)
        dim_getter = getattr(word, "get_embedding_dimension", None) or getattr(
            word, "get_word_embedding_dimension"
        )
        pooling = models.Pooling(dim_getter(), pooling_mode="mean")
        encoder = SentenceTransformer(modules=[word, pooling], device="cpu")
        encoder.save(out_dir)
    return out_dir


if __name__ == "__main__":
    if len(sys.argv) != 2:
        raise SystemExit(__doc__)
    print(build(sys.argv[1]))
