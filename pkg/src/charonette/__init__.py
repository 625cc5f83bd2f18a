"""charonette: frame-semantic annotation backend for multimodal corpora."""

from .lexicon import Lexicon, load_lexicon, load_lexicon_path, bundled_lexicon_path

__all__ = ["Lexicon", "load_lexicon", "load_lexicon_path", "bundled_lexicon_path"]
__version__ = "0.1.0"
