"""Lossless text compression: character PPMC plus per-prefix word dictionaries."""

from .coder import MAX_TOTAL, FreqSlice, RangeDecoder, RangeEncoder
from .codec import (CodecConfig, Container, Decoder, Encoder, compress,
                    decompress, is_english, read_suffix)
from .context import EOF, ContextModel
from .dictionary import DictStore, SuffixOutcome
from .errors import (ContainerFormatError, DecodeError, LengthMismatchError,
                     TruncatedPayloadError)

__version__ = "0.1.0"

__all__ = [
    "MAX_TOTAL", "FreqSlice", "RangeEncoder", "RangeDecoder",
    "CodecConfig", "Container", "Encoder", "Decoder",
    "compress", "decompress", "is_english", "read_suffix",
    "EOF", "ContextModel", "DictStore", "SuffixOutcome",
    "DecodeError", "TruncatedPayloadError", "ContainerFormatError",
    "LengthMismatchError",
    "__version__",
]
