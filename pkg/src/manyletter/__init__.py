"""Variable-length quantum messages and their lossy and lossless codes."""
from .channels import (
    CodePair,
    KrausChannel,
    apply_channel,
    check_kraus,
    check_unital,
    confidence,
    encoded_information,
    fidelity,
    is_compressive,
    probability_of_error,
)
from .classical import (
    BlockCode,
    ClassicalEnsemble,
    PrefixCode,
    huffman_build,
    kraft_sum,
    shannon_entropy,
    symbol_decode,
    symbol_encode,
    typical_set,
)
from .core import (
    CanonicalSource,
    ManyLetterSpace,
    ManyLetterVector,
    MessageEnsemble,
    MessageMatrix,
    QuantumAlphabet,
    TruncationConfig,
    canonical,
    grand_canonical,
    inner_product,
    raw_information,
    tensor_concat,
    von_neumann_entropy,
)
from .estimators import HuffmanCoder, LosslessCompressor, SchumacherCompressor, SymbolCompressor
from .exceptions import (
    AlignmentError,
    AlphabetMismatchError,
    ConfigError,
    DecodingError,
    GuardError,
    InvariantError,
    ManyLetterError,
    NormalizationError,
    TruncationError,
)
from .lossless import (
    CoreInformationObservable,
    GeneralLosslessCode,
    QuantumSymbolCode,
    build_general_code,
    build_symbol_code,
    compress_grand_canonical,
    core_information,
    decode,
    encode,
    encoded_information_general,
)
from .schumacher import (
    GeneralizedSchumacherCode,
    QuantumTypicalSubspace,
    SchumacherCode,
    build_schumacher,
    generalized_schumacher,
    quantum_typical_subspace,
    schumacher_confidence,
)
from .translation import BlockTranslator, build_translator, message_translator, translate, untranslate

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "AlphabetMismatchError",
    "BlockCode",
    "BlockTranslator",
    "CanonicalSource",
    "ClassicalEnsemble",
    "CodePair",
    "ConfigError",
    "CoreInformationObservable",
    "DecodingError",
    "GeneralLosslessCode",
    "GeneralizedSchumacherCode",
    "GuardError",
    "HuffmanCoder",
    "InvariantError",
    "KrausChannel",
    "LosslessCompressor",
    "ManyLetterError",
    "ManyLetterSpace",
    "ManyLetterVector",
    "MessageEnsemble",
    "MessageMatrix",
    "NormalizationError",
    "PrefixCode",
    "QuantumAlphabet",
    "QuantumSymbolCode",
    "QuantumTypicalSubspace",
    "SchumacherCode",
    "SchumacherCompressor",
    "SymbolCompressor",
    "TruncationConfig",
    "TruncationError",
    "apply_channel",
    "build_general_code",
    "build_schumacher",
    "build_symbol_code",
    "build_translator",
    "canonical",
    "check_kraus",
    "check_unital",
    "compress_grand_canonical",
    "confidence",
    "core_information",
    "decode",
    "encode",
    "encoded_information",
    "encoded_information_general",
    "fidelity",
    "generalized_schumacher",
    "grand_canonical",
    "huffman_build",
    "inner_product",
    "is_compressive",
    "kraft_sum",
    "message_translator",
    "probability_of_error",
    "quantum_typical_subspace",
    "raw_information",
    "schumacher_confidence",
    "shannon_entropy",
    "symbol_decode",
    "symbol_encode",
    "tensor_concat",
    "translate",
    "typical_set",
    "untranslate",
    "von_neumann_entropy",
]
