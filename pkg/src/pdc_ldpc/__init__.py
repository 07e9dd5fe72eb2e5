"""Progressive differences convolutional LDPC codes: construction, analysis, coding and simulation."""

from .analysis import (
    DistanceReport,
    GirthReport,
    default_length,
    girth,
    measure_tail_biting,
    min_distance,
    min_distance_oracle,
    pair_codeword_estimate,
)
from .channel import SimRecord, awgn_llr, bpsk_modulate, read_csv, run_ber_point, sweep, uncoded_ber
from .codec import (
    DecodeResult,
    DecoderConfig,
    StreamEncoder,
    SumProductDecoder,
    TailBitingEncoder,
    decode_sum_product,
    encode_stream,
    encode_tail_biting,
)
from .design import (
    DifferenceDesign,
    SearchExhaustedError,
    expansion_sets,
    is_four_cycle_free,
    lh_lower_bound,
    load_design,
    random_design,
    save_design,
    six_cycle_witnesses,
    uniform_design,
)
from .matrix import (
    SparseBitMatrix,
    StructureError,
    SyndromeFormer,
    circulant_form,
    conv_window,
    rank_gf2,
    read_alist,
    syndrome_former,
    tail_biting_matrix,
    write_alist,
)

__version__ = "0.1.0"
