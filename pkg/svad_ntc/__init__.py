from __future__ import annotations

from ._async.sweep_runner import AsyncSweepRunner  # type: ignore # noqa: F401
from ._sync.storage import SyncFileStorage  # type: ignore # noqa: F401
from ._sync.storage import SyncMemoryStorage  # type: ignore # noqa: F401
from ._sync.storage import SyncSupportedStorage  # type: ignore # noqa: F401
from ._sync.sweep_runner import SyncSweepRunner  # type: ignore # noqa: F401
from .channel import (  # type: ignore # noqa: F401
    RngStream,
    awgn,
    bpsk_modulate,
    derive_stream,
    hard_slice,
    noise_sigma,
)
from .convcode import (  # type: ignore # noqa: F401
    build_trellis,
    conv_encode,
    encode_frame,
    lock_insert,
    lock_strip,
    trellis_dump,
)
from .errors import *  # type: ignore # noqa: F401, F403
from .harness import (  # type: ignore # noqa: F401
    count_residual,
    ebno_for_ber,
    emit_csv,
    emit_dat,
    format_table,
    ntc_study,
    run_point,
    run_sweep,
)
from .rs_baseline import (  # type: ignore # noqa: F401
    gf_div,
    gf_inv,
    gf_mul,
    gf_pow,
    pack_bits,
    rs_decode,
    rs_encode,
    unpack_bits,
)
from .types import *  # type: ignore # noqa: F401, F403
from .version import __version__
from .viterbi import (  # type: ignore # noqa: F401
    append_ntc,
    branch_metric,
    decode_pipeline,
    ml_oracle_decode,
    viterbi_decode,
)
