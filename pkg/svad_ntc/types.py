from __future__ import annotations

import math
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Literal, Self

from .constants import (
    CODE_PRESETS,
    CONV_SCHEMES,
    DEFAULT_EBNO_POINTS,
    DEFAULT_INFO_BITS,
    DEFAULT_NTC_COUNT,
    DEFAULT_RS,
    MAX_CONSTRAINT_LENGTH,
    MAX_NTC_COUNT,
    MIN_CONSTRAINT_LENGTH,
    RS_FIRST_ROOT,
    SCHEME_ORDER,
)
from .errors import ChannelError, CodeSpecError, ConfigError, FramingError
from .helpers import gf2_poly_gcd, is_monomial, reverse_bits

LockMode = Literal["none", "lower", "higher"]

Metric = Literal["soft", "hard"]
"""
`soft` is the squared Euclidean distance on raw samples, `hard` the Hamming
distance on sliced samples.
"""

Normalization = Literal["info", "symbol"]

Scheme = Literal["svad", "rs", "uncoded", "soft", "hard"]
"""
- `svad`: locked convolutional code, soft Viterbi, NTC extension.
- `soft`: same chain without NTCs.
- `hard`: same chain with NTCs and Hamming metric.
- `rs`: systematic Reed-Solomon, hard slicer.
- `uncoded`: BPSK with a hard slicer only.
"""

RsStatusKind = Literal["clean", "corrected", "failure"]


class CodeSpec(BaseModel):
    """
    A rate 1/n binary feed-forward convolutional code.
    """

    model_config = ConfigDict(frozen=True)

    constraint_length: int = 3
    """
    Number of input bits that influence one output symbol, memory + 1.
    """
    generators: Tuple[int, ...] = (0o7, 0o5)
    """
    One tap mask per output bit. Bit v-1 of a mask taps the current input,
    bit v-2 the most recent memory cell, and so on down to bit 0.
    """
    flush: bool = False
    """
    Terminate unlocked frames with `memory` zero bits.
    """

    @model_validator(mode="after")
    def _check_code(self) -> Self:
        v = self.constraint_length
        if not MIN_CONSTRAINT_LENGTH <= v <= MAX_CONSTRAINT_LENGTH:
            raise CodeSpecError(
                f"constraint length {v} outside "
                f"[{MIN_CONSTRAINT_LENGTH}, {MAX_CONSTRAINT_LENGTH}]"
            )
        if not self.generators:
            raise CodeSpecError("at least one generator is required")
        for g in self.generators:
            if g <= 0:
                raise CodeSpecError(f"generator {g:o} must be a nonzero mask")
            if g >= 1 << v:
                raise CodeSpecError(
                    f"generator {g:o} is wider than the constraint length {v}"
                )
        return self

    @classmethod
    def preset(cls, name: str, **kwargs) -> CodeSpec:
        if name not in CODE_PRESETS:
            raise ConfigError(f"unknown code preset {name!r}", "--preset")
        constraint_length, generators = CODE_PRESETS[name]
        return cls(
            constraint_length=constraint_length, generators=generators, **kwargs
        )

    @property
    def memory(self) -> int:
        return self.constraint_length - 1

    @property
    def state_count(self) -> int:
        return 1 << self.memory

    @property
    def n_outputs(self) -> int:
        return len(self.generators)

    @property
    def rate(self) -> float:
        return 1.0 / self.n_outputs

    @property
    def catastrophic(self) -> bool:
        """
        True when the generator polynomials share a factor other than a pure
        delay D^l over GF(2).
        """
        polys = [reverse_bits(g, self.constraint_length) for g in self.generators]
        common = polys[0]
        for p in polys[1:]:
            common = gf2_poly_gcd(common, p)
        return not is_monomial(common)

    def octal(self) -> str:
        return "/".join(f"{g:o}" for g in self.generators)


class Trellis(BaseModel):
    """
    Expanded state machine of a `CodeSpec`. State bit m-1 is memory cell 1.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: CodeSpec
    lock_mode: LockMode = "none"
    next_state: np.ndarray
    """
    `next_state[s, x]` for state `s` and input bit `x`.
    """
    outputs: np.ndarray
    """
    `outputs[s, x]` is the output bit vector, one entry per generator.
    """
    excluded_states: FrozenSet[int] = frozenset()

    @property
    def state_count(self) -> int:
        return self.spec.state_count

    @property
    def memory(self) -> int:
        return self.spec.memory

    @property
    def n_outputs(self) -> int:
        return self.spec.n_outputs

    def transitions(self) -> Iterator[Tuple[int, int, int, Tuple[int, ...]]]:
        for s in range(self.state_count):
            for x in (0, 1):
                yield (
                    s,
                    x,
                    int(self.next_state[s, x]),
                    tuple(int(b) for b in self.outputs[s, x]),
                )

    def state_label(self, state: int) -> str:
        return f"S{state}({state:0{self.memory}b})"


class SoftSequence(BaseModel):
    """
    Real-valued samples read back from the medium, nominally +/-1.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    samples: np.ndarray
    symbol_width: int = 2

    @field_validator("samples", mode="before")
    @classmethod
    def _as_float_array(cls, value) -> np.ndarray:
        samples = np.ascontiguousarray(value, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(samples)):
            raise ChannelError("samples must be finite")
        samples.setflags(write=False)
        return samples

    @model_validator(mode="after")
    def _check_width(self) -> Self:
        if self.symbol_width < 1:
            raise FramingError("symbol width must be positive")
        if len(self.samples) % self.symbol_width:
            raise FramingError(
                f"{len(self.samples)} samples are not a multiple of the "
                f"symbol width {self.symbol_width}"
            )
        return self

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def steps(self) -> int:
        return len(self.samples) // self.symbol_width


class NoiseSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    ebno_db: float
    normalization: Normalization = "symbol"
    code_rate: float = 1.0
    """
    Only used by `info` normalization.
    """

    @model_validator(mode="after")
    def _check_noise(self) -> Self:
        if not math.isfinite(self.ebno_db):
            raise ConfigError("ebno_db must be finite", "--ebno")
        if not 0.0 < self.code_rate <= 1.0:
            raise ConfigError("code_rate must lie in (0, 1]")
        return self


class DecodeConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    metric: Metric = "soft"
    lock_mode: LockMode = "lower"
    ntc_count: int = DEFAULT_NTC_COUNT
    start_state_forced: bool = True
    invert_ntc: bool = False
    """
    Flip the NTC symbol polarity.
    """

    @model_validator(mode="after")
    def _check_decode(self) -> Self:
        if not 0 <= self.ntc_count <= MAX_NTC_COUNT:
            raise ConfigError(
                f"ntc_count must lie in [0, {MAX_NTC_COUNT}]", "--ntc"
            )
        if self.ntc_count and self.lock_mode == "none":
            raise ConfigError("NTCs require a locked encoder", "--ntc")
        return self


class DecodeResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    decoded_input_bits: np.ndarray
    """
    Decoded encoder inputs, lock bits included, NTC steps removed.
    """
    final_metric: float
    end_state: int
    ntc_input_bits: np.ndarray = Field(
        default_factory=lambda: np.zeros(0, dtype=np.uint8)
    )


class RsParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = DEFAULT_RS[0]
    k: int = DEFAULT_RS[1]
    first_root: int = RS_FIRST_ROOT

    @model_validator(mode="after")
    def _check_rs(self) -> Self:
        if not 0 < self.k < self.n <= 255:
            raise ConfigError(
                f"RS({self.n},{self.k}) needs 0 < k < n <= 255", "--rs"
            )
        if (self.n - self.k) % 2:
            raise ConfigError("n - k must be even", "--rs")
        return self

    @property
    def nsym(self) -> int:
        return self.n - self.k

    @property
    def t(self) -> int:
        return self.nsym // 2

    @property
    def rate(self) -> float:
        return self.k / self.n


class RsDecodeStatus(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: RsStatusKind
    count: int = 0

    @classmethod
    def clean(cls) -> RsDecodeStatus:
        return cls(kind="clean")

    @classmethod
    def corrected(cls, count: int) -> RsDecodeStatus:
        return cls(kind="corrected", count=count)

    @classmethod
    def failure(cls) -> RsDecodeStatus:
        return cls(kind="failure")


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    info_bits: int = DEFAULT_INFO_BITS
    """
    Data bits generated at every Eb/N0 point.
    """
    ebno_points: Tuple[float, ...] = DEFAULT_EBNO_POINTS
    schemes: Tuple[Scheme, ...] = ("svad", "rs")
    master_seed: int = 0
    code_spec: CodeSpec = Field(default_factory=CodeSpec)
    lock_mode: LockMode = "lower"
    ntc_count: int = DEFAULT_NTC_COUNT
    invert_ntc: bool = False
    rs_params: RsParams = Field(default_factory=RsParams)
    normalization: Normalization = "symbol"
    frame_len_bits: Optional[int] = None
    """
    Data bits per decode frame, `None` for one frame per point.
    """

    @model_validator(mode="after")
    def _check_experiment(self) -> Self:
        if self.info_bits < 1:
            raise ConfigError("info_bits must be at least 1", "--bits")
        if not self.ebno_points:
            raise ConfigError("at least one Eb/N0 point is required", "--ebno")
        if not all(math.isfinite(x) for x in self.ebno_points):
            raise ConfigError("Eb/N0 points must be finite", "--ebno")
        if not self.schemes:
            raise ConfigError("at least one scheme is required", "--schemes")
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigError("schemes must not repeat", "--schemes")
        if self.frame_len_bits is not None and self.frame_len_bits < 1:
            raise ConfigError("frame length must be at least 1", "--frame-bits")
        if not 0 <= self.ntc_count <= MAX_NTC_COUNT:
            raise ConfigError(f"ntc must lie in [0, {MAX_NTC_COUNT}]", "--ntc")
        uses_ntc = {"svad", "hard"} & set(self.schemes)
        if self.lock_mode == "none" and self.ntc_count and uses_ntc:
            raise ConfigError("NTCs require a locked encoder", "--lock")
        return self

    @property
    def frame_bits(self) -> int:
        return self.frame_len_bits or self.info_bits

    @property
    def frame_count(self) -> int:
        return -(-self.info_bits // self.frame_bits)

    def decode_config(self, scheme: Scheme, ntc_count: Optional[int] = None) -> DecodeConfig:
        if scheme not in CONV_SCHEMES:
            raise ConfigError(f"scheme {scheme!r} has no Viterbi decoder")
        if ntc_count is None:
            ntc_count = 0 if scheme == "soft" else self.ntc_count
        return DecodeConfig(
            metric="hard" if scheme == "hard" else "soft",
            lock_mode=self.lock_mode,
            ntc_count=ntc_count,
            invert_ntc=self.invert_ntc,
        )


class PointResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    ebno_db: float
    scheme: Scheme
    info_bits: int
    residual_errors: int
    seed: int = 0
    params: str = ""
    ntc_count: Optional[int] = None
    elapsed: float = 0.0
    """
    Wall-clock seconds, never written to CSV.
    """

    @model_validator(mode="after")
    def _check_counts(self) -> Self:
        if not 0 <= self.residual_errors <= self.info_bits:
            raise ConfigError("residual errors must lie in [0, info_bits]")
        return self

    @property
    def ber(self) -> float:
        return self.residual_errors / self.info_bits

    @property
    def label(self) -> str:
        """
        Scheme name, suffixed with the NTC count for study rows.
        """
        return self.scheme if self.ntc_count is None else f"{self.scheme}-ntc{self.ntc_count}"

    def sort_key(self) -> Tuple[float, int, int]:
        ntc = -1 if self.ntc_count is None else self.ntc_count
        return (self.ebno_db, SCHEME_ORDER.index(self.scheme), ntc)


class SweepTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: List[PointResult] = Field(default_factory=list)

    @classmethod
    def from_rows(cls, rows: List[PointResult]) -> SweepTable:
        return cls(rows=sorted(rows, key=PointResult.sort_key))

    @property
    def totals(self) -> Dict[str, int]:
        totals: Dict[str, int] = {}
        for row in self.rows:
            totals[row.label] = totals.get(row.label, 0) + row.residual_errors
        return totals

    def for_scheme(self, scheme: Scheme) -> List[PointResult]:
        return [row for row in self.rows if row.scheme == scheme]
