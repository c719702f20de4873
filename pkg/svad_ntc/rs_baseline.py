"""
Systematic Reed-Solomon codec over GF(2^8), the comparison baseline.

The field is built from the primitive polynomial 0x11D with alpha = 2. A
codeword is the message followed by the parity symbols; codeword index `p`
holds the coefficient of x^(n-1-p). The generator polynomial has the roots
alpha^fcr, ..., alpha^(fcr+n-k-1).
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .constants import GF_ORDER, GF_PRIMITIVE_POLY
from .errors import GaloisFieldError, ReedSolomonError
from .types import RsDecodeStatus, RsParams

logger = logging.getLogger(__name__)


def _build_tables() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    exp = np.zeros(2 * GF_ORDER, dtype=np.int64)
    log = np.zeros(GF_ORDER + 1, dtype=np.int64)
    x = 1
    for i in range(GF_ORDER):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & 0x100:
            x ^= GF_PRIMITIVE_POLY
    exp[GF_ORDER:] = exp[:GF_ORDER]
    a = np.arange(GF_ORDER + 1)
    mul = exp[(log[a][:, None] + log[a][None, :]) % GF_ORDER]
    mul[0, :] = 0
    mul[:, 0] = 0
    mul = mul.astype(np.uint8)
    for table in (exp, log, mul):
        table.setflags(write=False)
    return exp, log, mul


GF_EXP, GF_LOG, GF_MUL = _build_tables()


def _check_element(*values: int) -> None:
    for value in values:
        if not 0 <= value <= GF_ORDER:
            raise GaloisFieldError(f"{value} is not an element of GF(256)")


def gf_mul(a: int, b: int) -> int:
    _check_element(a, b)
    return int(GF_MUL[a, b])


def gf_inv(a: int) -> int:
    _check_element(a)
    if a == 0:
        raise GaloisFieldError("zero has no multiplicative inverse")
    return int(GF_EXP[GF_ORDER - GF_LOG[a]])


def gf_div(a: int, b: int) -> int:
    _check_element(a, b)
    if b == 0:
        raise GaloisFieldError("division by zero")
    if a == 0:
        return 0
    return int(GF_EXP[(GF_LOG[a] - GF_LOG[b]) % GF_ORDER])


def gf_pow(a: int, exponent: int) -> int:
    _check_element(a)
    if a == 0:
        if exponent < 0:
            raise GaloisFieldError("zero has no negative powers")
        return 1 if exponent == 0 else 0
    return int(GF_EXP[(GF_LOG[a] * exponent) % GF_ORDER])


def _alpha_pow(exponent: int) -> int:
    return int(GF_EXP[exponent % GF_ORDER])


def gf_poly_eval_low(poly: Sequence[int], x: int) -> int:
    """Evaluate a polynomial stored lowest degree first."""
    result = 0
    for coef in reversed(poly):
        result = int(GF_MUL[result, x]) ^ coef
    return result


@lru_cache(maxsize=32)
def rs_generator_poly(nsym: int, first_root: int = 1) -> Tuple[int, ...]:
    """Generator polynomial, highest degree first, monic."""
    g = [1]
    for i in range(nsym):
        root = _alpha_pow(first_root + i)
        product = g + [0]
        for j, coef in enumerate(g):
            product[j + 1] ^= int(GF_MUL[coef, root])
        g = product
    return tuple(g)


def rs_encode_many(params: RsParams, messages: np.ndarray) -> np.ndarray:
    """Encode a (frames, k) block of messages into (frames, n) codewords."""
    messages = np.asarray(messages, dtype=np.uint8)
    if messages.ndim != 2 or messages.shape[1] != params.k:
        raise ReedSolomonError(
            f"messages must have shape (frames, {params.k}), got {messages.shape}"
        )
    taps = np.array(rs_generator_poly(params.nsym, params.first_root)[1:], dtype=np.uint8)
    parity = np.zeros((messages.shape[0], params.nsym), dtype=np.uint8)
    for i in range(params.k):
        feedback = messages[:, i] ^ parity[:, 0]
        products = GF_MUL[feedback[:, None], taps[None, :]]
        parity[:, :-1] = parity[:, 1:] ^ products[:, :-1]
        parity[:, -1] = products[:, -1]
    return np.concatenate([messages, parity], axis=1)


def rs_encode(params: RsParams, msg) -> np.ndarray:
    symbols = np.asarray(msg, dtype=np.uint8).reshape(-1)
    if len(symbols) != params.k:
        raise ReedSolomonError(
            f"RS({params.n},{params.k}) encodes {params.k} symbols, got {len(symbols)}"
        )
    return rs_encode_many(params, symbols[None, :])[0]


def _syndrome_many(params: RsParams, words: np.ndarray) -> np.ndarray:
    degrees = params.n - 1 - np.arange(params.n)
    roots = params.first_root + np.arange(params.nsym)
    exponents = (roots[:, None] * degrees[None, :]) % GF_ORDER
    logs = GF_LOG[words.astype(np.int64)]
    terms = GF_EXP[(logs[:, None, :] + exponents[None, :, :]) % GF_ORDER]
    terms = np.where(words[:, None, :] == 0, 0, terms)
    return np.bitwise_xor.reduce(terms, axis=2).astype(np.uint8)


def rs_syndromes(params: RsParams, received) -> List[int]:
    """S_i = r(alpha^(fcr+i)) for i in 0..n-k-1."""
    word = np.asarray(received, dtype=np.uint8).reshape(-1)
    if len(word) != params.n:
        raise ReedSolomonError(
            f"RS({params.n},{params.k}) decodes {params.n} symbols, got {len(word)}"
        )
    return [int(s) for s in _syndrome_many(params, word[None, :])[0]]


def berlekamp_massey(syndromes: Sequence[int]) -> List[int]:
    """Error locator polynomial, lowest degree first, Lambda(0) = 1."""
    locator = [1]
    previous = [1]
    degree = 0
    shift = 1
    last = 1
    for n, syndrome in enumerate(syndromes):
        discrepancy = syndrome
        for i in range(1, degree + 1):
            if i < len(locator):
                discrepancy ^= int(GF_MUL[locator[i], syndromes[n - i]])
        if discrepancy == 0:
            shift += 1
            continue
        scale = gf_div(discrepancy, last)
        update = [0] * shift + [int(GF_MUL[scale, c]) for c in previous]
        candidate = [
            (locator[i] if i < len(locator) else 0)
            ^ (update[i] if i < len(update) else 0)
            for i in range(max(len(locator), len(update)))
        ]
        if 2 * degree <= n:
            previous = locator
            degree = n + 1 - degree
            last = discrepancy
            shift = 1
        else:
            shift += 1
        locator = candidate
    # padded to degree + 1 so a short locator fails the root count
    return (locator + [0] * (degree + 1))[: degree + 1]


def chien_search(params: RsParams, locator: Sequence[int]) -> List[int]:
    """Codeword positions p whose locator X = alpha^(n-1-p) is an inverse root."""
    return [
        p
        for p in range(params.n)
        if gf_poly_eval_low(locator, _alpha_pow(-(params.n - 1 - p))) == 0
    ]


def forney(
    params: RsParams,
    syndromes: Sequence[int],
    locator: Sequence[int],
    positions: Sequence[int],
) -> List[int]:
    omega = [0] * params.nsym
    for i, s in enumerate(syndromes):
        for j, c in enumerate(locator):
            if i + j < params.nsym:
                omega[i + j] ^= int(GF_MUL[s, c])
    derivative = [locator[i] if i % 2 else 0 for i in range(1, len(locator))]
    magnitudes = []
    for p in positions:
        exponent = params.n - 1 - p
        x_inv = _alpha_pow(-exponent)
        denominator = gf_poly_eval_low(derivative, x_inv)
        if denominator == 0:
            raise ReedSolomonError(f"locator derivative vanishes at position {p}")
        value = gf_div(gf_poly_eval_low(omega, x_inv), denominator)
        magnitudes.append(int(GF_MUL[value, _alpha_pow(exponent * (1 - params.first_root))]))
    return magnitudes


def _correct(
    params: RsParams, word: np.ndarray, syndromes: List[int]
) -> Optional[Tuple[np.ndarray, int]]:
    locator = berlekamp_massey(syndromes)
    errors = len(locator) - 1
    if errors == 0 or errors > params.t:
        return None
    positions = chien_search(params, locator)
    if len(positions) != errors:
        return None
    try:
        magnitudes = forney(params, syndromes, locator, positions)
    except ReedSolomonError:
        return None
    if not all(magnitudes):
        return None
    corrected = word.copy()
    for p, e in zip(positions, magnitudes):
        corrected[p] ^= e
    if any(rs_syndromes(params, corrected)):
        return None
    return corrected, errors


def rs_decode(params: RsParams, received) -> Tuple[np.ndarray, RsDecodeStatus]:
    """
    Bounded-distance decoding. On failure the received message part is
    returned unchanged with a `failure` status.
    """
    word = np.asarray(received, dtype=np.uint8).reshape(-1)
    syndromes = rs_syndromes(params, word)
    if not any(syndromes):
        return word[: params.k].copy(), RsDecodeStatus.clean()
    outcome = _correct(params, word, syndromes)
    if outcome is None:
        return word[: params.k].copy(), RsDecodeStatus.failure()
    corrected, count = outcome
    return corrected[: params.k], RsDecodeStatus.corrected(count)


def rs_decode_many(
    params: RsParams, words: np.ndarray
) -> Tuple[np.ndarray, List[RsDecodeStatus]]:
    """Decode a (frames, n) block; clean frames skip the algebraic decoder."""
    words = np.asarray(words, dtype=np.uint8)
    if words.ndim != 2 or words.shape[1] != params.n:
        raise ReedSolomonError(
            f"codewords must have shape (frames, {params.n}), got {words.shape}"
        )
    messages = words[:, : params.k].copy()
    statuses = [RsDecodeStatus.clean()] * len(words)
    dirty = np.flatnonzero(_syndrome_many(params, words).any(axis=1))
    for f in dirty:
        messages[f], statuses[f] = rs_decode(params, words[f])
    if len(dirty):
        failures = sum(1 for s in statuses if s.kind == "failure")
        logger.debug(
            "RS(%d,%d): %d of %d frames dirty, %d failures",
            params.n,
            params.k,
            len(dirty),
            len(words),
            failures,
        )
    return messages, statuses


def pack_bits(bits) -> np.ndarray:
    """Pack bits MSB-first into symbols, zero-padding the last one."""
    return np.packbits(np.asarray(bits, dtype=np.uint8).reshape(-1))


def unpack_bits(symbols, n_bits: Optional[int] = None) -> np.ndarray:
    bits = np.unpackbits(np.asarray(symbols, dtype=np.uint8).reshape(-1))
    return bits if n_bits is None else bits[:n_bits]
