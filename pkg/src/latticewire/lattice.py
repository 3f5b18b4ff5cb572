"""Binary codes, Construction-A lattices and carved coset codebooks.

A Construction-A lattice is ``2Z^L + C`` for a binary linear code ``C``.
Carving it to the box ``{0, ..., M-1}^L`` gives a finite constellation
that splits into one coset per codeword of ``C``; the coset of codeword
``c_j`` is ``{2t + c_j}`` for ``t`` in a randomness set.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial.distance import pdist

from .exceptions import ConfigurationError, InvalidPointError


def _gf2_rref(matrix: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2); returns (rref, pivot columns)."""
    m = np.array(matrix, dtype=np.uint8) % 2
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(m[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def gf2_rank(matrix) -> int:
    if np.size(matrix) == 0:
        return 0
    return len(_gf2_rref(matrix)[1])


def int_to_bits(value: int, width: int) -> np.ndarray:
    """MSB-first bit vector of ``value``."""
    if width == 0:
        return np.zeros(0, dtype=np.uint8)
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def bits_to_int(bits) -> int:
    out = 0
    for b in np.asarray(bits, dtype=np.int64).ravel():
        out = (out << 1) | int(b)
    return out


@dataclass(frozen=True, eq=False)
class BinaryCode:
    """Binary linear code stored by its generator matrix.

    The generator is kept in systematic (reduced row echelon) form; the
    pivot columns are the information positions. Codeword ``j`` is the
    encoding of the information word whose MSB-first integer value is ``j``.
    """

    name: str
    generators: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.generators, dtype=np.uint8)) % 2
        if g.size == 0:
            g = g.reshape(0, g.shape[-1] if g.ndim == 2 else 0)
        if gf2_rank(g) != g.shape[0]:
            raise ConfigurationError(f"generators of {self.name!r} are not linearly independent")
        rref, pivots = _gf2_rref(g) if g.shape[0] else (g, [])
        rref.setflags(write=False)
        object.__setattr__(self, "generators", rref)
        object.__setattr__(self, "_pivots", tuple(pivots))

    @property
    def length(self) -> int:
        return self.generators.shape[1]

    @property
    def dimension(self) -> int:
        return self.generators.shape[0]

    @property
    def information_positions(self) -> tuple[int, ...]:
        return self._pivots

    @cached_property
    def codewords(self) -> np.ndarray:
        """All ``2^k`` codewords, row ``j`` is the codeword of information word ``j``."""
        k = self.dimension
        info = np.array([int_to_bits(j, k) for j in range(2**k)], dtype=np.uint8).reshape(2**k, k)
        words = (info.astype(np.int64) @ self.generators.astype(np.int64)) % 2
        words = words.astype(np.uint8)
        words.setflags(write=False)
        return words

    def encode(self, j: int) -> np.ndarray:
        return self.codewords[j]

    def information_index(self, word) -> int:
        """Index ``j`` of a codeword, read off the information positions.

        Raises:
            InvalidPointError: if ``word`` is not a codeword.
        """
        word = np.asarray(word, dtype=np.uint8) % 2
        j = bits_to_int(word[list(self._pivots)])
        if not np.array_equal(self.codewords[j], word):
            raise InvalidPointError(f"{word.tolist()} is not a codeword of {self.name}")
        return j

    def contains(self, word) -> bool:
        try:
            self.information_index(word)
        except InvalidPointError:
            return False
        return True

    @cached_property
    def minimum_distance(self) -> int:
        weights = self.codewords.sum(axis=1)
        nonzero = weights[weights > 0]
        return int(nonzero.min()) if nonzero.size else 0


_FULL = re.compile(r"^full\((\d+)\)$")

_GENERATORS = {
    "repetition2": [[1, 1]],
    "parity4": [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]],
    # first-order Reed-Muller RM(1,3), the (8,4,4) extended Hamming code
    "rm13": [
        [1, 1, 1, 1, 1, 1, 1, 1],
        [0, 0, 0, 0, 1, 1, 1, 1],
        [0, 0, 1, 1, 0, 0, 1, 1],
        [0, 1, 0, 1, 0, 1, 0, 1],
    ],
}


def build_binary_code(name: str) -> BinaryCode:
    """Return one of the named codes: ``full(L)``, ``repetition2``, ``parity4``, ``rm13``."""
    m = _FULL.match(name)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise ConfigurationError("full(L) needs L >= 1")
        return BinaryCode(name, np.eye(n, dtype=np.uint8))
    try:
        return BinaryCode(name, np.array(_GENERATORS[name], dtype=np.uint8))
    except KeyError:
        raise ConfigurationError(f"unknown binary code {name!r}") from None


@dataclass(frozen=True)
class ConstructionALattice:
    code: BinaryCode

    @property
    def dimension(self) -> int:
        return self.code.length

    def contains(self, v) -> bool:
        v = np.asarray(v)
        if v.shape != (self.dimension,) or not np.all(np.equal(np.mod(v, 1), 0)):
            return False
        return self.code.contains(np.mod(v.astype(np.int64), 2))


@dataclass(frozen=True, eq=False)
class CosetCodebook:
    """Finite constellation split into ``2^k`` cosets of ``2^r`` points each.

    ``cosets`` has shape ``(2^k, 2^r, L)``; points inside each coset are in
    lexicographic order.
    """

    L: int
    M: int
    k: int
    r: int
    cosets: np.ndarray = field(repr=False)
    code: BinaryCode | None = field(default=None, repr=False)
    modulus: int = 2

    def __post_init__(self):
        c = np.asarray(self.cosets, dtype=np.int64)
        if c.shape != (2**self.k, 2**self.r, self.L):
            raise ConfigurationError(f"coset array has shape {c.shape}, expected {(2**self.k, 2**self.r, self.L)}")
        c.setflags(write=False)
        object.__setattr__(self, "cosets", c)
        lookup = {}
        for j in range(2**self.k):
            for p in c[j]:
                key = tuple(int(v) for v in p)
                if key in lookup:
                    raise ConfigurationError(f"point {key} appears in more than one coset")
                lookup[key] = j
        object.__setattr__(self, "_lookup", lookup)

    @property
    def size(self) -> int:
        return 2 ** (self.k + self.r)

    @property
    def points(self) -> np.ndarray:
        """All points, coset-major, shape ``(2^(k+r), L)``."""
        return self.cosets.reshape(-1, self.L)

    @property
    def labels(self) -> np.ndarray:
        return np.repeat(np.arange(2**self.k), 2**self.r)

    def coset_of(self, point) -> int:
        key = tuple(int(v) for v in np.asarray(point).ravel())
        try:
            return self._lookup[key]
        except KeyError:
            raise InvalidPointError(f"point {key} is not in the codebook") from None


def randomness_set(L: int, M: int, r: int) -> np.ndarray:
    """Lexicographically first ``2^r`` vectors of ``{0, ..., M/2-1}^L``."""
    if M < 2 or M % 2:
        raise ConfigurationError(f"box size M must be even, got {M}")
    half = M // 2
    if 2**r > half**L:
        raise ConfigurationError(f"{2**r} randomness points requested but only {half**L} fit in the box")
    out = np.array(list(itertools.islice(itertools.product(range(half), repeat=L), 2**r)), dtype=np.int64)
    return out.reshape(2**r, L)


def carve_codebook(code: BinaryCode, M: int, randomness_bits: int) -> CosetCodebook:
    """Carve ``2Z^L + C`` to the box ``{0..M-1}^L`` with ``randomness_bits`` per coset."""
    t = randomness_set(code.length, M, randomness_bits)
    cosets = 2 * t[None, :, :] + code.codewords.astype(np.int64)[:, None, :]
    return CosetCodebook(code.length, M, code.dimension, randomness_bits, cosets, code=code, modulus=2)


def carve_pam_codebook(M: int, k: int, randomness_bits: int = 0) -> CosetCodebook:
    """One-dimensional cosets ``{j + 2^k t}`` of ``Z / 2^k Z`` inside ``{0..M-1}``."""
    n = 2**k
    if M != 2 ** (k + randomness_bits):
        raise ConfigurationError(f"M={M} does not equal 2^(k+r)={2 ** (k + randomness_bits)}")
    t = np.arange(2**randomness_bits)
    cosets = (np.arange(n)[:, None] + n * t[None, :])[:, :, None]
    return CosetCodebook(1, M, k, randomness_bits, cosets, code=None, modulus=n)


def coset_index(point, codebook: CosetCodebook) -> int:
    """Index ``j`` of the coset holding ``point``.

    Raises:
        InvalidPointError: if the point is in no coset.
    """
    return codebook.coset_of(point)


def min_squared_distance(codebook: CosetCodebook) -> int:
    pts = codebook.points
    if len(pts) < 2:
        raise ValueError("minimum distance is undefined for a single-point codebook")
    return int(round(pdist(pts.astype(float), "sqeuclidean").min()))


@dataclass(frozen=True)
class Scheme:
    """Preset coding scheme: a lattice, its carving, and the bit split."""

    name: str
    lattice: str
    L: int
    M: int
    k: int
    r: int
    code_name: str | None

    @property
    def is_coset(self) -> bool:
        return self.r > 0

    def codebook(self) -> CosetCodebook:
        return _codebook(self.name)


SCHEMES: dict[str, Scheme] = {
    s.name: s
    for s in [
        Scheme("conv-z2", "Z", 1, 2, 1, 0, "full(1)"),
        Scheme("conv-z8", "Z", 1, 8, 3, 0, None),
        Scheme("coset-z-1s1r", "Z", 1, 4, 1, 1, "full(1)"),
        Scheme("coset-z-1s2r", "Z", 1, 8, 1, 2, "full(1)"),
        Scheme("conv-d2", "D2", 2, 2, 1, 0, "repetition2"),
        Scheme("coset-d2", "D2", 2, 4, 1, 2, "repetition2"),
        Scheme("conv-d4", "D4", 4, 2, 3, 0, "parity4"),
        Scheme("coset-d4", "D4", 4, 4, 3, 4, "parity4"),
        Scheme("conv-e8", "E8", 8, 2, 4, 0, "rm13"),
        Scheme("coset-e8", "E8", 8, 4, 4, 8, "rm13"),
    ]
}

# coset/conventional pairs over the same lattice
SCHEME_PAIRS = {"D2": ("coset-d2", "conv-d2"), "D4": ("coset-d4", "conv-d4"), "E8": ("coset-e8", "conv-e8")}

_CACHE: dict[str, CosetCodebook] = {}


def get_scheme(name) -> Scheme:
    if isinstance(name, Scheme):
        return name
    try:
        return SCHEMES[name]
    except KeyError:
        raise ConfigurationError(f"unknown scheme {name!r}; choose from {', '.join(SCHEMES)}") from None


def _codebook(name: str) -> CosetCodebook:
    if name not in _CACHE:
        s = SCHEMES[name]
        if s.code_name is None:
            cb = carve_pam_codebook(s.M, s.k, s.r)
        else:
            cb = carve_codebook(build_binary_code(s.code_name), s.M, s.r)
        _CACHE[name] = cb
    return _CACHE[name]


def scheme_codebook(name) -> CosetCodebook:
    return get_scheme(name).codebook()
