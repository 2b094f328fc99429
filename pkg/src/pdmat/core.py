"""Dense calculus for truncated and periodic operator matrices.

The index geometry lives in :class:`IndexBlock`: either a symmetric truncated
block {-M..M}^d of Z^d, or the cyclic group Z_K^d with representatives taken
in {-K/2..K/2-1}^d (K even).  :class:`OpMatrix` stores one dense complex
matrix over the active index set, plus a definedness mask: in truncated mode,
diagonal shifts lose boundary rows and columns, and weighted sups only run
over entries whose full shift stencil stayed inside the block.

The weighted sups computed by :func:`seminorm` quantify the order of an
operator (growth of entries and of their iterated diagonal differences along
the diagonal, decay away from it).  :func:`estimate_order` turns them into a
falsifiable certification: an order value is accepted when the seminorms stay
multiplicatively stable as the block is refined.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.signal

TRUNCATED = "truncated"
PERIODIC = "periodic"

_TINY = 1e-300


# ---------------------------------------------------------------------------
# index blocks


@dataclass(frozen=True)
class IndexBlock:
    """Active index set: dimension d, mode, and radius M or period K.

    Truncated mode covers {-size..size}^d; periodic mode covers Z_size^d with
    representatives in {-size/2..size/2-1}^d and index arithmetic mod size.
    """

    d: int
    mode: str
    size: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"d must be 1 or 2, got {self.d}")
        if self.mode == TRUNCATED:
            if self.size < 1:
                raise ValueError("truncated radius must be >= 1")
        elif self.mode == PERIODIC:
            if self.size < 4 or self.size % 2 != 0:
                raise ValueError("period must be even and >= 4")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def side(self) -> int:
        return 2 * self.size + 1 if self.mode == TRUNCATED else self.size

    @property
    def n(self) -> int:
        return self.side ** self.d

    @property
    def axis_range(self) -> range:
        if self.mode == TRUNCATED:
            return range(-self.size, self.size + 1)
        return range(-self.size // 2, self.size // 2)

    def indices(self) -> np.ndarray:
        """All active multi-indices, shape (n, d), in canonical order."""
        return _indices(self)

    def origin(self) -> int:
        """Position of the zero index."""
        off = self.size if self.mode == TRUNCATED else self.size // 2
        pos = 0
        for _ in range(self.d):
            pos = pos * self.side + off
        return pos


def truncated_block(d: int, radius: int) -> IndexBlock:
    return IndexBlock(d, TRUNCATED, radius)


def periodic_block(d: int, period: int) -> IndexBlock:
    return IndexBlock(d, PERIODIC, period)


@lru_cache(maxsize=None)
def _indices(block: IndexBlock) -> np.ndarray:
    idx = np.array(list(itertools.product(block.axis_range, repeat=block.d)),
                   dtype=np.int64)
    idx.setflags(write=False)
    return idx


def _positions(block: IndexBlock, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Positions of multi-indices (n, d) in canonical order, plus validity.

    Periodic indices wrap mod K and are always valid; truncated indices
    outside the block get valid=False (their position entry is unusable).
    """
    idx = np.atleast_2d(np.asarray(idx, dtype=np.int64))
    side = block.side
    if block.mode == PERIODIC:
        off = (idx + block.size // 2) % block.size
        valid = np.ones(len(idx), dtype=bool)
    else:
        off = idx + block.size
        valid = np.all((off >= 0) & (off < side), axis=1)
        off = np.clip(off, 0, side - 1)
    pos = off[:, 0]
    for k in range(1, block.d):
        pos = pos * side + off[:, k]
    return pos, valid


def representative(period: int, a) -> np.ndarray:
    """Representative of a mod K in {-K/2..K/2-1} (componentwise)."""
    a = np.asarray(a, dtype=np.int64)
    return (a + period // 2) % period - period // 2


def bracket_norm(period: int, a) -> np.ndarray:
    """l1 size of the representative of a, the periodic substitute for |a|."""
    r = representative(period, a)
    return np.abs(r).sum(axis=-1) if r.ndim > 0 else np.abs(r)


@lru_cache(maxsize=None)
def _l1_sizes(block: IndexBlock) -> np.ndarray:
    out = np.abs(_indices(block)).sum(axis=1).astype(float)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _weight_arrays(block: IndexBlock) -> tuple[np.ndarray, np.ndarray]:
    """(dist, size) weight matrices over position pairs.

    dist(m, n) is |m-n| (truncated) or the bracket norm of m-n (periodic);
    size(m, n) is |m|+|n| with the same convention per index.
    """
    idx = _indices(block)
    diff = idx[:, None, :] - idx[None, :, :]
    if block.mode == PERIODIC:
        diff = representative(block.size, diff)
    dist = np.abs(diff).sum(axis=2).astype(float)
    l1 = _l1_sizes(block)
    size = l1[:, None] + l1[None, :]
    dist.setflags(write=False)
    size.setflags(write=False)
    return dist, size


def sobolev_weights(block: IndexBlock, s: float) -> np.ndarray:
    """Diagonal h^s weights (1+|k|)^s over the active indices."""
    return (1.0 + _l1_sizes(block)) ** s


# ---------------------------------------------------------------------------
# vectors


@dataclass(frozen=True, eq=False)
class SobolevVec:
    """Complex sequence over the active index set with h^s norms."""

    block: IndexBlock
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=complex)
        if c.shape != (self.block.n,):
            raise ValueError(f"coeffs must have shape ({self.block.n},)")
        if not np.all(np.isfinite(c)):
            raise ValueError("coeffs must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def norm(self, s: float = 0.0) -> float:
        return float(np.linalg.norm(sobolev_weights(self.block, s) * self.coeffs))


def basis_vector(block: IndexBlock, index) -> SobolevVec:
    c = np.zeros(block.n, dtype=complex)
    pos, valid = _positions(block, np.atleast_2d(index))
    if not valid[0]:
        raise ValueError(f"index {index} outside block")
    c[pos[0]] = 1.0
    return SobolevVec(block, c)


def rough_samples(block: IndexBlock, s: float, n_samples: int, seed: int,
                  zero_mean: bool = False) -> list[SobolevVec]:
    """Seeded near-extremal h^s data: |x_k| = (1+|k|)^(-s-0.51), random phases.

    Such x lies in h^s but in no h^(s+e) for e > 0.01, which makes loss
    detection sharp when these vectors feed the sup in an error estimate.
    """
    rng = np.random.default_rng(seed)
    amp = (1.0 + _l1_sizes(block)) ** (-s - 0.51)
    out = []
    for _ in range(n_samples):
        coeffs = amp * np.exp(2j * np.pi * rng.uniform(size=block.n))
        if zero_mean:
            coeffs[block.origin()] = 0.0
        out.append(SobolevVec(block, coeffs))
    return out


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True, eq=False)
class OpMatrix:
    """Dense complex matrix over a block, with advisory structure hints.

    ``defined`` is None when every entry is meaningful; after truncated-mode
    shifts it marks the surviving interior.  Instances are immutable values;
    all operations return new matrices.
    """

    block: IndexBlock
    entries: np.ndarray
    defined: np.ndarray | None = None
    hermitian_hint: bool = False
    diagonal_hint: bool = False
    toeplitz_hint: bool = False

    def __post_init__(self):
        e = np.ascontiguousarray(self.entries, dtype=complex)
        n = self.block.n
        if e.shape != (n, n):
            raise ValueError(f"entries must have shape ({n}, {n})")
        if not np.all(np.isfinite(e)):
            raise ValueError("entries must be finite")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        if self.defined is not None:
            m = np.ascontiguousarray(self.defined, dtype=bool)
            if m.shape != (n, n):
                raise ValueError("mask shape mismatch")
            m.setflags(write=False)
            object.__setattr__(self, "defined", m)

    @property
    def fully_defined(self) -> bool:
        return self.defined is None or bool(self.defined.all())

    def __add__(self, other: "OpMatrix") -> "OpMatrix":
        _check_same_block(self, other)
        return OpMatrix(self.block, self.entries + other.entries,
                        _combine_masks(self.defined, other.defined))

    def __sub__(self, other: "OpMatrix") -> "OpMatrix":
        _check_same_block(self, other)
        return OpMatrix(self.block, self.entries - other.entries,
                        _combine_masks(self.defined, other.defined))

    def __mul__(self, scalar) -> "OpMatrix":
        return OpMatrix(self.block, scalar * self.entries, self.defined,
                        diagonal_hint=self.diagonal_hint,
                        toeplitz_hint=self.toeplitz_hint)

    __rmul__ = __mul__

    def __neg__(self) -> "OpMatrix":
        return self * (-1.0)

    def __matmul__(self, other: "OpMatrix") -> "OpMatrix":
        return matmul(self, other)


def _check_same_block(a: OpMatrix, b: OpMatrix):
    if a.block != b.block:
        raise ValueError(f"block mismatch: {a.block} vs {b.block}")


def _combine_masks(a, b):
    if a is None:
        return None if b is None else b
    return a if b is None else a & b


def zeros(block: IndexBlock) -> OpMatrix:
    return OpMatrix(block, np.zeros((block.n, block.n), dtype=complex),
                    diagonal_hint=True, toeplitz_hint=True, hermitian_hint=True)


def identity(block: IndexBlock) -> OpMatrix:
    return OpMatrix(block, np.eye(block.n, dtype=complex),
                    diagonal_hint=True, toeplitz_hint=True, hermitian_hint=True)


def diagonal_matrix(block: IndexBlock, diag) -> OpMatrix:
    d = np.asarray(diag, dtype=complex)
    if d.shape != (block.n,):
        raise ValueError(f"diagonal must have shape ({block.n},)")
    return OpMatrix(block, np.diag(d), diagonal_hint=True,
                    hermitian_hint=bool(np.all(np.abs(d.imag) == 0.0)))


def is_diagonal(A: OpMatrix, tol: float = 1e-12) -> bool:
    off = A.entries - np.diag(np.diag(A.entries))
    return bool(np.max(np.abs(off)) <= tol * max(1.0, np.max(np.abs(A.entries))))


def is_hermitian(A: OpMatrix, tol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.max(np.abs(A.entries))))
    return bool(np.max(np.abs(A.entries - A.entries.conj().T)) <= tol * scale)


def is_toeplitz(A: OpMatrix, tol: float = 1e-12) -> bool:
    """True when entries depend only on m-n (difference in block arithmetic)."""
    block = A.block
    idx = _indices(block)
    diff = idx[:, None, :] - idx[None, :, :]
    if block.mode == PERIODIC:
        diff = representative(block.size, diff)
    side = 2 * block.side + 1
    key = (diff[..., 0] + block.side)
    for k in range(1, block.d):
        key = key * side + (diff[..., k] + block.side)
    scale = max(1.0, float(np.max(np.abs(A.entries))))
    flat_key = key.ravel()
    flat_val = A.entries.ravel()
    order = np.argsort(flat_key, kind="stable")
    sk, sv = flat_key[order], flat_val[order]
    boundaries = np.flatnonzero(np.diff(sk)) + 1
    for group in np.split(sv, boundaries):
        if np.max(np.abs(group - group[0])) > tol * scale:
            return False
    return True


# ---------------------------------------------------------------------------
# difference calculus and seminorms


def shift(A: OpMatrix, j: int, sign: int) -> OpMatrix:
    """Both-indices diagonal shift: B(m, n) = A(m + sign*e_j, n + sign*e_j).

    Periodic mode wraps; truncated mode marks rows/columns whose source index
    left the block as undefined.
    """
    block = A.block
    if not 1 <= j <= block.d:
        raise ValueError(f"axis j must be in 1..{block.d}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    idx = _indices(block).copy()
    idx[:, j - 1] += sign
    pos, valid = _positions(block, idx)
    entries = A.entries[np.ix_(pos, pos)]
    if block.mode == PERIODIC:
        mask = None if A.defined is None else A.defined[np.ix_(pos, pos)]
    else:
        mask = np.outer(valid, valid)
        if A.defined is not None:
            mask = mask & A.defined[np.ix_(pos, pos)]
        entries = np.where(mask, entries, 0.0)
    return OpMatrix(block, entries, mask)


def delta(A: OpMatrix, alpha) -> OpMatrix:
    """Iterated diagonal difference: per axis, alpha_j >= 0 composes the
    forward difference shift(.,j,+1) - id, alpha_j <= 0 the backward one."""
    alpha = _normalize_alpha(A.block.d, alpha)
    if A.block.mode == TRUNCATED and _l1(alpha) >= A.block.size:
        raise ValueError("|alpha| >= radius leaves an empty interior")
    out = A
    for j, a in enumerate(alpha, start=1):
        sign = 1 if a >= 0 else -1
        for _ in range(abs(a)):
            out = shift(out, j, sign) - out
    return out


def _normalize_alpha(d: int, alpha) -> tuple[int, ...]:
    if isinstance(alpha, (int, np.integer)):
        if d != 1:
            raise ValueError("scalar alpha only allowed for d=1")
        alpha = (int(alpha),)
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if len(alpha) != d:
        raise ValueError(f"alpha must have {d} components")
    return alpha


def _l1(alpha) -> int:
    return int(sum(abs(a) for a in alpha))


@dataclass(frozen=True)
class SeminormSpec:
    """Parameters of the weighted sup: difference multi-index, off-diagonal
    decay exponent, and candidate order."""

    alpha: tuple
    decay: int
    order: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(int(a) for a in np.atleast_1d(self.alpha)))
        if self.decay < 0:
            raise ValueError("decay exponent must be >= 0")


def _weighted_sup(absval: np.ndarray, mask, block: IndexBlock,
                  decay: int, order_minus_alpha: float) -> float:
    dist, size = _weight_arrays(block)
    ratio = absval * (1.0 + dist) ** decay / (1.0 + size) ** order_minus_alpha
    if mask is not None:
        if not mask.any():
            raise ValueError("empty interior: no defined entries")
        ratio = np.where(mask, ratio, 0.0)
    return float(ratio.max())


def seminorm(A: OpMatrix, spec: SeminormSpec) -> float:
    """Weighted sup of the |spec.alpha|-th diagonal difference of A.

    The weight is (1+dist)^decay / (1+size)^(order-|alpha|) with dist and
    size in the block's arithmetic; the sup runs over the defined interior.
    """
    D = delta(A, spec.alpha)
    return _weighted_sup(np.abs(D.entries), D.defined, A.block,
                         spec.decay, spec.order - _l1(spec.alpha))


# ---------------------------------------------------------------------------
# products, commutators, application


def matmul(A: OpMatrix, B: OpMatrix) -> OpMatrix:
    """Finite matrix product over the active index set (the truncation stands
    in for the infinite sum; off-diagonal decay makes the tail negligible)."""
    _check_same_block(A, B)
    if not (A.fully_defined and B.fully_defined):
        raise ValueError("matmul requires fully defined matrices")
    return OpMatrix(A.block, A.entries @ B.entries,
                    diagonal_hint=A.diagonal_hint and B.diagonal_hint,
                    toeplitz_hint=A.toeplitz_hint and B.toeplitz_hint
                    and A.block.mode == PERIODIC)


def commutator(A: OpMatrix, B: OpMatrix) -> OpMatrix:
    return matmul(A, B) - matmul(B, A)


def apply(A: OpMatrix, x: SobolevVec) -> SobolevVec:
    if A.block != x.block:
        raise ValueError("block mismatch between matrix and vector")
    if not A.fully_defined:
        raise ValueError("apply requires a fully defined matrix")
    return SobolevVec(x.block, A.entries @ x.coeffs)


# ---------------------------------------------------------------------------
# order certification


@dataclass(frozen=True, eq=False)
class OrderEstimate:
    """Result of an order-certification scan across a refinement family.

    ``max_ratios[i_r, i_a, i_n, i_m]`` is the seminorm of family member i_m at
    order grid point i_r for probe (alpha_grid[i_a], decay_grid[i_n]);
    ``certified[i_r, i_a, i_n]`` records multiplicative stability.  ``r_hat``
    is the smallest fully certified grid order, or +inf.  Only the listed
    decay exponents are probed (the class definition quantifies over all).
    """

    r_hat: float
    order_grid: tuple
    alpha_grid: tuple
    decay_grid: tuple
    sizes: tuple
    max_ratios: np.ndarray
    certified: np.ndarray


def _stable_family(values, sizes, theta: float, growth_tol: float) -> bool:
    """Multiplicative stability of a seminorm sequence across refinement.

    Requires boundedness within factor theta of the first value, and a growth
    trend consistent with an order deficit below growth_tol: either the fitted
    log-log slope stays under growth_tol, or the per-step growth exponents are
    non-increasing (a dying transient, typical of sups converging from below)
    with the final one under growth_tol.  A genuine power-law deficit keeps a
    constant per-step exponent equal to the deficit and is rejected.
    """
    v = np.asarray(values, dtype=float)
    if np.all(v <= _TINY):
        return True
    if np.any(v <= _TINY):
        return bool(np.max(v) <= 1e-12)
    if np.max(v) > theta * v[0]:
        return False
    logs = np.log(np.asarray(sizes, float))
    slope = np.polyfit(logs, np.log(v), 1)[0]
    if slope <= growth_tol:
        return True
    g = np.diff(np.log(v)) / np.diff(logs)
    transient = bool(np.all(np.diff(g) <= 1e-9)) and g[-1] <= growth_tol
    return transient


def default_order_grid(lo: float = -3.0, hi: float = 3.0, step: float = 0.25):
    return tuple(np.round(np.arange(lo, hi + step / 2, step), 6))


def estimate_order(family, alpha_grid=None, decay_grid=(0, 2, 4, 8),
                   order_grid=None, theta: float = 2.0,
                   growth_tol: float = 0.125) -> OrderEstimate:
    """Certify the effective order of a family built at increasing M (or K).

    A grid order r is certified for one probe (alpha, decay) when the
    seminorm sequence across the family (a) stays within factor theta of its
    first value and (b) shows a fitted log-log growth exponent at most
    growth_tol (half the grid step by default, so that a deficit of one grid
    step is rejected).  r_hat is the smallest r certified for every probe.
    """
    family = list(family)
    if not family:
        raise ValueError("family must be nonempty")
    d = family[0].block.d
    sizes = tuple(A.block.size for A in family)
    if sorted(sizes) != list(sizes) or len(set(sizes)) != len(sizes):
        raise ValueError("family must be built at strictly increasing sizes")
    if alpha_grid is None:
        if d == 1:
            alpha_grid = ((0,), (1,), (-1,), (2,))
        else:
            alpha_grid = ((0, 0), (1, 0), (0, 1), (-1, 0), (0, -1))
    alpha_grid = tuple(tuple(a) for a in alpha_grid)
    decay_grid = tuple(int(n) for n in decay_grid)
    if order_grid is None:
        order_grid = default_order_grid()
    order_grid = tuple(float(r) for r in order_grid)

    diffs = [[delta(A, alpha) for alpha in alpha_grid] for A in family]
    n_r, n_a, n_n, n_m = len(order_grid), len(alpha_grid), len(decay_grid), len(family)
    ratios = np.zeros((n_r, n_a, n_n, n_m))
    certified = np.zeros((n_r, n_a, n_n), dtype=bool)
    for i_a, alpha in enumerate(alpha_grid):
        la = _l1(alpha)
        absd = [(np.abs(D.entries), D.defined) for D in
                (diffs[i_m][i_a] for i_m in range(n_m))]
        for i_r, r in enumerate(order_grid):
            for i_n, decay in enumerate(decay_grid):
                vals = [_weighted_sup(a, m, family[i_m].block, decay, r - la)
                        for i_m, (a, m) in enumerate(absd)]
                ratios[i_r, i_a, i_n] = vals
                certified[i_r, i_a, i_n] = _stable_family(vals, sizes, theta,
                                                          growth_tol)
    r_hat = math.inf
    for i_r, r in enumerate(order_grid):
        if certified[i_r].all():
            r_hat = r
            break
    return OrderEstimate(r_hat, order_grid, alpha_grid, decay_grid, sizes,
                         ratios, certified)


# ---------------------------------------------------------------------------
# convolution


def convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Full discrete convolution of finitely supported sequences (1d or 2d)."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.ndim != y.ndim or x.ndim not in (1, 2):
        raise ValueError("sequences must both be 1d or both 2d")
    return scipy.signal.convolve(x, y, mode="full", method="direct")


def lp_norm(x: np.ndarray, p: float) -> float:
    a = np.abs(np.asarray(x)).ravel()
    if p == math.inf:
        return float(a.max()) if a.size else 0.0
    return float((a ** p).sum() ** (1.0 / p))


# ---------------------------------------------------------------------------
# debug serialization


def dump_matrix(A: OpMatrix, path):
    """Write a debug CSV dump: header (d, mode, size), then row-major re,im."""
    with open(path, "w") as fh:
        fh.write(f"{A.block.d},{A.block.mode},{A.block.size}\n")
        for v in A.entries.ravel():
            fh.write(f"{float(v.real)!r},{float(v.imag)!r}\n")


def load_matrix(path) -> OpMatrix:
    with open(path) as fh:
        d, mode, size = fh.readline().strip().split(",")
        block = IndexBlock(int(d), mode, int(size))
        data = np.loadtxt(fh, delimiter=",", dtype=float).reshape(-1, 2)
    entries = (data[:, 0] + 1j * data[:, 1]).reshape(block.n, block.n)
    return OpMatrix(block, entries)
