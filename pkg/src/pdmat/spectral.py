"""Discrete Fourier transform, finite differences, and aliased multiplication.

Everything is stored in centered order: position p along an axis holds index
a = p - K/2 with a in {-K/2..K/2-1}, matching the periodic matrix blocks.
The transform pair is

    (F u)_a = K^{-d} sum_b exp(-2 pi i a.b / K) u_b,
    (F^{-1} v)_a =      sum_b exp(+2 pi i a.b / K) v_b,

so K^{d/2} F is unitary.  FFTs implement the pair; direct O(K^{2d}) sums are
kept as test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core
from .core import IndexBlock, OpMatrix, PERIODIC, periodic_block, representative


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex values over Z_K^d, flat in canonical centered order."""

    block: IndexBlock
    values: np.ndarray
    space: str = "grid"      # 'grid' (samples u_a) or 'freq' (coefficients)

    def __post_init__(self):
        if self.block.mode != PERIODIC:
            raise ValueError("grid functions live on periodic blocks")
        v = np.ascontiguousarray(self.values, dtype=complex).reshape(self.block.n)
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def period(self) -> int:
        return self.block.size

    def cube(self) -> np.ndarray:
        k, d = self.block.size, self.block.d
        return self.values.reshape((k,) * d)

    def to_residues(self) -> np.ndarray:
        return np.fft.ifftshift(self.cube())

    def norm(self, s: float = 0.0) -> float:
        return core.SobolevVec(self.block, self.values).norm(s)


def from_residues(period: int, values, d: int = 1, space: str = "grid") -> GridFunction:
    """Build from values listed in residue order a = 0..K-1 per axis."""
    block = periodic_block(d, period)
    cube = np.asarray(values, dtype=complex).reshape((period,) * d)
    return GridFunction(block, np.fft.fftshift(cube).reshape(-1), space)


def sample(period: int, fn, d: int = 1) -> GridFunction:
    """Sample a 2pi-periodic function at the grid points x_a = 2 pi a / K."""
    block = periodic_block(d, period)
    h = 2 * np.pi / period
    xs = block.indices() * h
    vals = np.array([fn(*x) for x in xs], dtype=complex)
    return GridFunction(block, vals, "grid")


def dft(u: GridFunction) -> GridFunction:
    k = u.period
    cube = np.fft.fftshift(np.fft.fftn(u.to_residues())) / k ** u.block.d
    return GridFunction(u.block, cube.reshape(-1), "freq")


def idft(v: GridFunction) -> GridFunction:
    k = v.period
    cube = np.fft.fftshift(np.fft.ifftn(v.to_residues())) * k ** v.block.d
    return GridFunction(v.block, cube.reshape(-1), "grid")


def dft_direct(u: GridFunction) -> GridFunction:
    """O(K^{2d}) summation oracle for the transform."""
    return GridFunction(u.block, dft_matrix(u.block) @ u.values, "freq")


def idft_direct(v: GridFunction) -> GridFunction:
    return GridFunction(v.block, idft_matrix(v.block) @ v.values, "grid")


def dft_matrix(block: IndexBlock) -> np.ndarray:
    idx = block.indices()
    phase = idx.astype(float) @ idx.T.astype(float)   # a.b
    return np.exp(-2j * np.pi * phase / block.size) / block.size ** block.d


def idft_matrix(block: IndexBlock) -> np.ndarray:
    idx = block.indices()
    phase = idx.astype(float) @ idx.T.astype(float)
    return np.exp(2j * np.pi * phase / block.size)


# ---------------------------------------------------------------------------
# finite differences


def fd_matrix(j: int, sign: int, period: int, d: int = 1) -> OpMatrix:
    """Grid-side circulant of the forward/backward difference with 1/h scale."""
    block = periodic_block(d, period)
    if not 1 <= j <= d:
        raise ValueError(f"axis j must be in 1..{d}")
    h = 2 * np.pi / period
    idx = block.indices().copy()
    idx[:, j - 1] += sign
    pos, _ = core._positions(block, idx)
    n = block.n
    ent = np.zeros((n, n), dtype=complex)
    if sign == 1:        # (u_{a+e_j} - u_a) / h
        ent[np.arange(n), pos] += 1.0 / h
        ent[np.arange(n), np.arange(n)] -= 1.0 / h
    elif sign == -1:     # (u_a - u_{a-e_j}) / h
        ent[np.arange(n), np.arange(n)] += 1.0 / h
        ent[np.arange(n), pos] -= 1.0 / h
    else:
        raise ValueError("sign must be +1 or -1")
    return OpMatrix(block, ent, toeplitz_hint=True)


def fd_symbol(j: int, sign: int, period: int, d: int = 1) -> OpMatrix:
    """Fourier-side diagonal of the finite difference: (e^{i h a_j} - 1)/h
    forward, (1 - e^{-i h a_j})/h backward."""
    block = periodic_block(d, period)
    if not 1 <= j <= d:
        raise ValueError(f"axis j must be in 1..{d}")
    h = 2 * np.pi / period
    aj = block.indices()[:, j - 1].astype(float)
    if sign == 1:
        diag = (np.exp(1j * h * aj) - 1.0) / h
    elif sign == -1:
        diag = (1.0 - np.exp(-1j * h * aj)) / h
    else:
        raise ValueError("sign must be +1 or -1")
    return core.diagonal_matrix(block, diag)


# ---------------------------------------------------------------------------
# multiplication operators


def mult_grid(v_samples: GridFunction, u: GridFunction) -> GridFunction:
    """Pointwise multiplication (V u)_a = V(a h) u_a on the grid side."""
    if v_samples.block != u.block:
        raise ValueError("period mismatch")
    return GridFunction(u.block, v_samples.values * u.values, "grid")


def mult_matrix_from_samples(v_samples: GridFunction) -> OpMatrix:
    """Fourier-side matrix of pointwise multiplication: entries are the
    discrete Fourier coefficients of the samples at the wrapped difference."""
    block = v_samples.block
    vhat = dft(v_samples).values
    idx = block.indices()
    diff = representative(block.size, idx[:, None, :] - idx[None, :, :])
    pos, _ = core._positions(block, diff.reshape(-1, block.d))
    ent = vhat[pos].reshape(block.n, block.n)
    return OpMatrix(block, ent, toeplitz_hint=True)


def mult_matrix_from_coeffs(coeff_fn, period: int, d: int = 1,
                            tail_tol: float = 1e-18, max_shells: int = 64) -> OpMatrix:
    """Fourier-side multiplication matrix from exact coefficients, folded as
    the alias sum over coeff(diff + l K); shells are added until negligible."""
    block = periodic_block(d, period)
    idx = block.indices()
    diff = representative(period, idx[:, None, :] - idx[None, :, :])
    ent = np.zeros((block.n, block.n), dtype=complex)
    import itertools as _it
    for shell in range(max_shells):
        added = 0.0
        offs = [l for l in _it.product(range(-shell, shell + 1), repeat=d)
                if max(abs(c) for c in l) == shell] if shell else [(0,) * d]
        for l in offs:
            k = diff + period * np.asarray(l, dtype=np.int64)
            term = np.array([coeff_fn(*row) for row in k.reshape(-1, d)],
                            dtype=complex).reshape(block.n, block.n)
            ent += term
            added = max(added, float(np.max(np.abs(term))))
        if shell and added < tail_tol:
            break
    return OpMatrix(block, ent, toeplitz_hint=True)


def mult_matrix_fourier(period: int, d: int = 1, samples: GridFunction | None = None,
                        fn=None, coeff_fn=None) -> OpMatrix:
    """Multiplication matrix from grid samples, a sampled function, or exact
    coefficients (alias-summed).  Exactly one input path must be given."""
    paths = [p is not None for p in (samples, fn, coeff_fn)]
    if sum(paths) != 1:
        raise ValueError("give exactly one of samples, fn, coeff_fn")
    if coeff_fn is not None:
        return mult_matrix_from_coeffs(coeff_fn, period, d)
    if fn is not None:
        samples = sample(period, fn, d)
    return mult_matrix_from_samples(samples)


# ---------------------------------------------------------------------------
# spectral multipliers and compositions


def spectral_multiplier(phi, period: int, d: int = 1) -> OpMatrix:
    """Diagonal matrix phi(a) over the representatives a in {-K/2..K/2-1}^d."""
    block = periodic_block(d, period)
    vals = np.array([phi(*row) for row in block.indices().astype(float)],
                    dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise ValueError("symbol returned a non-finite value on the block")
    return core.diagonal_matrix(block, vals)


def compose_pseudo_spectral(factors, period: int, d: int = 1) -> tuple[OpMatrix, float]:
    """Ordered Fourier-side product of multiplier / potential / difference
    factors, with the predicted order (sum of the factor orders).

    Factor forms: ("multiplier", phi, order), ("potential", fn_or_samples),
    ("fd", axis, sign), ("identity",).
    """
    if not factors:
        raise ValueError("factor list must be nonempty")
    out = core.identity(periodic_block(d, period))
    order = 0.0
    for f in factors:
        kind = f[0]
        if kind == "multiplier":
            out = core.matmul(out, spectral_multiplier(f[1], period, d))
            order += float(f[2])
        elif kind == "potential":
            v = f[1]
            mat = mult_matrix_from_samples(v) if isinstance(v, GridFunction) \
                else mult_matrix_fourier(period, d, fn=v)
            out = core.matmul(out, mat)
        elif kind == "fd":
            out = core.matmul(out, fd_symbol(f[1], f[2], period, d))
            order += 1.0
        elif kind == "identity":
            pass
        else:
            raise ValueError(f"unknown factor kind {kind!r}")
    return out, order


# ---------------------------------------------------------------------------
# CSV import/export


def grid_to_csv(u: GridFunction, path):
    idx = u.block.indices()
    with open(path, "w") as fh:
        cols = ",".join(f"a_{k+1}" for k in range(u.block.d))
        fh.write(f"{cols},re,im\n")
        for row, v in zip(idx, u.values):
            lead = ",".join(str(int(a)) for a in row)
            fh.write(f"{lead},{float(v.real)!r},{float(v.imag)!r}\n")


def grid_from_csv(path, period: int, d: int = 1, space: str = "grid") -> GridFunction:
    block = periodic_block(d, period)
    vals = np.zeros(block.n, dtype=complex)
    with open(path) as fh:
        fh.readline()
        for line in fh:
            parts = line.strip().split(",")
            idx = [int(p) for p in parts[:d]]
            pos, valid = core._positions(block, [idx])
            if not valid[0]:
                raise ValueError(f"index {idx} outside block")
            vals[pos[0]] = float(parts[d]) + 1j * float(parts[d + 1])
    return GridFunction(block, vals, space)
