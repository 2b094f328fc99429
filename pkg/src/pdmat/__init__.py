"""Dense pseudo-differential matrix calculus and splitting experiments.

Modules
-------

core
    Index blocks, dense operator matrices, the diagonal difference calculus,
    weighted order seminorms, Sobolev vectors, and order certification across
    refinement families.
periodic
    K-indexed families of periodic matrices, bracket-norm inequalities, the
    family seminorm, embedding into truncated blocks, approximation rates.
spectral
    Discrete Fourier transform, finite-difference circulants and their
    diagonal Fourier forms, alias-summed multiplication matrices, and
    pseudo-spectral compositions.
operators
    Symbol and potential constructors on truncated blocks, parity and
    Hermitian structure checks, symplectic block systems.
flows
    Reference propagators, Lie/Strang/composition splitting steps, local
    error tables with log-log order fits, and the derivative-loss estimator.
experiments
    Water-wave no-loss splitting, the normal-form preconditioner for the
    potential Schroedinger equation, and Sobolev-norm growth studies.
cli
    Batch driver: config parsing, sweep execution, CSV/JSON artifacts.
"""

__version__ = "0.1.0"

from . import core, flows, operators, periodic, spectral  # noqa: F401,E402
