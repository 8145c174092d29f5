"""Number-state-filtered coherent states in a truncated Fock space.

Submodules: :mod:`~nsfs.fock` (states and ladder operators),
:mod:`~nsfs.statistics`, :mod:`~nsfs.wigner`, :mod:`~nsfs.twomode`,
:mod:`~nsfs.channels`, :mod:`~nsfs.protocols` and the command line in
:mod:`~nsfs.cli`.
"""

from .errors import NormalizationError, NSFSError, NumericalError, ParameterError, TruncationError
from .fock import (
    FockVector,
    choose_cutoff,
    fidelity,
    inner_product,
    make_coherent,
    make_even_cat,
    make_ltcs,
    make_nsfs,
    make_number,
    make_odd_cat,
    make_pacs,
    make_state,
    make_utcs,
)

__version__ = "0.1.0"
