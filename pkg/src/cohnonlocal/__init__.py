"""Coherence measures, incoherent conversions and nonlocality certificates.

Converting a coherent source qudit with CNOT-type fan-out permutations yields
Bell-nonlocal, Svetlichny-nonlocal and genuinely multipartite entangled states;
this package computes the relevant closed forms and checks each one against a
direct search or enumeration.
"""
from ._kernels import BACKEND
from .coherence import (
    CoherenceReport,
    KrausSet,
    c_l1,
    c_rel_entropy,
    coherence_report,
    dephase,
    is_incoherent_kraus,
)
from .incoherent_ops import ConversionSpec, apply_channel, cnot, convert, fanout_unitary
from .qstate import DensityMatrix, InvalidStateError, PureState, partial_trace

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CoherenceReport",
    "ConversionSpec",
    "DensityMatrix",
    "InvalidStateError",
    "KrausSet",
    "PureState",
    "apply_channel",
    "c_l1",
    "c_rel_entropy",
    "cnot",
    "coherence_report",
    "convert",
    "dephase",
    "fanout_unitary",
    "is_incoherent_kraus",
    "partial_trace",
]
