"""Exception types raised by the lattice automaton toolkit."""


class QcaError(Exception):
    """Base class for all toolkit-specific errors."""


class RadiusExceededError(QcaError):
    """Word-metric search exhausted its radius without reaching the target."""


class SupportMismatchError(QcaError):
    """A closed-form operator is not supported on the stated neighborhood."""


class BranchPointError(QcaError):
    """Hermitian generator undefined: eigenphase at the log branch point."""


class ZoneLeakError(QcaError):
    """Wave-packet envelope is not negligible at the wave-vector zone edge."""


class PacketBoundaryError(QcaError):
    """Packet mass too close to the periodic wrap seam for unwrapped means."""
