"""KAM conjugation engine for quasiperiodic SU(2) cocycles over Diophantine rotations."""

__version__ = "0.1.0"
