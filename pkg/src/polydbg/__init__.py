"""polydbg: a debugger for a mini-language with five concurrency models.

The runtime executes programs written in a small statement language whose
built-in forms cover threads & locks, communicating event loops (actors),
rendezvous channels, software transactional memory, and fork/join tasks.
A generic wire protocol (JSON control channel + binary trace channel)
lets a client offer model-specific breakpoints, stepping, and
visualizations without containing any per-model logic.
"""

__version__ = "0.1.0"
