"""Pseudo-ring testing (PRT) laboratory for simulated RAM.

Modules:
    galois     GF(2^m) arithmetic and XOR-only constant multipliers
    lfsr       the virtual LFSR that predicts a fault-free pass
    memory     fault-injectable single/dual-port RAM model
    march      March notation parser, formatter and executor
    pi_engine  PRT iterations and schedules
    campaign   fault universes, coverage campaigns and reports
    cli        ``prtlab`` command line
"""

__version__ = "0.1.0"
