"""Frontrunning resistance for dApp transactions from a VDF delay plus
verifier-federation aggregate signatures, with a chain simulator and trace
analytics."""

__version__ = "0.1.0"
