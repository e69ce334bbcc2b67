"""One-mode interacting Fock spaces and the Segal-Bargmann transform."""

__version__ = "0.1.0"
