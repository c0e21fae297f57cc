"""bitbound: step-exact machines, a scheduled universal machine, and circuit
witnesses for computations."""

__version__ = "0.1.0"
