"""Phase sensitivity of a Mach-Zehnder interferometer with intensity detection."""

__version__ = "0.1.0"
