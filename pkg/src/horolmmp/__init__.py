"""Log MMP for projective horospherical pairs, computed on moment polytopes."""

__version__ = "0.1.0"
