"""
boltzsynth package.

Constructs RBM and DBN weights that realize a prescribed distribution on
binary vectors, and checks every construction by exact inference.
"""

from .synthesis.dbn_synthesis import synthesize_dbn
from .synthesis.rbm_synthesis import synthesize_rbm

__version__ = "0.1.0"
__all__ = ["synthesize_dbn", "synthesize_rbm"]
