"""Test wiring: doctests were written against the NumPy 1.x scalar repr."""
import numpy as np

if np.lib.NumpyVersion(np.__version__) >= "2.0.0":
    np.set_printoptions(legacy="1.25")
