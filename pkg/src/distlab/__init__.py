"""Distinguishability measures of quantum states, channels and strategies.

Exact classical oracles, circuit-level verifier protocols with exact or
trainable provers, and the optimizers and experiment runner that drive them.

Convention used everywhere: qubits are big-endian, i.e. qubit 0 is the most
significant bit of a computational-basis index.
"""

__version__ = "0.1.0"
