"""Hardware-efficient ansatz and random test-state/channel generation.

One HEA layer applies RX(delta) then RY(theta) on every qubit followed by a
CNOT chain (qubit i controls i+1, open chain). The x-only variant drops the
RY rotations; some channel-generation setups use it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, qsim


@dataclass(frozen=True)
class AnsatzSpec:
    width: int
    layers: int
    entangler: str = "chain"
    rotations: str = "xy"   # "xy": RX then RY per qubit; "x": RX only

    def __post_init__(self):
        if self.width < 1 or self.layers < 0:
            raise ValueError("width must be >= 1 and layers >= 0")
        if self.entangler != "chain":
            raise ValueError(f"unsupported entangler {self.entangler!r}")
        if self.rotations not in ("xy", "x"):
            raise ValueError(f"unsupported rotations {self.rotations!r}")

    @property
    def rotations_per_qubit(self) -> int:
        return 2 if self.rotations == "xy" else 1

    @property
    def param_count(self) -> int:
        return self.rotations_per_qubit * self.width * self.layers


def build_hea(spec: AnsatzSpec, params: np.ndarray, wires=None,
              width: int | None = None, param_offset: int = 0) -> qsim.Circuit:
    """Layered circuit from an ansatz spec and bound rotation angles.

    `wires` embeds the ansatz onto a subset of a wider circuit; gate
    `param` indices start at `param_offset` so several ansatze can share
    one parameter vector.
    """
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.size != spec.param_count:
        raise ValueError(f"expected {spec.param_count} parameters, got {params.size}")
    if not np.all(np.isfinite(params)):
        raise ValueError("parameters must be finite")
    wires = tuple(range(spec.width)) if wires is None else tuple(wires)
    if len(wires) != spec.width:
        raise ValueError("wire count does not match ansatz width")
    width = (max(wires) + 1 if wires else 0) if width is None else width
    circ = qsim.Circuit(width)
    k = 0
    for _ in range(spec.layers):
        for q in wires:
            circ.rx(q, params[k], param=param_offset + k)
            k += 1
            if spec.rotations == "xy":
                circ.ry(q, params[k], param=param_offset + k)
                k += 1
        for a, b in zip(wires, wires[1:]):
            circ.cnot(a, b)
    return circ


def angle_init(count: int, seed: int, angle_range=(0.0, 2.0 * np.pi)) -> np.ndarray:
    """Uniform random rotation angles, seeded."""
    rng = np.random.default_rng(seed)
    lo, hi = angle_range
    return rng.uniform(lo, hi, size=count)


@dataclass(frozen=True)
class RandomStateSpec:
    n: int            # state qubits
    k: int            # purifying qubits (rank <= 2^k)
    layers: int
    seed: int
    rotations: str = "xy"


@dataclass(frozen=True)
class RandomState:
    """A sampled mixed state with its purification.

    Wire layout of `circuit`/`purification`: the purifying block R comes
    first, then the state block S.
    """

    purification: np.ndarray     # pure state on k + n qubits
    reduced: np.ndarray          # density operator on the n state qubits
    circuit: qsim.Circuit
    unitary: np.ndarray
    n: int
    k: int

    @property
    def width(self) -> int:
        return self.n + self.k


def random_state(spec: RandomStateSpec) -> RandomState:
    hea = AnsatzSpec(width=spec.n + spec.k, layers=spec.layers,
                     rotations=spec.rotations)
    params = angle_init(hea.param_count, spec.seed)
    circuit = build_hea(hea, params)
    circuit.register("R", range(spec.k))
    circuit.register("S", range(spec.k, spec.k + spec.n))
    psi = qsim.run_pure(circuit)
    rho = linalg.partial_trace(qsim.density_from_pure(psi),
                               [2**spec.k, 2**spec.n], keep=[1])
    return RandomState(purification=psi, reduced=rho, circuit=circuit,
                       unitary=qsim.unitary_of(circuit), n=spec.n, k=spec.k)


@dataclass(frozen=True)
class RandomChannelSpec:
    n: int            # channel qubits
    k: int            # environment qubits
    layers: int
    seed: int
    rotations: str = "xy"


def random_channel(spec: RandomChannelSpec) -> qsim.ChannelSpec:
    """Channel from an HEA dilation on n + k qubits, environment traced out."""
    hea = AnsatzSpec(width=spec.n + spec.k, layers=spec.layers,
                     rotations=spec.rotations)
    params = angle_init(hea.param_count, spec.seed)
    circuit = build_hea(hea, params)
    circuit.register("A", range(spec.n))
    circuit.register("E", range(spec.n, spec.n + spec.k))
    return qsim.channel_from_unitary(qsim.unitary_of(circuit), n_in=spec.n,
                                     n_env_in=spec.k, circuit=circuit)
