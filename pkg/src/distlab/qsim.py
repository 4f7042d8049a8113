"""Circuit construction and execution.

Pure-state and density-matrix simulation with parametric gate noise,
measurement sampling, and an adjoint-mode gradient for noiseless
expectation objectives.

Qubit ordering is big-endian: qubit 0 is the most significant bit of a
basis index, so a state on w qubits reshapes to shape (2,)*w with axis q
corresponding to qubit q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg

SQRT2_INV = 1.0 / math.sqrt(2.0)

_FIXED_1Q = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) * SQRT2_INV,
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PAULI = {
    "rx": _FIXED_1Q["x"],
    "ry": _FIXED_1Q["y"],
    "rz": _FIXED_1Q["z"],
}

_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def rotation_matrix(kind: str, angle: float) -> np.ndarray:
    """exp(-i angle/2 P) for P in {X, Y, Z}, or the phase gate diag(1, e^{i angle})."""
    if kind == "phase":
        return np.array([[1, 0], [0, np.exp(1j * angle)]], dtype=complex)
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "rz":
        return np.array([[np.exp(-1j * angle / 2), 0], [0, np.exp(1j * angle / 2)]], dtype=complex)
    raise ValueError(f"unknown rotation kind {kind!r}")


@dataclass(frozen=True, eq=False)
class Gate:
    """One circuit element.

    kind: rx|ry|rz|phase|h|x|y|z|cnot|cswap|unitary|cblock
    targets: wire indices the payload acts on (for cnot the pair is
        (control, target); for cswap, (control, a, b))
    controls/control_value: only for cblock
    param: optional index into an optimizer parameter vector bound to
        this gate's angle
    """

    kind: str
    targets: tuple[int, ...]
    angle: float = 0.0
    matrix: np.ndarray | None = None
    controls: tuple[int, ...] = ()
    control_value: int = 0
    param: int | None = None

    def payload(self) -> np.ndarray:
        """Unitary acting on `targets` (excluding cblock controls)."""
        k = self.kind
        if k in _FIXED_1Q:
            return _FIXED_1Q[k]
        if k in ("rx", "ry", "rz", "phase"):
            return rotation_matrix(k, self.angle)
        if k == "cnot":
            return controlled_unitary_matrix(1, 1, _FIXED_1Q["x"])
        if k == "cswap":
            return controlled_unitary_matrix(1, 1, _SWAP)
        if k in ("unitary", "cblock"):
            return self.matrix
        raise ValueError(f"unknown gate kind {k!r}")

    def qubits(self) -> tuple[int, ...]:
        return tuple(self.controls) + tuple(self.targets)

    def dagger(self) -> "Gate":
        k = self.kind
        if k in ("h", "x", "y", "z", "cnot", "cswap"):
            return self
        if k in ("rx", "ry", "rz", "phase"):
            return replace(self, angle=-self.angle, param=None)
        return replace(self, matrix=self.matrix.conj().T, param=None)


def controlled_unitary_matrix(n_controls: int, value: int, u: np.ndarray) -> np.ndarray:
    """Dense matrix of a controlled block on (controls, targets) wires."""
    dc = 2**n_controls
    dt = u.shape[0]
    out = np.eye(dc * dt, dtype=complex)
    out[value * dt:(value + 1) * dt, value * dt:(value + 1) * dt] = u
    return out


def controlled_block(controls, value: int, u: np.ndarray, targets) -> Gate:
    """Gate applying `u` to `targets` when `controls` read `value`."""
    controls = tuple(controls)
    targets = tuple(targets)
    if not linalg.is_unitary(u, 1e-8):
        raise ValueError("controlled block payload is not unitary")
    if not 0 <= value < 2 ** len(controls):
        raise ValueError("control value out of range")
    if set(controls) & set(targets):
        raise ValueError("controls and targets overlap")
    return Gate("cblock", targets=targets, matrix=np.asarray(u, dtype=complex),
                controls=controls, control_value=value)


def raw_unitary(u: np.ndarray, targets) -> Gate:
    if not linalg.is_unitary(u, 1e-8):
        raise ValueError("gate payload is not unitary")
    return Gate("unitary", targets=tuple(targets), matrix=np.asarray(u, dtype=complex))


@dataclass
class Circuit:
    """Ordered gate list over named qubit registers."""

    width: int
    gates: list[Gate] = field(default_factory=list)
    registers: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def _check(self, gate: Gate) -> Gate:
        qs = gate.qubits()
        if len(set(qs)) != len(qs):
            raise ValueError(f"duplicate wires in gate {gate.kind}: {qs}")
        for q in qs:
            if not 0 <= q < self.width:
                raise ValueError(f"wire {q} outside circuit of width {self.width}")
        return gate

    def add(self, gate: Gate) -> "Circuit":
        self.gates.append(self._check(gate))
        return self

    def extend(self, gates) -> "Circuit":
        for g in gates:
            self.add(g)
        return self

    # small builder helpers
    def h(self, q):
        return self.add(Gate("h", (q,)))

    def x(self, q):
        return self.add(Gate("x", (q,)))

    def y(self, q):
        return self.add(Gate("y", (q,)))

    def z(self, q):
        return self.add(Gate("z", (q,)))

    def rx(self, q, angle, param=None):
        return self.add(Gate("rx", (q,), angle=angle, param=param))

    def ry(self, q, angle, param=None):
        return self.add(Gate("ry", (q,), angle=angle, param=param))

    def rz(self, q, angle, param=None):
        return self.add(Gate("rz", (q,), angle=angle, param=param))

    def phase(self, q, angle, param=None):
        return self.add(Gate("phase", (q,), angle=angle, param=param))

    def cnot(self, control, target):
        return self.add(Gate("cnot", (control, target)))

    def cswap(self, control, a, b):
        return self.add(Gate("cswap", (control, a, b)))

    def unitary(self, u, targets):
        return self.add(raw_unitary(u, targets))

    def cblock(self, controls, value, u, targets):
        return self.add(controlled_block(controls, value, u, targets))

    def register(self, name: str, wires) -> "Circuit":
        wires = tuple(wires)
        for other, occupied in self.registers.items():
            if set(occupied) & set(wires):
                raise ValueError(f"register {name} overlaps {other}")
        self.registers[name] = wires
        return self

    def dagger(self) -> "Circuit":
        return Circuit(self.width, [g.dagger() for g in reversed(self.gates)],
                       dict(self.registers))


def remap_gates(gates, mapping) -> list[Gate]:
    """Relabel gate wires; `mapping` is a dict or list old-wire -> new-wire."""
    if not isinstance(mapping, dict):
        mapping = {i: m for i, m in enumerate(mapping)}
    out = []
    for g in gates:
        out.append(replace(g, targets=tuple(mapping[t] for t in g.targets),
                           controls=tuple(mapping[c] for c in g.controls)))
    return out


# ---------------------------------------------------------------------------
# pure state engine
# ---------------------------------------------------------------------------

def zero_state(width: int) -> np.ndarray:
    v = np.zeros(2**width, dtype=complex)
    v[0] = 1.0
    return v


def basis_state(width: int, index: int) -> np.ndarray:
    v = np.zeros(2**width, dtype=complex)
    v[index] = 1.0
    return v


def _apply_matrix(t: np.ndarray, u: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Apply a 2^k x 2^k unitary to the given axes of a (2,)*n tensor.

    Trailing non-qubit axes (e.g. a batch axis) are allowed as long as the
    target axes are among the leading qubit axes.
    """
    k = len(axes)
    ut = u.reshape((2,) * (2 * k))
    t = np.tensordot(ut, t, axes=(tuple(range(k, 2 * k)), axes))
    return np.moveaxis(t, tuple(range(k)), axes)


def _apply_gate_tensor(t: np.ndarray, gate: Gate) -> np.ndarray:
    if gate.kind == "cblock":
        idx = [slice(None)] * t.ndim
        for c, b in zip(gate.controls, _bits(gate.control_value, len(gate.controls))):
            idx[c] = b
        idx = tuple(idx)
        sub = t[idx]
        # target axis positions shift once control axes are removed
        shifted = tuple(a - sum(1 for c in gate.controls if c < a) for a in gate.targets)
        t = t.copy()
        t[idx] = _apply_matrix(sub, gate.matrix, shifted)
        return t
    return _apply_matrix(t, gate.payload(), gate.targets)


def _bits(value: int, n: int) -> tuple[int, ...]:
    return tuple((value >> (n - 1 - i)) & 1 for i in range(n))


def apply_gates(state: np.ndarray, gates, width: int) -> np.ndarray:
    t = state.reshape((2,) * width)
    for g in gates:
        t = _apply_gate_tensor(t, g)
    return t.reshape(-1)


def run_pure(circuit: Circuit, input_state: np.ndarray | None = None) -> np.ndarray:
    """Statevector after the circuit; defaults to the all-zeros input."""
    dim = 2**circuit.width
    if input_state is None:
        state = zero_state(circuit.width)
    else:
        state = np.asarray(input_state, dtype=complex).reshape(-1)
        if state.shape != (dim,):
            raise ValueError("input state dimension mismatch")
        if abs(np.linalg.norm(state) - 1.0) > 1e-9:
            raise ValueError("input state is not normalized")
        state = state.copy()
    return apply_gates(state, circuit.gates, circuit.width)


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Full unitary of the circuit (columns evolved in a single batch)."""
    dim = 2**circuit.width
    t = np.eye(dim, dtype=complex).reshape((2,) * circuit.width + (dim,))
    for g in circuit.gates:
        t = _apply_gate_tensor(t, g)
    return t.reshape(dim, dim)


def prep_unitary(state: np.ndarray) -> np.ndarray:
    """A unitary whose first column is `state` (acts as |0> -> state)."""
    v = np.asarray(state, dtype=complex).reshape(-1, 1)
    v = v / np.linalg.norm(v)
    return linalg.unitary_completion(v)


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------

@dataclass
class MeasurementRecord:
    """Sampled outcomes; one bitstring per shot, ordered like `qubits`."""

    outcomes: list[str]
    shots: int
    qubits: tuple[int, ...]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for s in self.outcomes:
            out[s] = out.get(s, 0) + 1
        return out


def _is_density(state: np.ndarray) -> bool:
    return state.ndim == 2 and state.shape[0] == state.shape[1]


def _num_qubits(state: np.ndarray) -> int:
    return int(round(math.log2(state.shape[0])))


def marginal_probabilities(state: np.ndarray, qubits) -> np.ndarray:
    """Born distribution over the listed qubits (in the given order)."""
    qubits = tuple(qubits)
    w = _num_qubits(state)
    if _is_density(state):
        t = state.reshape((2,) * (2 * w))
        probs = np.einsum(t, list(range(w)) + list(range(w)), qubits)
    else:
        t = np.abs(state.reshape((2,) * w)) ** 2
        other = tuple(i for i in range(w) if i not in qubits)
        probs = t.sum(axis=other) if other else t
        probs = np.transpose(probs, np.argsort(np.argsort(qubits)))
    probs = np.real(probs).reshape(-1)
    return np.clip(probs, 0.0, None)


def born_probability(state: np.ndarray, qubits, outcome: str) -> float:
    """Exact probability of one outcome bitstring on the listed qubits."""
    probs = marginal_probabilities(state, qubits)
    return float(probs[int(outcome, 2)] / max(probs.sum(), 1e-300))


def measure(state: np.ndarray, qubits, shots: int, seed: int) -> MeasurementRecord:
    """Sample the Born distribution of the listed qubits. Deterministic per seed."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    qubits = tuple(qubits)
    probs = marginal_probabilities(state, qubits)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(len(probs), size=shots, p=probs)
    n = len(qubits)
    outcomes = [format(d, f"0{n}b") for d in draws]
    return MeasurementRecord(outcomes=outcomes, shots=shots, qubits=qubits)


def apply_readout_flip(record: MeasurementRecord, p: float, seed: int) -> MeasurementRecord:
    """Flip each measured bit independently with probability p."""
    if p <= 0:
        return record
    rng = np.random.default_rng(seed)
    n = len(record.qubits)
    flips = rng.random((record.shots, n)) < p
    out = []
    for s, row in zip(record.outcomes, flips):
        bits = [str(int(b) ^ int(f)) for b, f in zip(s, row)]
        out.append("".join(bits))
    return MeasurementRecord(outcomes=out, shots=record.shots, qubits=record.qubits)


def readout_confusion(probs: np.ndarray, n_bits: int, p: float) -> np.ndarray:
    """Push a distribution over bitstrings through independent bit flips."""
    if p <= 0:
        return probs
    m = np.array([[1 - p, p], [p, 1 - p]])
    t = probs.reshape((2,) * n_bits)
    for ax in range(n_bits):
        t = np.tensordot(m, t, axes=([1], [ax]))
        t = np.moveaxis(t, 0, ax)
    return t.reshape(-1)


# ---------------------------------------------------------------------------
# density engine with parametric noise
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseModel:
    """Per-gate depolarizing + readout flip (+ optional amplitude damping).

    Gates with a single wire draw the 1q rate; gates touching more wires
    (including controlled blocks) draw the 2q rate jointly on all wires.
    """

    depolarizing_1q: float = 0.0
    depolarizing_2q: float = 0.0
    readout_flip: float = 0.0
    amplitude_damping: float = 0.0

    def __post_init__(self):
        for name in ("depolarizing_1q", "depolarizing_2q", "readout_flip",
                     "amplitude_damping"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")

    @property
    def is_noiseless(self) -> bool:
        return (self.depolarizing_1q == 0 and self.depolarizing_2q == 0
                and self.readout_flip == 0 and self.amplitude_damping == 0)


NOISELESS = NoiseModel()


def density_from_pure(state: np.ndarray) -> np.ndarray:
    v = np.asarray(state, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def _conj_gate(gate: Gate, width: int) -> Gate:
    """The gate conj(U) shifted onto the column axes of a density tensor."""
    targets = tuple(t + width for t in gate.targets)
    if gate.kind == "cblock":
        return Gate("cblock", targets=targets, matrix=gate.matrix.conj(),
                    controls=tuple(c + width for c in gate.controls),
                    control_value=gate.control_value)
    return Gate("unitary", targets=targets, matrix=gate.payload().conj())


def _apply_gate_density(rho_t: np.ndarray, gate: Gate, width: int) -> np.ndarray:
    rho_t = _apply_gate_tensor(rho_t, gate)
    return _apply_gate_tensor(rho_t, _conj_gate(gate, width))


def _depolarize(rho_t: np.ndarray, qubits, p: float, width: int) -> np.ndarray:
    if p <= 0:
        return rho_t
    qubits = tuple(qubits)
    k = len(qubits)
    axes = qubits + tuple(q + width for q in qubits)
    # rho -> (1-p) rho + p * I/2^k (x) tr_qubits(rho)
    traced = rho_t
    for i, q in enumerate(sorted(qubits, reverse=True)):
        n_ax = 2 * (width - i)
        traced = np.trace(traced, axis1=q, axis2=q + (n_ax // 2))
    eye = np.eye(2**k, dtype=complex).reshape((2,) * (2 * k)) / 2**k
    mixed = np.tensordot(eye, traced, axes=0)
    # mixed axes: [q-row(k), q-col(k), rest-row, rest-col]; restore ordering
    rest_rows = [q for q in range(width) if q not in qubits]
    src_order = (list(qubits) + [q + width for q in qubits]
                 + rest_rows + [q + width for q in rest_rows])
    mixed = np.moveaxis(mixed, tuple(range(2 * width)), src_order)
    return (1 - p) * rho_t + p * mixed


_AD_K0 = lambda g: np.array([[1, 0], [0, math.sqrt(1 - g)]], dtype=complex)
_AD_K1 = lambda g: np.array([[0, math.sqrt(g)], [0, 0]], dtype=complex)


def _amplitude_damp(rho_t: np.ndarray, qubits, gamma: float, width: int) -> np.ndarray:
    if gamma <= 0:
        return rho_t
    for q in qubits:
        k0, k1 = _AD_K0(gamma), _AD_K1(gamma)
        a = _apply_matrix(_apply_matrix(rho_t, k0, (q,)), k0.conj(), (q + width,))
        b = _apply_matrix(_apply_matrix(rho_t, k1, (q,)), k1.conj(), (q + width,))
        rho_t = a + b
    return rho_t


def run_density(circuit: Circuit, input_rho: np.ndarray | None = None,
                noise: NoiseModel | None = None) -> np.ndarray:
    """Exact density-matrix evolution with per-gate noise channels."""
    noise = noise or NOISELESS
    w = circuit.width
    dim = 2**w
    if input_rho is None:
        rho = density_from_pure(zero_state(w))
    else:
        rho = np.asarray(input_rho, dtype=complex)
        if rho.shape != (dim, dim):
            raise ValueError("input density dimension mismatch")
        if abs(np.trace(rho).real - 1.0) > 1e-8 or not linalg.is_psd(rho, 1e-8):
            raise ValueError("input is not a density operator")
    t = rho.reshape((2,) * (2 * w))
    for g in circuit.gates:
        t = _apply_gate_density(t, g, w)
        qs = g.qubits()
        if len(qs) == 1:
            t = _depolarize(t, qs, noise.depolarizing_1q, w)
        else:
            t = _depolarize(t, qs, noise.depolarizing_2q, w)
        t = _amplitude_damp(t, qs, noise.amplitude_damping, w)
    return t.reshape(dim, dim)


# ---------------------------------------------------------------------------
# Bell pairs
# ---------------------------------------------------------------------------

def bell_pair_gates(a: int, b: int) -> list[Gate]:
    """Prepare (|00>+|11>)/sqrt(2) on wires (a, b) from |00>."""
    return [Gate("h", (a,)), Gate("cnot", (a, b))]


def bell_decode_gates(a: int, b: int) -> list[Gate]:
    """Rotate the Bell basis to the computational basis.

    After these gates a computational measurement of (a, b) yields bits
    (z, x) labelling the Bell state (|0b> + (-1)^z |1,b^1>)/sqrt(2).
    """
    return [Gate("cnot", (a, b)), Gate("h", (a,))]


def bell_basis_measure(state: np.ndarray, pairs, shots: int, seed: int,
                       readout_flip: float = 0.0) -> list[list[tuple[int, int]]]:
    """Measure disjoint qubit pairs in the Bell basis.

    Returns, per shot, a list of (x, z) outcomes, one per pair, following
    the |Phi^{x,z}| labelling convention.
    """
    pairs = [tuple(p) for p in pairs]
    flat = [q for p in pairs for q in p]
    if len(set(flat)) != len(flat):
        raise ValueError("pairs overlap")
    w = _num_qubits(state)
    gates = []
    for a, b in pairs:
        gates.extend(bell_decode_gates(a, b))
    if _is_density(state):
        t = state.reshape((2,) * (2 * w))
        for g in gates:
            t = _apply_gate_density(t, g, w)
        rotated = t.reshape(2**w, 2**w)
    else:
        rotated = apply_gates(state.copy(), gates, w)
    rec = measure(rotated, flat, shots, seed)
    if readout_flip > 0:
        rec = apply_readout_flip(rec, readout_flip, seed + 1)
    results = []
    for s in rec.outcomes:
        per_pair = []
        for i in range(len(pairs)):
            z, x = int(s[2 * i]), int(s[2 * i + 1])
            per_pair.append((x, z))
        results.append(per_pair)
    return results


# ---------------------------------------------------------------------------
# adjoint-mode gradient for noiseless expectation objectives
# ---------------------------------------------------------------------------

def bind_params(gates, theta: np.ndarray) -> list[Gate]:
    """Rebind rotation angles of parameterized gates from a vector."""
    out = []
    for g in gates:
        if g.param is not None:
            out.append(replace(g, angle=float(theta[g.param])))
        else:
            out.append(g)
    return out


def expectation(gates, width: int, observable_apply,
                input_state: np.ndarray | None = None) -> float:
    """<psi|O|psi> for the state produced by `gates` on `input_state`."""
    state = zero_state(width) if input_state is None else input_state.reshape(-1).copy()
    phi = apply_gates(state, gates, width)
    lam = observable_apply(phi.reshape((2,) * width)).reshape(-1)
    return float(np.real(np.vdot(phi, lam)))


def expectation_gradient(gates, width: int, observable_apply, n_params: int,
                         input_state: np.ndarray | None = None):
    """Value and exact gradient of <psi(theta)|O|psi(theta)>.

    Two-sweep adjoint differentiation over rotation/phase gates carrying a
    `param` index; `observable_apply` applies a Hermitian operator to a
    (2,)*width tensor. Only valid for noiseless evolution.
    """
    state = zero_state(width) if input_state is None else input_state.reshape(-1).copy()
    phi = apply_gates(state, gates, width).reshape((2,) * width)
    lam = observable_apply(phi)
    value = float(np.real(np.vdot(phi.reshape(-1), lam.reshape(-1))))
    grad = np.zeros(n_params)
    for g in reversed(gates):
        if g.param is not None:
            if g.kind in _PAULI:
                d = _apply_matrix(phi, -0.5j * _PAULI[g.kind], g.targets)
            elif g.kind == "phase":
                p1 = np.array([[0, 0], [0, 1j]], dtype=complex)
                d = _apply_matrix(phi, p1, g.targets)
            else:
                raise ValueError(f"gate kind {g.kind!r} cannot carry a parameter")
            grad[g.param] += 2.0 * float(np.real(np.vdot(lam.reshape(-1), d.reshape(-1))))
        inv = g.dagger()
        phi = _apply_gate_tensor(phi, inv)
        lam = _apply_gate_tensor(lam, inv)
    return value, grad


def projector_apply(accept_vector: np.ndarray, qubits, width: int):
    """Observable callback |a><a|_Q (x) I for a unit vector on a qubit subset."""
    qubits = tuple(qubits)
    k = len(qubits)
    a = accept_vector.reshape((2,) * k)

    def apply(t: np.ndarray) -> np.ndarray:
        other = tuple(i for i in range(width) if i not in qubits)
        moved = np.transpose(t, qubits + other)
        amp = np.tensordot(a.conj(), moved, axes=(tuple(range(k)), tuple(range(k))))
        out = np.tensordot(a, amp, axes=0)
        return np.transpose(out, np.argsort(qubits + other))

    return apply


def weighted_outcome_apply(weights: np.ndarray, qubits, width: int):
    """Observable callback sum_x w_x |x><x|_Q (x) I (diagonal on a subset)."""
    qubits = tuple(qubits)
    k = len(qubits)
    wts = weights.reshape((2,) * k)

    def apply(t: np.ndarray) -> np.ndarray:
        other = tuple(i for i in range(width) if i not in qubits)
        moved = np.transpose(t, qubits + other)
        out = moved * wts.reshape((2,) * k + (1,) * len(other))
        return np.transpose(out, np.argsort(qubits + other))

    return apply


# ---------------------------------------------------------------------------
# channels and strategies (Stinespring form)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """A channel as a unitary on [input, environment-in] wires.

    Wires are big-endian with the channel input block first, then the
    environment block; after the unitary the same wires are read as
    [output, environment-out]. `superop` is an alternative matrix backing
    for channels without a circuit realization (e.g. channel mixtures).
    """

    unitary: np.ndarray | None
    n_in: int
    n_env_in: int
    n_out: int
    n_env_out: int
    circuit: Circuit | None = None
    superop: np.ndarray | None = None

    def __post_init__(self):
        if self.n_in + self.n_env_in != self.n_out + self.n_env_out:
            raise ValueError("wire count mismatch between input and output split")
        if self.unitary is not None and not linalg.is_unitary(self.unitary, 1e-8):
            raise ValueError("channel dilation is not unitary")
        if self.unitary is None and self.superop is None:
            raise ValueError("channel needs a unitary or a superoperator")

    @property
    def dim_in(self) -> int:
        return 2**self.n_in

    @property
    def dim_out(self) -> int:
        return 2**self.n_out


def channel_from_unitary(u: np.ndarray, n_in: int, n_env_in: int,
                         n_out: int | None = None,
                         circuit: Circuit | None = None) -> ChannelSpec:
    n_out = n_in if n_out is None else n_out
    return ChannelSpec(unitary=np.asarray(u, dtype=complex), n_in=n_in,
                       n_env_in=n_env_in, n_out=n_out,
                       n_env_out=n_in + n_env_in - n_out, circuit=circuit)


def identity_channel(n: int, n_env: int = 0) -> ChannelSpec:
    return channel_from_unitary(np.eye(2 ** (n + n_env), dtype=complex), n, n_env)


@dataclass(frozen=True, eq=False)
class StrategySpec:
    """An n-turn sequence of channels with a shared memory register.

    Turn j's dilation unitary acts on [memory, io-wire, env_j]; the memory
    enters turn 1 in |0> and the final turn's memory output is counted as
    environment.
    """

    turns: tuple[ChannelSpec, ...]
    n_mem: int
    n_io: int

    def __post_init__(self):
        for t in self.turns:
            if t.n_in != self.n_mem + self.n_io:
                raise ValueError("turn wire count does not match memory + io")

    @property
    def n_turns(self) -> int:
        return len(self.turns)


@dataclass(frozen=True, eq=False)
class CoStrategySpec:
    """Interacting counterpart of a strategy: initial pure state on
    [reference, io-wire] plus a unitary on the same wires after each
    intermediate turn."""

    initial: np.ndarray
    unitaries: tuple[np.ndarray, ...]
    n_ref: int
    n_io: int
