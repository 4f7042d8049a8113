"""Circuit-level verifier protocols with exact or trainable provers.

Two families share the machinery here:

* Bell-overlap games: the verifier entangles a control register with the
  inputs through controlled dilations, hands part of the state to a prover,
  and accepts on a (qudit) Bell outcome. Exact provers are built from
  purification aligners (polar decompositions), so the acceptance hits the
  published closed forms.
* Guess games: the verifier secretly picks a branch, the prover measures
  and must name it. Exact provers are Naimark dilations of the optimal
  discrimination measurements.

Every entry point returns an AcceptanceReport with the exact acceptance
probability (statevector path, or density path under noise), an optional
shot-sampled estimate, and the derived distinguishability measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import ansatz, linalg, oracle, qsim
from .qsim import ChannelSpec, Circuit, CoStrategySpec, Gate, NoiseModel, StrategySpec


def hoeffding_shots(eta: float, delta: float) -> int:
    """Shots guaranteeing |estimate - mean| <= eta with confidence 1 - delta."""
    if not (0 < eta < 1 and 0 < delta < 1):
        raise ValueError("eta and delta must lie in (0, 1)")
    return math.ceil((2.0 / eta**2) * math.log(2.0 / delta))


@dataclass
class AcceptanceReport:
    exact_probability: float
    derived_measure: float
    sampled_estimate: float | None = None
    stderr: float | None = None
    shots: int = 0
    details: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class StatePrep:
    """Purification preparer: unitary on [reference, system] from all-zeros."""

    unitary: np.ndarray
    n_ref: int
    n_sys: int
    gates: tuple[Gate, ...] = ()    # circuit realization when available

    @property
    def width(self) -> int:
        return self.n_ref + self.n_sys

    def prep_gates(self, wires) -> list[Gate]:
        if self.gates:
            return qsim.remap_gates(self.gates, list(wires))
        return [qsim.raw_unitary(self.unitary, wires)]

    def purification(self) -> np.ndarray:
        return self.unitary[:, 0].copy()

    def reduced(self) -> np.ndarray:
        psi = self.purification()
        return linalg.partial_trace(qsim.density_from_pure(psi),
                                    [2**self.n_ref, 2**self.n_sys], keep=[1])

    @classmethod
    def from_random_state(cls, rs: ansatz.RandomState) -> "StatePrep":
        return cls(unitary=rs.unitary, n_ref=rs.k, n_sys=rs.n,
                   gates=tuple(rs.circuit.gates))

    @classmethod
    def from_density(cls, rho: np.ndarray, n_ref: int | None = None) -> "StatePrep":
        psi = oracle.purify(rho, n_ref=n_ref)
        n_sys = int(round(math.log2(rho.shape[0])))
        n_ref = n_sys if n_ref is None else n_ref
        return cls(unitary=qsim.prep_unitary(psi), n_ref=n_ref, n_sys=n_sys)

    @classmethod
    def from_pure(cls, psi: np.ndarray) -> "StatePrep":
        n = int(round(math.log2(len(psi))))
        return cls(unitary=qsim.prep_unitary(psi), n_ref=0, n_sys=n)


@dataclass(frozen=True)
class ProverSpec:
    """How a prover slot is filled.

    exact: oracle-built optimal object. fixed: a supplied unitary (or input
    state vector for input-slots). parameterized: an HEA on the slot's wires
    plus `ancillas` fresh work qubits.
    """

    mode: str = "exact"
    role: str = "max"
    layers: int = 2
    ancillas: int = 0
    rotations: str = "xy"
    params: np.ndarray | None = None
    unitary: np.ndarray | None = None
    state: np.ndarray | None = None

    @classmethod
    def exact(cls, role: str = "max") -> "ProverSpec":
        return cls(mode="exact", role=role)

    @classmethod
    def fixed(cls, unitary: np.ndarray | None = None, state: np.ndarray | None = None,
              role: str = "max") -> "ProverSpec":
        return cls(mode="fixed", role=role, unitary=unitary, state=state)

    @classmethod
    def hea(cls, layers: int, params: np.ndarray, ancillas: int = 0,
            rotations: str = "xy", role: str = "max") -> "ProverSpec":
        return cls(mode="parameterized", role=role, layers=layers,
                   ancillas=ancillas, rotations=rotations,
                   params=np.asarray(params, dtype=float))


def _ensure_prover(prover) -> ProverSpec:
    if prover is None:
        return ProverSpec.exact()
    if isinstance(prover, ProverSpec):
        return prover
    if isinstance(prover, np.ndarray):
        if prover.ndim == 1:
            return ProverSpec.fixed(state=prover)
        return ProverSpec.fixed(unitary=prover)
    raise TypeError("prover must be None, a ProverSpec, or an ndarray")


def _prover_gates(prover: ProverSpec, wires, param_offset: int = 0):
    """Gates of a resolved non-exact prover acting on `wires` (plus ancillas
    already included in `wires`)."""
    if prover.mode == "fixed":
        return [qsim.raw_unitary(prover.unitary, wires)]
    if prover.mode == "parameterized":
        spec = ansatz.AnsatzSpec(width=len(wires), layers=prover.layers,
                                 rotations=prover.rotations)
        params = prover.params
        if params is None:
            raise ValueError("parameterized prover needs bound parameters")
        return ansatz.build_hea(spec, params, wires=wires, width=max(wires) + 1,
                                param_offset=param_offset).gates
    raise ValueError(f"cannot realize prover mode {prover.mode!r} here")


# ---------------------------------------------------------------------------
# shared acceptance computation
# ---------------------------------------------------------------------------

def qudit_bell_vector(n_qubits: int, d: int) -> np.ndarray:
    """(1/sqrt(d)) sum_{x<d} |xx> over two n-qubit registers."""
    dim = 2**n_qubits
    v = np.zeros(dim * dim, dtype=complex)
    for x in range(d):
        v[x * dim + x] = 1.0
    return v / math.sqrt(d)


def correlated_prior_vector(probs: np.ndarray, n_qubits: int) -> np.ndarray:
    """sum_x sqrt(p(x)) |xx> over two n-qubit registers."""
    dim = 2**n_qubits
    v = np.zeros(dim * dim, dtype=complex)
    for x, p in enumerate(probs):
        v[x * dim + x] = math.sqrt(p)
    return v


@dataclass
class BellGame:
    """Assembled Bell-overlap game ready for evaluation."""

    width: int
    gates: list[Gate]
    tprime: tuple[int, ...]
    t: tuple[int, ...]
    d: int
    n_params: int = 0

    def accept_wires(self) -> tuple[int, ...]:
        return tuple(self.tprime) + tuple(self.t)

    def accept_vector(self) -> np.ndarray:
        return qudit_bell_vector(len(self.t), self.d)


def bell_acceptance_exact(game: BellGame) -> float:
    obs = qsim.projector_apply(game.accept_vector(), game.accept_wires(), game.width)
    return float(np.clip(qsim.expectation(game.gates, game.width, obs), 0.0, 1.0))


def _bell_decode_block(game: BellGame) -> Gate:
    w = linalg.unitary_completion(game.accept_vector().reshape(-1, 1))
    return qsim.raw_unitary(w.conj().T, game.accept_wires())


def bell_acceptance_noisy(game: BellGame, noise: NoiseModel) -> float:
    """Acceptance under the noise model: density evolution, Bell decode,
    readout confusion, probability of the all-zeros decode outcome."""
    circ = Circuit(game.width, list(game.gates) + [_bell_decode_block(game)])
    rho = qsim.run_density(circ, noise=noise)
    wires = game.accept_wires()
    probs = qsim.marginal_probabilities(rho, wires)
    probs = qsim.readout_confusion(probs, len(wires), noise.readout_flip)
    return float(np.clip(probs[0] / max(probs.sum(), 1e-300), 0.0, 1.0))


def bell_acceptance_sampled(game: BellGame, shots: int, seed: int,
                            noise: NoiseModel | None = None):
    noise = noise or qsim.NOISELESS
    circ = Circuit(game.width, list(game.gates) + [_bell_decode_block(game)])
    wires = game.accept_wires()
    if noise.is_noiseless:
        state = qsim.run_pure(circ)
    else:
        state = qsim.run_density(circ, noise=noise)
    rec = qsim.measure(state, wires, shots, seed)
    if noise.readout_flip > 0:
        rec = qsim.apply_readout_flip(rec, noise.readout_flip, seed + 7919)
    hits = sum(1 for s in rec.outcomes if set(s) == {"0"})
    est = hits / shots
    return est, math.sqrt(max(est * (1 - est), 1e-12) / shots)


def _bell_report(game: BellGame, derived_fn, shots: int, seed: int,
                 noise: NoiseModel | None, details: dict | None = None) -> AcceptanceReport:
    noise = noise or qsim.NOISELESS
    if noise.is_noiseless:
        p = bell_acceptance_exact(game)
    else:
        p = bell_acceptance_noisy(game, noise)
    rep = AcceptanceReport(exact_probability=p, derived_measure=derived_fn(p),
                           details=details or {})
    if shots > 0:
        est, err = bell_acceptance_sampled(game, shots, seed, noise)
        rep.sampled_estimate, rep.stderr, rep.shots = est, err, shots
    return rep


@dataclass
class GuessGame:
    """Assembled guess game: one branch circuit per secret value."""

    branches: list[tuple[float, list[Gate]]]
    width: int
    t_wires: tuple[int, ...]
    accept_fn: object        # callable(i, j) -> bool
    n_params: int = 0

    def accept_sets(self):
        dt = 2 ** len(self.t_wires)
        return [{j for j in range(dt) if self.accept_fn(i, j)}
                for i in range(len(self.branches))]


def guess_acceptance_exact(game: GuessGame, noise: NoiseModel | None = None) -> float:
    noise = noise or qsim.NOISELESS
    total = 0.0
    sets = game.accept_sets()
    for i, (p, gates) in enumerate(game.branches):
        if noise.is_noiseless:
            state = qsim.apply_gates(qsim.zero_state(game.width), gates, game.width)
        else:
            state = qsim.run_density(Circuit(game.width, list(gates)), noise=noise)
        probs = qsim.marginal_probabilities(state, game.t_wires)
        probs = probs / max(probs.sum(), 1e-300)
        if not noise.is_noiseless:
            probs = qsim.readout_confusion(probs, len(game.t_wires), noise.readout_flip)
        total += p * sum(probs[j] for j in sets[i])
    return float(np.clip(total, 0.0, 1.0))


def guess_acceptance_sampled(game: GuessGame, shots: int, seed: int,
                             noise: NoiseModel | None = None):
    noise = noise or qsim.NOISELESS
    rng = np.random.default_rng(seed)
    sets = game.accept_sets()
    probs = np.array([p for p, _ in game.branches])
    dists = []
    for _, gates in game.branches:
        if noise.is_noiseless:
            state = qsim.apply_gates(qsim.zero_state(game.width), gates, game.width)
        else:
            state = qsim.run_density(Circuit(game.width, list(gates)), noise=noise)
        pd = qsim.marginal_probabilities(state, game.t_wires)
        pd = pd / max(pd.sum(), 1e-300)
        if not noise.is_noiseless:
            pd = qsim.readout_confusion(pd, len(game.t_wires), noise.readout_flip)
        dists.append(pd)
    hits = 0
    draws_i = rng.choice(len(probs), size=shots, p=probs / probs.sum())
    for i in draws_i:
        j = rng.choice(len(dists[i]), p=dists[i] / dists[i].sum())
        hits += int(j in sets[i])
    est = hits / shots
    return est, math.sqrt(max(est * (1 - est), 1e-12) / shots)


def _guess_report(game: GuessGame, derived_fn, shots: int, seed: int,
                  noise: NoiseModel | None, details: dict | None = None) -> AcceptanceReport:
    p = guess_acceptance_exact(game, noise)
    rep = AcceptanceReport(exact_probability=p, derived_measure=derived_fn(p),
                           details=details or {})
    if shots > 0:
        est, err = guess_acceptance_sampled(game, shots, seed, noise)
        rep.sampled_estimate, rep.stderr, rep.shots = est, err, shots
    return rep


def _as_prep_gates(obj, wires) -> list[Gate]:
    """State-prep input: Circuit, gate list, or unitary matrix."""
    if isinstance(obj, Circuit):
        return qsim.remap_gates(obj.gates, list(wires))
    if isinstance(obj, np.ndarray):
        return [qsim.raw_unitary(obj, wires)]
    return qsim.remap_gates(list(obj), list(wires))


def _as_unitary(obj, width: int) -> np.ndarray:
    if isinstance(obj, Circuit):
        return qsim.unitary_of(obj)
    if isinstance(obj, np.ndarray):
        return obj
    return qsim.unitary_of(Circuit(width, list(obj)))


# ---------------------------------------------------------------------------
# pure-state protocols
# ---------------------------------------------------------------------------

def alg1_pure_overlap(u0, u1, n_sys: int, *, shots: int = 0, seed: int = 0,
                      noise: NoiseModel | None = None) -> AcceptanceReport:
    """Prepare with the first circuit, undo with the second, accept on all
    zeros; the acceptance probability is the squared overlap."""
    wires = list(range(n_sys))
    gates = _as_prep_gates(u0, wires)
    g1 = _as_prep_gates(u1, wires)
    gates += [g.dagger() for g in reversed(g1)]
    game = GuessGame(branches=[(1.0, gates)], width=n_sys, t_wires=tuple(wires),
                     accept_fn=lambda i, j: j == 0)
    return _guess_report(game, lambda p: p, shots, seed, noise)


def alg2_phase_bell(u0, u1, n_sys: int, phi: float | None = None, *,
                    phase_grid: int = 96, shots: int = 0, seed: int = 0,
                    noise: NoiseModel | None = None) -> AcceptanceReport:
    """Bell-pair control with a tunable phase; the phase-optimized acceptance
    is (1 + sqrt(F))/2 for pure states."""
    tprime, t = 0, 1
    sys_wires = list(range(2, 2 + n_sys))
    u0m, u1m = _as_unitary(u0, n_sys), _as_unitary(u1, n_sys)

    def game_at(phase):
        gates = qsim.bell_pair_gates(tprime, t)
        gates.append(qsim.controlled_block([t], 0, u0m, sys_wires))
        gates.append(qsim.controlled_block([t], 1, u1m, sys_wires))
        gates.append(Gate("phase", (tprime,), angle=phase))
        return BellGame(width=2 + n_sys, gates=gates, tprime=(tprime,), t=(t,), d=2)

    details = {}
    if phi is None:
        # coarse sweep, then the analytic refinement from two evaluations
        grid = np.linspace(0.0, 2 * math.pi, phase_grid, endpoint=False)
        vals = [bell_acceptance_exact(game_at(g)) for g in grid]
        p0 = bell_acceptance_exact(game_at(0.0))
        p90 = bell_acceptance_exact(game_at(math.pi / 2))
        re_ov, im_ov = 2 * p0 - 1, -(2 * p90 - 1)
        phi_star = float(-math.atan2(im_ov, re_ov)) % (2 * math.pi)
        cand = grid[int(np.argmax(vals))]
        phi = phi_star if bell_acceptance_exact(game_at(phi_star)) >= max(vals) else cand
        details["phi"] = float(phi)
        details["phase_sweep_max"] = float(max(vals))
    return _bell_report(game_at(phi), lambda p: np.clip(2 * p - 1, 0, 1) ** 2,
                        shots, seed, noise, details)


def alg3_pure_mixed(rho_prep: StatePrep, psi, *, shots: int = 0, seed: int = 0,
                    noise: NoiseModel | None = None) -> AcceptanceReport:
    """Purify the mixed state, undo the pure state's preparation on the
    system block, accept on all zeros there."""
    r, s = rho_prep.n_ref, rho_prep.n_sys
    sys_wires = list(range(r, r + s))
    gates = rho_prep.prep_gates(range(r + s))
    psi_gates = _as_prep_gates(psi, sys_wires)
    gates += [g.dagger() for g in reversed(psi_gates)]
    game = GuessGame(branches=[(1.0, gates)], width=r + s, t_wires=tuple(sys_wires),
                     accept_fn=lambda i, j: j == 0)
    return _guess_report(game, lambda p: p, shots, seed, noise)


def fidelity_pure_mixed_decision(rho_prep: StatePrep, psi, alpha: float, beta: float,
                                 shots: int, seed: int = 0,
                                 noise: NoiseModel | None = None) -> bool:
    """Decide F >= 1 - alpha (True) versus F <= 1 - beta (False) by majority
    of accept outcomes against the midpoint threshold."""
    if not 0 <= alpha < beta <= 1:
        raise ValueError("need 0 <= alpha < beta <= 1")
    rep = alg3_pure_mixed(rho_prep, psi, shots=shots, seed=seed, noise=noise)
    threshold = 1.0 - 0.5 * (alpha + beta)
    return rep.sampled_estimate >= threshold


# ---------------------------------------------------------------------------
# mixed-state fidelity protocols
# ---------------------------------------------------------------------------

def _controlled_dilations(t_wire: int, payloads, targets) -> list[Gate]:
    return [qsim.controlled_block([t_wire], i, u, targets)
            for i, u in enumerate(payloads)]


def alg4_game(prep0: StatePrep, prep1: StatePrep, prover: ProverSpec,
              theta: np.ndarray | None = None) -> BellGame:
    r, s = prep0.n_ref, prep0.n_sys
    if (prep1.n_ref, prep1.n_sys) != (r, s):
        raise ValueError("purifications live on different registers")
    anc = prover.ancillas if prover.mode == "parameterized" else 0
    tprime, t = 0, 1
    ref = list(range(2, 2 + r))
    sys = list(range(2 + r, 2 + r + s))
    fan = list(range(2 + r + s, 2 + r + s + anc))
    width = 2 + r + s + anc
    gates = qsim.bell_pair_gates(tprime, t)
    gates += _controlled_dilations(t, [prep0.unitary, prep1.unitary], ref + sys)
    n_params = 0
    if prover.mode == "exact":
        block = oracle.exact_prover_alg4(prep0.purification(), prep1.purification(), r, s)
        gates.append(qsim.raw_unitary(block, [tprime] + ref))
    elif prover.mode == "fixed":
        gates.append(qsim.raw_unitary(prover.unitary, [tprime] + ref + fan))
    else:
        pv = prover if theta is None else \
            ProverSpec.hea(prover.layers, theta, prover.ancillas, prover.rotations)
        gates += _prover_gates(pv, [tprime] + ref + fan)
        n_params = ansatz.AnsatzSpec(1 + r + anc, prover.layers,
                                     rotations=prover.rotations).param_count
    return BellGame(width=width, gates=gates, tprime=(tprime,), t=(t,), d=2,
                    n_params=n_params)


def alg4_state_fidelity(prep0: StatePrep, prep1: StatePrep, prover=None, *,
                        shots: int = 0, seed: int = 0,
                        noise: NoiseModel | None = None) -> AcceptanceReport:
    """Controlled-dilation game whose optimal acceptance is (1+sqrt(F))/2."""
    prover = _ensure_prover(prover)
    game = alg4_game(prep0, prep1, prover)
    return _bell_report(game, lambda p: np.clip(2 * p - 1, 0, 1) ** 2,
                        shots, seed, noise)


def alg5_game(prep0: StatePrep, prep1: StatePrep, prover: ProverSpec,
              theta: np.ndarray | None = None) -> BellGame:
    r, s = prep0.n_ref, prep0.n_sys
    if (prep1.n_ref, prep1.n_sys) != (r, s):
        raise ValueError("purifications live on different registers")
    anc = prover.ancillas if prover.mode == "parameterized" else 0
    tprime, t = 0, 1
    r1 = list(range(2, 2 + r))
    s1 = list(range(2 + r, 2 + r + s))
    r2 = list(range(2 + r + s, 2 + 2 * r + s))
    s2 = list(range(2 + 2 * r + s, 2 + 2 * r + 2 * s))
    fan = list(range(2 + 2 * r + 2 * s, 2 + 2 * r + 2 * s + anc))
    width = 2 + 2 * (r + s) + anc
    gates = qsim.bell_pair_gates(tprime, t)
    gates += prep0.prep_gates(r1 + s1)
    gates += prep1.prep_gates(r2 + s2)
    for a, b in zip(s1, s2):
        gates.append(Gate("cswap", (t, a, b)))
    n_params = 0
    if prover.mode == "exact":
        # branch 1 holds the swapped pair: exchange the two reference blocks,
        # then apply the aligner and its adjoint, multiplying both overlaps
        v, _ = oracle.uhlmann_prover(prep1.purification(), prep0.purification(), r, s)
        dr = 2**r
        swap_blocks = np.zeros((dr * dr, dr * dr), dtype=complex)
        for a in range(dr):
            for b in range(dr):
                swap_blocks[a * dr + b, b * dr + a] = 1.0
        p0 = np.diag([1.0, 0.0]).astype(complex)
        p1 = np.diag([0.0, 1.0]).astype(complex)
        eye = np.eye(dr * dr, dtype=complex)
        block = np.kron(p0, eye) + np.kron(p1, np.kron(v, v.conj().T) @ swap_blocks)
        gates.append(qsim.raw_unitary(block, [tprime] + r1 + r2))
    elif prover.mode == "fixed":
        gates.append(qsim.raw_unitary(prover.unitary, [tprime] + r1 + r2 + fan))
    else:
        pv = prover if theta is None else \
            ProverSpec.hea(prover.layers, theta, prover.ancillas, prover.rotations)
        gates += _prover_gates(pv, [tprime] + r1 + r2 + fan)
        n_params = ansatz.AnsatzSpec(1 + 2 * r + anc, prover.layers,
                                     rotations=prover.rotations).param_count
    return BellGame(width=width, gates=gates, tprime=(tprime,), t=(t,), d=2,
                    n_params=n_params)


def alg5_generalized_swap(prep0: StatePrep, prep1: StatePrep, prover=None, *,
                          shots: int = 0, seed: int = 0,
                          noise: NoiseModel | None = None) -> AcceptanceReport:
    """Controlled-swap game whose optimal acceptance is (1+F)/2."""
    prover = _ensure_prover(prover)
    game = alg5_game(prep0, prep1, prover)
    return _bell_report(game, lambda p: float(np.clip(2 * p - 1, 0, 1)),
                        shots, seed, noise)


def alg6_overlap(prep0: StatePrep, prep1: StatePrep, v_r: np.ndarray) -> float:
    """|<psi1| (V on reference) |psi0>|^2 evaluated exactly."""
    r, s = prep0.n_ref, prep0.n_sys
    psi0 = prep0.purification().reshape((2,) * (r + s))
    moved = qsim._apply_matrix(psi0, v_r, tuple(range(r)))
    return float(abs(np.vdot(prep1.purification(), moved.reshape(-1))) ** 2)


def alg6_bell_variational(prep0: StatePrep, prep1: StatePrep, v_r=None, *,
                          eta: float = 0.05, delta: float = 0.01,
                          shots: int = 0, seed: int = 0,
                          noise: NoiseModel | None = None) -> AcceptanceReport:
    """Doubled-system Bell-measurement estimator of the aligned overlap.

    The per-shot parity Y is +-1 with mean F_theta; the exact acceptance is
    reported as P(Y = +1) = (1 + F_theta)/2. With the purification aligner
    from the oracle, F_theta equals the fidelity. shots < 0 samples with the
    Hoeffding count for (eta, delta).
    """
    r, s = prep0.n_ref, prep0.n_sys
    if v_r is None:
        v_r, _ = oracle.uhlmann_prover(prep0.purification(), prep1.purification(), r, s)
    overlap = alg6_overlap(prep0, prep1, v_r)
    rep = AcceptanceReport(exact_probability=(1 + overlap) / 2,
                           derived_measure=overlap,
                           details={"estimator_mean": overlap,
                                    "hoeffding_shots": hoeffding_shots(eta, delta)})
    if shots == 0:
        return rep
    shots = shots if shots > 0 else hoeffding_shots(eta, delta)
    # doubled system: [R1, S1, R2, S2] with the aligner applied to R1
    r1 = list(range(r))
    s1 = list(range(r, r + s))
    r2 = list(range(r + s, 2 * r + s))
    s2 = list(range(2 * r + s, 2 * r + 2 * s))
    width = 2 * (r + s)
    circ = Circuit(width)
    circ.extend(prep0.prep_gates(r1 + s1))
    circ.extend(prep1.prep_gates(r2 + s2))
    circ.unitary(v_r, r1)
    noise = noise or qsim.NOISELESS
    if noise.is_noiseless:
        state = qsim.run_pure(circ)
    else:
        state = qsim.run_density(circ, noise=noise)
    pairs = list(zip(r1 + s1, r2 + s2))
    results = qsim.bell_basis_measure(state, pairs, shots, seed,
                                      readout_flip=noise.readout_flip)
    ys = [(-1) ** sum(x * z for x, z in shot) for shot in results]
    mean_y = float(np.mean(ys))
    rep.sampled_estimate = (1 + mean_y) / 2
    rep.stderr = float(np.std(ys, ddof=1) / math.sqrt(shots)) / 2
    rep.shots = shots
    rep.details["estimator_mean_sampled"] = mean_y
    return rep


def alg7_probe_distributions(prep0: StatePrep, prep1: StatePrep, u_sp: np.ndarray,
                             n_probe: int, noise: NoiseModel | None = None):
    """Exact probe-outcome distributions for both states."""
    noise = noise or qsim.NOISELESS
    dists = []
    for prep in (prep0, prep1):
        r, s = prep.n_ref, prep.n_sys
        width = r + s + n_probe
        sys_wires = list(range(r, r + s))
        probe = list(range(r + s, width))
        circ = Circuit(width)
        circ.extend(prep.prep_gates(range(r + s)))
        circ.unitary(u_sp, sys_wires + probe)
        if noise.is_noiseless:
            state = qsim.run_pure(circ)
        else:
            state = qsim.run_density(circ, noise=noise)
        pd = qsim.marginal_probabilities(state, probe)
        pd = pd / max(pd.sum(), 1e-300)
        if not noise.is_noiseless:
            pd = qsim.readout_confusion(pd, n_probe, noise.readout_flip)
        dists.append(pd)
    return dists[0], dists[1]


def alg7_fc_variational(prep0: StatePrep, prep1: StatePrep, u_sp=None,
                        n_probe: int | None = None, *, shots: int = 0,
                        seed: int = 0,
                        noise: NoiseModel | None = None) -> AcceptanceReport:
    """Measured-overlap cost from a dilated measurement on both states.

    With the oracle's likelihood-ratio measurement dilated onto the probe,
    the exact cost equals the fidelity; minimizing over parameterized
    dilations upper-bounds it.
    """
    details = {}
    if u_sp is None:
        povm = oracle.fuchs_caves_measurement(prep0.reduced(), prep1.reduced())
        need = max(1, math.ceil(math.log2(len(povm.elements))))
        n_probe = need if n_probe is None else n_probe
        u_sp = oracle.naimark_unitary(povm, n_probe)
        details["povm_outcomes"] = len(povm.elements)
    elif n_probe is None:
        n_probe = int(round(math.log2(u_sp.shape[0]))) - prep0.n_sys
    p, q = alg7_probe_distributions(prep0, prep1, u_sp, n_probe, noise)
    cost = oracle.classical_fidelity(p, q)
    rep = AcceptanceReport(exact_probability=float(np.clip(cost, 0, 1)),
                           derived_measure=float(cost), details=details)
    if shots > 0:
        rng = np.random.default_rng(seed)
        emp = []
        for dist in (p, q):
            draws = rng.choice(len(dist), size=shots, p=dist / dist.sum())
            counts = np.bincount(draws, minlength=len(dist))
            emp.append(counts / shots)
        est = oracle.classical_fidelity(emp[0], emp[1])
        rep.sampled_estimate = float(est)
        rep.stderr = None
        rep.shots = shots
    return rep


# ---------------------------------------------------------------------------
# channel fidelity protocols
# ---------------------------------------------------------------------------

def _common_dilation(ch0: ChannelSpec, ch1: ChannelSpec):
    if (ch0.n_in, ch0.n_out) != (ch1.n_in, ch1.n_out):
        raise ValueError("channels act on incompatible systems")
    k = max(ch0.n_env_in, ch1.n_env_in)

    def padded(ch):
        if ch.n_env_in == k:
            return ch.unitary
        extra = k - ch.n_env_in
        return np.kron(ch.unitary, np.eye(2**extra, dtype=complex))

    return padded(ch0), padded(ch1), k


def alg8_game(ch0: ChannelSpec, ch1: ChannelSpec, input_prep,
              max_prover: ProverSpec, theta: np.ndarray | None = None,
              input_param_gates: list[Gate] | None = None,
              n_input_params: int = 0) -> BellGame:
    """Shared builder for the channel-fidelity game (also the single-prover
    maximum-output variant when the final block includes the reference)."""
    u0, u1, k = _common_dilation(ch0, ch1)
    n = ch0.n_in
    r = n
    anc = max_prover.ancillas if max_prover.mode == "parameterized" else 0
    tprime, t = 0, 1
    ref = list(range(2, 2 + r))
    a_w = list(range(2 + r, 2 + r + n))
    e_w = list(range(2 + r + n, 2 + r + n + k))
    fan = list(range(2 + r + n + k, 2 + r + n + k + anc))
    width = 2 + r + n + k + anc
    gates = qsim.bell_pair_gates(tprime, t)
    if input_param_gates is not None:
        gates += input_param_gates
    else:
        gates += _as_prep_gates(input_prep, ref + a_w)
    gates += _controlled_dilations(t, [u0, u1], a_w + e_w)
    n_params = n_input_params
    include_ref = max_prover.role == "single"
    prover_wires = [tprime] + (ref if include_ref else []) + e_w + fan
    if max_prover.mode == "exact":
        prep_g = (input_param_gates if input_param_gates is not None
                  else _as_prep_gates(input_prep, ref + a_w))
        chi = []
        for u in (u0, u1):
            g = qsim.remap_gates(prep_g, {w: w - 2 for w in range(2, width)})
            g.append(qsim.raw_unitary(u, [w - 2 for w in a_w + e_w]))
            chi.append(qsim.apply_gates(qsim.zero_state(width - 2 - anc), g,
                                        width - 2 - anc))
        ref_block = ([w - 2 for w in ref] if include_ref else []) \
            + [w - 2 for w in e_w]
        v, _ = oracle.uhlmann_unitary(chi[0], chi[1], width - 2 - anc, ref_block)
        p0 = np.diag([1.0, 0.0]).astype(complex)
        p1 = np.diag([0.0, 1.0]).astype(complex)
        block = np.kron(p0, v) + np.kron(p1, np.eye(v.shape[0], dtype=complex))
        gates.append(qsim.raw_unitary(block, [tprime] + (ref if include_ref else [])
                                      + e_w))
    elif max_prover.mode == "fixed":
        gates.append(qsim.raw_unitary(max_prover.unitary, prover_wires))
    else:
        pv = max_prover if theta is None else \
            ProverSpec.hea(max_prover.layers, theta, max_prover.ancillas,
                           max_prover.rotations)
        gates += _prover_gates(pv, prover_wires, param_offset=n_input_params)
        n_params += ansatz.AnsatzSpec(len(prover_wires), max_prover.layers,
                                      rotations=max_prover.rotations).param_count
    return BellGame(width=width, gates=gates, tprime=(tprime,), t=(t,), d=2,
                    n_params=n_params)


def alg8_channel_fidelity(ch0: ChannelSpec, ch1: ChannelSpec, min_prover=None,
                          max_prover=None, *, shots: int = 0, seed: int = 0,
                          noise: NoiseModel | None = None,
                          restarts: int = 16) -> AcceptanceReport:
    """Competing-prover game for the channel fidelity; optimal acceptance is
    (1 + sqrt(F(N0, N1)))/2."""
    max_prover = _ensure_prover(max_prover)
    details = {}
    if min_prover is None:
        res = oracle.channel_fidelity(ch0, ch1, restarts=restarts, seed=seed)
        input_prep = qsim.prep_unitary(res.state)
        details["oracle_channel_fidelity"] = res.value
    elif isinstance(min_prover, np.ndarray) and min_prover.ndim == 1:
        input_prep = qsim.prep_unitary(min_prover)
    else:
        input_prep = min_prover
    game = alg8_game(ch0, ch1, input_prep, max_prover)
    return _bell_report(game, lambda p: np.clip(2 * p - 1, 0, 1) ** 2,
                        shots, seed, noise, details)


def alg10_max_output_fidelity(ch0: ChannelSpec, ch1: ChannelSpec, prover=None, *,
                              shots: int = 0, seed: int = 0,
                              noise: NoiseModel | None = None) -> AcceptanceReport:
    """Single-prover variant: the prover both chooses the input state and
    post-processes holding its reference, achieving
    (1 + sup_rho sqrt(F(N0(rho), N1(rho))))/2.

    `prover` is None (oracle input + aligner), an input state (vector or
    density; the final block stays oracle-optimal for it), or a pair of
    ProverSpecs (input HEA, final HEA) with bound parameters.
    """
    details = {}
    if isinstance(prover, tuple):
        inp, fin = prover
        game = _alg10_parameterized_game(ch0, ch1, inp, fin)
        return _bell_report(game, lambda p: np.clip(2 * p - 1, 0, 1) ** 2,
                            shots, seed, noise, details)
    if prover is None:
        res = oracle.max_output_fidelity(ch0, ch1)
        rho = res.state
        details["oracle_max_output_fidelity"] = res.value
    elif isinstance(prover, np.ndarray):
        rho = prover if prover.ndim == 2 else qsim.density_from_pure(prover)
    else:
        raise TypeError("prover must be None, a state, or a (input, final) pair")
    prep = StatePrep.from_density(rho, n_ref=ch0.n_in)
    final = ProverSpec(mode="exact", role="single")
    game = alg8_game(ch0, ch1, prep.unitary, final)
    return _bell_report(game, lambda p: np.clip(2 * p - 1, 0, 1) ** 2,
                        shots, seed, noise, details)


def _alg10_parameterized_game(ch0: ChannelSpec, ch1: ChannelSpec,
                              inp: ProverSpec, fin: ProverSpec) -> BellGame:
    n = ch0.n_in
    in_spec = ansatz.AnsatzSpec(2 * n, inp.layers, rotations=inp.rotations)
    in_gates = ansatz.build_hea(in_spec, inp.params,
                                wires=range(2, 2 + 2 * n), width=2 + 2 * n).gates
    fin = ProverSpec(mode=fin.mode, role="single", layers=fin.layers,
                     ancillas=fin.ancillas, rotations=fin.rotations,
                     params=fin.params, unitary=fin.unitary)
    return alg8_game(ch0, ch1, None, fin, input_param_gates=in_gates,
                     n_input_params=in_spec.param_count)


# ---------------------------------------------------------------------------
# strategy fidelity protocol
# ---------------------------------------------------------------------------

def alg9_game(s0: StrategySpec, s1: StrategySpec, co: CoStrategySpec,
              max_prover: ProverSpec) -> BellGame:
    if (s0.n_turns, s0.n_mem, s0.n_io) != (s1.n_turns, s1.n_mem, s1.n_io):
        raise ValueError("strategies have incompatible interfaces")
    n, nm, nio = s0.n_turns, s0.n_mem, s0.n_io
    r = co.n_ref
    env_sizes = [t.n_env_in for t in s0.turns]
    if [t.n_env_in for t in s1.turns] != env_sizes:
        raise ValueError("strategies have different environment layouts")
    anc = max_prover.ancillas if max_prover.mode == "parameterized" else 0
    tprime, t = 0, 1
    ref = list(range(2, 2 + r))
    mem = list(range(2 + r, 2 + r + nm))
    io = list(range(2 + r + nm, 2 + r + nm + nio))
    env_off = 2 + r + nm + nio
    env_all = list(range(env_off, env_off + sum(env_sizes)))
    fan = list(range(env_off + sum(env_sizes), env_off + sum(env_sizes) + anc))
    width = env_off + sum(env_sizes) + anc

    gates = qsim.bell_pair_gates(tprime, t)
    gates.append(qsim.raw_unitary(qsim.prep_unitary(co.initial), ref + io))
    for j in range(n):
        e_w = [env_off + sum(env_sizes[:j]) + x for x in range(env_sizes[j])]
        gates += _controlled_dilations(t, [s0.turns[j].unitary,
                                           s1.turns[j].unitary], mem + io + e_w)
        if j < n - 1:
            gates.append(qsim.raw_unitary(co.unitaries[j], ref + io))
    n_params = 0
    prover_wires = [tprime] + mem + env_all + fan
    if max_prover.mode == "exact":
        chi = []
        for turns in (s0.turns, s1.turns):
            g = [qsim.raw_unitary(qsim.prep_unitary(co.initial),
                                  [w - 2 for w in ref + io])]
            for j in range(n):
                e_w = [env_off - 2 + sum(env_sizes[:j]) + x
                       for x in range(env_sizes[j])]
                g.append(qsim.raw_unitary(turns[j].unitary,
                                          [w - 2 for w in mem + io] + e_w))
                if j < n - 1:
                    g.append(qsim.raw_unitary(co.unitaries[j],
                                              [w - 2 for w in ref + io]))
            chi.append(qsim.apply_gates(qsim.zero_state(width - 2 - anc), g,
                                        width - 2 - anc))
        blockw = [w - 2 for w in mem + env_all]
        v, _ = oracle.uhlmann_unitary(chi[0], chi[1], width - 2 - anc, blockw)
        p0 = np.diag([1.0, 0.0]).astype(complex)
        p1 = np.diag([0.0, 1.0]).astype(complex)
        block = np.kron(p0, v) + np.kron(p1, np.eye(v.shape[0], dtype=complex))
        gates.append(qsim.raw_unitary(block, [tprime] + mem + env_all))
    elif max_prover.mode == "fixed":
        gates.append(qsim.raw_unitary(max_prover.unitary, prover_wires))
    else:
        gates += _prover_gates(max_prover, prover_wires)
        n_params = ansatz.AnsatzSpec(len(prover_wires), max_prover.layers,
                                     rotations=max_prover.rotations).param_count
    return BellGame(width=width, gates=gates, tprime=(tprime,), t=(t,), d=2,
                    n_params=n_params)


def alg9_strategy_fidelity(s0: StrategySpec, s1: StrategySpec, co_strategy=None,
                           max_prover=None, *, shots: int = 0, seed: int = 0,
                           noise: NoiseModel | None = None,
                           restarts: int = 4) -> AcceptanceReport:
    """Interleaved controlled-dilation game for the strategy fidelity."""
    max_prover = _ensure_prover(max_prover)
    details = {}
    if co_strategy is None:
        res = oracle.strategy_fidelity(s0, s1, restarts=restarts, seed=seed)
        co_strategy = res.co_strategy
        details["oracle_strategy_fidelity"] = res.value
    game = alg9_game(s0, s1, co_strategy, max_prover)
    return _bell_report(game, lambda p: np.clip(2 * p - 1, 0, 1) ** 2,
                        shots, seed, noise, details)


# ---------------------------------------------------------------------------
# ensemble similarity protocols
# ---------------------------------------------------------------------------

def _purification_on_wires(sigma: np.ndarray, width: int, sys_wires, ref_wires) -> np.ndarray:
    """Purification of sigma placed onto explicit system/reference wires."""
    sys_wires, ref_wires = list(sys_wires), list(ref_wires)
    if sorted(sys_wires + ref_wires) != list(range(width)):
        raise ValueError("system and reference wires must partition the register")
    psi = oracle.purify(sigma, n_ref=len(ref_wires))
    t = psi.reshape((2,) * width)
    order = ref_wires + sys_wires
    return np.transpose(t, np.argsort(order)).reshape(-1)


def _ensemble_block_prover(branch_states: list[np.ndarray], probs: np.ndarray,
                           sigma: np.ndarray, width: int, kept_wires, block_wires,
                           n_t: int) -> np.ndarray:
    """Optimal prover block sum_x |x><x| (x) V_x for an ensemble game.

    Each V_x aligns branch x's purification with a purification of the
    common state sigma on the prover's wires.
    """
    block_wires = list(block_wires)
    target = _purification_on_wires(sigma, width, list(kept_wires), block_wires)
    dt = 2**n_t
    dv = 2 ** len(block_wires)
    block = np.zeros((dt * dv, dt * dv), dtype=complex)
    for x in range(dt):
        ex = np.zeros((dt, dt), dtype=complex)
        ex[x, x] = 1.0
        if x < len(branch_states):
            v, _ = oracle.uhlmann_unitary(branch_states[x], target, width, block_wires)
        else:
            v = np.eye(dv, dtype=complex)
        block += np.kron(ex, v)
    return block


def alg11_game(preps: list[StatePrep], probs: np.ndarray, prover: ProverSpec,
               sigma: np.ndarray | None = None) -> BellGame:
    d = len(preps)
    r, s = preps[0].n_ref, preps[0].n_sys
    if any((p.n_ref, p.n_sys) != (r, s) for p in preps):
        raise ValueError("ensemble purifications live on different registers")
    n_t = max(1, math.ceil(math.log2(d)))
    anc = prover.ancillas
    if prover.mode == "exact":
        anc = max(0, s - r)
    tp = list(range(n_t))
    tw = list(range(n_t, 2 * n_t))
    ref = list(range(2 * n_t, 2 * n_t + r))
    sys = list(range(2 * n_t + r, 2 * n_t + r + s))
    fan = list(range(2 * n_t + r + s, 2 * n_t + r + s + anc))
    width = 2 * n_t + r + s + anc
    gates = [qsim.raw_unitary(qsim.prep_unitary(correlated_prior_vector(probs, n_t)),
                              tp + tw)]
    for x, prep in enumerate(preps):
        gates.append(qsim.controlled_block(tw, x, prep.unitary, ref + sys))
    n_params = 0
    prover_wires = tp + ref + fan
    if prover.mode == "exact":
        if sigma is None:
            ens = oracle.Ensemble(probs=probs, members=[p.reduced() for p in preps])
            sigma = oracle.ensemble_similarity(ens).sigma
        bw = r + s + anc
        branch = [np.kron(p.purification(), qsim.zero_state(anc)) for p in preps]
        block = _ensemble_block_prover(branch, probs, sigma, bw,
                                       kept_wires=range(r, r + s),
                                       block_wires=list(range(r)) +
                                       list(range(r + s, bw)), n_t=n_t)
        gates.append(qsim.raw_unitary(block, tp + ref + fan))
    elif prover.mode == "fixed":
        gates.append(qsim.raw_unitary(prover.unitary, prover_wires))
    else:
        gates += _prover_gates(prover, prover_wires)
        n_params = ansatz.AnsatzSpec(len(prover_wires), prover.layers,
                                     rotations=prover.rotations).param_count
    return BellGame(width=width, gates=gates, tprime=tuple(tp), t=tuple(tw), d=d,
                    n_params=n_params)


def alg11_ensemble_states(ens: oracle.Ensemble, prover=None, preps=None, *,
                          shots: int = 0, seed: int = 0,
                          noise: NoiseModel | None = None) -> AcceptanceReport:
    """Qudit-control similarity game for a state ensemble."""
    prover = _ensure_prover(prover)
    if preps is None:
        preps = [StatePrep.from_density(m) for m in ens.members]
    details = {}
    sigma = None
    if prover.mode == "exact":
        res = oracle.ensemble_similarity(ens)
        sigma = res.sigma
        details["oracle_similarity"] = res.value
        details["upper_bound"] = res.upper_bound
    game = alg11_game(preps, ens.probs, prover, sigma=sigma)
    return _bell_report(game, lambda p: p, shots, seed, noise, details)


def alg1213_game(chans: list[ChannelSpec], probs: np.ndarray, input_prep,
                 prover: ProverSpec, sigma: np.ndarray | None,
                 single_prover: bool,
                 input_param_gates: list[Gate] | None = None,
                 n_input_params: int = 0) -> BellGame:
    d = len(chans)
    n = chans[0].n_in
    k = max(c.n_env_in for c in chans)

    def padded(c):
        if c.n_env_in == k:
            return c.unitary
        return np.kron(c.unitary, np.eye(2 ** (k - c.n_env_in), dtype=complex))

    n_t = max(1, math.ceil(math.log2(d)))
    r = n
    anc = prover.ancillas
    if prover.mode == "exact" and not single_prover:
        anc = max(0, (r + n) - k)
    tp = list(range(n_t))
    tw = list(range(n_t, 2 * n_t))
    ref = list(range(2 * n_t, 2 * n_t + r))
    a_w = list(range(2 * n_t + r, 2 * n_t + r + n))
    e_w = list(range(2 * n_t + r + n, 2 * n_t + r + n + k))
    fan = list(range(2 * n_t + r + n + k, 2 * n_t + r + n + k + anc))
    width = 2 * n_t + r + n + k + anc
    gates = [qsim.raw_unitary(qsim.prep_unitary(correlated_prior_vector(probs, n_t)),
                              tp + tw)]
    if input_param_gates is not None:
        gates += input_param_gates
    else:
        gates += _as_prep_gates(input_prep, ref + a_w)
    for x, c in enumerate(chans):
        gates.append(qsim.controlled_block(tw, x, padded(c), a_w + e_w))
    n_params = n_input_params
    block_w = ([w for w in ref] if single_prover else []) + e_w + fan
    prover_wires = tp + block_w
    if prover.mode == "exact":
        prep_g = (input_param_gates if input_param_gates is not None
                  else _as_prep_gates(input_prep, ref + a_w))
        bw = width - 2 * n_t
        branch = []
        for c in chans:
            g = qsim.remap_gates(prep_g, {w: w - 2 * n_t for w in range(2 * n_t, width)})
            g.append(qsim.raw_unitary(padded(c), [w - 2 * n_t for w in a_w + e_w]))
            branch.append(qsim.apply_gates(qsim.zero_state(bw), g, bw))
        kept = ([] if single_prover else [w - 2 * n_t for w in ref]) \
            + [w - 2 * n_t for w in a_w]
        blockw_local = [w - 2 * n_t for w in block_w]
        block = _ensemble_block_prover(branch, probs, sigma, bw, kept_wires=kept,
                                       block_wires=blockw_local, n_t=n_t)
        gates.append(qsim.raw_unitary(block, prover_wires))
    elif prover.mode == "fixed":
        gates.append(qsim.raw_unitary(prover.unitary, prover_wires))
    else:
        gates += _prover_gates(prover, prover_wires, param_offset=n_input_params)
        n_params += ansatz.AnsatzSpec(len(prover_wires), prover.layers,
                                      rotations=prover.rotations).param_count
    return BellGame(width=width, gates=gates, tprime=tuple(tp), t=tuple(tw), d=d,
                    n_params=n_params)


def alg12_ensemble_channels(ens: oracle.Ensemble, min_prover=None, max_prover=None,
                            *, shots: int = 0, seed: int = 0,
                            noise: NoiseModel | None = None) -> AcceptanceReport:
    """Channel-ensemble similarity game with an adversarial input prover."""
    max_prover = _ensure_prover(max_prover)
    chans = list(ens.members)
    details = {}
    sigma = None
    if min_prover is None:
        res = oracle.ensemble_channel_similarity(ens, seed=seed)
        details["oracle_similarity"] = res.value
        sigma = res.sigma
        min_prover = res.state
    elif max_prover.mode == "exact":
        # common state re-optimized for the supplied input
        n_ref = chans[0].n_in
        rho_in = qsim.density_from_pure(min_prover) if min_prover.ndim == 1 \
            else min_prover
        outs = [oracle.apply_channel(c, rho_in, n_ref=n_ref) for c in chans]
        _, sigma = oracle.best_common_state(ens.probs, outs)
    input_prep = qsim.prep_unitary(min_prover) if (isinstance(min_prover, np.ndarray)
                                                   and min_prover.ndim == 1) else min_prover
    game = alg1213_game(chans, ens.probs, input_prep, max_prover, sigma,
                        single_prover=False)
    return _bell_report(game, lambda p: p, shots, seed, noise, details)


def alg13_ensemble_channels_single(ens: oracle.Ensemble, prover=None, *,
                                   shots: int = 0, seed: int = 0,
                                   noise: NoiseModel | None = None) -> AcceptanceReport:
    """Single-prover channel-ensemble similarity game (prover keeps the
    reference)."""
    chans = list(ens.members)
    details = {}
    if prover is None or isinstance(prover, np.ndarray):
        if prover is None:
            res = oracle.ensemble_channel_similarity_single(ens)
            rho, sigma = res.state, res.sigma
            details["oracle_similarity"] = res.value
        else:
            rho = prover if prover.ndim == 2 else qsim.density_from_pure(prover)
            outs = [oracle.channel_apply_any(c, rho) for c in chans]
            _, sigma = oracle.best_common_state(ens.probs, outs)
        prep = StatePrep.from_density(rho, n_ref=chans[0].n_in)
        game = alg1213_game(chans, ens.probs, prep.unitary,
                            ProverSpec(mode="exact", role="single"), sigma,
                            single_prover=True)
    elif isinstance(prover, tuple):
        inp, fin = prover
        n = chans[0].n_in
        in_spec = ansatz.AnsatzSpec(2 * n, inp.layers, rotations=inp.rotations)
        n_t = max(1, math.ceil(math.log2(len(chans))))
        in_gates = ansatz.build_hea(in_spec, inp.params,
                                    wires=range(2 * n_t, 2 * n_t + 2 * n),
                                    width=2 * n_t + 2 * n).gates
        fin2 = ProverSpec(mode=fin.mode, role="single", layers=fin.layers,
                          ancillas=fin.ancillas, rotations=fin.rotations,
                          params=fin.params, unitary=fin.unitary)
        game = alg1213_game(chans, ens.probs, None, fin2, None,
                            single_prover=True, input_param_gates=in_gates,
                            n_input_params=in_spec.param_count)
    else:
        raise TypeError("prover must be None, a state, or a (input, final) pair")
    return _bell_report(game, lambda p: p, shots, seed, noise, details)


# ---------------------------------------------------------------------------
# guess games: trace-distance family
# ---------------------------------------------------------------------------

def _naimark_block(povm: oracle.POVM, n_probe: int) -> np.ndarray:
    return oracle.naimark_unitary(povm, n_probe)


def alg14_game(prep0: StatePrep, prep1: StatePrep, prover: ProverSpec) -> GuessGame:
    r, s = prep0.n_ref, prep0.n_sys
    anc = max(1, prover.ancillas) if prover.mode == "parameterized" else 1
    sys = list(range(r, r + s))
    probe = list(range(r + s, r + s + anc))
    width = r + s + anc
    branches = []
    n_params = 0
    for i, prep in enumerate((prep0, prep1)):
        gates = prep.prep_gates(range(r + s))
        if prover.mode == "exact":
            lam, _ = oracle.helstrom(0.5, prep0.reduced(), prep1.reduced())
            povm = oracle.POVM(elements=[lam, np.eye(2**s, dtype=complex) - lam])
            gates.append(qsim.raw_unitary(_naimark_block(povm, anc), sys + probe))
        elif prover.mode == "fixed":
            gates.append(qsim.raw_unitary(prover.unitary, sys + probe))
        else:
            gates += _prover_gates(prover, sys + probe)
            if i == 0:
                n_params = ansatz.AnsatzSpec(s + anc, prover.layers,
                                             rotations=prover.rotations).param_count
        branches.append((0.5, gates))
    return GuessGame(branches=branches, width=width, t_wires=tuple(probe),
                     accept_fn=lambda i, j: i == j, n_params=n_params)


def alg14_trace_distance(prep0: StatePrep, prep1: StatePrep, prover=None, *,
                         shots: int = 0, seed: int = 0,
                         noise: NoiseModel | None = None) -> AcceptanceReport:
    """State-discrimination game; optimal acceptance is (1 + T)/2."""
    prover = _ensure_prover(prover)
    game = alg14_game(prep0, prep1, prover)
    return _guess_report(game, lambda p: float(np.clip(2 * p - 1, 0, 1)),
                         shots, seed, noise)


def alg15_game(ch0: ChannelSpec, ch1: ChannelSpec, input_prep,
               prover: ProverSpec,
               input_param_gates: list[Gate] | None = None,
               n_input_params: int = 0) -> GuessGame:
    u0, u1, k = _common_dilation(ch0, ch1)
    n = ch0.n_in
    r = n
    anc = max(1, prover.ancillas) if prover.mode == "parameterized" else 1
    ref = list(range(r))
    a_w = list(range(r, r + n))
    e_w = list(range(r + n, r + n + k))
    probe = list(range(r + n + k, r + n + k + anc))
    width = r + n + k + anc
    prep_g = (input_param_gates if input_param_gates is not None
              else _as_prep_gates(input_prep, ref + a_w))
    povm_block = None
    if prover.mode == "exact":
        outs = []
        for u in (u0, u1):
            g = list(prep_g) + [qsim.raw_unitary(u, a_w + e_w)]
            chi = qsim.apply_gates(qsim.zero_state(r + n + k), g, r + n + k)
            outs.append(linalg.partial_trace(qsim.density_from_pure(chi),
                                             [2**r, 2**n, 2**k], keep=[0, 1]))
        lam, _ = oracle.helstrom(0.5, outs[0], outs[1])
        povm = oracle.POVM(elements=[lam, np.eye(lam.shape[0], dtype=complex) - lam])
        povm_block = _naimark_block(povm, anc)
    branches = []
    n_params = n_input_params
    for i, u in enumerate((u0, u1)):
        gates = list(prep_g) + [qsim.raw_unitary(u, a_w + e_w)]
        if prover.mode == "exact":
            gates.append(qsim.raw_unitary(povm_block, ref + a_w + probe))
        elif prover.mode == "fixed":
            gates.append(qsim.raw_unitary(prover.unitary, ref + a_w + probe))
        else:
            gates += _prover_gates(prover, ref + a_w + probe,
                                   param_offset=n_input_params)
            if i == 0:
                n_params += ansatz.AnsatzSpec(r + n + anc, prover.layers,
                                              rotations=prover.rotations).param_count
        branches.append((0.5, gates))
    return GuessGame(branches=branches, width=width, t_wires=tuple(probe),
                     accept_fn=lambda i, j: i == j, n_params=n_params)


def alg15_diamond_distance(ch0: ChannelSpec, ch1: ChannelSpec, state_prover=None,
                           max_prover=None, *, shots: int = 0, seed: int = 0,
                           noise: NoiseModel | None = None,
                           restarts: int = 16) -> AcceptanceReport:
    """Channel-discrimination game; optimal acceptance is
    (1 + half-diamond-distance)/2."""
    max_prover = _ensure_prover(max_prover)
    details = {}
    if state_prover is None:
        res = oracle.diamond_distance(ch0, ch1, restarts=restarts, seed=seed)
        state_prover = res.state
        details["oracle_diamond_distance"] = res.value
    input_prep = qsim.prep_unitary(state_prover) if (isinstance(state_prover, np.ndarray)
                                                     and state_prover.ndim == 1) else state_prover
    game = alg15_game(ch0, ch1, input_prep, max_prover)
    return _guess_report(game, lambda p: float(np.clip(2 * p - 1, 0, 1)),
                         shots, seed, noise, details)


def alg16_game(s0: StrategySpec, s1: StrategySpec, co: CoStrategySpec,
               prover: ProverSpec) -> GuessGame:
    n, nm, nio = s0.n_turns, s0.n_mem, s0.n_io
    r = co.n_ref
    env_sizes = [t.n_env_in for t in s0.turns]
    anc = max(1, prover.ancillas) if prover.mode == "parameterized" else 1
    ref = list(range(r))
    mem = list(range(r, r + nm))
    io = list(range(r + nm, r + nm + nio))
    env_off = r + nm + nio
    probe = list(range(env_off + sum(env_sizes), env_off + sum(env_sizes) + anc))
    width = env_off + sum(env_sizes) + anc

    def branch_gates(turns):
        g = [qsim.raw_unitary(qsim.prep_unitary(co.initial), ref + io)]
        for j in range(n):
            e_w = [env_off + sum(env_sizes[:j]) + x for x in range(env_sizes[j])]
            g.append(qsim.raw_unitary(turns[j].unitary, mem + io + e_w))
            if j < n - 1:
                g.append(qsim.raw_unitary(co.unitaries[j], ref + io))
        return g

    povm_block = None
    if prover.mode == "exact":
        sig = [oracle.strategy_apply(s, co) for s in (s0, s1)]
        lam, _ = oracle.helstrom(0.5, sig[0], sig[1])
        povm = oracle.POVM(elements=[lam, np.eye(lam.shape[0], dtype=complex) - lam])
        povm_block = _naimark_block(povm, anc)
    branches = []
    n_params = 0
    for i, s in enumerate((s0, s1)):
        gates = branch_gates(s.turns)
        if prover.mode == "exact":
            gates.append(qsim.raw_unitary(povm_block, ref + io + probe))
        elif prover.mode == "fixed":
            gates.append(qsim.raw_unitary(prover.unitary, ref + io + probe))
        else:
            gates += _prover_gates(prover, ref + io + probe)
            if i == 0:
                n_params = ansatz.AnsatzSpec(r + nio + anc, prover.layers,
                                             rotations=prover.rotations).param_count
        branches.append((0.5, gates))
    return GuessGame(branches=branches, width=width, t_wires=tuple(probe),
                     accept_fn=lambda i, j: i == j, n_params=n_params)


def alg16_strategy_distance(s0: StrategySpec, s1: StrategySpec, co_strategy=None,
                            prover=None, *, shots: int = 0, seed: int = 0,
                            noise: NoiseModel | None = None,
                            restarts: int = 4) -> AcceptanceReport:
    """Interleaved discrimination game for the strategy distance."""
    prover = _ensure_prover(prover)
    details = {}
    if co_strategy is None:
        res = oracle.strategy_distance(s0, s1, restarts=restarts, seed=seed)
        co_strategy = res.co_strategy
        details["oracle_strategy_distance"] = res.value
    game = alg16_game(s0, s1, co_strategy, prover)
    return _guess_report(game, lambda p: float(np.clip(2 * p - 1, 0, 1)),
                         shots, seed, noise, details)


def _min_td_game(ch0: ChannelSpec, ch1: ChannelSpec, rho_a: np.ndarray,
                 measure_min: bool, prover: ProverSpec,
                 input_param_gates=None, n_input_params: int = 0) -> GuessGame:
    """Shared builder for the minimum-trace-distance games: the measurement
    acts on the bare channel output (the input reference stays elsewhere)."""
    u0, u1, k = _common_dilation(ch0, ch1)
    n = ch0.n_in
    r = n
    anc = max(1, prover.ancillas) if prover.mode == "parameterized" else 1
    ref = list(range(r))
    a_w = list(range(r, r + n))
    e_w = list(range(r + n, r + n + k))
    probe = list(range(r + n + k, r + n + k + anc))
    width = r + n + k + anc
    if input_param_gates is None:
        prep = StatePrep.from_density(rho_a, n_ref=r)
        prep_g = prep.prep_gates(ref + a_w)
    else:
        prep_g = input_param_gates
    povm_block = None
    if prover.mode == "exact":
        outs = []
        for u in (u0, u1):
            g = list(prep_g) + [qsim.raw_unitary(u, a_w + e_w)]
            chi = qsim.apply_gates(qsim.zero_state(r + n + k), g, r + n + k)
            outs.append(linalg.partial_trace(qsim.density_from_pure(chi),
                                             [2**r, 2**n, 2**k], keep=[1]))
        lam, _ = oracle.helstrom(0.5, outs[0], outs[1])
        if measure_min:
            lam = np.eye(lam.shape[0], dtype=complex) - lam
        povm = oracle.POVM(elements=[lam, np.eye(lam.shape[0], dtype=complex) - lam])
        povm_block = _naimark_block(povm, anc)
    branches = []
    n_params = n_input_params
    for i, u in enumerate((u0, u1)):
        gates = list(prep_g) + [qsim.raw_unitary(u, a_w + e_w)]
        if prover.mode == "exact":
            gates.append(qsim.raw_unitary(povm_block, a_w + probe))
        elif prover.mode == "fixed":
            gates.append(qsim.raw_unitary(prover.unitary, a_w + probe))
        else:
            gates += _prover_gates(prover, a_w + probe, param_offset=n_input_params)
            if i == 0:
                n_params += ansatz.AnsatzSpec(n + anc, prover.layers,
                                              rotations=prover.rotations).param_count
        branches.append((0.5, gates))
    return GuessGame(branches=branches, width=width, t_wires=tuple(probe),
                     accept_fn=lambda i, j: i == j, n_params=n_params)


def alg17_min_trace_distance(ch0: ChannelSpec, ch1: ChannelSpec, min_state=None,
                             max_prover=None, *, shots: int = 0, seed: int = 0,
                             noise: NoiseModel | None = None,
                             restarts: int = 12) -> AcceptanceReport:
    """Min-prover input, max-prover measurement: acceptance
    (1 + min-trace-distance)/2 at the optimum."""
    max_prover = _ensure_prover(max_prover)
    details = {}
    if min_state is None:
        res = oracle.min_trace_distance(ch0, ch1, restarts=restarts, seed=seed)
        min_state = res.state
        details["oracle_min_trace_distance"] = 0.5 * res.value
    game = _min_td_game(ch0, ch1, min_state, measure_min=False, prover=max_prover)
    return _guess_report(game, lambda p: float(np.clip(2 * p - 1, -1, 1)),
                         shots, seed, noise, details)


def alg18_min_trace_distance_swapped(ch0: ChannelSpec, ch1: ChannelSpec,
                                     max_state=None, min_prover=None, *,
                                     shots: int = 0, seed: int = 0,
                                     noise: NoiseModel | None = None,
                                     restarts: int = 12) -> AcceptanceReport:
    """Swapped prover roles: acceptance (1 - min-trace-distance)/2 at the
    optimum; the derived measure is 1 - 2p so the two games agree."""
    min_prover = _ensure_prover(min_prover)
    details = {}
    if max_state is None:
        res = oracle.min_trace_distance(ch0, ch1, restarts=restarts, seed=seed)
        max_state = res.state
        details["oracle_min_trace_distance"] = 0.5 * res.value
    game = _min_td_game(ch0, ch1, max_state, measure_min=True, prover=min_prover)
    return _guess_report(game, lambda p: float(np.clip(1 - 2 * p, -1, 1)),
                         shots, seed, noise, details)


def alg19_game(preps: list[StatePrep], probs: np.ndarray,
               prover: ProverSpec) -> GuessGame:
    d = len(preps)
    r, s = preps[0].n_ref, preps[0].n_sys
    n_t = max(1, math.ceil(math.log2(d)))
    anc = max(n_t, prover.ancillas) if prover.mode == "parameterized" else n_t
    sys = list(range(r, r + s))
    probe = list(range(r + s, r + s + anc))
    width = r + s + anc
    povm_block = None
    if prover.mode == "exact":
        ens = oracle.Ensemble(probs=probs, members=[p.reduced() for p in preps])
        res = oracle.multistate_discrimination_sdp(ens)
        povm_block = _naimark_block(res.povm, anc)

    def accept(i, j):
        return (j <= d - 1 and i == j) or (j > d - 1 and i == 0)

    branches = []
    n_params = 0
    for i, prep in enumerate(preps):
        gates = prep.prep_gates(range(r + s))
        if prover.mode == "exact":
            gates.append(qsim.raw_unitary(povm_block, sys + probe))
        elif prover.mode == "fixed":
            gates.append(qsim.raw_unitary(prover.unitary, sys + probe))
        else:
            gates += _prover_gates(prover, sys + probe)
            if i == 0:
                n_params = ansatz.AnsatzSpec(s + anc, prover.layers,
                                             rotations=prover.rotations).param_count
        branches.append((float(probs[i]), gates))
    return GuessGame(branches=branches, width=width, t_wires=tuple(probe),
                     accept_fn=accept, n_params=n_params)


def alg19_multistate_discrimination(ens: oracle.Ensemble, prover=None, preps=None,
                                    *, shots: int = 0, seed: int = 0,
                                    noise: NoiseModel | None = None) -> AcceptanceReport:
    """Multi-state discrimination with coarse-grained extra outcomes; the
    exact-prover acceptance equals the optimal guessing probability."""
    prover = _ensure_prover(prover)
    if preps is None:
        preps = [StatePrep.from_density(m) for m in ens.members]
    details = {}
    if prover.mode == "exact":
        res = oracle.multistate_discrimination_sdp(ens)
        details["oracle_success"] = res.success
        details["kkt_residual"] = res.kkt_residual
    game = alg19_game(preps, ens.probs, prover)
    return _guess_report(game, lambda p: p, shots, seed, noise, details)


def induced_povm(prover_unitary: np.ndarray, n_sys: int, n_probe: int,
                 d_outcomes: int) -> list[np.ndarray]:
    """POVM realized by measuring the probe after a prover unitary on
    [system, probe] (probe starts in |0>); outcomes beyond d_outcomes - 1
    are coarse-grained into outcome 0."""
    ds, dp = 2**n_sys, 2**n_probe
    u4 = prover_unitary.reshape(ds, dp, ds, dp)
    elements = []
    for j in range(dp):
        block = u4[:, j, :, 0]          # <j|_P U |0>_P as a system operator
        elements.append(block.conj().T @ block)
    coarse = [elements[0] + sum(elements[d_outcomes:],
                                np.zeros_like(elements[0]))]
    coarse += elements[1:d_outcomes]
    return coarse


# ---------------------------------------------------------------------------
# fixed points
# ---------------------------------------------------------------------------

def fixed_point_protocol(ch: ChannelSpec, prover_state: np.ndarray | None = None,
                         *, shots: int = 0, seed: int = 0,
                         noise: NoiseModel | None = None) -> AcceptanceReport:
    """Maximum-output-fidelity game against the identity channel; a prover
    sending a fixed point is accepted with certainty."""
    if ch.n_in != ch.n_out:
        raise ValueError("fixed points need matching input/output systems")
    ident = qsim.identity_channel(ch.n_in, 0)
    if prover_state is None:
        prover_state = oracle.fixed_point(ch)
    rep = alg10_max_output_fidelity(ch, ident, prover_state, shots=shots,
                                    seed=seed, noise=noise)
    rho = prover_state if prover_state.ndim == 2 else \
        qsim.density_from_pure(prover_state)
    rep.details["residual"] = oracle.approx_fixed_residual(rho, ch)
    rep.details["state"] = rho
    return rep


def cesaro_protocol(ch: ChannelSpec, length: int,
                    prover_state: np.ndarray | None = None, *, shots: int = 0,
                    seed: int = 0,
                    noise: NoiseModel | None = None) -> AcceptanceReport:
    """Single-prover similarity game over the ensemble of channel powers."""
    if ch.n_in != ch.n_out:
        raise ValueError("channel powers need matching input/output systems")
    pad = (length - 1) * ch.n_env_in
    powers = [oracle.channel_power(ch, ell, n_env_total=pad) for ell in range(length)]
    ens = oracle.Ensemble(probs=[1.0 / length] * length, members=powers)
    if prover_state is None:
        prover_state = oracle.fixed_point(ch)
    rep = alg13_ensemble_channels_single(ens, prover_state, shots=shots,
                                         seed=seed, noise=noise)
    rho = prover_state if prover_state.ndim == 2 else \
        qsim.density_from_pure(prover_state)
    rep.details["residual"] = oracle.approx_fixed_residual(rho, ch)
    rep.details["state"] = rho
    return rep


# ---------------------------------------------------------------------------
# variational objectives (exact cost functions over prover parameters)
# ---------------------------------------------------------------------------

def bell_game_objective(game: BellGame, noise: NoiseModel | None = None):
    """(evaluate, gradient) of the acceptance over the game's bound
    parameters; the adjoint gradient is available only when noiseless."""
    noise = noise or qsim.NOISELESS
    wires = game.accept_wires()
    accept = game.accept_vector()

    def evaluate(theta):
        g = qsim.bind_params(game.gates, theta)
        bound = BellGame(width=game.width, gates=g, tprime=game.tprime,
                         t=game.t, d=game.d)
        if noise.is_noiseless:
            return bell_acceptance_exact(bound)
        return bell_acceptance_noisy(bound, noise)

    gradient = None
    if noise.is_noiseless:
        obs = qsim.projector_apply(accept, wires, game.width)

        def gradient(theta):
            g = qsim.bind_params(game.gates, theta)
            return qsim.expectation_gradient(g, game.width, obs, game.n_params)

    return evaluate, gradient


def guess_game_objective(game: GuessGame, noise: NoiseModel | None = None):
    """(evaluate, gradient) of the acceptance of a guess game."""
    noise = noise or qsim.NOISELESS
    sets = game.accept_sets()

    def evaluate(theta):
        branches = [(p, qsim.bind_params(g, theta)) for p, g in game.branches]
        bound = GuessGame(branches=branches, width=game.width,
                          t_wires=game.t_wires, accept_fn=game.accept_fn)
        return guess_acceptance_exact(bound, noise)

    gradient = None
    if noise.is_noiseless:
        observables = []
        dt = 2 ** len(game.t_wires)
        for i in range(len(game.branches)):
            w = np.zeros(dt)
            for j in sets[i]:
                w[j] = 1.0
            observables.append(qsim.weighted_outcome_apply(w, game.t_wires,
                                                           game.width))

        def gradient(theta):
            total_v, total_g = 0.0, np.zeros(game.n_params)
            for (p, gates), obs in zip(game.branches, observables):
                v, gr = qsim.expectation_gradient(qsim.bind_params(gates, theta),
                                                  game.width, obs, game.n_params)
                total_v += p * v
                total_g += p * gr
            return total_v, total_g

    return evaluate, gradient


def alg6_objective(prep0: StatePrep, prep1: StatePrep, spec: ansatz.AnsatzSpec):
    """(evaluate, gradient) of the aligned purification overlap F_theta."""
    r, s = prep0.n_ref, prep0.n_sys
    if spec.width != r:
        raise ValueError("aligner must act on the reference block")
    width = r + s
    target = prep1.purification()
    obs = qsim.projector_apply(target, tuple(range(width)), width)
    base = prep0.prep_gates(range(width))

    def gates_of(theta):
        hea = ansatz.build_hea(spec, theta, wires=range(r), width=width)
        return base + hea.gates

    def evaluate(theta):
        return qsim.expectation(gates_of(theta), width, obs)

    def gradient(theta):
        return qsim.expectation_gradient(gates_of(theta), width, obs,
                                         spec.param_count)

    return evaluate, gradient


def alg7_objective(prep0: StatePrep, prep1: StatePrep, spec: ansatz.AnsatzSpec,
                   n_probe: int, noise: NoiseModel | None = None):
    """(evaluate, gradient) of the measured-overlap cost; minimized."""
    noise = noise or qsim.NOISELESS
    s = prep0.n_sys
    if spec.width != s + n_probe:
        raise ValueError("dilation ansatz must act on system + probe")

    def runs(theta):
        out = []
        for prep in (prep0, prep1):
            r = prep.n_ref
            width = r + s + n_probe
            gates = prep.prep_gates(range(r + s))
            gates += ansatz.build_hea(spec, theta,
                                      wires=range(r, r + s + n_probe),
                                      width=width).gates
            out.append((gates, width, tuple(range(r + s, width))))
        return out

    def distributions(theta):
        dists = []
        for gates, width, probe in runs(theta):
            if noise.is_noiseless:
                state = qsim.apply_gates(qsim.zero_state(width), gates, width)
            else:
                state = qsim.run_density(Circuit(width, gates), noise=noise)
            pd = qsim.marginal_probabilities(state, probe)
            pd = pd / max(pd.sum(), 1e-300)
            if not noise.is_noiseless:
                pd = qsim.readout_confusion(pd, n_probe, noise.readout_flip)
            dists.append(pd)
        return dists

    def evaluate(theta):
        p, q = distributions(theta)
        return oracle.classical_fidelity(p, q)

    gradient = None
    if noise.is_noiseless:
        def gradient(theta):
            p, q = distributions(theta)
            root = np.sqrt(np.clip(p, 1e-30, None) * np.clip(q, 1e-30, None))
            b = root.sum()
            weights = [b * np.sqrt(np.clip(q, 1e-30, None) / np.clip(p, 1e-30, None)),
                       b * np.sqrt(np.clip(p, 1e-30, None) / np.clip(q, 1e-30, None))]
            grad = np.zeros(spec.param_count)
            for (gates, width, probe), w in zip(runs(theta), weights):
                obs = qsim.weighted_outcome_apply(w, probe, width)
                _, gr = qsim.expectation_gradient(gates, width, obs,
                                                  spec.param_count)
                grad += gr
            return float(b * b), grad

    return evaluate, gradient


def alg4_variational(prep0: StatePrep, prep1: StatePrep, layers: int,
                     ancillas: int = 1, noise: NoiseModel | None = None):
    """Objective pair plus parameter count for the alg-4 prover ansatz."""
    n_par = ansatz.AnsatzSpec(1 + prep0.n_ref + ancillas, layers).param_count
    prover = ProverSpec.hea(layers, np.zeros(n_par), ancillas=ancillas)
    game = alg4_game(prep0, prep1, prover)
    ev, gr = bell_game_objective(game, noise)
    return ev, gr, game.n_params


def alg5_variational(prep0: StatePrep, prep1: StatePrep, layers: int,
                     ancillas: int = 1, noise: NoiseModel | None = None):
    n_par = ansatz.AnsatzSpec(1 + 2 * prep0.n_ref + ancillas, layers).param_count
    prover = ProverSpec.hea(layers, np.zeros(n_par), ancillas=ancillas)
    game = alg5_game(prep0, prep1, prover)
    ev, gr = bell_game_objective(game, noise)
    return ev, gr, game.n_params


def alg14_variational(prep0: StatePrep, prep1: StatePrep, layers: int,
                      ancillas: int = 1, noise: NoiseModel | None = None):
    n_par = ansatz.AnsatzSpec(prep0.n_sys + max(1, ancillas), layers).param_count
    prover = ProverSpec.hea(layers, np.zeros(n_par), ancillas=max(1, ancillas))
    game = alg14_game(prep0, prep1, prover)
    ev, gr = guess_game_objective(game, noise)
    return ev, gr, game.n_params


def alg8_joint(ch0: ChannelSpec, ch1: ChannelSpec, min_layers: int,
               max_layers: int, max_ancillas: int = 1,
               noise: NoiseModel | None = None):
    """Joint acceptance as a function of (input params, prover params).

    Returns (evaluate(theta_min, theta_max), n_min, n_max).
    """
    n = ch0.n_in
    in_spec = ansatz.AnsatzSpec(2 * n, min_layers)
    k = max(ch0.n_env_in, ch1.n_env_in)
    max_spec = ansatz.AnsatzSpec(1 + k + max_ancillas, max_layers)
    prover = ProverSpec.hea(max_layers, np.zeros(max_spec.param_count),
                            ancillas=max_ancillas)
    in_gates = ansatz.build_hea(in_spec, np.zeros(in_spec.param_count),
                                wires=range(2, 2 + 2 * n), width=2 + 2 * n).gates
    game = alg8_game(ch0, ch1, None, prover, input_param_gates=in_gates,
                     n_input_params=in_spec.param_count)
    ev, _ = bell_game_objective(game, noise)

    def evaluate(theta_min, theta_max):
        return ev(np.concatenate([theta_min, theta_max]))

    return evaluate, in_spec.param_count, max_spec.param_count


def alg15_joint(ch0: ChannelSpec, ch1: ChannelSpec, state_layers: int,
                max_layers: int, max_ancillas: int = 1,
                noise: NoiseModel | None = None):
    """Joint acceptance for the channel-discrimination game.

    Returns (evaluate(theta_state, theta_max), n_state, n_max).
    """
    n = ch0.n_in
    in_spec = ansatz.AnsatzSpec(2 * n, state_layers)
    k = max(ch0.n_env_in, ch1.n_env_in)
    anc = max(1, max_ancillas)
    meas_spec = ansatz.AnsatzSpec(2 * n + anc, max_layers)
    prover = ProverSpec.hea(max_layers, np.zeros(meas_spec.param_count),
                            ancillas=anc)
    in_gates = ansatz.build_hea(in_spec, np.zeros(in_spec.param_count),
                                wires=range(2 * n), width=2 * n).gates
    game = alg15_game(ch0, ch1, None, prover, input_param_gates=in_gates,
                      n_input_params=in_spec.param_count)
    ev, _ = guess_game_objective(game, noise)

    def evaluate(theta_state, theta_max):
        return ev(np.concatenate([theta_state, theta_max]))

    return evaluate, in_spec.param_count, meas_spec.param_count


def alg19_variational(preps: list[StatePrep], probs, layers: int,
                      noise: NoiseModel | None = None):
    d = len(preps)
    n_t = max(1, math.ceil(math.log2(d)))
    s = preps[0].n_sys
    n_par = ansatz.AnsatzSpec(s + n_t, layers).param_count
    prover = ProverSpec.hea(layers, np.zeros(n_par), ancillas=n_t)
    game = alg19_game(preps, np.asarray(probs, dtype=float), prover)
    ev, gr = guess_game_objective(game, noise)
    return ev, gr, game.n_params


# ---------------------------------------------------------------------------
# protocol instances (config-level entry point)
# ---------------------------------------------------------------------------

@dataclass
class ProtocolInstance:
    """A fully specified protocol run: algorithm id, inputs, provers,
    shots/noise/seed. Inputs are algorithm specific (see `run`)."""

    algorithm: str
    inputs: dict
    provers: dict = field(default_factory=dict)
    shots: int = 0
    noise: NoiseModel | None = None
    seed: int = 0

    def run(self) -> AcceptanceReport:
        fn = PROTOCOLS[self.algorithm]
        return fn(**self.inputs, **self.provers, shots=self.shots,
                  seed=self.seed, noise=self.noise)


PROTOCOLS = {
    "alg1": alg1_pure_overlap,
    "alg2": alg2_phase_bell,
    "alg3": alg3_pure_mixed,
    "alg4": alg4_state_fidelity,
    "alg5": alg5_generalized_swap,
    "alg6": alg6_bell_variational,
    "alg7": alg7_fc_variational,
    "alg8": alg8_channel_fidelity,
    "alg9": alg9_strategy_fidelity,
    "alg10": alg10_max_output_fidelity,
    "alg11": alg11_ensemble_states,
    "alg12": alg12_ensemble_channels,
    "alg13": alg13_ensemble_channels_single,
    "alg14": alg14_trace_distance,
    "alg15": alg15_diamond_distance,
    "alg16": alg16_strategy_distance,
    "alg17": alg17_min_trace_distance,
    "alg18": alg18_min_trace_distance_swapped,
    "alg19": alg19_multistate_discrimination,
    "fixed_point": fixed_point_protocol,
    "cesaro": cesaro_protocol,
}
