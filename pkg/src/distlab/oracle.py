"""Exact classical oracles for every distinguishability measure.

These provide ground truth for the circuit protocols: fidelity and trace
distance of states, optimal prover unitaries and measurements, channel
fidelity / diamond distance via see-saw ascent with restarts, ensemble
similarity via matrix exponentiated-gradient ascent, optimal multi-state
discrimination via projected gradient with Dykstra projections, strategy
measures via parameterized co-strategies, and channel fixed points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from . import linalg, qsim
from .qsim import ChannelSpec, CoStrategySpec, StrategySpec

_EPS = 1e-300


def _check_state(rho: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("state must be a square matrix")
    if abs(np.trace(rho).real - 1.0) > tol or not linalg.is_psd(rho, tol):
        raise ValueError("input is not a density operator")
    return rho


def _pair(rho: np.ndarray, sigma: np.ndarray):
    rho, sigma = _check_state(rho), _check_state(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("states have different dimensions")
    return rho, sigma


def _root_fidelity_raw(rho: np.ndarray, sigma: np.ndarray) -> float:
    return linalg.trace_norm(linalg.matrix_sqrt_psd(rho) @ linalg.matrix_sqrt_psd(sigma))


def root_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    rho, sigma = _pair(rho, sigma)
    return min(_root_fidelity_raw(rho, sigma), 1.0)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Squared trace norm of sqrt(rho) sqrt(sigma)."""
    return root_fidelity(rho, sigma) ** 2


def fidelity_alt(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Second computation path: [Tr sqrt(sqrt(sigma) rho sqrt(sigma))]^2."""
    rho, sigma = _pair(rho, sigma)
    rs = linalg.matrix_sqrt_psd(sigma)
    inner = linalg.hermitianize(rs @ rho @ rs)
    val = float(np.trace(linalg.matrix_sqrt_psd(inner)).real)
    return min(val, 1.0) ** 2


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Normalized trace distance, half the trace norm of the difference."""
    rho, sigma = _pair(rho, sigma)
    vals = np.linalg.eigvalsh(linalg.hermitianize(rho - sigma))
    return float(0.5 * np.abs(vals).sum())


def purify(rho: np.ndarray, n_ref: int | None = None) -> np.ndarray:
    """Purification on [reference, system] qubits (reference block first)."""
    rho = _check_state(rho)
    d = rho.shape[0]
    n_sys = int(round(math.log2(d)))
    n_ref = n_sys if n_ref is None else n_ref
    eig = linalg.herm_eig(rho)
    vals = np.clip(eig.values, 0.0, None)
    if 2**n_ref < int((vals > 1e-12).sum()):
        raise ValueError("reference register too small for the state rank")
    psi = np.zeros((2**n_ref, d), dtype=complex)
    for i in range(min(d, 2**n_ref)):
        psi[i, :] = math.sqrt(max(vals[i], 0.0)) * eig.vectors[:, i]
    psi = psi.reshape(-1)
    return psi / np.linalg.norm(psi)


# ---------------------------------------------------------------------------
# optimal provers for purification games
# ---------------------------------------------------------------------------

def uhlmann_unitary(psi_a: np.ndarray, psi_b: np.ndarray, width: int, ref_qubits):
    """Unitary V on `ref_qubits` with <psi_b| (V on ref) |psi_a> = sqrt(F) >= 0.

    F is the fidelity of the reduced states on the complementary qubits;
    the achieved squared overlap is returned alongside V.
    """
    ref = tuple(sorted(ref_qubits))
    other = tuple(q for q in range(width) if q not in ref)
    r, s = len(ref), len(other)

    def ref_major(psi):
        t = np.asarray(psi, dtype=complex).reshape((2,) * width)
        return np.transpose(t, ref + other).reshape(2**r, 2**s)

    a, b = ref_major(psi_a), ref_major(psi_b)
    m = a @ b.conj().T
    v = linalg.polar_unitary(m).conj().T
    achieved = float(np.real(np.trace(v @ m)))
    return v, min(achieved, 1.0) ** 2


def uhlmann_prover(psi0: np.ndarray, psi1: np.ndarray, n_ref: int, n_sys: int):
    """Reference-side unitary achieving the purification overlap maximum."""
    return uhlmann_unitary(psi0, psi1, n_ref + n_sys, range(n_ref))


def exact_prover_alg4(psi0: np.ndarray, psi1: np.ndarray, n_ref: int, n_sys: int) -> np.ndarray:
    """Optimal prover block for the controlled-unitary fidelity game.

    Acts on [control qubit, reference block]: applies the purification
    aligner on the branch carrying psi0 and identity on the other branch.
    """
    v, _ = uhlmann_prover(psi0, psi1, n_ref, n_sys)
    d = 2**n_ref
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return np.kron(p0, v) + np.kron(p1, np.eye(d, dtype=complex))


# ---------------------------------------------------------------------------
# measurements
# ---------------------------------------------------------------------------

@dataclass
class POVM:
    elements: list[np.ndarray]
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.labels:
            self.labels = [str(i) for i in range(len(self.elements))]
        d = self.elements[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for el in self.elements:
            if float(np.linalg.eigvalsh(linalg.hermitianize(el)).min()) < -1e-9:
                raise ValueError("POVM element is not PSD")
            total += el
        if np.linalg.norm(total - np.eye(d)) > 1e-8:
            raise ValueError("POVM elements do not sum to identity")

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def outcome_probabilities(self, rho: np.ndarray) -> np.ndarray:
        return np.array([max(float(np.trace(el @ rho).real), 0.0) for el in self.elements])


def fuchs_caves_measurement(rho0: np.ndarray, rho1: np.ndarray,
                            support_tol: float = 1e-10) -> POVM:
    """Rank-1 POVM from the quantum likelihood-ratio operator of (rho0, rho1).

    Built on the support of rho1 via pseudo-inverse; the kernel projector of
    rho1 is appended as a final element. Its measured Bhattacharyya overlap
    squared equals the fidelity.
    """
    rho0, rho1 = _pair(rho0, rho1)
    eig = linalg.herm_eig(rho1)
    supp = eig.values > support_tol
    vs = eig.vectors[:, supp]                      # isometry onto supp(rho1)
    lam = eig.values[supp]
    # likelihood-ratio operator restricted to the support basis
    rho0_s = vs.conj().T @ rho0 @ vs
    s_half = np.diag(np.sqrt(lam))
    s_half_inv = np.diag(1.0 / np.sqrt(lam))
    mid = linalg.matrix_sqrt_psd(linalg.hermitianize(s_half @ rho0_s @ s_half))
    m_supp = linalg.hermitianize(s_half_inv @ mid @ s_half_inv)
    m_eig = linalg.herm_eig(m_supp)
    elements, labels = [], []
    for i in range(m_supp.shape[0]):
        phi = vs @ m_eig.vectors[:, i]
        elements.append(np.outer(phi, phi.conj()))
        labels.append(str(i))
    kernel = np.eye(rho1.shape[0], dtype=complex) - vs @ vs.conj().T
    if np.linalg.norm(kernel) > 1e-12:
        elements.append(kernel)
        labels.append("kernel")
    return POVM(elements=elements, labels=labels)


def classical_fidelity(p: np.ndarray, q: np.ndarray) -> float:
    """Squared Bhattacharyya overlap of two distributions."""
    return float(np.sum(np.sqrt(np.clip(p, 0, None) * np.clip(q, 0, None)))) ** 2


def helstrom(p: float, rho0: np.ndarray, rho1: np.ndarray):
    """Optimal binary discrimination operator and success probability.

    Returns (Lambda, success) with Lambda the projector onto the
    nonnegative eigenspace of p rho0 - (1-p) rho1 and
    success = (1 + ||p rho0 - (1-p) rho1||_1) / 2.
    """
    rho0, rho1 = _pair(rho0, rho1)
    delta = linalg.hermitianize(p * rho0 - (1 - p) * rho1)
    eig = linalg.herm_eig(delta)
    pos = eig.vectors[:, eig.values >= 0]
    proj = pos @ pos.conj().T
    success = 0.5 * (1.0 + float(np.abs(eig.values).sum()))
    return proj, success


def naimark_unitary(povm: POVM, n_probe: int | None = None) -> np.ndarray:
    """Dilate a POVM to a unitary on [system, probe] wires.

    With the probe initialized to |0>, a computational measurement of the
    probe reproduces the POVM statistics; outcome x corresponds to probe
    value x in the order of povm.elements.
    """
    m = len(povm.elements)
    d = povm.dim
    need = max(1, math.ceil(math.log2(m)))
    n_probe = need if n_probe is None else n_probe
    dp = 2**n_probe
    if dp < m:
        raise ValueError("probe register too small for the POVM")
    iso = np.zeros((d * dp, d), dtype=complex)
    for x, el in enumerate(povm.elements):
        iso[x::dp, :] = linalg.matrix_sqrt_psd(el)
    u0 = linalg.unitary_completion(iso)
    # the |0>-probe input sits on columns s * dp, not the leading ones
    u = np.zeros_like(u0)
    slots = [s * dp for s in range(d)]
    u[:, slots] = iso
    rest = [c for c in range(d * dp) if c not in slots]
    u[:, rest] = u0[:, d:]
    return u


# ---------------------------------------------------------------------------
# channel plumbing
# ---------------------------------------------------------------------------

def kraus_ops(ch: ChannelSpec) -> list[np.ndarray]:
    if ch.unitary is None:
        raise ValueError("channel has no unitary dilation")
    de_in, de_out = 2**ch.n_env_in, 2**ch.n_env_out
    v = ch.unitary[:, ::de_in][:, : ch.dim_in]
    return [v[e::de_out, :] for e in range(de_out)]


def superoperator(ch: ChannelSpec) -> np.ndarray:
    """Matrix acting on row-major vec(rho)."""
    if ch.superop is not None:
        return ch.superop
    s = np.zeros((ch.dim_out**2, ch.dim_in**2), dtype=complex)
    for a in kraus_ops(ch):
        s += np.kron(a, a.conj())
    return s


def channel_from_kraus(kraus: list[np.ndarray]) -> ChannelSpec:
    """Stinespring dilation of a channel given by Kraus operators.

    The dilation unitary follows the [input, env] wire convention, with the
    environment sized to the number of Kraus operators.
    """
    d_out, d_in = kraus[0].shape
    n_in = int(round(math.log2(d_in)))
    n_out = int(round(math.log2(d_out)))
    total = sum(a.conj().T @ a for a in kraus)
    if np.linalg.norm(total - np.eye(d_in)) > 1e-8:
        raise ValueError("Kraus operators are not trace preserving")
    n_env_out = max(1, math.ceil(math.log2(len(kraus))))
    while n_in + (n_out + n_env_out - n_in) != n_out + n_env_out or \
            n_out + n_env_out - n_in < 0:
        n_env_out += 1
    n_env_in = n_out + n_env_out - n_in
    de_in, de_out = 2**n_env_in, 2**n_env_out
    iso = np.zeros((d_out * de_out, d_in), dtype=complex)
    for e, a in enumerate(kraus):
        iso[e::de_out, :] = a
    u0 = linalg.unitary_completion(iso)
    u = np.zeros_like(u0)
    slots = [a * de_in for a in range(d_in)]
    u[:, slots] = iso
    rest = [c for c in range(d_in * de_in) if c not in slots]
    u[:, rest] = u0[:, d_in:]
    return ChannelSpec(unitary=u, n_in=n_in, n_env_in=n_env_in, n_out=n_out,
                       n_env_out=n_env_out)


def apply_channel(ch: ChannelSpec, rho: np.ndarray, n_ref: int = 0) -> np.ndarray:
    """Apply the channel to the trailing input block of a (ref x input) state."""
    dr = 2**n_ref
    if rho.shape[0] != dr * ch.dim_in:
        raise ValueError("state dimension does not match channel input")
    if ch.unitary is None:
        s4 = ch.superop.reshape(ch.dim_out, ch.dim_out, ch.dim_in, ch.dim_in)
        t = rho.reshape(dr, ch.dim_in, dr, ch.dim_in)
        out = np.einsum("xyuv,aubv->axby", s4, t)
        return out.reshape(dr * ch.dim_out, dr * ch.dim_out)
    out = np.zeros((dr * ch.dim_out, dr * ch.dim_out), dtype=complex)
    eye = np.eye(dr, dtype=complex)
    for a in kraus_ops(ch):
        k = np.kron(eye, a)
        out += k @ rho @ k.conj().T
    return out


def apply_superop(ch: ChannelSpec, rho: np.ndarray) -> np.ndarray:
    s = superoperator(ch)
    return (s @ rho.reshape(-1)).reshape(ch.dim_out, ch.dim_out)


def adjoint_apply(ch: ChannelSpec, op: np.ndarray, n_ref: int = 0) -> np.ndarray:
    """Heisenberg-picture action on the trailing block of an observable."""
    dr = 2**n_ref
    out = np.zeros((dr * ch.dim_in, dr * ch.dim_in), dtype=complex)
    eye = np.eye(dr, dtype=complex)
    for a in kraus_ops(ch):
        k = np.kron(eye, a)
        out += k.conj().T @ op @ k
    return out


def choi_matrix(ch: ChannelSpec) -> np.ndarray:
    """Unnormalized Choi operator on [input copy, output]; Tr_out = I."""
    j = np.zeros((ch.dim_in * ch.dim_out,) * 2, dtype=complex)
    for a in kraus_ops(ch):
        w = a.T.reshape(-1)     # sum_i |i> (x) A|i>
        j += np.outer(w, w.conj())
    return j


def is_cptp(ch: ChannelSpec, tol: float = 1e-8) -> bool:
    j = choi_matrix(ch)
    if float(np.linalg.eigvalsh(linalg.hermitianize(j)).min()) < -1e-9:
        return False
    d = ch.dim_in
    red = linalg.partial_trace(j, [d, ch.dim_out], keep=[0])
    return np.linalg.norm(red - np.eye(d)) <= tol


def channel_power(ch: ChannelSpec, exponent: int,
                  n_env_total: int | None = None) -> ChannelSpec:
    """Stinespring realization of the channel composed with itself.

    Environments accumulate, one fresh block per application; `n_env_total`
    pads with idle environment wires so several powers share a wire layout.
    """
    if ch.n_in != ch.n_out:
        raise ValueError("channel powers need matching input/output systems")
    k = ch.n_env_in
    need = exponent * k
    n_env_total = need if n_env_total is None else n_env_total
    if n_env_total < need:
        raise ValueError("environment padding too small")
    width = ch.n_in + n_env_total
    circ = qsim.Circuit(width)
    for j in range(exponent):
        wires = list(range(ch.n_in)) + [ch.n_in + j * k + t for t in range(k)]
        if k == 0:
            wires = list(range(ch.n_in))
        circ.unitary(ch.unitary, wires)
    return qsim.channel_from_unitary(qsim.unitary_of(circ), n_in=ch.n_in,
                                     n_env_in=n_env_total, circuit=circ)


def cesaro_mean(ch: ChannelSpec, length: int) -> ChannelSpec:
    """Uniform average of the first `length` powers (identity included)."""
    if ch.n_in != ch.n_out:
        raise ValueError("cesaro mean needs matching input/output systems")
    s = superoperator(ch)
    acc = np.zeros_like(s)
    term = np.eye(s.shape[0], dtype=complex)
    for _ in range(length):
        acc += term
        term = s @ term
    return ChannelSpec(unitary=None, n_in=ch.n_in, n_env_in=0, n_out=ch.n_out,
                       n_env_out=0, superop=acc / length)


def channel_apply_any(ch: ChannelSpec, rho: np.ndarray) -> np.ndarray:
    return apply_superop(ch, rho) if ch.unitary is None else apply_channel(ch, rho)


def fixed_point(ch: ChannelSpec, residual_tol: float = 1e-8) -> np.ndarray:
    """A state left invariant by the channel, from the unit eigenvector of
    its superoperator, cleaned up by damped iteration."""
    if ch.n_in != ch.n_out:
        raise ValueError("fixed points need matching input/output systems")
    s = superoperator(ch)
    vals, vecs = np.linalg.eig(s)
    idx = int(np.argmin(np.abs(vals - 1.0)))
    if abs(vals[idx] - 1.0) > 1e-6:
        raise ArithmeticError("no unit eigenvalue found; channel is not CPTP?")
    d = ch.dim_in
    x = linalg.hermitianize(vecs[:, idx].reshape(d, d))
    rho = linalg.psd_part(x)
    if np.trace(rho).real < 1e-9:
        rho = linalg.psd_part(-x)
    if np.trace(rho).real < 1e-9:
        rho = np.eye(d, dtype=complex) / d
    rho = rho / np.trace(rho).real
    for _ in range(2000):
        res = linalg.trace_norm(channel_apply_any(ch, rho) - rho)
        if res < residual_tol * 1e-2:
            break
        rho = linalg.psd_part(0.5 * (rho + channel_apply_any(ch, rho)))
        rho = rho / np.trace(rho).real
    res = linalg.trace_norm(channel_apply_any(ch, rho) - rho)
    if res > residual_tol:
        raise ArithmeticError(f"fixed point residual {res:.2e} above tolerance")
    return rho


def approx_fixed_residual(rho: np.ndarray, ch: ChannelSpec) -> float:
    """Fidelity defect of one channel application, 1 - F(rho, N(rho))."""
    return 1.0 - fidelity(rho, channel_apply_any(ch, rho))


# ---------------------------------------------------------------------------
# channel games: see-saw solvers
# ---------------------------------------------------------------------------

def _sqrt_with_pinv(sigma: np.ndarray, tol: float = 1e-12):
    eig = linalg.herm_eig(sigma)
    vals = np.clip(eig.values, 0.0, None)
    root = np.sqrt(vals)
    inv = np.where(root > tol, 1.0 / np.maximum(root, tol), 0.0)
    v = eig.vectors
    return (v * root) @ v.conj().T, (v * inv) @ v.conj().T


def sqrt_fidelity_gradient(rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Gradient of sqrt(F)(rho, sigma) with respect to sigma.

    Equals half the likelihood-ratio (operator geometric mean) operator,
    computed on the support of sigma.
    """
    s_half, s_half_inv = _sqrt_with_pinv(sigma)
    mid = linalg.matrix_sqrt_psd(linalg.hermitianize(s_half @ rho @ s_half))
    return 0.5 * linalg.hermitianize(s_half_inv @ mid @ s_half_inv)


def _random_pure(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _pure_to_input(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


@dataclass
class ChannelGameResult:
    value: float
    state: np.ndarray          # argmin/argmax input (pure vector or density)
    certificate: float = 0.0   # residual of the verification path, if run


def _channel_pair_kraus(ch0: ChannelSpec, ch1: ChannelSpec):
    if (ch0.n_in, ch0.n_out) != (ch1.n_in, ch1.n_out):
        raise ValueError("channels act on incompatible systems")
    return kraus_ops(ch0), kraus_ops(ch1)


def channel_fidelity(ch0: ChannelSpec, ch1: ChannelSpec, restarts: int = 24,
                     seed: int = 0, iters: int = 60) -> ChannelGameResult:
    """Worst-case input fidelity min over pure inputs on [reference, input].

    See-saw: the inner fidelity is evaluated exactly and re-expressed through
    its optimal measurement, then the input state descends that measured
    overlap on the unit sphere. Multi-restart; returns an upper bound on the
    true infimum that is certified against a grid for one-qubit channels in
    the test suite.
    """
    _channel_pair_kraus(ch0, ch1)
    n_ref = ch0.n_in
    dim = 2**n_ref * ch0.dim_in
    rng = np.random.default_rng(seed)
    best = ChannelGameResult(value=np.inf, state=None)
    for _ in range(restarts):
        psi = _random_pure(dim, rng)
        last = np.inf
        for _ in range(iters):
            out0 = apply_channel(ch0, _pure_to_input(psi), n_ref=n_ref)
            out1 = apply_channel(ch1, _pure_to_input(psi), n_ref=n_ref)
            f = _root_fidelity_raw(out0, out1) ** 2
            if f < best.value:
                best = ChannelGameResult(value=f, state=psi.copy())
            if last - f < 1e-12:
                break
            last = f
            povm = fuchs_caves_measurement(out0, out1)
            k0 = [adjoint_apply(ch0, el, n_ref=n_ref) for el in povm.elements]
            k1 = [adjoint_apply(ch1, el, n_ref=n_ref) for el in povm.elements]
            psi = _descend_measured_overlap(psi, k0, k1)
    best.value = float(min(max(best.value, 0.0), 1.0))
    return best


def _descend_measured_overlap(psi: np.ndarray, k0: list, k1: list,
                              steps: int = 25) -> np.ndarray:
    """Projected gradient descent of the measured Bhattacharyya overlap."""

    def value_grad(v):
        p = np.array([max(float(np.real(np.vdot(v, k @ v))), 0.0) for k in k0])
        q = np.array([max(float(np.real(np.vdot(v, k @ v))), 0.0) for k in k1])
        val = float(np.sum(np.sqrt(p * q)))
        g = np.zeros_like(v)
        for x in range(len(k0)):
            if p[x] * q[x] > 1e-28:
                g = g + 0.5 * (math.sqrt(q[x] / p[x]) * (k0[x] @ v)
                               + math.sqrt(p[x] / q[x]) * (k1[x] @ v))
        return val, g

    step = 0.5
    val, g = value_grad(psi)
    for _ in range(steps):
        riem = g - np.vdot(psi, g).real * psi
        if np.linalg.norm(riem) < 1e-12:
            break
        cand = psi - step * riem
        cand = cand / np.linalg.norm(cand)
        new_val, new_g = value_grad(cand)
        if new_val < val - 1e-14:
            psi, val, g = cand, new_val, new_g
            step = min(step * 1.3, 2.0)
        else:
            step *= 0.5
            if step < 1e-8:
                break
    return psi


def channel_fidelity_grid(ch0: ChannelSpec, ch1: ChannelSpec, samples: int = 20000,
                          seed: int = 1, refine: bool = True) -> float:
    """Dense random-search certificate for small channel pairs."""
    n_ref = ch0.n_in
    dim = 2**n_ref * ch0.dim_in
    rng = np.random.default_rng(seed)

    def f_of(vec):
        v = vec[:dim] + 1j * vec[dim:]
        n = np.linalg.norm(v)
        if n < 1e-12:
            return 1.0
        rho = _pure_to_input(v / n)
        return _root_fidelity_raw(apply_channel(ch0, rho, n_ref),
                                  apply_channel(ch1, rho, n_ref)) ** 2

    pool = rng.normal(size=(samples, 2 * dim))
    vals = np.array([f_of(p) for p in pool])
    best_idx = np.argsort(vals)[:8]
    best = float(vals[best_idx[0]])
    if refine:
        for i in best_idx:
            res = scipy.optimize.minimize(f_of, pool[i], method="Nelder-Mead",
                                          options={"maxiter": 4000, "xatol": 1e-10,
                                                   "fatol": 1e-12})
            best = min(best, float(res.fun))
    return float(min(max(best, 0.0), 1.0))


def diamond_distance(ch0: ChannelSpec, ch1: ChannelSpec, restarts: int = 24,
                     seed: int = 0, iters: int = 200) -> ChannelGameResult:
    """Normalized diamond distance via alternating Helstrom/eigenvector ascent.

    Monotone see-saw between the optimal discrimination operator for the
    current input and the best input for the current operator; lower bound,
    grid-certified for one-qubit channels in the test suite.
    """
    _channel_pair_kraus(ch0, ch1)
    n_ref = ch0.n_in
    dim = 2**n_ref * ch0.dim_in
    rng = np.random.default_rng(seed)
    best = ChannelGameResult(value=-np.inf, state=None)
    for _ in range(restarts):
        psi = _random_pure(dim, rng)
        last = -np.inf
        for _ in range(iters):
            delta = (apply_channel(ch0, _pure_to_input(psi), n_ref)
                     - apply_channel(ch1, _pure_to_input(psi), n_ref))
            t = 0.5 * linalg.trace_norm(delta)
            if t > best.value:
                best = ChannelGameResult(value=t, state=psi.copy())
            if t - last < 1e-13:
                break
            last = t
            proj, _ = _positive_projector(delta)
            k = (adjoint_apply(ch0, proj, n_ref) - adjoint_apply(ch1, proj, n_ref))
            eig = linalg.herm_eig(linalg.hermitianize(k))
            psi = eig.vectors[:, 0]
    best.value = float(min(max(best.value, 0.0), 1.0))
    return best


def _positive_projector(delta: np.ndarray):
    eig = linalg.herm_eig(linalg.hermitianize(delta))
    pos = eig.vectors[:, eig.values >= 0]
    return pos @ pos.conj().T, eig


def diamond_distance_grid(ch0: ChannelSpec, ch1: ChannelSpec, samples: int = 20000,
                          seed: int = 1, refine: bool = True) -> float:
    n_ref = ch0.n_in
    dim = 2**n_ref * ch0.dim_in
    rng = np.random.default_rng(seed)

    def td_of(vec):
        v = vec[:dim] + 1j * vec[dim:]
        n = np.linalg.norm(v)
        if n < 1e-12:
            return 0.0
        rho = _pure_to_input(v / n)
        return 0.5 * linalg.trace_norm(apply_channel(ch0, rho, n_ref)
                                       - apply_channel(ch1, rho, n_ref))

    pool = rng.normal(size=(samples, 2 * dim))
    vals = np.array([td_of(p) for p in pool])
    best_idx = np.argsort(vals)[-8:]
    best = float(vals[best_idx[-1]])
    if refine:
        for i in best_idx:
            res = scipy.optimize.minimize(lambda x: -td_of(x), pool[i],
                                          method="Nelder-Mead",
                                          options={"maxiter": 4000, "xatol": 1e-10,
                                                   "fatol": 1e-12})
            best = max(best, float(-res.fun))
    return float(min(max(best, 0.0), 1.0))


def max_output_fidelity(ch0: ChannelSpec, ch1: ChannelSpec, iters: int = 2000,
                        step: float = 0.1, tol: float = 1e-10) -> ChannelGameResult:
    """sup over input densities of F(N0(rho), N1(rho)) by exponentiated
    gradient ascent (the objective is concave in rho)."""
    _channel_pair_kraus(ch0, ch1)
    d = ch0.dim_in
    rho = np.eye(d, dtype=complex) / d
    last = -np.inf
    for _ in range(iters):
        out0, out1 = apply_channel(ch0, rho), apply_channel(ch1, rho)
        rf = _root_fidelity_raw(out0, out1)
        if abs(rf - last) < tol:
            break
        last = rf
        grad = (adjoint_apply(ch0, sqrt_fidelity_gradient(out1, out0))
                + adjoint_apply(ch1, sqrt_fidelity_gradient(out0, out1)))
        rho = _expgrad_step(rho, grad, step)
    return ChannelGameResult(value=float(min(last**2, 1.0)), state=rho)


def _expgrad_step(rho: np.ndarray, grad: np.ndarray, step: float) -> np.ndarray:
    eig = linalg.herm_eig(linalg.hermitianize(rho))
    logs = np.log(np.clip(eig.values, 1e-14, None))
    log_rho = (eig.vectors * logs) @ eig.vectors.conj().T
    exponent = linalg.hermitianize(log_rho + step * grad)
    e2 = linalg.herm_eig(exponent)
    w = np.exp(e2.values - e2.values.max())
    out = (e2.vectors * w) @ e2.vectors.conj().T
    return out / np.trace(out).real


def min_trace_distance(ch0: ChannelSpec, ch1: ChannelSpec, p: float = 0.5,
                       restarts: int = 12, seed: int = 0) -> ChannelGameResult:
    """inf over input densities of ||p N0(rho) - (1-p) N1(rho)||_1.

    Convex objective; the minimizer may be a mixed state, so the search is
    over a Cholesky-like factor parameterization with local refinement.
    """
    _channel_pair_kraus(ch0, ch1)
    d = ch0.dim_in
    rng = np.random.default_rng(seed)

    def rho_of(vec):
        g = (vec[:d * d] + 1j * vec[d * d:]).reshape(d, d)
        rho = g @ g.conj().T
        tr = np.trace(rho).real
        if tr < 1e-14:
            return np.eye(d, dtype=complex) / d
        return rho / tr

    def objective(vec):
        rho = rho_of(vec)
        return linalg.trace_norm(p * apply_channel(ch0, rho)
                                 - (1 - p) * apply_channel(ch1, rho))

    best_val, best_rho = np.inf, np.eye(d, dtype=complex) / d
    for _ in range(restarts):
        x0 = rng.normal(size=2 * d * d)
        res = scipy.optimize.minimize(objective, x0, method="Nelder-Mead",
                                      options={"maxiter": 6000, "xatol": 1e-10,
                                               "fatol": 1e-13})
        if res.fun < best_val:
            best_val, best_rho = float(res.fun), rho_of(res.x)
    return ChannelGameResult(value=max(best_val, 0.0), state=best_rho)


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------

@dataclass
class Ensemble:
    probs: np.ndarray
    members: list        # density operators or ChannelSpecs

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1.0) > 1e-10:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        if len(self.probs) != len(self.members):
            raise ValueError("probability/member count mismatch")
        kinds = {isinstance(m, ChannelSpec) for m in self.members}
        if len(kinds) != 1:
            raise ValueError("mixed ensemble member types")

    @property
    def d(self) -> int:
        return len(self.members)

    @property
    def is_channel_ensemble(self) -> bool:
        return isinstance(self.members[0], ChannelSpec)


@dataclass
class SimilarityResult:
    value: float               # the acceptance-probability-style similarity
    sigma: np.ndarray          # optimal common state
    upper_bound: float
    state: np.ndarray | None = None   # optimal input (channel ensembles)


def _similarity_bound_states(probs, states) -> float:
    d = len(states)
    total = 0.0
    for x in range(d):
        for y in range(x + 1, d):
            total += math.sqrt(probs[x] * probs[y]) * _root_fidelity_raw(states[x], states[y])
    return 1.0 / d + (2.0 / d) * total


def _ascend_common_state(probs, states, step: float = 0.1, iters: int = 2000,
                         tol: float = 1e-9, sigma0: np.ndarray | None = None,
                         adaptive: bool = False):
    """Exponentiated-gradient ascent of sum_x sqrt(p_x) sqrt(F)(rho_x, sigma).

    Value and gradient share one eigendecomposition of sigma per iteration;
    with `adaptive` the step is halved whenever an update loses ground.
    """
    dim = states[0].shape[0]
    sigma = sigma0
    if sigma is None:
        sigma = sum(p * s for p, s in zip(probs, states))
        sigma = linalg.hermitianize(sigma + 1e-9 * np.eye(dim)) / np.trace(sigma).real
    coeff = [math.sqrt(p) for p in probs]
    last = -np.inf
    best_val, best_sigma = -np.inf, sigma
    for _ in range(iters + 1):
        vs, us = np.linalg.eigh(linalg.hermitianize(sigma))
        vs = np.clip(vs, 0.0, None)
        root = np.sqrt(vs)
        inv = np.where(root > 1e-12, 1.0 / np.maximum(root, 1e-12), 0.0)
        s_half = (us * root) @ us.conj().T
        s_inv = (us * inv) @ us.conj().T
        val = 0.0
        grad = np.zeros((dim, dim), dtype=complex)
        for c, rho in zip(coeff, states):
            w, v = np.linalg.eigh(linalg.hermitianize(s_half @ rho @ s_half))
            w = np.sqrt(np.clip(w, 0.0, None))
            val += c * float(w.sum())
            mid = (v * w) @ v.conj().T
            grad += c * 0.5 * linalg.hermitianize(s_inv @ mid @ s_inv)
        if val > best_val:
            best_val, best_sigma = val, sigma
        if abs(val - last) < tol:
            break
        if adaptive and val < last - 1e-12:
            step *= 0.5
            if step < 1e-4:
                break
        last = val
        sigma = _expgrad_step(sigma, grad, step)
    return float(best_val), best_sigma


def best_common_state(probs, states, sigma0: np.ndarray | None = None):
    """Public wrapper for the common-state ascent; returns (sum, sigma)."""
    return _ascend_common_state(np.asarray(probs, dtype=float), list(states),
                                sigma0=sigma0)


def ensemble_similarity(ens: Ensemble, step: float = 0.1, iters: int = 2000,
                        tol: float = 1e-9) -> SimilarityResult:
    """Similarity of a state ensemble: (1/d) [sup_sigma sum_x sqrt(p_x F_x)]^2."""
    if ens.is_channel_ensemble:
        raise ValueError("expected a state ensemble")
    states = [_check_state(m) for m in ens.members]
    total, sigma = _ascend_common_state(ens.probs, states, step, iters, tol)
    value = (total**2) / ens.d
    bound = _similarity_bound_states(ens.probs, states)
    return SimilarityResult(value=float(min(value, bound)), sigma=sigma,
                            upper_bound=bound)


def ensemble_channel_similarity(ens: Ensemble, restarts: int = 4, seed: int = 0,
                                outer_iters: int = 40) -> SimilarityResult:
    """Channel-ensemble similarity with an adversarial input state.

    (1/d) [inf_psi sup_sigma sum_x sqrt(p_x) sqrt(F)(N_x(psi), sigma)]^2,
    with psi a pure state on [reference, input]. Gradient descent on the
    inner-maximized objective (Danskin direction) with line search against
    the true value, multi-restart.
    """
    chans = _ensemble_channels(ens)
    n_ref = chans[0].n_in
    dim_in = 2**n_ref * chans[0].dim_in
    rng = np.random.default_rng(seed)

    def inner_value(psi, sigma0, iters=400):
        # near-singular warm starts freeze the exponentiated-gradient ascent,
        # so always race the warm start against a fresh mixture start
        outs = [apply_channel(c, _pure_to_input(psi), n_ref) for c in chans]
        total, sigma = _ascend_common_state(ens.probs, outs, iters=iters,
                                            tol=1e-11, step=0.25, adaptive=True)
        if sigma0 is not None:
            dim = sigma0.shape[0]
            warm = 0.999 * sigma0 + 0.001 * np.eye(dim) / dim
            t2, s2 = _ascend_common_state(ens.probs, outs, iters=iters,
                                          sigma0=warm, tol=1e-11, step=0.25,
                                          adaptive=True)
            if t2 > total:
                total, sigma = t2, s2
        return total, sigma, outs

    best_total, best_sigma, best_psi = np.inf, None, None
    for _ in range(restarts):
        psi = _random_pure(dim_in, rng)
        total, sigma, outs = inner_value(psi, None)
        step = 0.5
        for _ in range(outer_iters):
            if total < best_total:
                best_total, best_sigma, best_psi = total, sigma, psi.copy()
            grad_op = np.zeros((dim_in, dim_in), dtype=complex)
            for p, c, out in zip(ens.probs, chans, outs):
                grad_op += math.sqrt(p) * adjoint_apply(
                    c, sqrt_fidelity_gradient(sigma, out), n_ref)
            g = grad_op @ psi
            riem = g - np.vdot(psi, g).real * psi
            if np.linalg.norm(riem) < 1e-12:
                break
            improved = False
            for _ in range(24):
                cand = psi - step * riem
                cand = cand / np.linalg.norm(cand)
                cand_total, cand_sigma, cand_outs = inner_value(cand, sigma, 200)
                if cand_total < total - 1e-13:
                    psi, total, sigma, outs = cand, cand_total, cand_sigma, cand_outs
                    step = min(step * 1.5, 2.0)
                    improved = True
                    break
                step *= 0.5
                if step < 1e-9:
                    break
            if not improved:
                break
        if total < best_total:
            best_total, best_sigma, best_psi = total, sigma, psi.copy()

    # simplex polish of the input with a high-accuracy inner solve
    def h_of(vec):
        v = vec[:dim_in] + 1j * vec[dim_in:]
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            return 2.0
        outs = [apply_channel(c, _pure_to_input(v / nrm), n_ref) for c in chans]
        total, _ = _ascend_common_state(ens.probs, outs, iters=1200, tol=1e-12,
                                        step=0.25, adaptive=True)
        return total

    x0 = np.concatenate([best_psi.real, best_psi.imag])
    res = scipy.optimize.minimize(h_of, x0, method="Nelder-Mead",
                                  options={"maxiter": 400, "xatol": 1e-9,
                                           "fatol": 1e-11})
    if res.fun < best_total:
        v = res.x[:dim_in] + 1j * res.x[dim_in:]
        best_psi = v / np.linalg.norm(v)
    # honest re-evaluation at the chosen input (long, cold ascent)
    outs = [apply_channel(c, _pure_to_input(best_psi), n_ref) for c in chans]
    best_total, best_sigma = _ascend_common_state(ens.probs, outs, iters=6000,
                                                  tol=1e-13)
    value = (best_total**2) / ens.d
    bound = _similarity_bound_states(ens.probs, outs)
    return SimilarityResult(value=float(value), sigma=best_sigma,
                            upper_bound=bound, state=best_psi)


def _ensemble_channels(ens: Ensemble) -> list[ChannelSpec]:
    if not ens.is_channel_ensemble:
        raise ValueError("expected a channel ensemble")
    chans = list(ens.members)
    dims = {(c.n_in, c.n_out) for c in chans}
    if len(dims) != 1:
        raise ValueError("ensemble channels act on different systems")
    return chans


def ensemble_channel_similarity_single(ens: Ensemble, iters: int = 1500,
                                       step: float = 0.1,
                                       tol: float = 1e-10) -> SimilarityResult:
    """Single-prover channel-ensemble similarity.

    (1/d) [sup_{rho, sigma} sum_x sqrt(p_x) sqrt(F)(N_x(rho), sigma)]^2 by
    alternating exponentiated-gradient ascent in rho and sigma (the
    objective is jointly concave).
    """
    chans = _ensemble_channels(ens)
    d_in = chans[0].dim_in
    rho = np.eye(d_in, dtype=complex) / d_in
    sigma = None
    last = -np.inf
    for _ in range(iters):
        outs = [channel_apply_any(c, rho) for c in chans]
        total, sigma = _ascend_common_state(ens.probs, outs, iters=300, sigma0=sigma)
        if abs(total - last) < tol:
            break
        last = total
        grad = np.zeros((d_in, d_in), dtype=complex)
        for p, c, out in zip(ens.probs, chans, outs):
            grad += math.sqrt(p) * adjoint_apply(c, sqrt_fidelity_gradient(sigma, out))
        rho = _expgrad_step(rho, grad, step)
    value = min((last**2) / ens.d, 1.0)
    return SimilarityResult(value=float(value), sigma=sigma, upper_bound=1.0,
                            state=rho)


# ---------------------------------------------------------------------------
# multi-state discrimination
# ---------------------------------------------------------------------------

@dataclass
class DiscriminationResult:
    povm: POVM
    success: float
    kkt_residual: float
    converged: bool


def _project_povm(ops: list[np.ndarray], max_iters: int = 500,
                  tol: float = 1e-13) -> list[np.ndarray]:
    """Dykstra projection onto {Lambda_x >= 0, sum_x Lambda_x = I}."""
    m = len(ops)
    d = ops[0].shape[0]
    x = [linalg.hermitianize(o) for o in ops]
    incr = [np.zeros((d, d), dtype=complex) for _ in range(m)]
    for _ in range(max_iters):
        prev = [xi.copy() for xi in x]
        # PSD cone (with Dykstra increments)
        for i in range(m):
            y = x[i] + incr[i]
            proj = linalg.psd_part(y)
            incr[i] = y - proj
            x[i] = proj
        # affine constraint sum = I (no increment needed for affine sets)
        defect = (sum(x) - np.eye(d)) / m
        x = [xi - defect for xi in x]
        change = max(np.linalg.norm(x[i] - prev[i]) for i in range(m))
        if change < tol:
            break
    return x


def discrimination_kkt_residual(probs, states, povm: POVM) -> float:
    y = np.zeros_like(states[0])
    for p, rho, el in zip(probs, states, povm.elements):
        y += p * (rho @ el)
    y = linalg.hermitianize(y)
    res = 0.0
    for p, rho in zip(probs, states):
        res = max(res, -float(np.linalg.eigvalsh(
            linalg.hermitianize(y - p * rho)).min()))
    return max(res, 0.0)


def multistate_discrimination_sdp(ens: Ensemble, max_iters: int = 4000,
                                  step: float | None = None,
                                  kkt_tol: float = 1e-6) -> DiscriminationResult:
    """Optimal discrimination POVM by projected gradient ascent.

    The (linear) success probability sum_x p_x Tr[Lambda_x rho_x] is
    ascended with Dykstra projections back onto the POVM set; stationarity
    is certified through the complementary-slackness residual.
    """
    if ens.is_channel_ensemble:
        raise ValueError("expected a state ensemble")
    states = [_check_state(m) for m in ens.members]
    m = ens.d
    d = states[0].shape[0]
    grads = [p * rho for p, rho in zip(ens.probs, states)]
    scale = max(np.linalg.norm(g) for g in grads)
    eta = (1.0 / scale) if step is None else step
    ops = [np.eye(d, dtype=complex) / m for _ in range(m)]
    best_val, best_ops = -np.inf, ops
    stalled = 0
    for _ in range(max_iters):
        ops_new = _project_povm([o + eta * g for o, g in zip(ops, grads)])
        val = sum(float(np.trace(g @ o).real) for g, o in zip(grads, ops_new))
        move = max(np.linalg.norm(a - b) for a, b in zip(ops_new, ops))
        ops = ops_new
        if val > best_val + 1e-14:
            best_val, best_ops = val, ops
            stalled = 0
        else:
            stalled += 1
        if move < 1e-12 or stalled > 50:
            break
    povm = POVM(elements=[linalg.psd_part(o) for o in _project_povm(best_ops)])
    success = sum(p * float(np.trace(el @ rho).real)
                  for p, rho, el in zip(ens.probs, states, povm.elements))
    residual = discrimination_kkt_residual(ens.probs, states, povm)
    converged = residual < kkt_tol
    if not converged:
        # surfaced to the caller rather than raised: the POVM is still a
        # feasible measurement, just not certified optimal
        pass
    return DiscriminationResult(povm=povm, success=float(success),
                                kkt_residual=float(residual), converged=converged)


# ---------------------------------------------------------------------------
# strategies
# ---------------------------------------------------------------------------

def strategy_apply(strategy: StrategySpec, co: CoStrategySpec) -> np.ndarray:
    """State on [co-reference, final io-wire] after the full interaction."""
    n = strategy.n_turns
    r, nm, nio = co.n_ref, strategy.n_mem, strategy.n_io
    if co.n_io != nio or len(co.unitaries) != n - 1:
        raise ValueError("co-strategy does not match the strategy interface")
    env_sizes = [t.n_env_in for t in strategy.turns]
    width = r + nm + nio + sum(env_sizes)
    ref_w = list(range(r))
    mem_w = list(range(r, r + nm))
    io_w = list(range(r + nm, r + nm + nio))
    env_off = r + nm + nio
    circ = qsim.Circuit(width)
    circ.unitary(qsim.prep_unitary(co.initial), ref_w + io_w)
    for j, turn in enumerate(strategy.turns):
        env_w = [env_off + sum(env_sizes[:j]) + t for t in range(env_sizes[j])]
        circ.unitary(turn.unitary, mem_w + io_w + env_w)
        if j < n - 1:
            circ.unitary(co.unitaries[j], ref_w + io_w)
    psi = qsim.run_pure(circ)
    dims = [2**r, 2**nm, 2**nio, 2 ** sum(env_sizes)]
    return linalg.partial_trace(qsim.density_from_pure(psi), dims, keep=[0, 2])


def strategy_apply_sequential(strategy: StrategySpec, co: CoStrategySpec) -> np.ndarray:
    """Same interaction carried turn by turn in the density picture."""
    r, nm, nio = co.n_ref, strategy.n_mem, strategy.n_io
    dr, dm, dw = 2**r, 2**nm, 2**nio
    # state on (R, M, W) with the memory initialized to |0>
    t = np.zeros((dr, dm, dw, dr, dm, dw), dtype=complex)
    t[:, 0, :, :, 0, :] = qsim.density_from_pure(co.initial).reshape(dr, dw, dr, dw)
    rho = t.reshape(dr * dm * dw, -1)
    for j, turn in enumerate(strategy.turns):
        rho = apply_channel(turn, rho, n_ref=r)                  # acts on (M, W)
        if j < strategy.n_turns - 1:
            # co-strategy unitary on (R, W): route around the memory block
            tt = rho.reshape(dr, dm, dw, dr, dm, dw).transpose(1, 0, 2, 4, 3, 5)
            ku = np.kron(np.eye(dm, dtype=complex), co.unitaries[j])
            tt = ku @ tt.reshape(dm * dr * dw, -1) @ ku.conj().T
            rho = tt.reshape(dm, dr, dw, dm, dr, dw).transpose(1, 0, 2, 4, 3, 5)
            rho = rho.reshape(dr * dm * dw, -1)
    return linalg.partial_trace(rho, [dr, dm, dw], keep=[0, 2])


@dataclass
class StrategyGameResult:
    value: float
    co_strategy: CoStrategySpec


def _co_strategy_from_vec(vec: np.ndarray, n_ref: int, n_io: int,
                          n_turns: int) -> CoStrategySpec:
    d_init = 2 ** (n_ref + n_io)
    du = 2 ** (n_ref + n_io)
    k = 2 * d_init
    init = vec[:d_init] + 1j * vec[d_init:k]
    norm = np.linalg.norm(init)
    init = init / norm if norm > 1e-12 else qsim.zero_state(n_ref + n_io)
    unitaries = []
    for _ in range(n_turns - 1):
        h_params = vec[k:k + du * du]
        k += du * du
        h = np.zeros((du, du), dtype=complex)
        idx = 0
        for i in range(du):
            h[i, i] = h_params[idx]
            idx += 1
        for i in range(du):
            for j in range(i + 1, du):
                h[i, j] = h_params[idx] + 1j * h_params[idx + 1]
                h[j, i] = h_params[idx] - 1j * h_params[idx + 1]
                idx += 2
        unitaries.append(scipy.linalg.expm(1j * h))
    return CoStrategySpec(initial=init, unitaries=tuple(unitaries),
                          n_ref=n_ref, n_io=n_io)


def _co_strategy_vec_size(n_ref: int, n_io: int, n_turns: int) -> int:
    d_init = 2 ** (n_ref + n_io)
    du = 2 ** (n_ref + n_io)
    return 2 * d_init + (n_turns - 1) * du * du


def _strategy_game(s0: StrategySpec, s1: StrategySpec, measure_fn, mode: str,
                   n_ref: int, restarts: int, seed: int) -> StrategyGameResult:
    if (s0.n_turns, s0.n_mem, s0.n_io) != (s1.n_turns, s1.n_mem, s1.n_io):
        raise ValueError("strategies have incompatible interfaces")
    n = s0.n_turns
    size = _co_strategy_vec_size(n_ref, s0.n_io, n)
    sign = 1.0 if mode == "min" else -1.0
    rng = np.random.default_rng(seed)

    def objective(vec):
        co = _co_strategy_from_vec(vec, n_ref, s0.n_io, n)
        return sign * measure_fn(strategy_apply(s0, co), strategy_apply(s1, co))

    best_val, best_co = np.inf, None
    for _ in range(restarts):
        x0 = rng.normal(size=size)
        res = scipy.optimize.minimize(objective, x0, method="Nelder-Mead",
                                      options={"maxiter": 8000, "xatol": 1e-9,
                                               "fatol": 1e-12})
        if res.fun < best_val:
            best_val = float(res.fun)
            best_co = _co_strategy_from_vec(res.x, n_ref, s0.n_io, n)
    return StrategyGameResult(value=sign * best_val, co_strategy=best_co)


def strategy_fidelity(s0: StrategySpec, s1: StrategySpec, n_ref: int | None = None,
                      restarts: int = 8, seed: int = 0) -> StrategyGameResult:
    """Heuristic upper bound on the strategy fidelity (worst co-strategy)."""
    n_ref = (s0.n_mem + s0.n_io) if n_ref is None else n_ref
    if s0.n_turns == 1:
        ch0, ch1 = _single_turn_channel(s0), _single_turn_channel(s1)
        res = channel_fidelity(ch0, ch1, seed=seed)
        co = CoStrategySpec(initial=res.state, unitaries=(), n_ref=ch0.n_in,
                            n_io=s0.n_io)
        return StrategyGameResult(value=res.value, co_strategy=co)
    return _strategy_game(s0, s1, lambda a, b: _root_fidelity_raw(a, b) ** 2,
                          "min", n_ref, restarts, seed)


def strategy_distance(s0: StrategySpec, s1: StrategySpec, n_ref: int | None = None,
                      restarts: int = 8, seed: int = 0) -> StrategyGameResult:
    """Heuristic lower bound on the normalized strategy distance."""
    n_ref = (s0.n_mem + s0.n_io) if n_ref is None else n_ref
    if s0.n_turns == 1:
        ch0, ch1 = _single_turn_channel(s0), _single_turn_channel(s1)
        res = diamond_distance(ch0, ch1, seed=seed)
        co = CoStrategySpec(initial=res.state, unitaries=(), n_ref=ch0.n_in,
                            n_io=s0.n_io)
        return StrategyGameResult(value=res.value, co_strategy=co)
    return _strategy_game(s0, s1, trace_distance_raw, "max", n_ref, restarts, seed)


def trace_distance_raw(a: np.ndarray, b: np.ndarray) -> float:
    vals = np.linalg.eigvalsh(linalg.hermitianize(a - b))
    return float(0.5 * np.abs(vals).sum())


def _single_turn_channel(s: StrategySpec) -> ChannelSpec:
    turn = s.turns[0]
    if s.n_mem == 0:
        return turn
    # fold the memory wire into the environment: reorder [M, W, E] -> [W, M, E]
    width = s.n_mem + s.n_io + turn.n_env_in
    perm = (list(range(s.n_mem, s.n_mem + s.n_io)) + list(range(s.n_mem))
            + list(range(s.n_mem + s.n_io, width)))
    t = turn.unitary.reshape((2,) * (2 * width))
    t = np.transpose(t, perm + [p + width for p in perm])
    return qsim.channel_from_unitary(t.reshape(2**width, 2**width), n_in=s.n_io,
                                     n_env_in=s.n_mem + turn.n_env_in)
