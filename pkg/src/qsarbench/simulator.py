"""Exact statevector simulation of the variational circuit.

Conventions, asserted by the test suite:

* qubit 0 is the most significant bit of the basis index;
* RZ(t) = diag(exp(-it/2), exp(+it/2)), RY(t) = [[cos t/2, -sin t/2],
  [sin t/2, cos t/2]];
* a three-angle rotation applies RZ(alpha), then RY(beta), then RZ(gamma);
* an ansatz layer is one rotation per qubit followed by a ring of CNOTs
  with target offset (layer mod max(n-1, 1)) + 1; single qubits skip the
  entanglers.

Measurements are exact expectations; there is no shot sampling.  Gate
application works on the amplitude array with stride arithmetic, and every
kernel accepts arbitrary leading batch axes so whole batches of circuit
evaluations run in single numpy calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPowerOfTwo, QubitOutOfRange, SameQubit

__all__ = [
    "AnsatzParams",
    "StateVector",
    "amplitude_embed",
    "apply_rot",
    "apply_cnot",
    "run_ansatz",
    "z_expectations",
    "parameter_shift_gradient",
    "entangler_offset",
]

ZERO_NORM_THRESHOLD = 1e-12
DEFAULT_LAYERS = 2


@dataclass(frozen=True)
class AnsatzParams:
    """Rotation angles, shaped (layers, qubits, 3), in radians."""

    angles: np.ndarray

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=np.float64)
        if angles.ndim != 3 or angles.shape[2] != 3 or angles.shape[1] < 1:
            raise DimensionMismatch(f"angles must be (layers, n, 3), got {angles.shape}")
        object.__setattr__(self, "angles", angles)

    @property
    def layers(self) -> int:
        return self.angles.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.angles.shape[1]

    @property
    def n_angles(self) -> int:
        return self.angles.size

    def shifted(self, layer: int, qubit: int, component: int, delta: float) -> "AnsatzParams":
        angles = self.angles.copy()
        angles[layer, qubit, component] += delta
        return AnsatzParams(angles)


@dataclass(frozen=True)
class StateVector:
    """Amplitudes of an n-qubit register; qubit 0 is the MSB of the index."""

    amplitudes: np.ndarray
    n_qubits: int
    zero_input: bool = False  # set when a zero vector was embedded as uniform

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.n_qubits < 1 or amps.shape != (1 << self.n_qubits,):
            raise DimensionMismatch(
                f"amplitude shape {amps.shape} does not match {self.n_qubits} qubits"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm_squared(self) -> float:
        return float(np.sum(self.amplitudes.real ** 2 + self.amplitudes.imag ** 2))


# --- array kernels (arbitrary leading batch axes) ---------------------------

def embed_array(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalize rows into amplitude vectors; zero rows become uniform states.

    Returns (amplitudes, zero_mask) where amplitudes has the input's shape
    (complex) and zero_mask flags rows that fell back to the uniform state.
    """
    x = np.asarray(x, dtype=np.float64)
    size = x.shape[-1]
    if size < 2 or size & (size - 1):
        raise NotPowerOfTwo(f"input length {size} is not a power of two >= 2")
    norms = np.sqrt(np.sum(x * x, axis=-1, keepdims=True))
    zero_mask = norms[..., 0] < ZERO_NORM_THRESHOLD
    safe = np.where(norms < ZERO_NORM_THRESHOLD, 1.0, norms)
    amps = x / safe
    if np.any(zero_mask):
        amps[zero_mask] = 1.0 / math.sqrt(size)
    return amps.astype(np.complex128), zero_mask


def rz_matrix(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * theta), 0.0], [0.0, np.exp(0.5j * theta)]], dtype=np.complex128
    )


def ry_matrix(theta: float) -> np.ndarray:
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rot_matrix(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """2x2 unitary for RZ(gamma) . RY(beta) . RZ(alpha)."""
    c = math.cos(beta / 2.0)
    s = math.sin(beta / 2.0)
    return np.array(
        [
            [c * np.exp(-0.5j * (alpha + gamma)), -s * np.exp(0.5j * (alpha - gamma))],
            [s * np.exp(-0.5j * (alpha - gamma)), c * np.exp(0.5j * (alpha + gamma))],
        ],
        dtype=np.complex128,
    )


def rot_matrix_derivatives(alpha: float, beta: float, gamma: float
                           ) -> tuple[np.ndarray, np.ndarray]:
    """The rotation unitary and its three angle derivatives, shape (3, 2, 2)."""
    rza = rz_matrix(alpha)
    ryb = ry_matrix(beta)
    rzg = rz_matrix(gamma)
    d_rza = np.array(
        [[-0.5j * rza[0, 0], 0.0], [0.0, 0.5j * rza[1, 1]]], dtype=np.complex128
    )
    d_rzg = np.array(
        [[-0.5j * rzg[0, 0], 0.0], [0.0, 0.5j * rzg[1, 1]]], dtype=np.complex128
    )
    c = math.cos(beta / 2.0)
    s = math.sin(beta / 2.0)
    d_ryb = 0.5 * np.array([[-s, -c], [c, -s]], dtype=np.complex128)
    u = rzg @ ryb @ rza
    derivatives = np.stack([rzg @ ryb @ d_rza, rzg @ d_ryb @ rza, d_rzg @ ryb @ rza])
    return u, derivatives


def _check_qubit(qubit: int, n_qubits: int) -> None:
    if not 0 <= qubit < n_qubits:
        raise QubitOutOfRange(f"qubit {qubit} outside [0, {n_qubits})")


def apply_single_array(amps: np.ndarray, n_qubits: int, qubit: int, u: np.ndarray) -> np.ndarray:
    _check_qubit(qubit, n_qubits)
    pre = 1 << qubit
    post = 1 << (n_qubits - 1 - qubit)
    shape = amps.shape
    s = amps.reshape(shape[:-1] + (pre, 2, post))
    zero = s[..., 0, :]
    one = s[..., 1, :]
    out = np.empty_like(s)
    lo = out[..., 0, :]
    hi = out[..., 1, :]
    np.multiply(zero, u[0, 0], out=lo)
    lo += u[0, 1] * one
    np.multiply(zero, u[1, 0], out=hi)
    hi += u[1, 1] * one
    return out.reshape(shape)


def apply_cnot_array(amps: np.ndarray, n_qubits: int, control: int, target: int) -> np.ndarray:
    _check_qubit(control, n_qubits)
    _check_qubit(target, n_qubits)
    if control == target:
        raise SameQubit("control and target must differ")
    first, second = min(control, target), max(control, target)
    pre = 1 << first
    mid = 1 << (second - first - 1)
    post = 1 << (n_qubits - 1 - second)
    shape = amps.shape
    s = amps.reshape(shape[:-1] + (pre, 2, mid, 2, post))
    out = np.empty_like(s)
    if control < target:
        out[..., 0, :, :, :] = s[..., 0, :, :, :]
        out[..., 1, :, 0, :] = s[..., 1, :, 1, :]
        out[..., 1, :, 1, :] = s[..., 1, :, 0, :]
    else:
        out[..., :, :, 0, :] = s[..., :, :, 0, :]
        out[..., 0, :, 1, :] = s[..., 1, :, 1, :]
        out[..., 1, :, 1, :] = s[..., 0, :, 1, :]
    return out.reshape(shape)


def entangler_offset(layer: int, n_qubits: int) -> int:
    """Ring CNOT target offset for a layer: cycles 1, 2, ..., n-1."""
    return (layer % max(n_qubits - 1, 1)) + 1


def _apply_layer_tail(amps: np.ndarray, n_qubits: int, angles: np.ndarray,
                      layer: int, start_qubit: int) -> np.ndarray:
    """Finish layer `layer` from `start_qubit`, then run all later layers."""
    for current in range(layer, angles.shape[0]):
        first = start_qubit if current == layer else 0
        for q in range(first, n_qubits):
            amps = apply_single_array(amps, n_qubits, q, rot_matrix(*angles[current, q]))
        if n_qubits > 1:
            offset = entangler_offset(current, n_qubits)
            for q in range(n_qubits):
                amps = apply_cnot_array(amps, n_qubits, q, (q + offset) % n_qubits)
    return amps


def run_ansatz_array(amps: np.ndarray, n_qubits: int, angles: np.ndarray) -> np.ndarray:
    if angles.shape[1] != n_qubits:
        raise DimensionMismatch(
            f"ansatz is for {angles.shape[1]} qubits, state has {n_qubits}"
        )
    return _apply_layer_tail(amps, n_qubits, angles, 0, 0) if angles.shape[0] else amps


_Z_SIGNS: dict[int, np.ndarray] = {}


def _z_signs(n_qubits: int) -> np.ndarray:
    signs = _Z_SIGNS.get(n_qubits)
    if signs is None:
        basis = np.arange(1 << n_qubits)
        signs = np.empty((1 << n_qubits, n_qubits))
        for q in range(n_qubits):
            bit = (basis >> (n_qubits - 1 - q)) & 1
            signs[:, q] = 1.0 - 2.0 * bit
        _Z_SIGNS[n_qubits] = signs
    return signs


def z_sign_matrix(n_qubits: int) -> np.ndarray:
    """(2^n, n) matrix of +/-1: the Z eigenvalue of each basis state per qubit."""
    return _z_signs(n_qubits)


def z_expectations_array(amps: np.ndarray, n_qubits: int) -> np.ndarray:
    probs = amps.real ** 2 + amps.imag ** 2
    return probs @ _z_signs(n_qubits)


# --- StateVector-level operations --------------------------------------------

def amplitude_embed(x: np.ndarray) -> StateVector:
    """Encode a length-2^n real vector as normalized amplitudes.

    A vector with norm below 1e-12 embeds as the uniform state, flagged via
    `zero_input` on the result.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch("amplitude_embed expects a single vector")
    amps, zero_mask = embed_array(x)
    return StateVector(amps, int(math.log2(x.shape[0])), zero_input=bool(zero_mask))


def apply_rot(state: StateVector, qubit: int, alpha: float, beta: float, gamma: float) -> StateVector:
    amps = apply_single_array(state.amplitudes, state.n_qubits, qubit,
                              rot_matrix(alpha, beta, gamma))
    return StateVector(amps, state.n_qubits, state.zero_input)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    amps = apply_cnot_array(state.amplitudes, state.n_qubits, control, target)
    return StateVector(amps, state.n_qubits, state.zero_input)


def run_ansatz(state: StateVector, params: AnsatzParams) -> StateVector:
    amps = run_ansatz_array(state.amplitudes, state.n_qubits, params.angles)
    return StateVector(amps, state.n_qubits, state.zero_input)


def z_expectations(state: StateVector) -> np.ndarray:
    """Exact <Z_q> for every qubit q."""
    return z_expectations_array(state.amplitudes, state.n_qubits)


def parameter_shift_gradient(x: np.ndarray, params: AnsatzParams,
                             upstream: np.ndarray) -> np.ndarray:
    """Gradient of sum_q upstream[q] * <Z_q> w.r.t. every rotation angle.

    Uses the exact two-point rule: d<Z>/dtheta = (<Z>(theta + pi/2)
    - <Z>(theta - pi/2)) / 2, valid because every parametrized gate is an
    RY or RZ rotation.
    """
    upstream = np.asarray(upstream, dtype=np.float64)
    state = amplitude_embed(x)
    if upstream.shape != (state.n_qubits,):
        raise DimensionMismatch(
            f"upstream must have one entry per qubit, got {upstream.shape}"
        )
    grad = np.zeros_like(params.angles)
    for layer in range(params.layers):
        for qubit in range(params.n_qubits):
            for comp in range(3):
                z_plus = z_expectations(run_ansatz(state, params.shifted(layer, qubit, comp, +math.pi / 2)))
                z_minus = z_expectations(run_ansatz(state, params.shifted(layer, qubit, comp, -math.pi / 2)))
                grad[layer, qubit, comp] = upstream @ (z_plus - z_minus) / 2.0
    return grad
