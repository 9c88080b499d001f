"""Exact discretized-bath reference.

The continuum of cavity modes is replaced by a finite uniform grid with
midpoint weights. In the single-excitation sector the quadratic Hamiltonian
is the real symmetric matrix

    h = [[omega, g_1, ..., g_N],
         [g_1, omega_1,       ],
         [...,       ...      ],
         [g_N,         omega_N]]

and every Heisenberg coefficient is an entry of ``G(t) = exp(-i h t)``. The
matrix is diagonalized once; later time points cost a reconstruction in the
eigenbasis.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, RecurrenceError
from .model import ModelParams, coupling_density, mean_occupation

RECURRENCE_GUARD = 0.5
MC_BLOCK_SIZE = 1024
WORKERS_ENV = "EXCITONDECOH_WORKERS"


@dataclass(frozen=True, eq=False)
class BathGrid:
    frequencies: np.ndarray
    couplings: np.ndarray
    spacing: float
    recurrence_time: float
    center: float

    @property
    def count(self) -> int:
        return len(self.frequencies)

    @property
    def horizon(self) -> float:
        """Largest time the oracle accepts."""
        return RECURRENCE_GUARD * self.recurrence_time


def build_grid(params: ModelParams, half_width_in_gammas: float = 50.0, count: int = 2001) -> BathGrid:
    """Uniform symmetric grid on ``[omega - W gamma, omega + W gamma]``.

    Couplings use midpoint weights, ``g_j^2 = J(omega_j) * spacing``. The
    centre mode sits exactly at ``omega``.
    """
    if count < 3 or count % 2 == 0:
        raise ParameterError(f"count must be an odd integer >= 3, got {count}")
    if half_width_in_gammas < 10:
        raise ParameterError(f"half_width_in_gammas must be >= 10, got {half_width_in_gammas}")
    half = half_width_in_gammas * params.gamma
    if params.omega - half <= 0:
        warnings.warn("bath grid extends below zero frequency", stacklevel=2)
    offsets = np.linspace(-half, half, count)
    spacing = 2 * half / (count - 1)
    frequencies = params.omega + offsets
    couplings = np.sqrt(coupling_density(frequencies, params) * spacing)
    return BathGrid(
        frequencies=frequencies,
        couplings=couplings,
        spacing=spacing,
        recurrence_time=2 * np.pi / spacing,
        center=params.omega,
    )


def _check_horizon(grid: BathGrid, times) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ParameterError("times must be non-negative")
    if times.size and times.max() > grid.horizon:
        raise RecurrenceError(
            f"t = {times.max():.6g} exceeds the recurrence guard {grid.horizon:.6g} "
            f"(= {RECURRENCE_GUARD} * 2 pi / spacing)"
        )
    return times


def kernel_from_grid(grid: BathGrid, tau):
    """Discrete memory kernel ``sum_j g_j^2 exp(-i (omega_j - omega) tau)``."""
    _check_horizon(grid, np.abs(tau))
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    detuning = grid.frequencies - grid.center
    out = np.exp(-1j * np.outer(tau_arr, detuning)) @ grid.couplings**2
    return out if np.ndim(tau) else complex(out[0])


@dataclass(frozen=True, eq=False)
class AmplitudeSet:
    t: float
    u: complex
    u_modes: np.ndarray
    v_modes: np.ndarray
    unitarity_defect: float

    @property
    def env_weight(self) -> float:
        return float(np.sum(np.abs(self.u_modes) ** 2))


class BathPropagator:
    """Diagonalized single-excitation generator for one grid.

    The generator is shifted by ``omega`` before diagonalization so that the
    rotating-frame amplitudes ``u`` and ``u_j`` come out without a large
    global phase; lab-frame ``v_j`` gets ``exp(-i omega t)`` put back.
    """

    def __init__(self, grid: BathGrid, params: ModelParams):
        self.grid = grid
        self.params = params
        n = grid.count + 1
        h = np.zeros((n, n))
        h[0, 1:] = grid.couplings
        h[1:, 0] = grid.couplings
        h[np.arange(1, n), np.arange(1, n)] = grid.frequencies - params.omega
        try:
            self.energies, self.vectors = np.linalg.eigh(h)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(f"diagonalization of the bath generator failed: {exc}") from exc
        self.h_shifted = h

    def _phases(self, t: float) -> np.ndarray:
        return np.exp(-1j * self.energies * t)

    def amplitudes(self, t: float) -> AmplitudeSet:
        (t,) = _check_horizon(self.grid, [t])
        d = self._phases(t)
        vb = self.vectors[0]
        # h is real symmetric, so G~ is symmetric and row b equals column b
        row_b = self.vectors @ (d * vb)
        u = row_b[0]
        u_modes = row_b[1:]
        v_modes = np.exp(-1j * self.params.omega * t) * row_b[1:]
        defect = abs(np.vdot(row_b, row_b).real - 1.0)
        return AmplitudeSet(t=float(t), u=complex(u), u_modes=u_modes, v_modes=v_modes,
                            unitarity_defect=float(defect))

    def survival(self, times) -> np.ndarray:
        """Rotating-frame ``u(t)`` alone, O(N) per time."""
        times = _check_horizon(self.grid, times)
        weights = self.vectors[0] ** 2
        return np.exp(-1j * np.outer(times, self.energies)) @ weights

    def matrix(self, t: float) -> np.ndarray:
        """Full lab-frame propagator ``exp(-i h t)``; O(N^3), use sparingly."""
        (t,) = _check_horizon(self.grid, [t])
        g_rot = (self.vectors * self._phases(t)) @ self.vectors.T
        return np.exp(-1j * self.params.omega * t) * g_rot

    def unitarity_defect(self, t: float) -> float:
        """``max |G^dagger G - I|`` over all entries."""
        g = self.matrix(t)
        p = g.conj().T @ g
        p[np.diag_indices_from(p)] -= 1.0
        return float(np.abs(p).max())

    def unitarity_bound(self) -> float:
        """Upper bound on ``max |G^dagger G - I|`` valid for every ``t``.

        With ``E = V^T V - I`` for the computed eigenvectors ``V``,
        ``G^dagger G - I = V D^* E D V^T + (V V^T - I)`` for diagonal unitary
        ``D``, so the spectral norm is at most
        ``(1 + |E|) |E| + |V V^T - I|``; Frobenius norms bound both terms.
        """
        n = self.vectors.shape[0]
        e = self.vectors.T @ self.vectors - np.eye(n)
        f = self.vectors @ self.vectors.T - np.eye(n)
        e_norm = float(np.linalg.norm(e))
        return (1 + e_norm) * e_norm + float(np.linalg.norm(f))

    def exciton_row_orthogonality(self, t: float) -> float:
        """``max_j |(G G^dagger)_{b j}|`` for ``j != b``.

        Vanishing cross terms express ``[b(t), a_j(t)^dagger] = 0``; the
        diagonal entry is returned separately by :meth:`amplitudes`.
        """
        (t,) = _check_horizon(self.grid, [t])
        d = self._phases(t)
        row_b = (self.vectors[0] * d) @ self.vectors.T
        # row_b @ G^dagger with G^dagger = V diag(conj d) V^T
        cross = ((row_b @ self.vectors) * d.conj()) @ self.vectors.T
        return float(np.abs(cross[1:]).max())

    def rotated_bath_block_adjoint(self, t: float, vec: np.ndarray) -> np.ndarray:
        """``(G_BB)^dagger vec`` for the bath-bath block, in the rotating frame."""
        full = np.concatenate(([0.0], vec))
        d = self._phases(t)
        out = self.vectors @ (d.conj() * (self.vectors.T @ full))
        return out[1:]

    def evolve_rotated(self, t: float, states: np.ndarray) -> np.ndarray:
        """Apply the rotating-frame propagator to columns of ``states``."""
        d = self._phases(t)
        return self.vectors @ (d[:, None] * (self.vectors.T @ states))


def propagator(grid: BathGrid, params: ModelParams, times) -> list[AmplitudeSet]:
    """Amplitude sets at each time from a single diagonalization."""
    times = _check_horizon(grid, times)
    prop = BathPropagator(grid, params)
    return [prop.amplitudes(t) for t in times]


def _occupations(grid: BathGrid, temperature: float, occupation_mode: str) -> np.ndarray:
    if occupation_mode == "peak_approximation":
        return np.full(grid.count, mean_occupation(grid.center, temperature))
    if occupation_mode == "exact_omega_dependent":
        return np.asarray(mean_occupation(grid.frequencies, temperature), dtype=float)
    raise ParameterError(f"unknown occupation mode {occupation_mode!r}")


def oracle_beta(grid: BathGrid, params: ModelParams, times, temperature: float,
                occupation_mode: str = "peak_approximation",
                prop: BathPropagator | None = None) -> np.ndarray:
    """Discrete thermal sum ``sum_j |v_j(t)|^2 n_j``."""
    times = _check_horizon(grid, times)
    prop = prop or BathPropagator(grid, params)
    occ = _occupations(grid, temperature, occupation_mode)
    return np.array([np.sum(np.abs(prop.amplitudes(t).v_modes) ** 2 * occ) for t in times])


def _worker_count(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, int(workers))


def _mc_block(prop: BathPropagator, alpha1: complex, alpha2: complex, times, occ, seed: int,
              block: int, size: int, method: str, reduced_terms):
    """Sums of overlap and |overlap|^2 over one block of P-function samples."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))
    n = occ.size
    scale = np.sqrt(occ / 2)
    lam = scale * (rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n)))
    delta = alpha1 - alpha2
    sums = np.zeros(len(times), dtype=complex)
    sq_sums = np.zeros(len(times))
    squares = np.zeros(len(times), dtype=complex)
    for k, t in enumerate(times):
        if method == "reduced":
            w, sv2 = reduced_terms[k]
            z = lam.conj() @ w
            exponent = (-0.5 * abs(delta) ** 2 * sv2
                        + 1j * (np.imag(delta * z) + np.imag(np.conj(alpha2) * alpha1) * sv2))
        else:
            states = np.zeros((n + 1, size), dtype=complex)
            states[1:] = lam.T
            states[0] = alpha1
            b1 = prop.evolve_rotated(t, states)[1:]
            states[0] = alpha2
            b2 = prop.evolve_rotated(t, states)[1:]
            exponent = np.sum(-0.5 * np.abs(b1) ** 2 - 0.5 * np.abs(b2) ** 2 + b2.conj() * b1, axis=0)
        values = np.exp(exponent)
        sums[k] = values.sum()
        sq_sums[k] = np.sum(np.abs(values) ** 2)
        squares[k] = np.sum(values**2)
    return sums, sq_sums, squares


def thermal_mc_factor(grid: BathGrid, params: ModelParams, spec, times, temperature: float,
                      samples: int, seed: int,
                      occupation_mode: str = "exact_omega_dependent",
                      method: str = "reduced", workers: int | None = None,
                      prop: BathPropagator | None = None, stderr_kind: str = "complex"):
    """Monte Carlo average of the environment overlap over the thermal P function.

    Each sample draws initial bath amplitudes ``lambda_j`` from the complex
    Gaussian with ``E|lambda_j|^2 = n(omega_j, T)``, evolves the coherent
    amplitude vectors ``(alpha_k, lambda)`` of both branches and forms
    ``<B_2|B_1> = prod_j exp(-|B_1j|^2/2 - |B_2j|^2/2 + B_2j^* B_1j)``.

    Parameters
    ----------
    spec : SuperpositionSpec
        Only ``alpha1`` and ``alpha2`` are used.
    method : {"reduced", "full"}
        ``"full"`` literally propagates every sample vector (O(N^2) per
        sample); ``"reduced"`` evaluates the same per-sample overlap through
        one adjoint bath-block product per time, O(N) per sample.
    workers : int, optional
        Thread count; defaults to the ``EXCITONDECOH_WORKERS`` environment
        variable. Samples are drawn in fixed blocks seeded by
        ``(seed, block index)``, so the result does not depend on it.
    stderr_kind : {"complex", "magnitude"}
        ``"complex"`` is the standard error of the complex mean. ``"magnitude"``
        keeps only the scatter along the direction of the mean, the first-order
        standard error of ``|estimate|``; phase scatter, which dominates for
        weak decoherence, then drops out.

    Returns
    -------
    estimate, stderr : ndarray
        Complex sample mean and its standard error, one entry per time.
        The overlap is ``<B_2|B_1>``, the complex conjugate of the
        ``F`` convention used in :mod:`excitondecoh.decoherence`.
    """
    if samples < 100:
        raise ParameterError("samples must be >= 100")
    if seed is None:
        raise ParameterError("a seed is required")
    if stderr_kind not in ("complex", "magnitude"):
        raise ParameterError(f"unknown stderr_kind {stderr_kind!r}")
    if method not in ("reduced", "full"):
        raise ParameterError(f"unknown method {method!r}")
    times = _check_horizon(grid, times)
    prop = prop or BathPropagator(grid, params)
    alpha1, alpha2 = complex(spec.alpha1), complex(spec.alpha2)

    if temperature == 0:
        out = np.empty(len(times), dtype=complex)
        for k, t in enumerate(times):
            sv2 = np.sum(np.abs(prop.amplitudes(t).v_modes) ** 2)
            coeff = -0.5 * abs(alpha1) ** 2 - 0.5 * abs(alpha2) ** 2 + np.conj(alpha2) * alpha1
            out[k] = np.exp(coeff * sv2)
        return out, np.zeros(len(times))

    occ = _occupations(grid, temperature, occupation_mode)
    sizes = [MC_BLOCK_SIZE] * (samples // MC_BLOCK_SIZE)
    if samples % MC_BLOCK_SIZE:
        sizes.append(samples % MC_BLOCK_SIZE)

    reduced_terms = None
    if method == "reduced":
        reduced_terms = []
        for t in times:
            v_rot = np.exp(1j * params.omega * t) * prop.amplitudes(t).v_modes
            # sum_j c_j^* v_j with c = G_BB lambda equals lambda^H (G_BB^H v)
            reduced_terms.append((prop.rotated_bath_block_adjoint(t, v_rot),
                                  float(np.sum(np.abs(v_rot) ** 2))))

    def run(block):
        return _mc_block(prop, alpha1, alpha2, times, occ, seed, block, sizes[block], method,
                         reduced_terms)

    n_workers = _worker_count(workers)
    if n_workers == 1:
        results = [run(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(run, range(len(sizes))))

    total = np.zeros(len(times), dtype=complex)
    total_sq = np.zeros(len(times))
    total_sq_c = np.zeros(len(times), dtype=complex)
    for sums, sq, sq_c in results:  # block order, independent of scheduling
        total += sums
        total_sq += sq
        total_sq_c += sq_c
    mean = total / samples
    if stderr_kind == "complex":
        var = (total_sq - samples * np.abs(mean) ** 2) / (samples - 1)
    else:
        # Var Re(x e^{-i phi}) = (E|x|^2 + Re(E[x^2] e^{-2 i phi})) / 2 - |mean|^2
        rot = np.exp(-2j * np.angle(mean))
        second = 0.5 * (total_sq + (total_sq_c * rot).real)
        var = (second - samples * np.abs(mean) ** 2) / (samples - 1)
    stderr = np.sqrt(np.maximum(var, 0.0) / samples)
    return mean, stderr
