"""Unsupervised deep probing network.

A small fully connected network maps a sampling point z to the Fourier
coefficients of a probing function; adding the plane-wave initial guess
exp(-i k xhat . z) gives the probing value.  Training needs no measured
data: random point-source combinations v_m are synthesized on the fly and
the network is pushed to make the aperture inner product <G(z,.), v_m>
reproduce the known full-circle value 2 pi sum(conj(c_n) J_0(k |z - y_n|)).

Gradients are exact hand-written reverse mode (the loss is a quadratic
form in the network outputs), and the optimizer is Adam with the staircase
learning-rate schedule.  Everything draws from the counter-based generator
so training is bitwise reproducible for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special as sp

from .errors import NumericalError, ValidationError
from .scene import ApertureSet, Box
from .rng import CounterRng

DIVERGENCE_FACTOR = 1e3


@dataclass(frozen=True)
class TrainConfig:
    order: int = 20  # P; network emits 4P+2 real outputs
    hidden: tuple[int, ...] = (200, 200, 200, 200)
    batch_functions: int = 400  # M test functions per iteration
    sources_per_function: int = 3  # N point sources per test function
    points_per_iteration: int = 400  # L sampling points per iteration
    iterations: int = 5000
    max_noise: float = 0.05  # lambda; per-iteration noise ~ U(0, lambda)
    learning_rate: float = 0.005
    lr_decay: float = 0.9
    lr_decay_every: int = 100
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    checkpoint_every: int = 500

    def __post_init__(self):
        if min(
            self.batch_functions,
            self.sources_per_function,
            self.points_per_iteration,
            self.order,
        ) < 1 or self.iterations < 0:
            raise ValidationError("train config sizes must be positive")
        if not (0.0 <= self.max_noise < 1.0):
            raise ValidationError("max training noise must lie in [0, 1)")

    @property
    def layer_dims(self) -> tuple[int, ...]:
        return (2, *self.hidden, 4 * self.order + 2)

    def learning_rate_at(self, iteration: int) -> float:
        """Staircase schedule: decay factor applied every lr_decay_every steps."""
        return self.learning_rate * self.lr_decay ** (iteration // self.lr_decay_every)


@dataclass
class NetworkParams:
    """Affine-rectifier chain weights; output pairs into 2P+1 complex coefficients."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    order: int

    @property
    def layer_dims(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0], *(w.shape[1] for w in self.weights))

    @classmethod
    def initialize(cls, config: TrainConfig, rng: CounterRng) -> "NetworkParams":
        """Fan-in-scaled uniform init with rectifier gain, U(+-sqrt(6/fan_in))."""
        dims = config.layer_dims
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            bound = np.sqrt(6.0 / fan_in)
            w = (rng.uniforms(fan_in * fan_out) * 2.0 - 1.0) * bound
            b = (rng.uniforms(fan_out) * 2.0 - 1.0) * bound
            weights.append(w.reshape(fan_in, fan_out))
            biases.append(b)
        return cls(weights=weights, biases=biases, order=config.order)

    @classmethod
    def zeros(cls, config: TrainConfig) -> "NetworkParams":
        dims = config.layer_dims
        return cls(
            weights=[np.zeros((a, b)) for a, b in zip(dims[:-1], dims[1:])],
            biases=[np.zeros(b) for b in dims[1:]],
            order=config.order,
        )

    def copy(self) -> "NetworkParams":
        return NetworkParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            order=self.order,
        )


def _forward_cached(params: NetworkParams, z: np.ndarray):
    """Forward pass keeping pre-activations for reverse mode."""
    a = np.asarray(z, dtype=float)
    acts = [a]
    pres = []
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = acts[-1] @ w + b
        pres.append(h)
        acts.append(np.maximum(h, 0.0) if i < last else h)
    return acts, pres


def network_forward(params: NetworkParams, z) -> np.ndarray:
    """Complex Fourier coefficients f_{-P..P}(z) for points z of shape (n, 2)."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    acts, _ = _forward_cached(params, z)
    y = acts[-1]
    half = 2 * params.order + 1
    return y[:, :half] + 1j * y[:, half:]


def _backward(params: NetworkParams, acts, pres, dout: np.ndarray):
    """Gradients of a scalar loss given d(loss)/d(output), matching _forward_cached."""
    gw = [None] * len(params.weights)
    gb = [None] * len(params.biases)
    delta = dout
    for i in range(len(params.weights) - 1, -1, -1):
        gw[i] = acts[i].T @ delta
        gb[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ params.weights[i].T) * (pres[i - 1] > 0.0)
    return gw, gb


def _fourier_basis(order: int, angles: np.ndarray) -> np.ndarray:
    """e^{i n theta} for n = -order..order, shape (2*order+1, n_angles)."""
    ns = np.arange(-order, order + 1)
    return np.exp(1j * np.outer(ns, angles))


def probing_eval(params: NetworkParams, z, angles, k: float) -> np.ndarray:
    """Probing values: Fourier sum plus the plane-wave initial guess.

    Returns shape (n_points, n_angles).
    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    coeffs = network_forward(params, z)
    basis = _fourier_basis(params.order, angles)
    xhat = np.column_stack([np.cos(angles), np.sin(angles)])
    plane = np.exp(-1j * k * z @ xhat.T)
    return coeffs @ basis + plane


@dataclass(frozen=True)
class TrainingBatch:
    """One iteration's synthesized sources, test functions, and z samples."""

    source_points: np.ndarray  # (M, N, 2)
    source_coeffs: np.ndarray  # (M, N) complex
    eval_points: np.ndarray  # (L, 2)
    noise_level: float
    v_clean: np.ndarray  # (M, Q) complex, at receiver angles
    v_noisy: np.ndarray  # (M, Q) complex


def sample_batch(
    config: TrainConfig,
    domain: Box,
    aperture: ApertureSet,
    k: float,
    rng: CounterRng,
    point_domain: Box | None = None,
) -> TrainingBatch:
    """Draw one training batch; draw order is fixed for reproducibility.

    point_domain restricts only the z samples (multi-network partitioning);
    sources always cover the full domain.
    """
    m, n, l = config.batch_functions, config.sources_per_function, config.points_per_iteration
    y = rng.uniform_box(m * n, domain.xmin, domain.xmax, domain.ymin, domain.ymax).reshape(m, n, 2)
    c = (rng.normals(m * n) + 1j * rng.normals(m * n)).reshape(m, n)
    delta = float(rng.uniforms(1)[0] * config.max_noise)
    angles = aperture.receiver_angles()
    xhat = np.column_stack([np.cos(angles), np.sin(angles)])
    q = angles.shape[0]
    # v_m(xhat) = sum_n c_nm exp(-i k xhat . y_nm)
    phases = np.exp(-1j * k * np.einsum("qd,mnd->mnq", xhat, y))
    v = np.einsum("mn,mnq->mq", c, phases)
    if delta > 0.0:
        w = aperture.quadrature_weights()
        norms = np.sqrt(np.real((np.abs(v) ** 2) @ w))
        eta_r = rng.normals(m * q).reshape(m, q)
        eta_i = rng.normals(m * q).reshape(m, q)
        v_noisy = v + delta * (eta_r + 1j * eta_i) * (norms / np.sqrt(aperture.measure))[:, None]
    else:
        v_noisy = v.copy()
    pd = point_domain if point_domain is not None else domain
    z = rng.uniform_box(l, pd.xmin, pd.xmax, pd.ymin, pd.ymax)
    return TrainingBatch(
        source_points=y,
        source_coeffs=c,
        eval_points=z,
        noise_level=delta,
        v_clean=v,
        v_noisy=v_noisy,
    )


def _batch_target(batch: TrainingBatch, k: float) -> np.ndarray:
    """2 pi sum_n conj(c_nm) J_0(k |z_l - y_nm|), shape (L, M)."""
    diff = batch.eval_points[:, None, None, :] - batch.source_points[None, :, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])  # (L, M, N)
    return 2.0 * np.pi * np.einsum("mn,lmn->lm", np.conj(batch.source_coeffs), sp.j0(k * dist))


def _residual(params: NetworkParams, batch: TrainingBatch, aperture: ApertureSet, k: float):
    """Residual matrix of the discrete loss plus the caches reverse mode needs."""
    angles = aperture.receiver_angles()
    basis = _fourier_basis(params.order, angles)
    xhat = np.column_stack([np.cos(angles), np.sin(angles)])
    acts, pres = _forward_cached(params, batch.eval_points)
    y = acts[-1]
    half = 2 * params.order + 1
    coeffs = y[:, :half] + 1j * y[:, half:]
    g = coeffs @ basis + np.exp(-1j * k * batch.eval_points @ xhat.T)  # (L, Q)
    w_eff = aperture.measure / angles.shape[0]
    inner = w_eff * (g @ np.conj(batch.v_noisy).T)  # (L, M)
    r = inner - _batch_target(batch, k)
    return r, acts, pres, basis, w_eff


def loss(params: NetworkParams, batch: TrainingBatch, aperture: ApertureSet, k: float) -> float:
    r, *_ = _residual(params, batch, aperture, k)
    return float(np.mean(np.abs(r) ** 2))


def loss_gradient(
    params: NetworkParams, batch: TrainingBatch, aperture: ApertureSet, k: float
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Loss value plus exact gradients for every weight matrix and bias."""
    r, acts, pres, basis, w_eff = _residual(params, batch, aperture, k)
    l_pts, m_fns = r.shape
    # Wirtinger: d loss / d conj(G_{lq}) = (w/(ML)) (R V)_{lq}
    d_conj_g = (w_eff / (l_pts * m_fns)) * (r @ batch.v_noisy)  # (L, Q)
    m_mat = np.conj(d_conj_g) @ basis.T  # (L, 2P+1): sum_q conj(D_lq) e^{i n theta_q}
    dout = np.concatenate([2.0 * np.real(m_mat), -2.0 * np.imag(m_mat)], axis=1)
    gw, gb = _backward(params, acts, pres, dout)
    return float(np.mean(np.abs(r) ** 2)), gw, gb


@dataclass
class _AdamState:
    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]
    t: int = 0

    @classmethod
    def like(cls, params: NetworkParams) -> "_AdamState":
        return cls(
            m_w=[np.zeros_like(w) for w in params.weights],
            v_w=[np.zeros_like(w) for w in params.weights],
            m_b=[np.zeros_like(b) for b in params.biases],
            v_b=[np.zeros_like(b) for b in params.biases],
        )


def _adam_step(params, state, gw, gb, lr, config):
    state.t += 1
    b1, b2, eps = config.beta1, config.beta2, config.adam_eps
    c1 = 1.0 - b1**state.t
    c2 = 1.0 - b2**state.t
    for i in range(len(params.weights)):
        state.m_w[i] = b1 * state.m_w[i] + (1 - b1) * gw[i]
        state.v_w[i] = b2 * state.v_w[i] + (1 - b2) * gw[i] ** 2
        params.weights[i] -= lr * (state.m_w[i] / c1) / (np.sqrt(state.v_w[i] / c2) + eps)
        state.m_b[i] = b1 * state.m_b[i] + (1 - b1) * gb[i]
        state.v_b[i] = b2 * state.v_b[i] + (1 - b2) * gb[i] ** 2
        params.biases[i] -= lr * (state.m_b[i] / c1) / (np.sqrt(state.v_b[i] / c2) + eps)


def train(
    config: TrainConfig,
    aperture: ApertureSet,
    domain: Box,
    k: float,
    point_domain: Box | None = None,
    callback=None,
) -> tuple[NetworkParams, np.ndarray]:
    """Run the full training loop; returns final parameters and the loss trace.

    callback(iteration, params, trace) fires every checkpoint_every steps.
    """
    rng = CounterRng(config.seed)
    params = NetworkParams.initialize(config, rng.spawn(0))
    batch_rng = rng.spawn(1)
    state = _AdamState.like(params)
    trace = np.empty(config.iterations)
    initial = None
    for j in range(config.iterations):
        batch = sample_batch(config, domain, aperture, k, batch_rng, point_domain)
        value, gw, gb = loss_gradient(params, batch, aperture, k)
        trace[j] = value
        if initial is None:
            initial = value
        elif value > DIVERGENCE_FACTOR * initial:
            raise NumericalError(
                f"training diverged at iteration {j}: loss {value:.3e} vs initial {initial:.3e}"
            )
        _adam_step(params, state, gw, gb, config.learning_rate_at(j), config)
        if callback is not None and (j + 1) % config.checkpoint_every == 0:
            callback(j + 1, params, trace[: j + 1])
    return params, trace


def train_partitioned(
    config: TrainConfig,
    aperture: ApertureSet,
    subdomains: list[Box],
    k: float,
    domain: Box | None = None,
) -> list[tuple[NetworkParams, np.ndarray]]:
    """Independent networks, one per subdomain; z samples stay inside each piece."""
    if not subdomains:
        raise ValidationError("need at least one subdomain")
    if domain is None:
        domain = Box(
            min(b.xmin for b in subdomains),
            max(b.xmax for b in subdomains),
            min(b.ymin for b in subdomains),
            max(b.ymax for b in subdomains),
        )
    results = []
    for i, sub in enumerate(subdomains):
        sub_config = replace(config, seed=(config.seed * 1000003 + i) & 0xFFFFFFFFFFFFFFFF)
        results.append(train(sub_config, aperture, domain, k, point_domain=sub))
    return results


def split_domain(domain: Box, nx: int, ny: int) -> list[Box]:
    """Axis-aligned nx x ny tiling of the domain, row-major."""
    xs = np.linspace(domain.xmin, domain.xmax, nx + 1)
    ys = np.linspace(domain.ymin, domain.ymax, ny + 1)
    return [
        Box(xs[i], xs[i + 1], ys[j], ys[j + 1]) for j in range(ny) for i in range(nx)
    ]


@dataclass(frozen=True)
class PartitionedProbing:
    """Dispatches each sampling point to its subdomain's network (ties: lowest index)."""

    networks: tuple[NetworkParams, ...]
    subdomains: tuple[Box, ...]

    def eval(self, z, angles, k: float) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        angles = np.atleast_1d(np.asarray(angles, dtype=float))
        out = np.empty((z.shape[0], angles.shape[0]), dtype=np.complex128)
        assigned = np.full(z.shape[0], -1)
        for i, sub in enumerate(self.subdomains):
            mask = (assigned < 0) & sub.contains(z)
            if np.any(mask):
                out[mask] = probing_eval(self.networks[i], z[mask], angles, k)
                assigned[mask] = i
        if np.any(assigned < 0):
            bad = z[assigned < 0][0]
            raise ValidationError(f"sampling point {tuple(bad)} lies in no subdomain")
        return out


@dataclass(frozen=True)
class RescaledProbing:
    """Probing evaluator for a new wavenumber via input rescaling.

    Evaluating the trained network at (k_new/k_old) z makes its plane-wave
    term exp(-i k_new xhat . z); valid wherever the scaled point stays in
    the training domain.
    """

    params: NetworkParams
    k_old: float
    k_new: float
    domain: Box

    def eval(self, z, angles) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        scaled = (self.k_new / self.k_old) * z
        if not np.all(self.domain.contains(scaled)):
            raise ValidationError("rescaled evaluation point leaves the training domain")
        return probing_eval(self.params, scaled, np.asarray(angles, dtype=float), self.k_old)


def rescale_for_wavenumber(
    params: NetworkParams, k_old: float, k_new: float, domain: Box
) -> RescaledProbing:
    return RescaledProbing(params=params, k_old=k_old, k_new=k_new, domain=domain)


def validation_residual(
    params: NetworkParams,
    config: TrainConfig,
    aperture: ApertureSet,
    domain: Box,
    k: float,
    n_functions: int = 100,
    seed: int = 12345,
    point_domain: Box | None = None,
) -> float:
    """Mean squared loss bracket on fresh unpolluted test functions."""
    cfg = replace(config, batch_functions=n_functions, max_noise=0.0)
    rng = CounterRng(seed, stream=777)
    batch = sample_batch(cfg, domain, aperture, k, rng, point_domain)
    return loss(params, batch, aperture, k)


def probing_set_from_network(params: NetworkParams, grid, aperture: ApertureSet, k: float):
    """ProbingSet over a sampling grid from a trained network."""
    from .dsm import ProbingSet

    samples = probing_eval(params, grid.points, aperture.receiver_angles(), k)
    return ProbingSet(samples, aperture)
