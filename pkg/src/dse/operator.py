"""A small spectral neural operator built on direct spectral evaluation.

Each spectral layer computes

    y = act( h @ W + b + Re( conj(V).T @ (R * (V @ h)) ) )

where ``V`` is the (m, N) transform matrix of the sample cloud and ``R``
mixes channels independently per mode. Gradients are derived by hand; for
the complex weights they follow the Wirtinger convention and are reported
as dL/d(conj R), so a steepest-descent step on ``R`` is ``-2 * lr * grad``.

Arrays are laid out (batch, points, channels).
"""
from __future__ import annotations

import io
import json
import math
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from dse.core import Field, ModeSpec, PointSet, SpectralMatrix
from dse.errors import ConfigError, ShapeError, TrainingDiverged, UndefinedMetricError
from dse.nudft import build_fourier_matrix

_GELU_C = math.sqrt(2.0 / math.pi)


# activations ---------------------------------------------------------------

def _gelu(x, grad=False):
    """Tanh-form GELU, 0.5 x (1 + tanh(c (x + 0.044715 x^3)))."""
    x2 = x * x
    t = np.tanh(_GELU_C * x * (1.0 + 0.044715 * x2))
    y = 0.5 * x * (1.0 + t)
    if not grad:
        return y
    dt = _GELU_C * (1.0 + 3.0 * 0.044715 * x2) * (1.0 - t * t)
    return y, 0.5 * (1.0 + t) + 0.5 * x * dt


def _relu(x, grad=False):
    y = np.maximum(x, 0.0)
    return (y, (x > 0).astype(x.dtype)) if grad else y


def _identity(x, grad=False):
    return (x, None) if grad else x


_ACTIVATIONS = {"gelu": _gelu, "relu": _relu, "identity": _identity}


def _activation(name):
    try:
        return _ACTIVATIONS[name]
    except KeyError:
        raise ConfigError(f"unknown activation {name!r}; choose from {sorted(_ACTIVATIONS)}") from None


# parameters ----------------------------------------------------------------

@dataclass
class SpectralLayerParams:
    R: np.ndarray  # (m_total, C_in, C_out) complex
    W: np.ndarray  # (C_in, C_out)
    b: np.ndarray  # (C_out,)

    def __post_init__(self):
        if self.R.ndim != 3 or self.W.shape != self.R.shape[1:] or self.b.shape != (self.R.shape[2],):
            raise ShapeError(
                f"inconsistent layer shapes R{self.R.shape} W{self.W.shape} b{self.b.shape}"
            )


@dataclass
class ModelParams:
    lift_w: np.ndarray
    lift_b: np.ndarray
    layers: list
    proj_w: np.ndarray
    proj_b: np.ndarray

    def named_tensors(self):
        """(name, array) pairs in checkpoint order."""
        out = [("lift_w", self.lift_w), ("lift_b", self.lift_b)]
        for i, layer in enumerate(self.layers):
            out += [(f"layer{i}.R", layer.R), (f"layer{i}.W", layer.W), (f"layer{i}.b", layer.b)]
        out += [("proj_w", self.proj_w), ("proj_b", self.proj_b)]
        return out

    def copy(self):
        return ModelParams(
            self.lift_w.copy(), self.lift_b.copy(),
            [SpectralLayerParams(l.R.copy(), l.W.copy(), l.b.copy()) for l in self.layers],
            self.proj_w.copy(), self.proj_b.copy(),
        )

    def zeros_like(self):
        z = np.zeros_like
        return ModelParams(
            z(self.lift_w), z(self.lift_b),
            [SpectralLayerParams(z(l.R), z(l.W), z(l.b)) for l in self.layers],
            z(self.proj_w), z(self.proj_b),
        )


@dataclass(frozen=True)
class ModelConfig:
    in_channels: int = 1
    out_channels: int = 1
    width: int = 32
    n_layers: int = 4
    modes: int = 17
    frequency_range: str = "symmetric"
    normalization: str = "unitary"
    activation: str = "gelu"
    append_coords: bool = True
    learning_rate: float = 0.01
    momentum: float = 0.9
    cosine_decay: bool = True
    epochs: int = 200
    batch_size: int = 20
    seed: int = 0
    loss: str = "l1"

    def __post_init__(self):
        for name in ("in_channels", "out_channels", "width", "n_layers", "modes", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if not 0 <= self.momentum < 1:
            raise ConfigError("momentum must lie in [0, 1)")
        if self.loss not in ("l1", "l2"):
            raise ConfigError(f"loss must be l1 or l2, got {self.loss!r}")
        _activation(self.activation)

    def lifted_channels(self, dim=1):
        return self.in_channels + (dim if self.append_coords else 0)

    def mode_spec(self, dim=1):
        return ModeSpec.fourier(self.modes, dim, self.frequency_range)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def init_params(config: ModelConfig, dim: int = 1, seed: int | None = None) -> ModelParams:
    rng = np.random.default_rng(config.seed if seed is None else seed)
    w = config.width
    c_in = config.lifted_channels(dim)
    m_total = config.mode_spec(dim).m_total
    layers = []
    lift_w = rng.normal(size=(c_in, w)) / math.sqrt(c_in)
    for _ in range(config.n_layers):
        R = (rng.normal(size=(m_total, w, w)) + 1j * rng.normal(size=(m_total, w, w))) / w
        W = rng.normal(size=(w, w)) / math.sqrt(w)
        layers.append(SpectralLayerParams(R, W, np.zeros(w)))
    proj_w = rng.normal(size=(w, config.out_channels)) / math.sqrt(w)
    return ModelParams(lift_w, np.zeros(w), layers, proj_w, np.zeros(config.out_channels))


# forward -------------------------------------------------------------------

def _matrix(V):
    return V.entries if isinstance(V, SpectralMatrix) else np.asarray(V)


def _split(V):
    return np.ascontiguousarray(V.real), np.ascontiguousarray(V.imag)


def _flat(a):
    return a.reshape(-1, a.shape[-1])


def _spectral_branch(h, Vr, Vi, R):
    """Re(conj(V).T @ (R * (V @ h))) plus the intermediate V @ h.

    ``h`` is real, so both products run as real matmuls on the split matrix.
    """
    X = (Vr @ h) + 1j * (Vi @ h)  # (B, m, C_in)
    Y = np.matmul(X.transpose(1, 0, 2), R).transpose(1, 0, 2)  # per-mode channel mix
    s = np.swapaxes(Vr, -1, -2) @ np.ascontiguousarray(Y.real)
    s += np.swapaxes(Vi, -1, -2) @ np.ascontiguousarray(Y.imag)
    return s, X


def _layer(params, h, Vr, Vi, act, cache=None):
    s, X = _spectral_branch(h, Vr, Vi, params.R)
    pre = h @ params.W + params.b + s
    if cache is None:
        return act(pre)
    out, dact = act(pre, grad=True)
    cache.append((h, X, dact))
    return out


def spectral_layer_forward(params: SpectralLayerParams, field, V, activation: str = "gelu"):
    """One spectral layer.

    ``field`` may be a :class:`Field` (real part used), an (N, C) array or a
    (B, N, C) batch; the return type follows the input.
    """
    values = field.values.real if isinstance(field, Field) else np.asarray(field, dtype=np.float64)
    squeeze = values.ndim == 2
    h = values[None] if squeeze else values
    mat = _matrix(V)
    if h.shape[-1] != params.W.shape[0]:
        raise ShapeError(f"layer expects {params.W.shape[0]} channels, got {h.shape[-1]}")
    if mat.shape[-2] != params.R.shape[0] or mat.shape[-1] != h.shape[1]:
        raise ShapeError(f"matrix {mat.shape} does not fit R{params.R.shape} and {h.shape[1]} points")
    out = _layer(params, h, *_split(mat), _activation(activation))
    out = out[0] if squeeze else out
    if isinstance(field, Field):
        return Field(out, field.point_fingerprint)
    return out


def _model_input(config, inputs, coords):
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim == 2:
        x = x[..., None]
    if x.shape[-1] != config.in_channels:
        raise ShapeError(f"model expects {config.in_channels} input channels, got {x.shape[-1]}")
    if config.append_coords:
        c = np.asarray(coords, dtype=np.float64)
        c = np.broadcast_to(c, x.shape[:2] + (c.shape[-1],))
        x = np.concatenate([x, c], axis=-1)
    return x


def _forward(config, params, x, V, cache=None):
    act = _activation(config.activation)
    Vr, Vi = _split(V)
    h = x @ params.lift_w + params.lift_b
    n = len(params.layers)
    for i, layer in enumerate(params.layers):
        h = _layer(layer, h, Vr, Vi, act if i < n - 1 else _identity, cache)
    if cache is not None:
        cache.append(h)
    return h @ params.proj_w + params.proj_b


def model_forward(config: ModelConfig, params: ModelParams, inputs, points, V=None) -> np.ndarray:
    """Lift, spectral layers (last one linear), project.

    ``points`` is a PointSet shared by the batch, or a list of per-sample
    PointSets with equal N (matrices are then built per sample). ``V``
    overrides the matrix when the caller already holds it.
    """
    coords, mat = _cloud(config, points, V)
    x = _model_input(config, inputs, coords)
    return _forward(config, params, x, mat)


def _cloud(config, points, V=None):
    if isinstance(points, PointSet):
        coords = points.coords
        if V is None:
            V = build_fourier_matrix(points, config.mode_spec(points.dim), config.normalization)
        return coords, _matrix(V)
    pts = list(points)
    coords = np.stack([p.coords for p in pts])
    if V is None:
        mats = [build_fourier_matrix(p, config.mode_spec(p.dim), config.normalization).entries for p in pts]
        return coords, np.stack(mats)
    return coords, _matrix(V)


# losses --------------------------------------------------------------------

def loss_eval(pred, target, kind: str = "l1") -> float:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"prediction {pred.shape} and target {target.shape} differ")
    diff = pred - target
    if kind == "l1":
        return float(np.mean(np.abs(diff)))
    if kind == "l2":
        return float(np.mean(diff * diff))
    raise ConfigError(f"unknown loss {kind!r}")


def _loss_grad(pred, target, kind):
    diff = pred - target
    if kind == "l1":
        return np.sign(diff) / diff.size
    return 2.0 * diff / diff.size


def relative_l1(pred, target) -> float:
    """sum |pred - target| / sum |target|."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"prediction {pred.shape} and target {target.shape} differ")
    denom = np.sum(np.abs(target))
    if denom == 0.0:
        raise UndefinedMetricError("relative L1 is undefined for an all-zero target")
    return float(np.sum(np.abs(pred - target)) / denom)


# backward ------------------------------------------------------------------

def backward(config: ModelConfig, params: ModelParams, inputs, targets, points, V=None,
             loss_scale: float = 1.0):
    """Loss and gradients of ``loss_scale * loss`` for one batch.

    Returns ``(loss, grads)`` where ``grads`` mirrors ``params``; complex
    entries hold dL/d(conj R).
    """
    coords, mat = _cloud(config, points, V)
    x = _model_input(config, inputs, coords)
    targets = np.asarray(targets, dtype=np.float64)
    if targets.ndim == 2:
        targets = targets[..., None]
    cache = []
    pred = _forward(config, params, x, mat, cache)
    loss = loss_scale * loss_eval(pred, targets, config.loss)
    g = loss_scale * _loss_grad(pred, targets, config.loss)

    grads = params.zeros_like()
    h_last = cache.pop()
    grads.proj_w = _flat(h_last).T @ _flat(g)
    grads.proj_b = _flat(g).sum(axis=0)
    g = g @ params.proj_w.T

    Vr, Vi = _split(mat)
    VrT, ViT = np.swapaxes(Vr, -1, -2), np.swapaxes(Vi, -1, -2)
    for i in reversed(range(len(params.layers))):
        layer = params.layers[i]
        h, X, dact = cache[i]
        g_pre = g if dact is None else g * dact
        gl = grads.layers[i]
        gl.W = _flat(h).T @ _flat(g_pre)
        gl.b = _flat(g_pre).sum(axis=0)
        # The loss reads Re(z) only: dL/dRe z = g_pre, dL/dIm z = 0.
        gY = (Vr @ g_pre) + 1j * (Vi @ g_pre)  # packed dRe + i dIm, (B, m, C_out)
        gY_m = gY.transpose(1, 0, 2)  # (m, B, C_out)
        gl.R = 0.5 * (X.transpose(1, 2, 0).conj() @ gY_m)
        gX = (gY_m @ np.swapaxes(layer.R.conj(), 1, 2)).transpose(1, 0, 2)  # (B, m, C_in)
        g = g_pre @ layer.W.T
        g += VrT @ np.ascontiguousarray(gX.real)
        g += ViT @ np.ascontiguousarray(gX.imag)

    grads.lift_w = _flat(x).T @ _flat(g)
    grads.lift_b = _flat(g).sum(axis=0)
    return loss, grads


@dataclass(frozen=True)
class GradProbe:
    name: str
    index: tuple
    part: str  # "re" or "im"
    fd: float
    analytic: float

    @property
    def abs_error(self) -> float:
        return abs(self.fd - self.analytic)

    @property
    def magnitude(self) -> float:
        return max(abs(self.fd), abs(self.analytic))

    @property
    def rel_error(self) -> float:
        return self.abs_error / self.magnitude if self.magnitude > 0 else 0.0


@dataclass
class GradCheckReport:
    """Finite-difference probes plus the roundoff floor of the differences.

    A central difference of a float64 loss ``L`` with step ``eps`` carries
    an absolute error of order ``eps_mach * |L| / eps``. A gradient smaller
    than ``noise / rtol`` cannot be resolved to relative accuracy ``rtol``
    at that step, so such probes are judged on absolute error instead.
    """

    probes: list
    loss: float
    eps: float

    @property
    def noise(self) -> float:
        return float(np.finfo(np.float64).eps) * abs(self.loss) / self.eps

    def resolvable(self, rtol: float = 1e-5):
        return [p for p in self.probes if p.magnitude >= self.noise / rtol]

    def unresolvable(self, rtol: float = 1e-5):
        return [p for p in self.probes if p.magnitude < self.noise / rtol]

    def max_rel_error(self, rtol: float = 1e-5) -> float:
        return max((p.rel_error for p in self.resolvable(rtol)), default=0.0)

    def max_unresolved_abs_error(self, rtol: float = 1e-5) -> float:
        return max((p.abs_error for p in self.unresolvable(rtol)), default=0.0)

    def passed(self, rtol: float = 1e-5, min_probes: int = 1) -> bool:
        return (len(self.resolvable(rtol)) >= min_probes and self.max_rel_error(rtol) < rtol
                and self.max_unresolved_abs_error(rtol) <= self.noise)


def finite_difference_check(config: ModelConfig, params: ModelParams, inputs, targets, points,
                            n_probes: int = 50, eps: float = 1e-6, seed: int = 0) -> GradCheckReport:
    """Compare analytic gradients with central differences at random entries.

    Probes are spread round-robin over every parameter tensor; complex
    entries are probed along the real or imaginary axis at random.
    """
    rng = np.random.default_rng(seed)
    _, V = _cloud(config, points)
    loss, grads = backward(config, params, inputs, targets, points, V)
    work = params.copy()
    tensors = work.named_tensors()
    grad_map = dict(grads.named_tensors())
    probes = []
    for probe in range(n_probes):
        name, arr = tensors[probe % len(tensors)]
        idx = tuple(int(rng.integers(s)) for s in arr.shape)
        part = 1.0
        if np.iscomplexobj(arr) and rng.random() < 0.5:
            part = 1j
        old = arr[idx]
        arr[idx] = old + eps * part
        lp = backward(config, work, inputs, targets, points, V)[0]
        arr[idx] = old - eps * part
        lm = backward(config, work, inputs, targets, points, V)[0]
        arr[idx] = old
        fd = (lp - lm) / (2.0 * eps)
        g = grad_map[name][idx]
        if np.iscomplexobj(arr):
            # dL/dRe R = 2 Re(dL/d conj R), dL/dIm R = 2 Im(dL/d conj R)
            analytic = 2.0 * (g.real if part == 1.0 else g.imag)
        else:
            analytic = g
        probes.append(GradProbe(name, idx, "im" if part == 1j else "re", float(fd), float(analytic)))
    return GradCheckReport(probes, float(loss), eps)


# training ------------------------------------------------------------------

@dataclass
class OperatorDataset:
    """Input/target pairs on a shared cloud (or equal-size per-sample clouds)."""

    points: object
    inputs: np.ndarray  # (S, N, C_in)
    targets: np.ndarray  # (S, N, C_out)

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.inputs.ndim == 2:
            self.inputs = self.inputs[..., None]
        if self.targets.ndim == 2:
            self.targets = self.targets[..., None]
        if self.inputs.shape[:2] != self.targets.shape[:2]:
            raise ShapeError("inputs and targets disagree on samples or points")

    def __len__(self):
        return self.inputs.shape[0]

    def subset(self, idx):
        pts = self.points if isinstance(self.points, PointSet) else [self.points[i] for i in idx]
        return OperatorDataset(pts, self.inputs[idx], self.targets[idx])


@dataclass
class TrainResult:
    params: ModelParams
    history: list = field(default_factory=list)  # (epoch, train_loss, test_rel_l1)

    @property
    def final_test_rel_l1(self):
        return self.history[-1][2] if self.history else float("nan")


def _apply_update(params, grads, velocity, lr, momentum):
    def step(p, g, v, scale=1.0):
        v *= momentum
        v += scale * g
        p -= lr * v

    step(params.lift_w, grads.lift_w, velocity.lift_w)
    step(params.lift_b, grads.lift_b, velocity.lift_b)
    for p, g, v in zip(params.layers, grads.layers, velocity.layers):
        step(p.R, g.R, v.R, 2.0)
        step(p.W, g.W, v.W)
        step(p.b, g.b, v.b)
    step(params.proj_w, grads.proj_w, velocity.proj_w)
    step(params.proj_b, grads.proj_b, velocity.proj_b)


def evaluate(config, params, dataset: OperatorDataset, V=None) -> float:
    pred = model_forward(config, params, dataset.inputs, dataset.points, V)
    return relative_l1(pred, dataset.targets)


def train(config: ModelConfig, train_set: OperatorDataset, test_set: OperatorDataset | None = None,
          params: ModelParams | None = None, log=None) -> TrainResult:
    """Minibatch SGD with momentum and optional cosine learning-rate decay.

    Single-threaded and deterministic for a fixed ``config.seed``.
    """
    shared = isinstance(train_set.points, PointSet)
    dim = train_set.points.dim if shared else train_set.points[0].dim
    params = init_params(config, dim) if params is None else params.copy()
    velocity = params.zeros_like()
    rng = np.random.default_rng(config.seed + 1)
    V_train = _cloud(config, train_set.points)[1] if shared else None
    V_test = None
    if test_set is not None and isinstance(test_set.points, PointSet):
        V_test = _cloud(config, test_set.points)[1]

    n = len(train_set)
    steps_per_epoch = math.ceil(n / config.batch_size)
    total_steps = steps_per_epoch * config.epochs
    history = []
    step = 0
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        running = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            batch = train_set.subset(idx)
            lr = config.learning_rate
            if config.cosine_decay:
                lr *= 0.5 * (1.0 + math.cos(math.pi * step / total_steps))
            loss, grads = backward(config, params, batch.inputs, batch.targets, batch.points, V_train)
            if not math.isfinite(loss):
                raise TrainingDiverged(f"non-finite loss at epoch {epoch}, step {step}")
            _apply_update(params, grads, velocity, lr, config.momentum)
            running += loss * len(idx)
            step += 1
        test_err = evaluate(config, params, test_set, V_test) if test_set is not None else float("nan")
        history.append((epoch, running / n, test_err))
        if log is not None:
            log(epoch, running / n, test_err)
    return TrainResult(params, history)


# synthetic tasks -----------------------------------------------------------

def make_task(task: str, points, n_samples: int, max_freq: int = 8, seed: int = 0) -> OperatorDataset:
    """Band-limited operator-learning pairs on ``points``.

    ``identity`` maps u to u. ``derivative`` maps u to u' / (2 pi max_freq),
    scaled so input and target have comparable magnitude.
    """
    from dse.distributions import gen_random_band_limited_field

    if task not in ("identity", "derivative"):
        raise ConfigError(f"unknown task {task!r}")
    inputs, targets = [], []
    for s in range(n_samples):
        bl = gen_random_band_limited_field(points, max_freq, 1, seed=seed * 1_000_003 + s)
        u = bl.field.values.real
        inputs.append(u)
        if task == "identity":
            targets.append(u)
        else:
            targets.append(bl.derivative(points).real / (2.0 * math.pi * max(max_freq, 1)))
    return OperatorDataset(points, np.stack(inputs), np.stack(targets))


# checkpoint ----------------------------------------------------------------

CHECKPOINT_MAGIC = b"DSECKPT\x00"
CHECKPOINT_VERSION = 1


def save_checkpoint(path, config: ModelConfig, params: ModelParams) -> None:
    """Write a checkpoint.

    Layout (little-endian): 8-byte magic ``DSECKPT\\0``; u32 version; u32
    length + UTF-8 JSON config; u32 tensor count; then per tensor: u16 name
    length + UTF-8 name, u8 kind (0 real, 1 complex), u8 ndim, ndim x u64
    dims, and the data as f64 (complex stored as interleaved re, im).
    """
    buf = io.BytesIO()
    buf.write(CHECKPOINT_MAGIC)
    cfg = config.to_json().encode("utf-8")
    buf.write(struct.pack("<II", CHECKPOINT_VERSION, len(cfg)))
    buf.write(cfg)
    tensors = params.named_tensors()
    buf.write(struct.pack("<I", len(tensors)))
    for name, arr in tensors:
        raw = name.encode("utf-8")
        is_complex = np.iscomplexobj(arr)
        buf.write(struct.pack("<H", len(raw)))
        buf.write(raw)
        buf.write(struct.pack("<BB", int(is_complex), arr.ndim))
        buf.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        data = arr.astype("<c16") if is_complex else arr.astype("<f8")
        buf.write(np.ascontiguousarray(data).tobytes())
    Path(path).write_bytes(buf.getvalue())


def load_checkpoint(path):
    data = Path(path).read_bytes()
    if data[:8] != CHECKPOINT_MAGIC:
        raise ConfigError(f"{path} is not a checkpoint file")
    version, cfg_len = struct.unpack_from("<II", data, 8)
    if version != CHECKPOINT_VERSION:
        raise ConfigError(f"unsupported checkpoint version {version}")
    pos = 16
    config = ModelConfig.from_json(data[pos:pos + cfg_len].decode("utf-8"))
    pos += cfg_len
    (count,) = struct.unpack_from("<I", data, pos)
    pos += 4
    tensors = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<H", data, pos)
        pos += 2
        name = data[pos:pos + name_len].decode("utf-8")
        pos += name_len
        is_complex, ndim = struct.unpack_from("<BB", data, pos)
        pos += 2
        shape = struct.unpack_from(f"<{ndim}Q", data, pos)
        pos += 8 * ndim
        dtype = np.dtype("<c16") if is_complex else np.dtype("<f8")
        size = int(np.prod(shape)) * dtype.itemsize
        tensors[name] = np.frombuffer(data, dtype=dtype, count=int(np.prod(shape)), offset=pos).reshape(shape).copy()
        pos += size
    layers = []
    i = 0
    while f"layer{i}.R" in tensors:
        layers.append(SpectralLayerParams(tensors[f"layer{i}.R"], tensors[f"layer{i}.W"], tensors[f"layer{i}.b"]))
        i += 1
    params = ModelParams(tensors["lift_w"], tensors["lift_b"], layers, tensors["proj_w"], tensors["proj_b"])
    return config, params


def write_history(path, history) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch,train_loss,test_rel_l1\n")
        for epoch, loss, err in history:
            fh.write(f"{epoch},{loss:.17g},{err:.17g}\n")


__all__ = [
    "SpectralLayerParams", "ModelParams", "ModelConfig", "OperatorDataset", "TrainResult",
    "init_params", "spectral_layer_forward", "model_forward", "loss_eval", "relative_l1",
    "backward", "train", "evaluate", "make_task", "save_checkpoint", "load_checkpoint",
    "write_history", "finite_difference_check", "GradProbe", "GradCheckReport",
]
