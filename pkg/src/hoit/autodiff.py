"""Dense float64 tensors with a reverse-mode tape.

Every value is a contiguous double-precision numpy array wrapped in a
:class:`Tensor`.  Operations executed while a :class:`Tape` is active append
a reverse rule to that tape; ``backward(loss)`` replays the tape in reverse
execution order (which is already a topological order for define-by-run
graphs) and accumulates gradients additively into every tensor it reaches.

Single-threaded by construction: a tape and the tensors recorded on it are
confined to one thread.  Finished tensors may be read concurrently.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ConfigError, ContractError, NumericDomainError, ShapeError

_TAPE_STACK: list["Tape"] = []


class Tensor:
    """A dense float64 array plus an optional gradient accumulator."""

    __slots__ = ("data", "requires_grad", "grad", "_tape")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad = None
        self._tape = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else _bad_item(self)

    def zero_grad(self):
        self.grad = None

    def accumulate_grad(self, g):
        if g.shape != self.data.shape:
            raise ShapeError(f"gradient shape {g.shape} != value shape {self.data.shape}")
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64)
        else:
            self.grad = self.grad + g

    def backward(self):
        backward(self)

    # arithmetic sugar; scalars become constant tensors
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def sum(self, axis=None, keepdims=False):
        return reduce_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return reduce_mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, shape):
        return reshape(self, shape)

    def transpose(self, axes=None):
        return transpose(self, axes)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


def _bad_item(t):
    raise ContractError(f"item() requires a single-element tensor, got shape {t.shape}")


class Tape:
    """Ordered record of executed primitives, replayed in reverse by backward()."""

    __slots__ = ("entries",)

    def __init__(self):
        self.entries = []

    def __enter__(self):
        _TAPE_STACK.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        popped = _TAPE_STACK.pop()
        assert popped is self
        return False

    def record(self, inputs, output, backward_fn):
        output.requires_grad = True
        output._tape = self
        self.entries.append((inputs, output, backward_fn))

    def backward(self, loss: Tensor):
        if loss.data.shape not in ((), (1,)):
            raise ContractError(f"backward expects a scalar loss, got shape {loss.data.shape}")
        loss.accumulate_grad(np.ones_like(loss.data))
        # Reverse execution order: every consumer of a tensor was recorded
        # after its producer, so grads are complete before propagation.
        for inputs, output, backward_fn in reversed(self.entries):
            if output.grad is None:
                continue
            grads = backward_fn(output.grad)
            for inp, g in zip(inputs, grads):
                if g is not None and inp.requires_grad:
                    inp.accumulate_grad(g)


def active_tape():
    return _TAPE_STACK[-1] if _TAPE_STACK else None


def backward(loss: Tensor):
    """Populate .grad on every requires_grad tensor that feeds ``loss``."""
    if loss._tape is None:
        raise ContractError("loss was not recorded on any tape")
    loss._tape.backward(loss)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _record(inputs, out_data, backward_fn) -> Tensor:
    """Wrap out_data; register the reverse rule if a tape is live and needed."""
    out = Tensor(out_data)
    tape = active_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        tape.record(inputs, out, backward_fn)
    return out


def _unbroadcast(g, shape):
    """Sum g down to `shape` (inverse of numpy broadcasting)."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def _check_elementwise(a, b, op):
    try:
        np.broadcast_shapes(a.data.shape, b.data.shape)
    except ValueError:
        raise ShapeError(f"{op}: shapes {a.data.shape} and {b.data.shape} do not broadcast") from None


# ---------------------------------------------------------------------------
# elementwise and structural primitives


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_elementwise(a, b, "add")
    return _record(
        (a, b),
        a.data + b.data,
        lambda g: (_unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)),
    )


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_elementwise(a, b, "sub")
    return _record(
        (a, b),
        a.data - b.data,
        lambda g: (_unbroadcast(g, a.data.shape), _unbroadcast(-g, b.data.shape)),
    )


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_elementwise(a, b, "mul")
    return _record(
        (a, b),
        a.data * b.data,
        lambda g: (_unbroadcast(g * b.data, a.data.shape), _unbroadcast(g * a.data, b.data.shape)),
    )


def div(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_elementwise(a, b, "div")
    return _record(
        (a, b),
        a.data / b.data,
        lambda g: (
            _unbroadcast(g / b.data, a.data.shape),
            _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape),
        ),
    )


def neg(a):
    a = as_tensor(a)
    return _record((a,), -a.data, lambda g: (-g,))


def relu(a):
    a = as_tensor(a)
    mask = a.data > 0
    return _record((a,), np.where(mask, a.data, 0.0), lambda g: (g * mask,))


def absolute(a):
    a = as_tensor(a)
    s = np.sign(a.data)
    return _record((a,), np.abs(a.data), lambda g: (g * s,))


def exp(a):
    a = as_tensor(a)
    out_data = np.exp(a.data)
    return _record((a,), out_data, lambda g: (g * out_data,))


def log(a):
    a = as_tensor(a)
    return _record((a,), np.log(a.data), lambda g: (g / a.data,))


def sigmoid(a):
    a = as_tensor(a)
    x = a.data
    out_data = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))), np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))
    return _record((a,), out_data, lambda g: (g * out_data * (1.0 - out_data),))


def maximum(a, b):
    """Elementwise max; gradient splits evenly on exact ties."""
    a, b = as_tensor(a), as_tensor(b)
    _check_elementwise(a, b, "maximum")
    wa = np.where(a.data > b.data, 1.0, np.where(a.data == b.data, 0.5, 0.0))
    return _record(
        (a, b),
        np.maximum(a.data, b.data),
        lambda g: (_unbroadcast(g * wa, a.data.shape), _unbroadcast(g * (1.0 - wa), b.data.shape)),
    )


def minimum(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_elementwise(a, b, "minimum")
    wa = np.where(a.data < b.data, 1.0, np.where(a.data == b.data, 0.5, 0.0))
    return _record(
        (a, b),
        np.minimum(a.data, b.data),
        lambda g: (_unbroadcast(g * wa, a.data.shape), _unbroadcast(g * (1.0 - wa), b.data.shape)),
    )


def matmul(a, b):
    """Matrix product; also accepts stacked (..., m, k) @ (..., k, n) operands."""
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim < 2 or b.data.ndim < 2:
        raise ShapeError(f"matmul needs 2-D (or stacked) operands, got {a.data.shape} and {b.data.shape}")
    if a.data.shape[-1] != b.data.shape[-2]:
        raise ShapeError(f"matmul: inner dims differ, {a.data.shape} vs {b.data.shape}")

    def back(g):
        ga = _unbroadcast(np.matmul(g, b.data.swapaxes(-1, -2)), a.data.shape)
        gb = _unbroadcast(np.matmul(a.data.swapaxes(-1, -2), g), b.data.shape)
        return ga, gb

    return _record((a, b), np.matmul(a.data, b.data), back)


def reshape(a, shape):
    a = as_tensor(a)
    old = a.data.shape
    return _record((a,), a.data.reshape(shape), lambda g: (g.reshape(old),))


def transpose(a, axes=None):
    a = as_tensor(a)
    if axes is None:
        axes = tuple(reversed(range(a.data.ndim)))
    inv = np.argsort(axes)
    return _record((a,), np.transpose(a.data, axes), lambda g: (np.transpose(g, inv),))


def concat(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.data.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]
    return _record(
        tuple(tensors),
        np.concatenate([t.data for t in tensors], axis=axis),
        lambda g: tuple(np.split(g, splits, axis=axis)),
    )


def narrow(a, axis, start, length):
    """Contiguous slice [start, start+length) along `axis`."""
    a = as_tensor(a)
    if not 0 <= start and start + length <= a.data.shape[axis]:
        raise ShapeError(f"narrow [{start}:{start + length}) out of range for axis {axis} of {a.data.shape}")
    idx = tuple(slice(None) if i != axis else slice(start, start + length) for i in range(a.data.ndim))

    def back(g):
        full = np.zeros_like(a.data)
        full[idx] = g
        return (full,)

    return _record((a,), a.data[idx].copy(), back)


def embedding_lookup(table, indices):
    """Gather rows of `table` (repeated indices accumulate gradient)."""
    table = as_tensor(table)
    idx = np.asarray(indices, dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= table.data.shape[0]):
        raise ShapeError(f"indices out of range for table with {table.data.shape[0]} rows")

    def back(g):
        gt = np.zeros_like(table.data)
        np.add.at(gt, idx, g)
        return (gt,)

    return _record((table,), table.data[idx].copy(), back)


def reduce_sum(a, axis=None, keepdims=False):
    a = as_tensor(a)
    out_data = a.data.sum(axis=axis, keepdims=keepdims)

    def back(g):
        if axis is None:
            return (np.broadcast_to(g, a.data.shape).copy(),)
        gx = g if keepdims else np.expand_dims(g, axis)
        return (np.broadcast_to(gx, a.data.shape).copy(),)

    return _record((a,), out_data, back)


def reduce_mean(a, axis=None, keepdims=False):
    a = as_tensor(a)
    out_data = a.data.mean(axis=axis, keepdims=keepdims)
    n = a.data.size if axis is None else a.data.shape[axis]

    def back(g):
        if axis is None:
            return (np.broadcast_to(g / n, a.data.shape).copy(),)
        gx = g if keepdims else np.expand_dims(g, axis)
        return (np.broadcast_to(gx / n, a.data.shape).copy(),)

    return _record((a,), out_data, back)


# ---------------------------------------------------------------------------
# neural-network primitives


def softmax(a, axis=-1):
    """Numerically stable softmax; slices along `axis` sum to 1."""
    a = as_tensor(a)
    if not np.isfinite(a.data).all():
        raise NumericDomainError("softmax input contains non-finite values")
    if not -a.data.ndim <= axis < a.data.ndim:
        raise ShapeError(f"softmax axis {axis} invalid for shape {a.data.shape}")
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=axis, keepdims=True)

    def back(g):
        dot = (g * s).sum(axis=axis, keepdims=True)
        return (s * (g - dot),)

    return _record((a,), s, back)


def log_softmax(a, axis=-1):
    a = as_tensor(a)
    if not np.isfinite(a.data).all():
        raise NumericDomainError("log_softmax input contains non-finite values")
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    out_data = shifted - lse
    s = np.exp(out_data)

    def back(g):
        return (g - s * g.sum(axis=axis, keepdims=True),)

    return _record((a,), out_data, back)


def layer_norm(x, gain, bias, eps: float = 1e-5):
    """Normalize the last axis to zero mean / unit variance, then scale and shift."""
    x, gain, bias = as_tensor(x), as_tensor(gain), as_tensor(bias)
    d = x.data.shape[-1]
    if gain.data.shape != (d,) or bias.data.shape != (d,):
        raise ShapeError(f"layer_norm gain/bias must be ({d},), got {gain.data.shape} and {bias.data.shape}")
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    out_data = xhat * gain.data + bias.data

    def back(g):
        dxhat = g * gain.data
        dx = inv * (
            dxhat
            - dxhat.mean(axis=-1, keepdims=True)
            - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
        )
        lead = tuple(range(g.ndim - 1))
        return dx, (g * xhat).sum(axis=lead), g.sum(axis=lead)

    return _record((x, gain, bias), out_data, back)


def linear(x, w, b=None):
    """x @ w (+ b).  x is (rows, fan_in), w is (fan_in, fan_out), b is (fan_out,)."""
    x, w = as_tensor(x), as_tensor(w)
    if x.data.ndim != 2 or w.data.ndim != 2 or x.data.shape[1] != w.data.shape[0]:
        raise ShapeError(f"linear: x {x.data.shape} incompatible with w {w.data.shape}")
    out_data = x.data @ w.data
    if b is None:
        return _record((x, w), out_data, lambda g: (g @ w.data.T, x.data.T @ g))
    b = as_tensor(b)
    if b.data.shape != (w.data.shape[1],):
        raise ShapeError(f"linear: bias {b.data.shape} incompatible with w {w.data.shape}")
    return _record(
        (x, w, b),
        out_data + b.data,
        lambda g: (g @ w.data.T, x.data.T @ g, g.sum(axis=0)),
    )


def cross_entropy(logits, targets, weight=None):
    """Softmax cross entropy against integer class targets.

    1-D logits with a scalar target give a scalar loss; (N, C) logits with
    (N,) targets give per-row losses.  `weight` (scalar or per-row) scales
    each row's loss.
    """
    logits = as_tensor(logits)
    if not np.isfinite(logits.data).all():
        raise NumericDomainError("cross_entropy logits contain non-finite values")
    squeeze = logits.data.ndim == 1
    z = logits.data[None, :] if squeeze else logits.data
    if z.ndim != 2:
        raise ShapeError(f"cross_entropy expects 1-D or 2-D logits, got {logits.data.shape}")
    t = np.atleast_1d(np.asarray(targets, dtype=np.intp))
    n, c = z.shape
    if t.shape != (n,):
        raise ShapeError(f"cross_entropy: {n} logit rows but targets shape {t.shape}")
    if t.size and (t.min() < 0 or t.max() >= c):
        raise ShapeError(f"cross_entropy: target out of range for {c} classes")
    w = np.ones(n) if weight is None else np.broadcast_to(np.asarray(weight, dtype=np.float64), (n,))

    shifted = z - z.max(axis=1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=1))
    losses = (lse - shifted[np.arange(n), t]) * w
    p = np.exp(shifted - lse[:, None])

    def back(g):
        gz = np.atleast_1d(g)[:, None] * w[:, None] * p
        gz[np.arange(n), t] -= np.atleast_1d(g) * w
        return (gz[0] * 0.0 + gz if not squeeze else gz.reshape(logits.data.shape),)

    out_data = losses[0] if squeeze else losses
    return _record((logits,), out_data, back)


def multi_head_attention(query, key, value, heads: int):
    """Scaled dot-product attention core (projections live in the caller).

    query is (L_q, d); key/value are (L_k, d); d must divide by `heads`.
    Returns (output (L_q, d), attention weights ndarray (heads, L_q, L_k));
    each attention row sums to 1.
    """
    query, key, value = as_tensor(query), as_tensor(key), as_tensor(value)
    lq, d = query.data.shape
    lk = key.data.shape[0]
    if d % heads != 0:
        raise ConfigError(f"model width {d} not divisible by {heads} heads")
    if key.data.shape[1] != d or value.data.shape != (lk, d):
        raise ShapeError(f"attention shapes differ: q {query.data.shape}, k {key.data.shape}, v {value.data.shape}")
    dh = d // heads
    qh = transpose(reshape(query, (lq, heads, dh)), (1, 0, 2))
    kh = transpose(reshape(key, (lk, heads, dh)), (1, 2, 0))
    vh = transpose(reshape(value, (lk, heads, dh)), (1, 0, 2))
    attn = softmax(mul(matmul(qh, kh), 1.0 / np.sqrt(dh)), axis=-1)
    ctx = matmul(attn, vh)
    out = reshape(transpose(ctx, (1, 0, 2)), (lq, d))
    return out, attn.data.copy()


def dropout(a, rate: float, rng: np.random.Generator):
    """Inverted dropout; identity when rate == 0."""
    a = as_tensor(a)
    if rate == 0.0:
        return a
    if not 0.0 <= rate < 1.0:
        raise ConfigError(f"dropout rate must be in [0, 1), got {rate}")
    mask = (rng.random(a.data.shape) >= rate) / (1.0 - rate)
    return _record((a,), a.data * mask, lambda g: (g * mask,))


# ---------------------------------------------------------------------------
# convolution (strided, zero padded, channel-last)

_COL_INDEX_CACHE: dict = {}


def _col_indices(h, w, cin, kh, kw, stride, pad):
    key = (h, w, cin, kh, kw, stride, pad)
    cached = _COL_INDEX_CACHE.get(key)
    if cached is not None:
        return cached
    hp, wp = h + 2 * pad, w + 2 * pad
    ho = (hp - kh) // stride + 1
    wo = (wp - kw) // stride + 1
    oy = np.arange(ho)[:, None, None, None, None] * stride
    ox = np.arange(wo)[None, :, None, None, None] * stride
    ky = np.arange(kh)[None, None, :, None, None]
    kx = np.arange(kw)[None, None, None, :, None]
    ci = np.arange(cin)[None, None, None, None, :]
    flat = ((oy + ky) * wp + (ox + kx)) * cin + ci
    out = (flat.ravel(), ho, wo, hp, wp)
    _COL_INDEX_CACHE[key] = out
    return out


def conv2d(x, w, b=None, stride: int = 1, pad: int = 0):
    """2-D convolution on a channel-last image.

    x is (H, W, C_in); w is (kh, kw, C_in, C_out); b is (C_out,).
    Implemented as patch extraction + matmul; the reverse rule scatters the
    column gradient back through the same index map.
    """
    x, w = as_tensor(x), as_tensor(w)
    if x.data.ndim != 3 or w.data.ndim != 4 or x.data.shape[2] != w.data.shape[2]:
        raise ShapeError(f"conv2d: image {x.data.shape} incompatible with kernel {w.data.shape}")
    h, wid, cin = x.data.shape
    kh, kw, _, cout = w.data.shape
    idx, ho, wo, hp, wp = _col_indices(h, wid, cin, kh, kw, stride, pad)
    if ho <= 0 or wo <= 0:
        raise ShapeError(f"conv2d: image {x.data.shape} smaller than kernel {w.data.shape} at stride {stride}")

    xp = np.pad(x.data, ((pad, pad), (pad, pad), (0, 0))) if pad else x.data
    cols = xp.reshape(-1)[idx].reshape(ho * wo, kh * kw * cin)
    wmat = w.data.reshape(kh * kw * cin, cout)
    out_data = (cols @ wmat).reshape(ho, wo, cout)
    if b is not None:
        b = as_tensor(b)
        out_data = out_data + b.data

    def back(g):
        g2 = g.reshape(ho * wo, cout)
        dw = (cols.T @ g2).reshape(w.data.shape)
        dcols = g2 @ wmat.T
        dxp = np.zeros(hp * wp * cin)
        np.add.at(dxp, idx, dcols.ravel())
        dxp = dxp.reshape(hp, wp, cin)
        dx = dxp[pad:pad + h, pad:pad + wid] if pad else dxp
        if b is None:
            return dx, dw
        return dx, dw, g.sum(axis=(0, 1))

    return _record((x, w) if b is None else (x, w, b), out_data, back)


# ---------------------------------------------------------------------------
# optimizer


def adamw_step(params, grads, lr, weight_decay=0.0, betas=(0.9, 0.999), eps=1e-8, state=None):
    """One decoupled-weight-decay Adam update over a dict of named parameters.

    `params` maps names to Tensors, `grads` maps the same names to arrays
    (missing/None entries are treated as zero gradient).  `state` holds the
    per-parameter first/second moments and step count and is created on
    first use; pass the same dict back on every call.
    """
    if lr <= 0:
        raise ConfigError(f"learning rate must be positive, got {lr}")
    b1, b2 = betas
    if state is None:
        state = {}
    for name, p in params.items():
        s = state.get(name)
        if s is None:
            s = {"m": np.zeros_like(p.data), "v": np.zeros_like(p.data), "step": 0}
            state[name] = s
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p.data)
        s["step"] += 1
        t = s["step"]
        s["m"] = b1 * s["m"] + (1.0 - b1) * g
        s["v"] = b2 * s["v"] + (1.0 - b2) * (g * g)
        mhat = s["m"] / (1.0 - b1 ** t)
        vhat = s["v"] / (1.0 - b2 ** t)
        p.data -= lr * (mhat / (np.sqrt(vhat) + eps) + weight_decay * p.data)
    return state


def clip_grad_norm(grads, max_norm: float) -> float:
    """Scale a dict of gradient arrays so their global L2 norm is <= max_norm."""
    total = 0.0
    for g in grads.values():
        if g is not None:
            total += float((g * g).sum())
    norm = float(np.sqrt(total))
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        for name in grads:
            if grads[name] is not None:
                grads[name] = grads[name] * scale
    return norm


# ---------------------------------------------------------------------------
# checkpoint container: flat name -> float64 array, versioned, little endian

_CKPT_MAGIC = b"HOITCKPT"
CHECKPOINT_VERSION = 1


def write_checkpoint(path, arrays: dict) -> None:
    """Write a flat {name: float64 array} container (sorted for stable bytes)."""
    with open(path, "wb") as f:
        f.write(_CKPT_MAGIC)
        f.write(struct.pack("<II", CHECKPOINT_VERSION, len(arrays)))
        for name in sorted(arrays):
            arr = np.ascontiguousarray(arrays[name], dtype=np.float64)
            n = name.encode("utf-8")
            f.write(struct.pack("<I", len(n)))
            f.write(n)
            f.write(struct.pack("<I", arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            f.write(arr.astype("<f8").tobytes())


def read_checkpoint(path) -> dict:
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != _CKPT_MAGIC:
            raise ContractError(f"{path}: not a parameter checkpoint (bad magic {magic!r})")
        version, count = struct.unpack("<II", f.read(8))
        if version != CHECKPOINT_VERSION:
            raise ContractError(f"{path}: unsupported checkpoint version {version}")
        arrays = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<I", f.read(4))
            name = f.read(name_len).decode("utf-8")
            (ndim,) = struct.unpack("<I", f.read(4))
            shape = struct.unpack(f"<{ndim}Q", f.read(8 * ndim)) if ndim else ()
            size = int(np.prod(shape)) if shape else 1
            data = np.frombuffer(f.read(8 * size), dtype="<f8").reshape(shape)
            arrays[name] = np.array(data, dtype=np.float64)
        return arrays
