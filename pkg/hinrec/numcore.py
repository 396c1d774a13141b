# Copyright (c) 2024, hinrec developers
# All rights reserved.
#
# This file is part of hinrec
#
# Redistribution and use in source and binary forms, with or without
# modification, are permitted provided that the following conditions are met:
#
#     1. Redistributions of source code must retain the above copyright
#        notice, this list of conditions and the following disclaimer.
#     2. Redistributions in binary form must reproduce the above copyright
#        notice, this list of conditions and the following disclaimer in the
#        documentation and/or other materials provided with the distribution.
#     3. Neither the name of the copyright holder nor the names of
#        its contributors may be used to endorse or promote products
#        derived from this software without specific prior written permission.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND
# ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED
# WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE
# DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY
# DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES
# (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES;
# LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND
# ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT
# (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS
# SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.

"""Dense array arithmetic with reverse-mode gradients.

Every quantity of the model lives in a :class:`Tensor`, an immutable wrapper around a numpy
array. Primitives applied while a :class:`GradTape` is active are recorded in execution
order; replaying the tape backward yields the gradient of a scalar with respect to every
watched tensor.

>>> import numpy as np
>>> from hinrec import numcore as nc
>>> w = nc.Tensor(np.eye(2))
>>> with nc.GradTape() as tape:
...     tape.watch(w)
...     out = nc.sum(nc.affine(nc.Tensor([3., -1.]), w))
>>> grad_w, = tape.gradient(out, [w])
"""
import logging
import threading

import numpy as np
from scipy.special import expit

from hinrec.exceptions import EmptyRelationGroupError, NumericalError, ShapeError

L = logging.getLogger(__name__)

NORM_EPS = 1e-12

_LOCAL = threading.local()


class Tensor:
    """Immutable dense real-valued array."""

    __slots__ = ('_value', 'name')

    def __init__(self, value, name=None, dtype=None):
        """Wrap ``value`` in a read-only array.

        Args:
            value: array-like of real numbers
            name (str): optional label used in diagnostics
            dtype: numpy dtype, defaults to the dtype of a floating ``value`` or float64
        """
        if dtype is None:
            dtype = value.dtype if isinstance(value, np.ndarray) and \
                np.issubdtype(value.dtype, np.floating) else np.float64
        array = np.array(value, dtype=dtype)
        array.setflags(write=False)
        self._value = array
        self.name = name

    @classmethod
    def _wrap(cls, value, dtype):
        """Wrap a freshly computed array without copying it."""
        out = cls.__new__(cls)
        array = np.asarray(value)
        if array.dtype != dtype:
            array = array.astype(dtype)
        array.setflags(write=False)
        out._value = array
        out.name = None
        return out

    @property
    def value(self):
        """Read-only numpy view of the values."""
        return self._value

    @property
    def shape(self):
        """Tuple of dimension sizes."""
        return self._value.shape

    @property
    def dtype(self):
        """Numpy dtype of the values."""
        return self._value.dtype

    @property
    def ndim(self):
        """Number of dimensions."""
        return self._value.ndim

    def numpy(self):
        """Writable copy of the values."""
        return self._value.copy()

    def __len__(self):
        """Size of the first dimension."""
        return len(self._value)

    def __repr__(self):
        """Return a string representation."""
        label = f' name={self.name}' if self.name else ''
        return f'Tensor<shape={self.shape} dtype={self.dtype}{label}>'

    def __add__(self, other):
        """Elementwise sum."""
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        """Elementwise difference."""
        return add(self, neg(as_tensor(other, self.dtype)))

    def __rsub__(self, other):
        """Elementwise difference with a constant on the left."""
        return add(neg(self), other)

    def __neg__(self):
        """Elementwise negation."""
        return neg(self)

    def __mul__(self, other):
        """Elementwise product."""
        return mul(self, other)

    __rmul__ = __mul__

    def __getitem__(self, index):
        """Basic slicing."""
        return getitem(self, index)


def as_tensor(value, dtype=None):
    """Return ``value`` unchanged if it is a Tensor, else a constant Tensor."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value, dtype=dtype)


class GradTape:
    """Record of primitive applications for reverse-mode differentiation.

    A tape is confined to one thread; it becomes the active tape of that thread inside a
    ``with`` block.
    """

    def __init__(self):
        """Initialize an empty tape."""
        self._records = []
        self._watched = []
        self._tracked = set()

    def __enter__(self):
        """Make this tape the active one of the current thread."""
        stack = getattr(_LOCAL, 'stack', None)
        if stack is None:
            stack = _LOCAL.stack = []
        stack.append(self)
        return self

    def __exit__(self, *exc):
        """Deactivate the tape."""
        _LOCAL.stack.pop()

    def __len__(self):
        """Number of recorded primitive applications."""
        return len(self._records)

    def watch(self, *tensors):
        """Track gradients for the given tensors."""
        for t in tensors:
            self._watched.append(t)
            self._tracked.add(id(t))

    def record(self, output, inputs, backward):
        """Append a primitive application if any input depends on a watched tensor."""
        if any(id(t) in self._tracked for t in inputs):
            self._tracked.add(id(output))
            self._records.append((output, inputs, backward))

    def gradient(self, target, sources):
        """Gradients of a scalar ``target`` with respect to ``sources``.

        Args:
            target (Tensor): scalar output computed while this tape was active
            sources (list[Tensor]): watched tensors

        Returns:
            list of numpy arrays shaped like each source; sources not on any path to the
            target get exact zeros
        """
        if target.value.size != 1:
            raise ShapeError(f'gradient target must be a scalar, got shape {target.shape}')
        grads = {id(target): np.ones_like(target.value)}
        for output, inputs, backward in reversed(self._records):
            upstream = grads.pop(id(output), None)
            if upstream is None:
                continue
            for tensor, grad in zip(inputs, backward(upstream)):
                if grad is None or id(tensor) not in self._tracked:
                    continue
                key = id(tensor)
                if key in grads:
                    grads[key] = grads[key] + grad
                else:
                    grads[key] = grad
        return [np.asarray(grads.get(id(s), np.zeros_like(s.value)), dtype=s.dtype)
                for s in sources]


def active_tape():
    """The tape active on the current thread or None."""
    stack = getattr(_LOCAL, 'stack', None)
    return stack[-1] if stack else None


def _emit(value, inputs, backward, dtype):
    """Wrap a primitive result and record it on the active tape."""
    out = Tensor._wrap(value, dtype)
    tape = active_tape()
    if tape is not None:
        tape.record(out, inputs, backward)
    return out


def _unbroadcast(grad, shape):
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _result_dtype(*tensors):
    return np.result_type(*(t.dtype for t in tensors))


def affine(x, W, b=None):
    """Matrix product ``W · x`` along the last axis of ``x`` plus an optional bias.

    Args:
        x (Tensor): shape (..., n_in)
        W (Tensor): shape (n_out, n_in)
        b (Tensor): optional, shape (n_out,)

    Returns:
        Tensor of shape (..., n_out)
    """
    x, W = as_tensor(x), as_tensor(W)
    if W.ndim != 2 or x.ndim < 1 or x.shape[-1] != W.shape[1]:
        raise ShapeError(f'affine: input shape {x.shape} does not match weight shape {W.shape}')
    value = x.value @ W.value.T
    inputs = (x, W)
    if b is not None:
        b = as_tensor(b)
        if b.shape != (W.shape[0],):
            raise ShapeError(f'affine: bias shape {b.shape} does not match {W.shape}')
        value = value + b.value
        inputs = (x, W, b)

    def backward(g):
        flat_g = g.reshape(-1, W.shape[0])
        grads = [g @ W.value, flat_g.T @ x.value.reshape(-1, W.shape[1])]
        if b is not None:
            grads.append(flat_g.sum(axis=0))
        return grads

    return _emit(value, inputs, backward, _result_dtype(*inputs))


def relu(x):
    """Rectified linear unit."""
    x = as_tensor(x)
    positive = x.value > 0
    return _emit(np.where(positive, x.value, 0.), (x,),
                 lambda g: (g * positive,), x.dtype)


def tanh(x):
    """Hyperbolic tangent."""
    x = as_tensor(x)
    value = np.tanh(x.value)
    return _emit(value, (x,), lambda g: (g * (1. - value ** 2),), x.dtype)


def sigmoid(x):
    """Logistic function ``1 / (1 + exp(-x))``."""
    x = as_tensor(x)
    value = expit(x.value)
    return _emit(value, (x,), lambda g: (g * value * (1. - value),), x.dtype)


_ELEMENTWISE = {'relu': relu, 'tanh': tanh, 'sigmoid': sigmoid}


def elementwise(name, x):
    """Apply the named activation (relu, tanh or sigmoid) per element."""
    try:
        return _ELEMENTWISE[name](x)
    except KeyError as e:
        raise ValueError(f'unknown elementwise function "{name}", '
                         f'choose from {sorted(_ELEMENTWISE)}') from e


def log(x):
    """Natural logarithm."""
    x = as_tensor(x)
    return _emit(np.log(x.value), (x,), lambda g: (g / x.value,), x.dtype)


def clip(x, lower, upper):
    """Clamp to [lower, upper]; the gradient passes only inside the range."""
    x = as_tensor(x)
    inside = (x.value >= lower) & (x.value <= upper)
    return _emit(np.clip(x.value, lower, upper), (x,), lambda g: (g * inside,), x.dtype)


def neg(x):
    """Elementwise negation."""
    x = as_tensor(x)
    return _emit(-x.value, (x,), lambda g: (-g,), x.dtype)


def add(a, b):
    """Elementwise sum with numpy broadcasting."""
    a = as_tensor(a)
    b = as_tensor(b, a.dtype)
    return _emit(a.value + b.value, (a, b),
                 lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
                 _result_dtype(a, b))


def mul(a, b):
    """Elementwise product with numpy broadcasting."""
    a = as_tensor(a)
    b = as_tensor(b, a.dtype)
    return _emit(a.value * b.value, (a, b),
                 lambda g: (_unbroadcast(g * b.value, a.shape),
                            _unbroadcast(g * a.value, b.shape)),
                 _result_dtype(a, b))


def sum(x, axis=None, keepdims=False):  # pylint: disable=redefined-builtin
    """Sum over the given axes."""
    x = as_tensor(x)
    value = np.sum(x.value, axis=axis, keepdims=keepdims)

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape).copy(),)

    return _emit(value, (x,), backward, x.dtype)


def mean(x, axis=None):
    """Arithmetic mean over the given axes."""
    x = as_tensor(x)
    count = x.value.size if axis is None else np.prod([x.shape[a] for a in np.atleast_1d(axis)])
    return mul(sum(x, axis=axis), 1. / count)


def reshape(x, shape):
    """Reshape preserving the value count."""
    x = as_tensor(x)
    try:
        value = x.value.reshape(shape)
    except ValueError as e:
        raise ShapeError(f'reshape: cannot reshape {x.shape} into {shape}') from e
    return _emit(value, (x,), lambda g: (g.reshape(x.shape),), x.dtype)


def concat(tensors, axis=0):
    """Concatenate tensors along an existing axis."""
    tensors = tuple(as_tensor(t) for t in tensors)
    sizes = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        return np.split(g, sizes, axis=axis)

    return _emit(np.concatenate([t.value for t in tensors], axis=axis), tensors, backward,
                 _result_dtype(*tensors))


def getitem(x, index):
    """Basic slicing ``x[index]``."""
    x = as_tensor(x)

    def backward(g):
        grad = np.zeros_like(x.value)
        grad[index] = g
        return (grad,)

    return _emit(x.value[index], (x,), backward, x.dtype)


def take(x, index):
    """Gather rows of ``x``; the result has shape ``index.shape + x.shape[1:]``."""
    x = as_tensor(x)
    index = np.asarray(index, dtype=np.intp)

    def backward(g):
        grad = np.zeros_like(x.value)
        np.add.at(grad, index, g)
        return (grad,)

    return _emit(np.take(x.value, index, axis=0), (x,), backward, x.dtype)


def segment_sum(x, index, n_segments):
    """Scatter-add rows of ``x`` into ``n_segments`` rows selected by ``index``."""
    x = as_tensor(x)
    index = np.asarray(index, dtype=np.intp)
    if index.shape != x.shape[:1]:
        raise ShapeError(f'segment_sum: index shape {index.shape} does not match {x.shape}')
    value = np.zeros((n_segments,) + x.shape[1:], dtype=x.dtype)
    np.add.at(value, index, x.value)
    return _emit(value, (x,), lambda g: (np.take(g, index, axis=0),), x.dtype)


def masked_softmax(e, mask, axis=-1):
    """Softmax along ``axis`` restricted to the entries where ``mask`` is true.

    Masked entries receive exactly zero weight. Values are shifted by the group maximum
    before exponentiation.

    Raises:
        EmptyRelationGroupError: if a normalization group has no unmasked entry
    """
    e = as_tensor(e)
    mask = np.broadcast_to(np.asarray(mask, dtype=bool), e.shape)
    if not np.all(np.any(mask, axis=axis)):
        raise EmptyRelationGroupError('empty relation group: softmax group without any '
                                      'unmasked entry')
    with np.errstate(invalid='ignore', over='ignore'):
        masked = np.where(mask, e.value, -np.inf)
        shifted = masked - np.max(masked, axis=axis, keepdims=True)
        exp = np.where(mask, np.exp(shifted), 0.)
    value = exp / np.sum(exp, axis=axis, keepdims=True)

    def backward(g):
        return (value * (g - np.sum(g * value, axis=axis, keepdims=True)),)

    return _emit(value, (e,), backward, e.dtype)


def softmax(e, axis=-1):
    """Softmax along ``axis``."""
    e = as_tensor(e)
    return masked_softmax(e, np.ones(e.shape, dtype=bool), axis=axis)


def l2_normalize(x, eps=NORM_EPS, axis=-1):
    """Scale vectors along ``axis`` to unit Euclidean norm.

    Vectors whose norm is at most ``eps`` are returned unchanged.
    """
    x = as_tensor(x)
    norm = np.sqrt(np.sum(x.value ** 2, axis=axis, keepdims=True))
    guarded = norm <= eps
    safe = np.where(guarded, 1., norm)
    value = np.where(guarded, x.value, x.value / safe)

    def backward(g):
        projected = (g - value * np.sum(g * value, axis=axis, keepdims=True)) / safe
        return (np.where(guarded, g, projected),)

    return _emit(value, (x,), backward, x.dtype)


def _evaluate(f, params):
    with np.errstate(all='ignore'):
        return np.asarray(f({k: Tensor(v) for k, v in params.items()}).value).item()


def grad_check(f, params, h=1e-5, floor=1e-8):
    """Compare tape gradients against central finite differences.

    Args:
        f (callable): maps a dict of named Tensors to a scalar Tensor
        params (dict): name -> array of parameter values, evaluated in 64 bit
        h (float): finite-difference step
        floor (float): lower bound of the relative-error denominator

    Returns:
        float: max over all coordinates of
        ``|analytic - cd| / max(|analytic|, |cd|, floor)``

    Raises:
        NumericalError: if ``f`` is not finite at ``params``
    """
    params = {k: np.array(v, dtype=np.float64) for k, v in params.items()}
    tensors = {k: Tensor(v) for k, v in params.items()}
    with GradTape() as tape:
        tape.watch(*tensors.values())
        out = f(tensors)
    if not np.all(np.isfinite(out.value)):
        raise NumericalError(f'objective is not finite: {out.value}')
    analytic = dict(zip(tensors, tape.gradient(out, list(tensors.values()))))

    worst = 0.
    for name, theta in params.items():
        for idx in np.ndindex(theta.shape):
            original = theta[idx]
            theta[idx] = original + h
            f_plus = _evaluate(f, params)
            theta[idx] = original - h
            f_minus = _evaluate(f, params)
            theta[idx] = original
            numeric = (f_plus - f_minus) / (2. * h)
            exact = float(analytic[name][idx])
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), floor)
            if error > worst:
                L.debug('grad_check %s%s: analytic %g numeric %g', name, idx, exact, numeric)
                worst = error
    return worst
