"""Exact arithmetic in GF(p^b).

Elements are encoded as integers ``key = sum(coeffs[i] * p**i)`` where
``coeffs`` is the polynomial-basis coefficient vector (constant term first).
A :class:`FieldCtx` carries full log/antilog and addition tables, so scalar
and array arithmetic both reduce to table lookups; matrix products go through
integer GEMM on the coefficient digits.
"""

from __future__ import annotations

import os
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

DEFAULT_FIELD_CAP = int(os.environ.get("LIEADEQUACY_FIELD_CAP", "121"))

# float64 GEMM is exact while every partial sum stays below 2**53
_FLOAT_EXACT = 2**53


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over GF(p), coefficient lists constant term first ----------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = [x % p for x in a]
    _poly_trim(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _poly_trim(a)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def _root_power_keys(modulus: Sequence[int], p: int, b: int) -> list[int] | None:
    """Keys of x^0, x^1, ... modulo ``modulus`` if x has order p^b - 1, else None."""
    q = p**b
    mono = [0] * b
    mono[0] = 1
    keys = []
    seen_one = False
    for k in range(q - 1):
        key = sum(c * p**i for i, c in enumerate(mono))
        if k > 0 and key == 1:
            seen_one = True
            break
        keys.append(key)
        # multiply by x and reduce x^b = -(m_0 + ... + m_{b-1} x^{b-1})
        top = mono[-1]
        mono = [0] + mono[:-1]
        for i in range(b):
            mono[i] = (mono[i] - top * modulus[i]) % p
    if seen_one or sum(c * p**i for i, c in enumerate(mono)) != 1:
        return None
    return keys


class FieldElem:
    """An element of a fixed :class:`FieldCtx`, stored by its integer key."""

    __slots__ = ("ctx", "key")

    def __init__(self, ctx: "FieldCtx", key: int):
        self.ctx = ctx
        self.key = int(key)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.ctx.digits[self.key])

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.ctx is not self.ctx:
                raise FieldError("operands belong to different fields")
            return other.key
        if isinstance(other, (int, np.integer)):
            return self.ctx.from_int(int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.ctx, self.ctx.add_table[self.key, o])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.ctx, self.ctx.sub_table[self.key, o])

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.ctx, self.ctx.sub_table[o, self.key])

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.ctx, self.ctx.mul_table[self.key, o])

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(self.ctx, self.ctx.neg_table[self.key])

    def inv(self) -> "FieldElem":
        if self.key == 0:
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.ctx.q)
        return FieldElem(self.ctx, self.ctx.inv_table[self.key])

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * FieldElem(self.ctx, o).inv()

    def __pow__(self, e: int) -> "FieldElem":
        return FieldElem(self.ctx, self.ctx.pow_key(self.key, e))

    def dlog(self) -> int:
        return self.ctx.dlog(self)

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.ctx is other.ctx and self.key == other.key
        if isinstance(other, (int, np.integer)):
            return self.key == self.ctx.from_int(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.b, self.key))

    def __int__(self):
        return self.key

    def __repr__(self):
        if self.ctx.b == 1:
            return f"GF({self.ctx.p})({self.key})"
        return f"GF({self.ctx.q})({list(self.coeffs)})"


class FieldCtx:
    """Arithmetic context for GF(p^b).

    Built once by :func:`field_new`; all tables are materialised at
    construction and the object is treated as immutable afterwards.
    """

    def __init__(self, p: int, b: int, modulus: tuple[int, ...], power_keys: list[int]):
        self.p = p
        self.b = b
        self.q = p**b
        self.modulus = modulus
        q = self.q
        self.dtype = np.int16 if q < 2**15 else np.int32

        self.digits = np.array(
            [[(k // p**i) % p for i in range(b)] for k in range(q)], dtype=np.int64
        ).reshape(q, b)
        self.place = np.array([p**i for i in range(b)], dtype=np.int64)

        self.exp_table = np.array(power_keys, dtype=np.int64)
        self.log_table = np.full(q, -1, dtype=np.int64)
        self.log_table[self.exp_table] = np.arange(q - 1)

        d = self.digits
        self.add_table = (((d[:, None, :] + d[None, :, :]) % p) @ self.place).astype(self.dtype)
        self.sub_table = (((d[:, None, :] - d[None, :, :]) % p) @ self.place).astype(self.dtype)
        self.neg_table = ((-d % p) @ self.place).astype(self.dtype)
        lg = self.log_table
        mul = np.zeros((q, q), dtype=np.int64)
        nz = np.arange(1, q)
        mul[1:, 1:] = self.exp_table[(lg[nz][:, None] + lg[nz][None, :]) % (q - 1)]
        self.mul_table = mul.astype(self.dtype)
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = self.exp_table[(-lg[1:]) % (q - 1)]
        self.inv_table = inv.astype(self.dtype)

        self.zeta = FieldElem(self, int(self.exp_table[1]) if q > 2 else 1)
        for t in (self.add_table, self.sub_table, self.neg_table, self.mul_table,
                  self.inv_table, self.exp_table, self.log_table, self.digits):
            t.setflags(write=False)

    # -- scalars ----------------------------------------------------------

    def __call__(self, x) -> FieldElem:
        if isinstance(x, FieldElem):
            if x.ctx is not self:
                raise FieldError("element belongs to a different field")
            return x
        if isinstance(x, (int, np.integer)):
            return FieldElem(self, self.from_int(int(x)))
        coeffs = list(x)
        if len(coeffs) != self.b or any(not 0 <= c < self.p for c in coeffs):
            raise FieldError(f"coefficient vector {coeffs!r} invalid for GF({self.q})")
        return FieldElem(self, sum(c * p for c, p in zip(coeffs, self.place.tolist())))

    def from_key(self, key: int) -> FieldElem:
        if not 0 <= int(key) < self.q:
            raise FieldError(f"key {key} out of range for GF({self.q})")
        return FieldElem(self, int(key))

    def from_int(self, n: int) -> int:
        """Key of the image of the integer ``n`` under Z -> GF(p)."""
        return n % self.p

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, 1)

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, 0)

    def elements(self) -> list[FieldElem]:
        return [FieldElem(self, k) for k in range(self.q)]

    def pow_key(self, key: int, e: int) -> int:
        if key == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if e == 0 else 0
        # square-and-multiply on the key; the log table would make this O(1)
        # but keeping it independent of dlog lets the tests cross-check both
        if e < 0:
            key, e = int(self.inv_table[key]), -e
        result, base = 1, key
        while e:
            if e & 1:
                result = int(self.mul_table[result, base])
            base = int(self.mul_table[base, base])
            e >>= 1
        return result

    def dlog(self, x) -> int:
        key = self(x).key
        if key == 0:
            raise FieldError("discrete log of zero")
        return int(self.log_table[key])

    # -- arrays of keys ---------------------------------------------------

    def asarray(self, a) -> np.ndarray:
        arr = np.asarray(a)
        if arr.dtype == object:
            arr = np.vectorize(lambda x: self(x).key, otypes=[np.int64])(arr)
        return arr.astype(self.dtype, copy=False)

    def add(self, a, b):
        return self.add_table[a, b]

    def sub(self, a, b):
        return self.sub_table[a, b]

    def mul(self, a, b):
        return self.mul_table[a, b]

    def neg(self, a):
        return self.neg_table[a]

    def inv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self.inv_table[a]

    def to_digits(self, a: np.ndarray) -> np.ndarray:
        """Coefficient planes, shape ``(b,) + a.shape``."""
        return np.moveaxis(self.digits[a], -1, 0)

    def from_digits(self, planes: np.ndarray) -> np.ndarray:
        planes = np.mod(planes, self.p).astype(np.int64)
        return np.tensordot(self.place, planes, axes=(0, 0)).astype(self.dtype)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix product of key arrays with numpy broadcasting rules."""
        a = np.asarray(a)
        b = np.asarray(b)
        inner = a.shape[-1]
        use_float = inner * (self.p - 1) ** 2 * self.b < _FLOAT_EXACT
        if self.b == 1:
            if use_float:
                c = np.matmul(a.astype(np.float64), b.astype(np.float64))
                return np.mod(c, self.p).astype(self.dtype)
            return np.mod(np.matmul(a.astype(np.int64), b.astype(np.int64)), self.p).astype(self.dtype)
        ft = np.float64 if use_float else np.int64
        ad = self.to_digits(a).astype(ft)
        bd = self.to_digits(b).astype(ft)
        planes = [None] * (2 * self.b - 1)
        for i in range(self.b):
            for j in range(self.b):
                t = np.matmul(ad[i], bd[j])
                planes[i + j] = t if planes[i + j] is None else planes[i + j] + t
        planes = [np.mod(t, self.p) for t in planes]
        m = self.modulus
        for t in range(2 * self.b - 2, self.b - 1, -1):
            top = planes[t]
            for i in range(self.b):
                if m[i]:
                    planes[t - self.b + i] = np.mod(planes[t - self.b + i] - m[i] * top, self.p)
        return self.from_digits(np.stack(planes[: self.b]))

    def scale(self, c: int, a: np.ndarray) -> np.ndarray:
        return self.mul_table[c, a]

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=self.dtype)

    def describe(self) -> dict:
        return {
            "p": self.p,
            "b": self.b,
            "q": self.q,
            "modulus": list(self.modulus) + [1] if self.b > 1 else [0, 1],
            "zeta": list(self.zeta.coeffs),
        }

    def modulus_str(self) -> str:
        if self.b == 1:
            return "x"
        terms = []
        for i in range(self.b, -1, -1):
            c = 1 if i == self.b else self.modulus[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}{mono}")
        return " + ".join(terms)

    def __repr__(self):
        return f"FieldCtx(p={self.p}, b={self.b}, modulus={self.modulus_str()!r})"


def primitive_modulus(p: int, b: int) -> tuple[tuple[int, ...], list[int]]:
    """Lexicographically least monic degree-b polynomial with a primitive root.

    Candidates are ordered by their low coefficients (constant term first).
    Returns the low coefficients and the keys of successive root powers.
    """
    for low in product(range(p), repeat=b):
        if low[0] == 0:
            continue
        keys = _root_power_keys(low, p, b)
        if keys is not None:
            return tuple(low), keys
    raise FieldError(f"no primitive polynomial of degree {b} over GF({p})")  # pragma: no cover


def smallest_primitive_root(p: int) -> int:
    if p == 2:
        return 1
    factors = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in factors):
            return g
    raise FieldError(f"no primitive root mod {p}")  # pragma: no cover


@lru_cache(maxsize=None)
def _field_cached(p: int, b: int) -> FieldCtx:
    if b == 1:
        z = smallest_primitive_root(p)
        keys = [pow(z, k, p) for k in range(p - 1)]
        return FieldCtx(p, 1, (0,), keys)
    low, keys = primitive_modulus(p, b)
    return FieldCtx(p, b, low, keys)


def field_new(p: int, b: int = 1, cap: int | None = None) -> FieldCtx:
    """Construct GF(p^b) deterministically.

    For ``b == 1`` the modulus is the convention ``x`` and ``zeta`` is the
    least primitive root mod p.  For ``b > 1`` the modulus is the least
    monic irreducible polynomial whose root is primitive, and ``zeta`` is
    that root.  Equal arguments return the same (cached) context.
    """
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise FieldError(f"p={p!r} is not prime")
    if not isinstance(b, (int, np.integer)) or b < 1:
        raise FieldError(f"extension degree b={b!r} must be >= 1")
    cap = DEFAULT_FIELD_CAP if cap is None else cap
    if int(p) ** int(b) > cap:
        raise FieldError(f"q = {p}^{b} = {p**b} exceeds the field cap {cap}")
    return _field_cached(int(p), int(b))


def elems(ctx: FieldCtx, values: Iterable) -> list[FieldElem]:
    return [ctx(v) for v in values]
