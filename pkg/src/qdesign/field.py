"""Arithmetic in GF(p^m).

Elements are plain integers in ``[0, q)``.  The base-p digits of an index
``d0 + d1*p + ... + d_{m-1}*p^(m-1)`` are the coefficients of the residue
``d0 + d1*x + ... + d_{m-1}*x^(m-1)`` modulo the field modulus, so index 0 is
zero and index 1 is one.

Scalar methods (``add``, ``mul``, ...) work on Python ints; the ``v``-prefixed
methods work elementwise on numpy integer arrays and are what the design and
curve code use in their inner loops.
"""

from __future__ import annotations

from functools import cached_property
from math import gcd
from typing import Sequence

import numpy as np

#: fields up to this size get log/antilog tables by default
TABLE_LIMIT = 1 << 16
#: largest supported field
MAX_ORDER = 1 << 20
#: odd-characteristic fields up to this size get a full addition table
ADD_TABLE_LIMIT = 2500


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over GF(p) as coefficient lists, lowest degree first ---------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` divided by ``b`` over GF(p); ``b`` must be nonzero."""
    r = _trim(list(a))
    b = _trim(list(b))
    db = len(b) - 1
    lead_inv = pow(b[-1], p - 2, p) if p > 2 else 1
    while len(r) - 1 >= db:
        shift = len(r) - 1 - db
        c = (r[-1] * lead_inv) % p
        for i, bi in enumerate(b):
            r[shift + i] = (r[shift + i] - c * bi) % p
        _trim(r)
    return r


def _monic_polys(p: int, d: int):
    """All monic polynomials of degree ``d`` over GF(p)."""
    for n in range(p**d):
        coeffs = []
        for _ in range(d):
            n, r = divmod(n, p)
            coeffs.append(r)
        yield coeffs + [1]


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Irreducibility over GF(p) by trial division with every monic
    polynomial of degree at most ``deg/2``."""
    coeffs = _trim([c % p for c in coeffs])
    deg = len(coeffs) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_mod(coeffs, g, p):
                return False
    return True


def smallest_irreducible(p: int, m: int) -> list[int]:
    """Lexicographically smallest monic irreducible of degree ``m``.

    Candidates are ordered by the base-p integer ``a0 + a1*p + ...``.
    """
    for coeffs in _monic_polys(p, m):
        if is_irreducible(coeffs, p):
            return coeffs
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FieldCtx:
    """An explicit model of GF(p^m).

    Immutable after construction; tables are built lazily and are pure
    functions of ``(p, m, modulus)`` so a context can be shared freely.
    """

    def __init__(self, p: int, m: int, modulus: Sequence[int] | None = None,
                 *, tables: bool | None = None):
        if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
            raise ValueError(f"characteristic {p} is not prime")
        if m < 1:
            raise ValueError(f"extension degree must be >= 1, got {m}")
        p, m = int(p), int(m)
        q = p**m
        if q > MAX_ORDER:
            raise ValueError(f"field order {q} exceeds supported maximum {MAX_ORDER}")
        if modulus is None:
            modulus = smallest_irreducible(p, m)
        else:
            modulus = [int(c) for c in modulus]
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            if any(not 0 <= c < p for c in modulus):
                raise ValueError("modulus coefficients must lie in [0, p)")
            if not is_irreducible(modulus, p):
                raise ValueError(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.m = m
        self.q = q
        self.modulus = tuple(modulus)
        self.use_tables = (q <= TABLE_LIMIT) if tables is None else bool(tables)
        self._weights = np.array([p**i for i in range(m)], dtype=np.int64)

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, m={self.m}, modulus={list(self.modulus)})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, FieldCtx) and self.p == other.p
                and self.m == other.m and self.modulus == other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.modulus))

    # -- encoding -------------------------------------------------------------

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def to_digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.m):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_digits(self, digits: Sequence[int]) -> int:
        n = 0
        for d in reversed(digits):
            n = n * self.p + (d % self.p)
        return n

    def _check(self, *xs: int) -> None:
        for x in xs:
            if not 0 <= x < self.q:
                raise ValueError(f"{x} is not an element index of GF({self.q})")

    # -- scalar arithmetic ----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        if self.p == 2:
            return a ^ b
        p = self.p
        da, db = self.to_digits(a), self.to_digits(b)
        return self.from_digits([(x + y) % p for x, y in zip(da, db)])

    def neg(self, a: int) -> int:
        self._check(a)
        if self.p == 2:
            return a
        return self.from_digits([-x % self.p for x in self.to_digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul_reference(self, a: int, b: int) -> int:
        """Schoolbook product reduced modulo the modulus; no tables."""
        self._check(a, b)
        p = self.p
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(self.to_digits(a)):
            if x:
                for j, y in enumerate(self.to_digits(b)):
                    prod[i + j] = (prod[i + j] + x * y) % p
        return self.from_digits(self._reduce(prod))

    def _reduce(self, prod: list[int]) -> list[int]:
        m, p, mod = self.m, self.p, self.modulus
        for d in range(len(prod) - 1, m - 1, -1):
            c = prod[d]
            if c:
                for i in range(m):
                    prod[d - m + i] = (prod[d - m + i] - c * mod[i]) % p
                prod[d] = 0
        return prod[:m]

    def mul(self, a: int, b: int) -> int:
        if not self.use_tables:
            return self.mul_reference(a, b)
        self._check(a, b)
        if a == 0 or b == 0:
            return 0
        log, exp = self._tables
        return int(exp[(log[a] + log[b]) % (self.q - 1)])

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero has no inverse")
            return 1 if e == 0 else 0
        e %= self.q - 1
        if self.use_tables:
            log, exp = self._tables
            return int(exp[(int(log[a]) * e) % (self.q - 1)])
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul_reference(result, base)
            base = self.mul_reference(base, base)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.q)
        if self.use_tables:
            log, exp = self._tables
            return int(exp[(-int(log[a])) % (self.q - 1)])
        return self.pow(a, self.q - 2)

    def frobenius(self, a: int, ell: int) -> int:
        """``a ** (p ** ell)``."""
        if ell < 0:
            raise ValueError("Frobenius exponent must be nonnegative")
        return self.pow(a, pow(self.p, ell % self.m))

    def is_qr(self, a: int) -> bool:
        """Whether nonzero ``a`` is a square, for odd q."""
        if self.p == 2:
            raise ValueError("quadratic residues are only classified for odd q")
        if a == 0:
            raise ValueError("zero is neither a residue nor a non-residue")
        return self.pow(a, (self.q - 1) // 2) == 1

    # -- tables ---------------------------------------------------------------

    @cached_property
    def primitive_element(self) -> int:
        n = self.q - 1
        factors = prime_factors(n)
        for g in range(1, self.q):
            if all(self._pow_no_table(g, n // r) != 1 for r in factors):
                return g
        raise AssertionError("no primitive element")  # pragma: no cover

    def _pow_no_table(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul_reference(result, base)
            base = self.mul_reference(base, base)
            e >>= 1
        return result

    @cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        # antilog by doubling: exp[n:2n] = exp[0:n] * g^n
        n = self.q - 1
        g = self.primitive_element
        exp = np.ones(1, dtype=np.int64)
        step = g
        while len(exp) < n:
            nxt = self._vmul_poly(exp, np.full(len(exp), step, dtype=np.int64))
            exp = np.concatenate([exp, nxt])
            step = self._pow_no_table(step, 2)
        exp = exp[:n]
        log = np.zeros(self.q, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        exp.setflags(write=False)
        log.setflags(write=False)
        return log, exp

    # -- vectorized arithmetic ------------------------------------------------

    def vdigits(self, a: np.ndarray) -> np.ndarray:
        """Digit planes, shape ``(m,) + a.shape``."""
        a = np.asarray(a, dtype=np.int64)
        return (a[None, ...] // self._weights.reshape((-1,) + (1,) * a.ndim)) % self.p

    def vundigits(self, d: np.ndarray) -> np.ndarray:
        return np.tensordot(self._weights, d, axes=(0, 0))

    def vadd(self, a, b) -> np.ndarray:
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64),
                                   np.asarray(b, dtype=np.int64))
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        if self.q <= ADD_TABLE_LIMIT:
            return self._add_table[a, b].astype(np.int64)
        return self._vadd_digits(a, b)

    def _vadd_digits(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.vundigits((self.vdigits(a) + self.vdigits(b)) % self.p)

    @cached_property
    def _add_table(self) -> np.ndarray:
        x = self.elements()
        table = self._vadd_digits(x[:, None], x[None, :]).astype(np.int32)
        table.setflags(write=False)
        return table

    def vneg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a.copy()
        if self.m == 1:
            return (-a) % self.p
        return self.vundigits((-self.vdigits(a)) % self.p)

    def vsub(self, a, b) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def _vmul_poly(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64),
                                   np.asarray(b, dtype=np.int64))
        m, p, mod = self.m, self.p, self.modulus
        da, db = self.vdigits(a), self.vdigits(b)
        prod = np.zeros((2 * m - 1,) + a.shape, dtype=np.int64)
        for i in range(m):
            for j in range(m):
                prod[i + j] += da[i] * db[j]
        prod %= p
        for d in range(2 * m - 2, m - 1, -1):
            c = prod[d]
            for i in range(m):
                if mod[i]:
                    prod[d - m + i] = (prod[d - m + i] - c * mod[i]) % p
        return self.vundigits(prod[:m])

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if not self.use_tables:
            return self._vmul_poly(a, b)
        log, exp = self._tables
        out = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def vpow(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        zero = a == 0
        if e < 0 and zero.any():
            raise ZeroDivisionError("zero has no inverse")
        er = e % (self.q - 1)
        if self.use_tables:
            log, exp = self._tables
            out = exp[(log[a] * er) % (self.q - 1)]
        else:
            out = np.ones_like(a)
            base = a.copy()
            while er:
                if er & 1:
                    out = self._vmul_poly(out, base)
                base = self._vmul_poly(base, base)
                er >>= 1
        if e == 0:
            return np.ones_like(a)
        return np.where(zero, 0, out)

    def vinv(self, a) -> np.ndarray:
        return self.vpow(a, -1)

    # -- derived sets -----------------------------------------------------------

    @cached_property
    def squares(self) -> np.ndarray:
        """Sorted nonzero quadratic residues (odd q only)."""
        if self.p == 2:
            raise ValueError("quadratic residues are only classified for odd q")
        nz = np.arange(1, self.q, dtype=np.int64)
        qr = nz[self.vpow(nz, (self.q - 1) // 2) == 1]
        qr.setflags(write=False)
        return qr


def field_new(p: int, m: int, modulus: Sequence[int] | None = None,
              *, tables: bool | None = None) -> FieldCtx:
    return FieldCtx(p, m, modulus, tables=tables)


def gcd_delta(p: int, m: int, ell: int) -> int:
    """``gcd(p^ell + 1, p^m - 1)``: bounds the points at infinity of the
    curves in :mod:`qdesign.curves`."""
    if not 1 <= ell < m:
        raise ValueError(f"need 1 <= ell < m, got ell={ell}, m={m}")
    return gcd(p**ell + 1, p**m - 1)
