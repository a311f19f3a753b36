"""Exact arithmetic substrate: big integers, prime fields F_p, extensions
F_{p^m} (the quadratic one F_{p^2} in particular), and univariate polynomials
over them including root finding.

Field elements are plain values (int for F_p, tuple of ints for F_{p^m});
the field objects PrimeField / ExtField carry the modulus and the operations.
All values are immutable and all operations pure.
"""

from __future__ import annotations

import random
from functools import lru_cache

import numpy as np

from .errors import InternalError

# Deterministic Miller-Rabin base set: correct for all n < 3.3 * 10^24,
# which covers every integer this package ever tests.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

# Probabilistic tail for n >= 3.3e24: 24 extra fixed bases, error < 4^-24.
_MR_EXTRA_ROUNDS = 24


def _mix_seed(*parts: int) -> int:
    """Fold integers into one deterministic RNG seed (no hash salting)."""
    s = 0x9E3779B97F4A7C15
    for v in parts:
        s = (s * 0x100000001B3 + (v & 0xFFFFFFFFFFFFFFFF) + 0x9E37) % (1 << 64)
    return s


def is_prime(n: int) -> bool:
    """Miller-Rabin primality test, deterministic below 3.3e24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1

    def witness(a: int) -> bool:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            return False
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                return False
        return True

    bases = _MR_BASES
    if n >= 33 * 10**23:
        rng = random.Random(_mix_seed(n & ((1 << 64) - 1), 0xBA5E))
        bases = bases + tuple(rng.randrange(41, n - 2) for _ in range(_MR_EXTRA_ROUNDS))
    return not any(witness(a) for a in bases)


def primes_up_to(n: int) -> list[int]:
    """All primes <= n by sieve."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.nonzero(sieve)[0]]


def prime_range(start: int, stop: int):
    """Yield primes in [start, stop) in ascending order."""
    for p in primes_up_to(stop - 1):
        if p >= start:
            yield p


def legendre(a: int, m: int) -> int:
    """Legendre symbol (a/m) in {-1, 0, 1} for an odd prime m."""
    if m < 3 or m % 2 == 0 or not is_prime(m):
        raise ValueError(f"modulus {m} is not an odd prime")
    a %= m
    if a == 0:
        return 0
    t = pow(a, (m - 1) // 2, m)
    return 1 if t == 1 else -1


def sqrt_mod_prime(a: int, m: int) -> int | None:
    """Smallest square root of a mod the odd prime m, or None if (a/m) = -1.

    Tonelli-Shanks; returns min(r, m-r) for determinism.
    """
    if m < 3 or m % 2 == 0 or not is_prime(m):
        raise ValueError(f"modulus {m} is not an odd prime")
    a %= m
    if a == 0:
        return 0
    if legendre(a, m) == -1:
        return None
    if m % 4 == 3:
        r = pow(a, (m + 1) // 4, m)
    else:
        q, s = m - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (m - 1) // 2, m) != m - 1:
            z += 1
        c = pow(z, q, m)
        r = pow(a, (q + 1) // 2, m)
        t = pow(a, q, m)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % m
                i += 1
            b = pow(c, 1 << (s - i - 1), m)
            r = r * b % m
            c = b * b % m
            t = t * c % m
            s = i
    return min(r, m - r)


def find_nonresidue(p: int) -> int:
    """Smallest positive quadratic nonresidue mod p."""
    for n in range(2, p):
        if pow(n, (p - 1) // 2, p) == p - 1:
            return n
    raise ValueError(f"no nonresidue mod {p}")


# ---------------------------------------------------------------------------
# fields


class PrimeField:
    """F_p with elements represented as canonical ints in [0, p)."""

    degree = 1

    def __init__(self, p: int):
        if p < 3 or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
        self.p = p
        self.order = p
        self.zero = 0
        self.one = 1

    def __repr__(self):
        return f"F_{self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def from_int(self, n: int) -> int:
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def pow(self, a, e: int):
        return pow(a, e, self.p)

    def rand(self, rng: random.Random):
        return rng.randrange(self.p)

    def is_zero(self, a):
        return a == 0


@lru_cache(maxsize=None)
def _ext_reduction_rows(p: int, modulus: tuple[int, ...]) -> np.ndarray:
    """Rows r_i with t^(m+i) = r_i over F_p, for i in [0, m-1)."""
    m = len(modulus) - 1
    rows = np.zeros((max(m - 1, 1), m), dtype=np.int64)
    # t^m = -(modulus[:m])
    cur = [(-c) % p for c in modulus[:m]]
    for i in range(m - 1):
        rows[i] = cur
        top = cur[m - 1]
        cur = [0] + cur[:-1]
        for k in range(m):
            cur[k] = (cur[k] + top * rows[0][k]) % p
    return rows


class ExtField:
    """F_{p^m} = F_p[t]/(modulus), elements as length-m tuples of ints.

    modulus is monic, coefficients lowest degree first, length m+1.
    """

    def __init__(self, p: int, modulus: tuple[int, ...]):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        modulus = tuple(c % p for c in modulus)
        if len(modulus) < 3 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree >= 2")
        self.p = p
        self.modulus = modulus
        self.degree = len(modulus) - 1
        self.order = p**self.degree
        m = self.degree
        self.zero = (0,) * m
        self.one = (1,) + (0,) * (m - 1)
        self.gen = (0, 1) + (0,) * (m - 2)
        self._red = _ext_reduction_rows(p, modulus)

    @classmethod
    def quadratic(cls, p: int) -> "ExtField":
        """The canonical F_{p^2}: t^2 = smallest nonresidue mod p."""
        nr = find_nonresidue(p)
        fld = cls(p, ((-nr) % p, 0, 1))
        fld.nonresidue = nr
        return fld

    def __repr__(self):
        return f"F_{self.p}^{self.degree}"

    def __eq__(self, other):
        return (
            isinstance(other, ExtField)
            and other.p == self.p
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("Fq", self.p, self.modulus))

    def from_int(self, n: int):
        return (n % self.p,) + (0,) * (self.degree - 1)

    def embed(self, a) -> tuple:
        """Lift an F_p element (int) into this field."""
        return self.from_int(a)

    def is_constant(self, a) -> bool:
        return all(c == 0 for c in a[1:])

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def mul(self, a, b):
        p = self.p
        m = self.degree
        if m == 2:
            a0, a1 = a
            b0, b1 = b
            nr = (-self.modulus[0]) % p
            return ((a0 * b0 + nr * a1 * b1) % p, (a0 * b1 + a1 * b0) % p)
        conv = np.convolve(np.asarray(a, dtype=object), np.asarray(b, dtype=object))
        low = [int(c) % p for c in conv[:m]]
        for i, c in enumerate(conv[m:]):
            ci = int(c) % p
            if ci:
                row = self._red[i]
                for k in range(m):
                    low[k] = (low[k] + ci * int(row[k])) % p
        return tuple(low)

    def scalar_mul(self, c: int, a):
        p = self.p
        c %= p
        return tuple(c * x % p for x in a)

    def inv(self, a):
        if all(c == 0 for c in a):
            raise ZeroDivisionError("inverse of 0")
        if self.degree == 2:
            a0, a1 = a
            p = self.p
            nr = (-self.modulus[0]) % p
            den = (a0 * a0 - nr * a1 * a1) % p
            dinv = pow(den, p - 2, p)
            return (a0 * dinv % p, -a1 * dinv % p)
        return self.pow(a, self.order - 2)

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        acc = self.one
        base = a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def frobenius(self, a):
        return self.pow(a, self.p)

    def rand(self, rng: random.Random):
        return tuple(rng.randrange(self.p) for _ in range(self.degree))

    def is_zero(self, a):
        return all(c == 0 for c in a)

    def sqrt(self, a, seed: int = 1):
        """A square root of a in this field, or None; Tonelli-Shanks.

        Returns the lexicographically smaller of the two roots.
        """
        if self.is_zero(a):
            return self.zero
        q = self.order
        if self.pow(a, (q - 1) // 2) != self.one:
            return None
        if q % 4 == 3:
            r = self.pow(a, (q + 1) // 4)
        else:
            e, s = q - 1, 0
            while e % 2 == 0:
                e //= 2
                s += 1
            rng = random.Random(_mix_seed(self.p, self.degree, seed, 0x5147))
            while True:
                z = self.rand(rng)
                if not self.is_zero(z) and self.pow(z, (q - 1) // 2) != self.one:
                    break
            c = self.pow(z, e)
            r = self.pow(a, (e + 1) // 2)
            t = self.pow(a, e)
            m = s
            while t != self.one:
                i, t2 = 0, t
                while t2 != self.one:
                    t2 = self.mul(t2, t2)
                    i += 1
                b = self.pow(c, 1 << (m - i - 1))
                r = self.mul(r, b)
                c = self.mul(b, b)
                t = self.mul(t, c)
                m = i
        return min(r, self.neg(r))


# ---------------------------------------------------------------------------
# polynomials

# A polynomial is a Python list of field elements, lowest degree first, with
# no trailing zeros (the zero polynomial is the empty list).


def poly_trim(f: list) -> list:
    while f and (f[-1] == 0 or (isinstance(f[-1], tuple) and all(c == 0 for c in f[-1]))):
        f.pop()
    return f


def poly_from_ints(field, coeffs) -> list:
    return poly_trim([field.from_int(c) for c in coeffs])


def poly_deg(f: list) -> int:
    return len(f) - 1


def poly_add(field, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else field.zero
        b = g[i] if i < len(g) else field.zero
        out.append(field.add(a, b))
    return poly_trim(out)


def poly_sub(field, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else field.zero
        b = g[i] if i < len(g) else field.zero
        out.append(field.sub(a, b))
    return poly_trim(out)


def poly_scale(field, c, f):
    if field.is_zero(c):
        return []
    return poly_trim([field.mul(c, a) for a in f])


def poly_mul(field, f, g):
    if not f or not g:
        return []
    if isinstance(field, PrimeField):
        p = field.p
        fa = np.asarray(f, dtype=np.int64)
        ga = np.asarray(g, dtype=np.int64)
        if min(len(f), len(g)) * (p - 1) * (p - 1) < (1 << 62):
            conv = np.convolve(fa, ga) % p
            return poly_trim([int(c) for c in conv])
        conv = np.convolve(np.asarray(f, dtype=object), np.asarray(g, dtype=object))
        return poly_trim([int(c) % p for c in conv])
    if isinstance(field, ExtField) and field.degree >= 2 and min(len(f), len(g)) >= 8:
        return _ext_poly_mul_fast(field, f, g)
    out = [field.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if field.is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = field.add(out[i + j], field.mul(a, b))
    return poly_trim(out)


def _ext_poly_mul_fast(field: ExtField, f, g):
    """Componentwise-convolution product for polynomials over F_{p^m}."""
    p, m = field.p, field.degree
    nf, ng = len(f), len(g)
    fa = np.asarray(f, dtype=np.int64)  # (nf, m)
    ga = np.asarray(g, dtype=np.int64)
    n_out = nf + ng - 1
    # accumulate convolutions per pair of t-components; guard int64 overflow
    if min(nf, ng) * (p - 1) * (p - 1) * m >= (1 << 62):
        fa = fa.astype(object)
        ga = ga.astype(object)
    acc = [np.zeros(n_out, dtype=fa.dtype) for _ in range(2 * m - 1)]
    for s in range(m):
        col = fa[:, s]
        if not col.any():
            continue
        for t in range(m):
            colg = ga[:, t]
            if not colg.any():
                continue
            acc[s + t] = acc[s + t] + np.convolve(col, colg)
    red = field._red
    low = [acc[k] % p for k in range(m)]
    for i in range(m - 1):
        hi = acc[m + i] % p
        if not np.any(hi):
            continue
        row = red[i]
        for k in range(m):
            if row[k]:
                low[k] = (low[k] + hi * int(row[k])) % p
    out = [tuple(int(low[k][idx]) for k in range(m)) for idx in range(n_out)]
    return poly_trim(out)


def poly_divmod(field, f, g):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    dg = poly_deg(g)
    lead_inv = field.inv(g[-1])
    q = [field.zero] * max(0, len(f) - dg)
    while poly_deg(f) >= dg and f:
        df = poly_deg(f)
        c = field.mul(f[-1], lead_inv)
        q[df - dg] = c
        for k in range(dg + 1):
            f[df - dg + k] = field.sub(f[df - dg + k], field.mul(c, g[k]))
        poly_trim(f)
    return poly_trim(q), f


def poly_mod(field, f, g):
    return poly_divmod(field, f, g)[1]


def poly_gcd(field, f, g):
    f, g = list(f), list(g)
    while g:
        f, g = g, poly_mod(field, f, g)
    if f:
        f = poly_scale(field, field.inv(f[-1]), f)  # monic
    return f


def poly_pow_mod(field, f, e: int, mod):
    acc = [field.one]
    base = poly_mod(field, f, mod)
    while e:
        if e & 1:
            acc = poly_mod(field, poly_mul(field, acc, base), mod)
        base = poly_mod(field, poly_mul(field, base, base), mod)
        e >>= 1
    return acc


def poly_eval(field, f, x):
    acc = field.zero
    for c in reversed(f):
        acc = field.add(field.mul(acc, x), c)
    return acc


def poly_derivative(field, f):
    out = []
    for i in range(1, len(f)):
        ci = field.mul(field.from_int(i), f[i])
        out.append(ci)
    return poly_trim(out)


def poly_monic(field, f):
    if not f:
        return f
    return poly_scale(field, field.inv(f[-1]), f)


def squarefree_part(field, f):
    """Product of the distinct irreducible factors of f (monic)."""
    if not f:
        raise ValueError("zero polynomial")
    p = field.p
    f = poly_monic(field, f)
    if poly_deg(f) == 0:
        return f
    d = poly_derivative(field, f)
    if not d:
        # f = g(t^p) = g(t)^p in characteristic p (over F_p; over F_{p^m}
        # the p-th-root map twists coefficients by the inverse Frobenius)
        step = p ** (field.degree - 1) if isinstance(field, ExtField) else 1
        g = []
        for i in range(0, len(f), p):
            c = f[i]
            g.append(field.pow(c, step) if isinstance(field, ExtField) else c)
        return squarefree_part(field, g)
    g = poly_gcd(field, f, d)
    w, _ = poly_divmod(field, f, g)
    if poly_deg(g) == 0:
        return w
    # factors of multiplicity divisible by p survive in g / gcd-chain
    rest = g
    while True:
        h = poly_gcd(field, rest, w)
        if poly_deg(h) == 0:
            break
        rest, _ = poly_divmod(field, rest, h)
    if poly_deg(rest) == 0:
        return w
    return poly_monic(field, poly_mul(field, w, squarefree_part(field, rest)))


def _equal_degree_split(field, f, d: int, rng: random.Random):
    """Cantor-Zassenhaus split of f (product of degree-d irreducibles)."""
    n = poly_deg(f)
    if n == d:
        return [poly_monic(field, f)]
    q = field.order
    e = (q**d - 1) // 2
    while True:
        r = poly_trim([field.rand(rng) for _ in range(n)])
        if poly_deg(r) < 1:
            continue
        g = poly_gcd(field, r, f)
        if not (0 < poly_deg(g) < n):
            h = poly_pow_mod(field, r, e, f)
            g = poly_gcd(field, poly_sub(field, h, [field.one]), f)
            if not (0 < poly_deg(g) < n):
                continue
        other, _ = poly_divmod(field, f, g)
        return _equal_degree_split(field, g, d, rng) + _equal_degree_split(
            field, other, d, rng
        )


def poly_factor_squarefree(field, f, seed: int = 1):
    """Irreducible factors of a squarefree monic f (distinct-degree + CZ)."""
    rng = random.Random(_mix_seed(field.p, field.degree, len(f), seed, 0xFAC7))
    factors = []
    h = [field.zero, field.one]  # x
    v = list(f)
    d = 0
    x = [field.zero, field.one]
    while poly_deg(v) >= 1:
        d += 1
        if 2 * d > poly_deg(v):
            factors.append(v)
            break
        h = poly_pow_mod(field, h, field.order, v)
        g = poly_gcd(field, poly_sub(field, h, x), v)
        if poly_deg(g) > 0:
            factors.extend(_equal_degree_split(field, g, d, rng))
            v, _ = poly_divmod(field, v, g)
            h = poly_mod(field, h, v)
    return sorted(factors, key=lambda fac: (len(fac), fac))


def poly_roots(field, f, seed: int = 1) -> list[tuple]:
    """All roots of f in the field, as (root, multiplicity), sorted.

    Raises ValueError on the zero polynomial.
    """
    if not f:
        raise ValueError("zero polynomial")
    if poly_deg(f) == 0:
        return []
    sf = squarefree_part(field, f)
    # linear part: gcd(x^q - x, sf)
    x = [field.zero, field.one]
    xq = poly_pow_mod(field, x, field.order, sf)
    lin = poly_gcd(field, poly_sub(field, xq, x), sf)
    roots = []
    if poly_deg(lin) >= 1:
        rng = random.Random(_mix_seed(field.p, field.degree, len(f), seed, 0x2007))
        roots = _linear_roots(field, lin, rng)
    out = []
    for r in sorted(roots):
        mult = 0
        g = list(f)
        while True:
            q, rem = poly_divmod(field, g, [field.neg(r), field.one])
            if rem:
                break
            mult += 1
            g = q
        out.append((r, mult))
    return out


def _linear_roots(field, f, rng):
    """Roots of a split squarefree monic polynomial."""
    n = poly_deg(f)
    if n == 0:
        return []
    if n == 1:
        return [field.neg(f[0])]
    q = field.order
    while True:
        a = field.rand(rng)
        # gcd((x+a)^((q-1)/2) - 1, f)
        shifted = [a, field.one]
        h = poly_pow_mod(field, shifted, (q - 1) // 2, f)
        h = poly_sub(field, h, [field.one])
        g = poly_gcd(field, h, f)
        if 0 < poly_deg(g) < n:
            other, _ = poly_divmod(field, f, g)
            return _linear_roots(field, g, rng) + _linear_roots(field, other, rng)


def poly_splits_linear(f, ell: int) -> bool:
    """True iff f factors into linear factors over F_ell.

    Implemented as: the squarefree part of f divides x^ell - x.
    """
    if ell < 3 or not is_prime(ell):
        raise ValueError(f"{ell} is not an odd prime")
    field = PrimeField(ell)
    g = poly_from_ints(field, f)
    if not g:
        raise ValueError("zero polynomial")
    if poly_deg(g) == 0:
        return True
    sf = squarefree_part(field, g)
    x = [0, 1]
    xq = poly_pow_mod(field, x, ell, sf)
    return poly_sub(field, xq, poly_mod(field, x, sf)) == []


def find_irreducible(p: int, m: int, seed: int = 1) -> tuple[int, ...]:
    """A monic irreducible of degree m over F_p, deterministic for a seed."""
    if m == 1:
        return (0, 1)
    field = PrimeField(p)
    rng = random.Random(_mix_seed(p, m, seed, 0x1BBE))
    mdivs = sorted({m // r for r in range(2, m + 1) if m % r == 0 and is_prime(r)})
    x = [0, 1]
    while True:
        f = [rng.randrange(p) for _ in range(m)] + [1]
        if _is_irreducible(field, f, p, m, mdivs, x):
            return tuple(f)


def _is_irreducible(field, f, p, m, mdivs, x):
    xq = poly_pow_mod(field, x, p**m, f)
    if poly_sub(field, xq, x):
        return False
    for d in mdivs:
        xd = poly_pow_mod(field, x, p**d, f)
        g = poly_gcd(field, poly_sub(field, xd, x), f)
        if poly_deg(g) != 0:
            return False
    return True


def ext_field(p: int, m: int, seed: int = 1) -> ExtField:
    """F_{p^m} over a deterministically chosen irreducible modulus."""
    if m == 2:
        return ExtField.quadratic(p)
    return ExtField(p, find_irreducible(p, m, seed))


def fp2_coords(field: ExtField, a) -> tuple[int, int]:
    """Coordinates of a as c0 + c1*t in the canonical F_{p^2}."""
    if field.degree != 2:
        raise ValueError("not a quadratic extension")
    return (a[0], a[1])


def embed_fp2(big: ExtField, fp2: ExtField, seed: int = 1):
    """Embedding F_{p^2} -> F_{p^(2m)}: returns the map as a callable.

    Requires big.degree even; the image of t is the canonical square root of
    the F_{p^2} nonresidue in the big field.
    """
    if big.p != fp2.p or big.degree % 2 != 0:
        raise ValueError("incompatible fields")
    nr = fp2.nonresidue
    t_img = big.sqrt(big.from_int(nr), seed=seed)
    if t_img is None:
        raise InternalError("nonresidue must be square in an even-degree extension")

    def phi(a):
        c0, c1 = a
        return big.add(big.from_int(c0), big.scalar_mul(c1, t_img))

    phi.t_image = t_img
    return phi


def project_fp2(big: ExtField, fp2: ExtField, t_img, a):
    """Inverse of embed_fp2 on its image; raises InternalError off-image."""
    p = big.p
    conj = big.pow(a, p)  # Frobenius fixes F_p, negates the t-component
    two_inv = pow(2, p - 2, p)
    s = big.scalar_mul(two_inv, big.add(a, conj))
    d = big.scalar_mul(two_inv, big.sub(a, conj))
    c1v = big.mul(d, big.inv(t_img))
    if any(c != 0 for c in s[1:]) or any(c != 0 for c in c1v[1:]):
        raise InternalError("element does not lie in the embedded F_{p^2}")
    return (s[0], c1v[0])
