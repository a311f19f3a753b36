"""Binary quadratic forms of negative discriminant: reduction, Gauss
composition, class groups h(D), prime-form classes, and the exhaustive
norm-equation solver x^2 + n y^2 = m.

Forms (a, b, c) always have b^2 - 4ac = D < 0 and a > 0. The class of
(q, b, c) plays the role of the prime ideal above a split prime q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .arith import is_prime, legendre, sqrt_mod_prime


def check_discriminant(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant (need D<0, D=0,1 mod 4)")


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def inverse(self) -> "QuadForm":
        return reduce_form(QuadForm(self.a, -self.b, self.c))

    def __repr__(self):
        return f"({self.a},{self.b},{self.c})"


def reduce_form(f: QuadForm) -> QuadForm:
    """The reduced representative of f's class (standard reduction loop)."""
    a, b, c = f.a, f.b, f.c
    if a <= 0 or f.discriminant >= 0:
        raise ValueError(f"not a positive definite form: {f}")
    while True:
        if -a < b <= a <= c:
            if b < 0 and a == c:
                b = -b
            return QuadForm(a, b, c)
        # normalize: b into (-a, a]
        if b > a or b <= -a:
            r = (a - b) // (2 * a)
            b2 = b + 2 * r * a
            c = a * r * r + b * r + c
            b = b2
        if a > c:
            a, b, c = c, -b, a
        elif a == c and b < 0:
            b = -b


def principal_form(D: int) -> QuadForm:
    check_discriminant(D)
    k = D % 2
    return QuadForm(1, k, (k * k - D) // 4)


@dataclass(frozen=True)
class ClassGroupData:
    discriminant: int
    reduced_forms: tuple[QuadForm, ...]
    class_number: int


@lru_cache(maxsize=None)
def reduced_forms(D: int) -> ClassGroupData:
    """All primitive reduced forms of discriminant D (class_number = h(D))."""
    check_discriminant(D)
    forms = []
    b = D & 1
    bmax = math.isqrt(-D // 3)
    while b <= bmax:
        m = (b * b - D) // 4
        a = max(b, 1)
        while a * a <= m:
            if a != 0 and m % a == 0:
                c = m // a
                if a <= c and math.gcd(a, math.gcd(b, c)) == 1:
                    forms.append(QuadForm(a, b, c))
                    if 0 < b < a < c:
                        forms.append(QuadForm(a, -b, c))
            a += 1
        b += 2
    forms.sort()
    return ClassGroupData(D, tuple(forms), len(forms))


def class_number(D: int) -> int:
    return reduced_forms(D).class_number


def _solve_linear_mod(a: int, b: int, m: int) -> tuple[int, int]:
    """Solutions of a x = b (mod m) as x = u + k*v; returns (u, v)."""
    g = math.gcd(a, m)
    if b % g:
        raise ValueError("no solution")
    d = pow(a // g, -1, m // g) if m != g else 0
    return (b // g) * d % m, m // g


def compose_reduce(f1: QuadForm, f2: QuadForm) -> QuadForm:
    """Reduced representative of the Gauss composite of the two classes."""
    if f1.discriminant != f2.discriminant:
        raise ValueError("discriminant mismatch")
    a, b, c = f1.a, f1.b, f1.c
    alpha, beta, _gamma = f2.a, f2.b, f2.c
    g = (b + beta) // 2
    h = -(b - beta) // 2
    w = math.gcd(math.gcd(a, alpha), g)
    j = w
    s = a // w
    t = alpha // w
    u = g // w
    mu, nu = _solve_linear_mod(t * u, h * u + s * c, s * t)
    lam = _solve_linear_mod(t * nu, h - t * mu, s)[0]
    k = mu + nu * lam
    ell = (k * t - h) // s
    m = (t * u * k - h * u - c * s) // (s * t)
    A = s * t
    B = j * u - (k * t + ell * s)
    C = k * ell - j * m
    return reduce_form(QuadForm(A, B, C))


def compose_power(f: QuadForm, e: int) -> QuadForm:
    """e-th power of the class of f, reduced (square and multiply)."""
    if e < 0:
        return compose_power(f.inverse(), -e)
    acc = reduce_form(principal_form(f.discriminant))
    base = reduce_form(f)
    while e:
        if e & 1:
            acc = compose_reduce(acc, base)
        base = compose_reduce(base, base)
        e >>= 1
    return acc


def prime_form_class(D: int, q: int) -> tuple[QuadForm, bool] | None:
    """Reduced class of a form (q, b, c), plus a principality flag.

    None when (D/q) = -1; q | D (ramified) is rejected.
    """
    check_discriminant(D)
    if not is_prime(q) or q == 2:
        raise ValueError(f"{q} is not an odd prime")
    if D % q == 0:
        raise ValueError(f"ramified prime q={q} (q | D) not supported")
    if legendre(D, q) == -1:
        return None
    r = sqrt_mod_prime(D, q)
    # b = +-r mod q with b = D mod 2, so that b^2 = D mod 4q; the two
    # parity-correct candidates in [0, 2q) give the conjugate pair of classes.
    candidates = sorted({r, q - r, r + q, 2 * q - r})
    b = min(x for x in candidates if (x - D) % 2 == 0)
    c = (b * b - D) // (4 * q)
    form = reduce_form(QuadForm(q, b, c))
    return form, form == reduce_form(principal_form(D))


def solve_norm_eq(n: int, m: int) -> list[tuple[int, int]]:
    """All (x, y) with x^2 + n y^2 = m, x, y >= 0 (solutions up to sign)."""
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    out = []
    y = 0
    while n * y * y <= m:
        rest = m - n * y * y
        x = math.isqrt(rest)
        if x * x == rest:
            out.append((x, y))
        y += 1
    return out
