"""Hilbert class polynomials H_D over Z via high-precision evaluation of
j(tau) at CM points, reductions mod primes, the delta indicator (two
independent methods, cross-checked on every call), and an on-disk cache.

H_D is computed from the q-expansion j = E4^3 / Delta at tau = (-b+sqrt(D))/2a
for each reduced form, multiplied into a real-coefficient polynomial, rounded,
then recomputed at doubled precision; the two integer vectors must agree.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import mpmath

from .arith import (
    PrimeField,
    is_prime,
    legendre,
    poly_from_ints,
    poly_roots,
    poly_splits_linear,
)
from .errors import DataError, InternalError, ResourceError
from .quad_class import check_discriminant, reduced_forms

# escalation stops here; hit only far beyond the package's |D| range
_PRECISION_CEILING_BITS = 1 << 21


@dataclass(frozen=True)
class ClassPolynomial:
    """H_D as exact integers, lowest degree first, monic of degree h(D)."""

    discriminant: int
    coefficients: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


def required_bits(D: int) -> int:
    """Precision estimate: pi*sqrt|D|*sum(1/a) / ln2 + 64 + 10 h(D)."""
    cls = reduced_forms(D)
    s = math.fsum(1.0 / f.a for f in cls.reduced_forms)
    return int(math.pi * math.isqrt(-D) * s / math.log(2)) + 64 + 10 * cls.class_number


@lru_cache(maxsize=None)
def _sigma3(n: int) -> int:
    return sum(d**3 for d in range(1, n + 1) if n % d == 0)


def _j_from_q(q, prec_bits: int):
    """j(tau) for q = exp(2 pi i tau), |q| small; E4^3 / (q * eta_part^24)."""
    tol = mpmath.mpf(2) ** (-(prec_bits + 20))
    absq = abs(q)
    # E4 = 1 + 240 sum sigma3(n) q^n
    e4 = mpmath.mpf(1)
    qn = q
    n = 1
    while True:
        e4 += 240 * _sigma3(n) * qn
        # tail: sigma3(m) <= 1.21 m^3, geometric after the cubic factor
        bound = 300 * (n + 1) ** 3 * absq ** (n + 1) / (1 - absq)
        if bound < tol:
            break
        qn *= q
        n += 1
    # eta-quotient part: f = prod (1 - q^n) = sum_k (-1)^k q^(k(3k±1)/2)
    f = mpmath.mpf(1)
    k = 1
    while True:
        e1 = k * (3 * k - 1) // 2
        e2 = k * (3 * k + 1) // 2
        if absq**e1 / (1 - absq) < tol:
            break
        term = q**e1 + q**e2
        f += term if k % 2 == 0 else -term
        k += 1
    delta_over_q = f**24
    return e4**3 / (q * delta_over_q)


def _compute_coefficients(D: int, prec_bits: int) -> tuple[list[int], float]:
    """One evaluation pass; returns rounded coefficients and the worst residual."""
    cls = reduced_forms(D)
    sqrt_absD = mpmath.sqrt(-D)
    poly = [mpmath.mpf(1)]

    def mul_in(factor):
        nonlocal poly
        out = [mpmath.mpf(0)] * (len(poly) + len(factor) - 1)
        for i, ci in enumerate(poly):
            for j, fj in enumerate(factor):
                out[i + j] += ci * fj
        poly = out

    with mpmath.workprec(prec_bits):
        sqrt_absD = mpmath.sqrt(mpmath.mpf(-D))
        for f in cls.reduced_forms:
            if f.b < 0:
                continue
            # tau = (-b + i sqrt|D|) / 2a; q = exp(2 pi i tau)
            r = mpmath.exp(-mpmath.pi * sqrt_absD / f.a)
            theta = -mpmath.pi * mpmath.mpf(f.b) / f.a
            q = r * (mpmath.cos(theta) + 1j * mpmath.sin(theta))
            jv = _j_from_q(q, prec_bits)
            ambiguous = f.b == 0 or f.b == f.a or f.a == f.c
            if ambiguous:
                # self-conjugate class: j is real
                mul_in([-jv.real, mpmath.mpf(1)])
            else:
                re, im = jv.real, jv.imag
                mul_in([re * re + im * im, -2 * re, mpmath.mpf(1)])
        ints = []
        worst = 0.0
        for c in poly:
            r = mpmath.nint(c)
            worst = max(worst, float(abs(c - r)))
            ints.append(int(r))
    return ints, worst


def _cache_path(cache_dir, D: int) -> Path:
    return Path(cache_dir) / f"H_{-D}.txt"


def cache_file_text(cp: ClassPolynomial) -> str:
    lines = [f"D={cp.discriminant} h={cp.degree}"]
    lines.extend(str(c) for c in cp.coefficients)
    return "\n".join(lines) + "\n"


def _read_cache(cache_dir, D: int) -> ClassPolynomial | None:
    path = _cache_path(cache_dir, D)
    if not path.is_file():
        return None
    try:
        lines = path.read_text().split("\n")
        head = lines[0].split()
        d_val = int(head[0].split("=")[1])
        h_val = int(head[1].split("=")[1])
        coeffs = tuple(int(x) for x in lines[1 : h_val + 2])
    except (ValueError, IndexError) as exc:
        raise DataError(f"corrupt cache file {path}: {exc}") from exc
    if d_val != D or len(coeffs) != h_val + 1 or coeffs[-1] != 1:
        raise DataError(f"cache file {path} inconsistent with D={D}")
    return ClassPolynomial(D, coeffs)


def _write_cache(cache_dir, cp: ClassPolynomial) -> None:
    path = _cache_path(cache_dir, cp.discriminant)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(cache_file_text(cp))
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


_memo: dict[int, ClassPolynomial] = {}


def hilbert_class_poly(D: int, cache_dir=None) -> ClassPolynomial:
    """Exact H_D; precision-escalated until two passes agree coefficientwise."""
    check_discriminant(D)
    cp = _memo.get(D)
    if cp is not None:
        return cp
    if cache_dir is not None:
        cp = _read_cache(cache_dir, D)
        if cp is not None:
            _memo[D] = cp
            return cp
    h = reduced_forms(D).class_number
    bits = required_bits(D)
    while True:
        if 2 * bits > _PRECISION_CEILING_BITS:
            raise ResourceError(f"precision ceiling exceeded for H_{D}")
        ints1, res1 = _compute_coefficients(D, bits)
        ints2, res2 = _compute_coefficients(D, 2 * bits)
        if ints1 == ints2 and max(res1, res2) < 0.25:
            break
        bits *= 2
    if len(ints1) != h + 1 or ints1[-1] != 1:
        raise InternalError(f"H_{D}: degree {len(ints1)-1} != h {h} or not monic")
    cp = ClassPolynomial(D, tuple(ints1))
    _memo[D] = cp
    if cache_dir is not None:
        _write_cache(cache_dir, cp)
    return cp


def hilbert_mod(D: int, m: int, cache_dir=None) -> list[int]:
    """H_D reduced coefficientwise mod the prime m (lowest degree first)."""
    if not is_prime(m):
        raise ValueError(f"{m} is not prime")
    cp = hilbert_class_poly(D, cache_dir=cache_dir)
    return [c % m for c in cp.coefficients]


def hilbert_roots_mod(D: int, p: int, cache_dir=None) -> list[int]:
    """Sorted F_p-roots of H_D mod p (distinct roots, multiplicity ignored)."""
    field = PrimeField(p)
    f = poly_from_ints(field, hilbert_mod(D, p, cache_dir=cache_dir))
    if not f:
        # H_D = 0 mod p cannot happen (monic); zero only if degree-0 content
        raise InternalError(f"H_{D} vanished mod {p}")
    return [r for r, _ in poly_roots(field, f)]


def delta(D: int, ell: int, cache_dir=None) -> int:
    """+1 iff (D/ell)=1 and H_D splits into linear factors over F_ell.

    Computed both ways (class-polynomial splitting, and solvability of
    4 ell = t^2 - v^2 D with ell not dividing t); disagreement is an
    internal error.
    """
    check_discriminant(D)
    if ell == 2 or not is_prime(ell):
        raise ValueError(f"{ell} is not an odd prime")
    if D % ell == 0:
        raise ValueError(f"ell={ell} divides D={D}")
    split_method = legendre(D, ell) == 1 and poly_splits_linear(
        hilbert_mod(D, ell, cache_dir=cache_dir), ell
    )
    norm_method = False
    v = 1
    while v * v * (-D) <= 4 * ell:
        rest = 4 * ell + v * v * D
        t = math.isqrt(rest)
        if t * t == rest and t % ell != 0:
            norm_method = True
            break
        v += 1
    if split_method != norm_method:
        raise InternalError(
            f"delta disagreement for D={D}, ell={ell}: "
            f"splitting={split_method}, norm equation={norm_method}"
        )
    return 1 if split_method else -1
