"""Elliptic curves over F_p and F_{p^2}: supersingularity testing (Hasse
invariant), enumeration of supersingular j-invariants, curve <-> j
conversions, and a Velu-style ell-isogeny neighbor oracle.

The neighbor oracle factors the ell-division polynomial over the smallest
extension containing all kernel x-coordinates, groups roots into the ell+1
order-ell kernels via multiplication-by-m maps, and pushes each kernel
through Velu's formulas. It is the independent ground truth for the
modular-polynomial production path in isogeny_graph.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import (
    ExtField,
    PrimeField,
    embed_fp2,
    ext_field,
    is_prime,
    poly_deg,
    poly_eval,
    poly_factor_squarefree,
    poly_mul,
    poly_roots,
    poly_scale,
    poly_sub,
    poly_trim,
    project_fp2,
)
from .errors import InternalError


@lru_cache(maxsize=None)
def fp2(p: int) -> ExtField:
    """The canonical F_{p^2} for this package (t^2 = smallest nonresidue)."""
    return ExtField.quadratic(p)


@dataclass(frozen=True)
class Curve:
    """Short Weierstrass y^2 = x^3 + A x + B over `field`."""

    field: object
    A: object
    B: object

    def __post_init__(self):
        F = self.field
        disc = F.add(
            F.mul(F.from_int(4), F.pow(self.A, 3)),
            F.mul(F.from_int(27), F.mul(self.B, self.B)),
        )
        if F.is_zero(disc):
            raise ValueError(f"singular curve A={self.A}, B={self.B}")


def j_invariant(curve: Curve):
    """1728 * 4A^3 / (4A^3 + 27B^2)."""
    F = curve.field
    a3 = F.mul(F.from_int(4), F.pow(curve.A, 3))
    den = F.add(a3, F.mul(F.from_int(27), F.mul(curve.B, curve.B)))
    return F.mul(F.from_int(1728), F.mul(a3, F.inv(den)))


def curve_from_j(j, field) -> Curve:
    """A fixed curve with the given j-invariant (canonical twist choice).

    A = 3j(1728-j), B = 2j(1728-j)^2; nonsingular for every j outside
    {0, 1728} since 4A^3 + 27B^2 = 108 * 1728 * j^2 (1728-j)^3.
    """
    j = field.from_int(j) if isinstance(j, int) else j
    if field.is_zero(j):
        return Curve(field, field.zero, field.one)
    if j == field.from_int(1728):
        return Curve(field, field.one, field.zero)
    d = field.sub(field.from_int(1728), j)
    A = field.mul(field.from_int(3), field.mul(j, d))
    B = field.mul(field.from_int(2), field.mul(j, field.mul(d, d)))
    return Curve(field, A, B)


@lru_cache(maxsize=None)
def _factorials_mod(p: int):
    fact = [1] * p
    for i in range(1, p):
        fact[i] = fact[i - 1] * i % p
    invf = [1] * p
    invf[p - 1] = pow(fact[p - 1], p - 2, p)
    for i in range(p - 1, 0, -1):
        invf[i - 1] = invf[i] * i % p
    return fact, invf


def hasse_coefficient(curve: Curve):
    """Coefficient of x^(p-1) in (x^3 + Ax + B)^((p-1)/2).

    Closed multinomial sum with O(p/12) terms; works over F_p and F_{p^2}
    (vanishing over F_{p^2} is still equivalent to supersingularity).
    """
    F = curve.field
    p = F.p
    fact, invf = _factorials_mod(p)
    n = (p - 1) // 2
    i_min = -((-(p - 1)) // 4)  # ceil((p-1)/4)
    i_max = (p - 1) // 3
    acc = F.zero
    a_zero = F.is_zero(curve.A)
    b_zero = F.is_zero(curve.B)
    for i in range(i_min, i_max + 1):
        jj = p - 1 - 3 * i
        kk = 2 * i - n
        if a_zero and jj > 0:
            continue
        if b_zero and kk > 0:
            continue
        m = fact[n] * invf[i] % p * invf[jj] % p * invf[kk] % p
        term = F.from_int(m)
        if jj:
            term = F.mul(term, F.pow(curve.A, jj))
        if kk:
            term = F.mul(term, F.pow(curve.B, kk))
        acc = F.add(acc, term)
    return acc


def is_supersingular(curve: Curve) -> bool:
    """True iff the Hasse invariant vanishes."""
    return curve.field.is_zero(hasse_coefficient(curve))


@lru_cache(maxsize=None)
def supersingular_j_list(p: int) -> tuple[int, ...]:
    """All supersingular j-invariants in F_p, ascending."""
    if p <= 3 or not is_prime(p):
        raise ValueError(f"p={p} must be a prime > 3")
    field = PrimeField(p)
    out = []
    for j in range(p):
        if is_supersingular(curve_from_j(j, field)):
            out.append(j)
    return tuple(out)


def supersingular_count_formula(p: int) -> int:
    """Class-number count of supersingular j in F_p (three residue cases)."""
    from .quad_class import class_number

    if p % 4 == 1:
        return class_number(-4 * p) // 2
    if p % 8 == 7:
        return class_number(-p)
    return 2 * class_number(-p)


def point_count(curve: Curve) -> int:
    """#E(F_p) by direct x-sweep (test oracle; F_p curves only)."""
    F = curve.field
    if not isinstance(F, PrimeField):
        raise ValueError("point_count is for curves over F_p")
    p = F.p
    x = np.arange(p, dtype=np.int64)
    fx = (pow_mod_vec(x, 3, p) + int(curve.A) * x + int(curve.B)) % p
    is_sq = np.zeros(p, dtype=bool)
    is_sq[np.unique(np.arange(p, dtype=np.int64) ** 2 % p)] = True
    chi = np.where(fx == 0, 0, np.where(is_sq[fx], 1, -1))
    return int(p + 1 + chi.sum())


def pow_mod_vec(x: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(x)
    base = x % p
    while e:
        if e & 1:
            out = out * base % p
        base = base * base % p
        e >>= 1
    return out


# ---------------------------------------------------------------------------
# division polynomials and Velu neighbors


def division_poly_table(field, A, B, top: int) -> dict[int, list]:
    """y-free division polynomials t_m for m <= top.

    psi_m = t_m for odd m and psi_m = y * t_m for even m, over y^2 = f(x).
    """
    f = [B, A, field.zero, field.one]
    two_inv = field.inv(field.from_int(2))
    t: dict[int, list] = {
        0: [],
        1: [field.one],
        2: [field.from_int(2)],
        3: poly_trim(
            [
                field.neg(field.mul(A, A)),
                field.mul(field.from_int(12), B),
                field.mul(field.from_int(6), A),
                field.zero,
                field.from_int(3),
            ]
        ),
    }
    t[4] = poly_scale(
        field,
        field.from_int(4),
        poly_trim(
            [
                field.sub(
                    field.neg(field.pow(A, 3)),
                    field.mul(field.from_int(8), field.mul(B, B)),
                ),
                field.mul(field.from_int(-4), field.mul(A, B)),
                field.mul(field.from_int(-5), field.mul(A, A)),
                field.mul(field.from_int(20), B),
                field.mul(field.from_int(5), A),
                field.zero,
                field.one,
            ]
        ),
    )
    f2 = poly_mul(field, f, f)

    def get(m: int) -> list:
        if m in t:
            return t[m]
        h = m // 2
        if m % 2 == 1:
            left = poly_mul(field, get(h + 2), poly_mul(field, get(h), poly_mul(field, get(h), get(h))))
            ga = get(h + 1)
            right = poly_mul(field, get(h - 1), poly_mul(field, ga, poly_mul(field, ga, ga)))
            if h % 2 == 0:
                res = poly_sub(field, poly_mul(field, f2, left), right)
            else:
                res = poly_sub(field, left, poly_mul(field, f2, right))
        else:
            gm1, gp1 = get(h - 1), get(h + 1)
            inner = poly_sub(
                field,
                poly_mul(field, get(h + 2), poly_mul(field, gm1, gm1)),
                poly_mul(field, get(h - 2), poly_mul(field, gp1, gp1)),
            )
            res = poly_scale(field, two_inv, poly_mul(field, get(h), inner))
        t[m] = res
        return res

    for m in range(5, top + 1):
        get(m)
    return t


def _multiple_x(field, table, f, x, k: int):
    """x([k]P) from x(P) = x, via x - psi_(k-1) psi_(k+1) / psi_k^2."""
    if k == 1:
        return x
    num = field.mul(poly_eval(field, table[k - 1], x), poly_eval(field, table[k + 1], x))
    den = field.mul(poly_eval(field, table[k], x), poly_eval(field, table[k], x))
    fx = poly_eval(field, f, x)
    if k % 2 == 1:
        num = field.mul(num, fx)
    else:
        den = field.mul(den, fx)
    return field.sub(x, field.mul(num, field.inv(den)))


def _velu_from_kernel(field, A, B, kernel_x):
    """Velu image curve of the isogeny whose kernel has the given x-coords.

    kernel_x holds one x per +-pair of points (odd-degree kernel) or a single
    2-torsion x (degree 2).
    """
    six = field.from_int(6)
    two = field.from_int(2)
    t_acc = field.zero
    w_acc = field.zero
    for xq in kernel_x:
        gx = field.add(field.mul(field.from_int(3), field.mul(xq, xq)), A)
        fq = field.add(field.mul(xq, field.add(field.mul(xq, xq), A)), B)
        if field.is_zero(fq):  # 2-torsion point: y = 0
            tq = gx
            uq = field.zero
        else:
            tq = field.mul(two, gx)
            uq = field.mul(field.from_int(4), fq)
        t_acc = field.add(t_acc, tq)
        w_acc = field.add(w_acc, field.add(uq, field.mul(xq, tq)))
    A2 = field.sub(A, field.mul(field.from_int(5), t_acc))
    B2 = field.sub(B, field.mul(field.from_int(7), w_acc))
    return A2, B2


def velu_neighbors(j, ell: int, p: int, seed: int = 1) -> Counter:
    """Multiset of neighbor j-invariants of [E_j] in the ell-isogeny graph.

    Ground-truth oracle via division-polynomial kernels and Velu's formulas;
    supports small ell (<= 13). Returns Counter keyed by canonical F_{p^2}
    coordinates (c0, c1).
    """
    if ell == p:
        raise ValueError("ell must differ from p")
    if ell not in (2, 3, 5, 7, 11, 13):
        raise ValueError(f"unsupported ell={ell} (need ell <= 13)")
    F2 = fp2(p)
    jel = F2.from_int(j) if isinstance(j, int) else tuple(j)
    E = curve_from_j(jel, F2)
    if not is_supersingular(E):
        raise ValueError(f"j={j} is not supersingular over F_{p}^2")
    A, B = E.A, E.B

    if ell == 2:
        kernel_poly = [B, A, F2.zero, F2.one]
        per_kernel = 1
        table = None
    else:
        table = division_poly_table(F2, A, B, ell)
        kernel_poly = table[ell]
        per_kernel = (ell - 1) // 2

    factors = poly_factor_squarefree(F2, kernel_poly, seed=seed)
    m = 1
    for fac in factors:
        m = m * poly_deg(fac) // math.gcd(m, poly_deg(fac))
    if m == 1:
        big, emb = F2, None
    else:
        big = ext_field(p, 2 * m, seed=seed)
        emb = embed_fp2(big, F2, seed=seed)

    def lift(c):
        return c if emb is None else emb(c)

    Ab, Bb = lift(A), lift(B)
    fpoly = [Bb, Ab, big.zero, big.one]
    kp_big = [lift(c) for c in kernel_poly]
    roots = [r for r, mult in poly_roots(big, kp_big, seed=seed)]
    if len(roots) != poly_deg(kernel_poly):
        raise InternalError("division polynomial did not split in the chosen field")

    table_big = None
    if ell > 3:
        table_big = {
            k: [lift(c) for c in table[k]] for k in range(0, (ell - 1) // 2 + 2)
        }

    neighbors: Counter = Counter()
    remaining = set(roots)
    while remaining:
        x1 = min(remaining)
        kernel_x = {x1}
        for k in range(2, per_kernel + 1):
            kernel_x.add(_multiple_x(big, table_big, fpoly, x1, k))
        if len(kernel_x) != per_kernel or not kernel_x <= remaining:
            raise InternalError("kernel grouping failed")
        remaining -= kernel_x
        A2, B2 = _velu_from_kernel(big, Ab, Bb, kernel_x)
        j2 = j_invariant(Curve(big, A2, B2))
        if emb is None:
            neighbors[(j2[0], j2[1])] += 1
        else:
            neighbors[project_fp2(big, F2, emb.t_image, j2)] += 1
    if sum(neighbors.values()) != ell + 1:
        raise InternalError("neighbor multiset size != ell + 1")
    return neighbors
