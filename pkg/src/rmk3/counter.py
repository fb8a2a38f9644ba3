"""Point counts on the singular double cover V: w^2 = q1(y,z) q2(x,z) q3(x,y).

The plane is swept by the q affine lines (1:u:*) and the line (0:1:*); the
point above e3 = (0:0:1) adds one.  On the line t -> (x:y:t) the form q3 is
constant, so the fibre count is q + chi(q3(x,y)) * lambda_{x,y} with

    lambda_{x,y} = sum_t chi(q1(y,t) q2(x,t)).

Two evaluation routes are provided.  ``direct`` computes each lambda by one
multiplication and one character lookup per t (O(q^2)).  ``fft`` uses
homogeneity: for t != 0, chi(q1(u,t)) = chi(q1(u/t,1)), so in discrete-log
coordinates the vector (lambda_{1,u})_{u != 0} is a cyclic convolution of
length q-1, evaluated exactly with a floating point FFT and rounding
(|entries| <= q < 2^53).
"""
from __future__ import annotations

import numpy as np

from .ffield import FieldDescriptor, FieldTables, build_extension, field_tables, quad_char
from .surface import SurfaceModP, as_mod_p

FFT_ROUNDING_SLACK = 0.25


def _field(F, p: int | None = None) -> FieldDescriptor:
    if isinstance(F, FieldDescriptor):
        return F
    if isinstance(F, tuple):
        return build_extension(*F)
    return build_extension(p, int(F))


def _quadratic(T: FieldTables, s: np.ndarray, c2: int, c1: int, c0: int) -> np.ndarray:
    """c2*s^2 + c1*s + c0 for prime-field constants, s an array of codes.

    Completing the square, c2 ((s + beta)^2 + gamma), keeps every addition a
    prime-field shift of the constant digit.
    """
    p = T.p
    c2, c1, c0 = c2 % p, c1 % p, c0 % p
    if c2 == 0:
        return T.add_prime_scalar(T.scale(s, c1), c0)
    inv = pow(c2, -1, p)
    beta = c1 * inv * pow(2, -1, p) % p
    gamma = (c0 * inv - beta * beta) % p
    shifted = T.add_prime_scalar(s, beta)
    return T.scale(T.add_prime_scalar(T.square(shifted), gamma), c2)


def _cyclic_convolution(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # linear convolution at a power-of-two length, then folded: q - 1 may
    # have large prime factors, where a length-(q-1) transform is slow
    n = len(a)
    size = 1 << max(1, (2 * n - 1).bit_length())
    fa = np.fft.rfft(a.astype(np.float64), size)
    fb = np.fft.rfft(b.astype(np.float64), size)
    lin = np.fft.irfft(fa * fb, size)[: 2 * n - 1]
    raw = lin[:n].copy()
    raw[: n - 1] += lin[n:]
    out = np.rint(raw)
    if n and np.max(np.abs(raw - out)) > FFT_ROUNDING_SLACK:
        raise ArithmeticError("FFT convolution lost integrality")  # pragma: no cover
    return out.astype(np.int64)


def fibre_lambdas_fft(Xp: SurfaceModP, T: FieldTables) -> tuple[np.ndarray, int]:
    """(lambda_{1,u} for all u in canonical order, lambda_{0,1})."""
    (a1, b1, c1), (a2, b2, c2), _ = Xp.forms
    q, chi, exp = T.q, T.chi, T.exp
    everything = np.arange(q, dtype=np.int64)
    # b(t) = chi(q2(1,t)) = chi(c2 t^2 + b2 t + a2)
    b_of_t = chi[_quadratic(T, everything, c2, b2, a2)].astype(np.int64)
    # h(s) = chi(q1(s,1)) = chi(a1 s^2 + b1 s + c1)
    h_of_s = chi[_quadratic(T, everything, a1, b1, c1)].astype(np.int64)
    lam = np.empty(q, dtype=np.int64)
    if q > 1:
        corr = _cyclic_convolution(h_of_s[exp], b_of_t[exp])
        # t = 0 contributes chi(q1(u,0)) b(0) = chi(a1) b(0) for u != 0
        lam[exp] = corr + int(chi[a1]) * int(b_of_t[0])
    sum_b_nonzero = int(b_of_t.sum() - b_of_t[0])
    lam[0] = int(chi[c1]) * sum_b_nonzero
    # lambda_{0,1} = sum_t chi(q1(1,t)) chi(c2 t^2)
    q1_one_t = chi[_quadratic(T, everything, c1, b1, a1)].astype(np.int64)
    lam01 = int(chi[c2]) * int(q1_one_t.sum() - q1_one_t[0])
    return lam, lam01


def fibre_lambdas_direct(Xp: SurfaceModP, T: FieldTables) -> tuple[np.ndarray, int]:
    (a1, b1, c1), (a2, b2, c2), _ = Xp.forms
    q, chi = T.q, T.chi
    t = np.arange(q, dtype=np.int64)
    t_sq = T.square(t)
    q2_one_t = _quadratic(T, t, c2, b2, a2)
    c1_t_sq = T.scale(t_sq, c1)
    b1_t = T.scale(t, b1)
    lam = np.empty(q, dtype=np.int64)
    for u in range(q):
        u_sq = int(T.square(np.array([u]))[0])
        q1_u_t = T.add(T.add(T.scale(np.full(q, u_sq), a1), T.mul(np.full(q, u), b1_t)), c1_t_sq)
        lam[u] = int(chi[T.mul(q1_u_t, q2_one_t)].sum(dtype=np.int64))
    q1_one_t = _quadratic(T, t, c1, b1, a1)
    lam01 = int(chi[T.mul(q1_one_t, T.scale(t_sq, c2))].sum(dtype=np.int64))
    return lam, lam01


def count_singular(X, F, method: str = "fft") -> int:
    """#V(F_q) for the singular double cover, q = p^k.

    ``X`` is a SixLineSurface or a SurfaceModP; ``F`` a FieldDescriptor, a
    (p, k) tuple or an extension degree (with X already reduced).
    """
    p = X.p if isinstance(X, SurfaceModP) else None
    F = _field(F, p)
    Xp = as_mod_p(X, F.p)
    T = field_tables(F.p, F.k)
    if method == "fft":
        lam, lam01 = fibre_lambdas_fft(Xp, T)
    elif method == "direct":
        lam, lam01 = fibre_lambdas_direct(Xp, T)
    else:
        raise ValueError(f"unknown counting method {method!r}")
    a3, b3, c3 = Xp.q3
    u = np.arange(T.q, dtype=np.int64)
    # chi(q3(1,u)) = chi(c3 u^2 + b3 u + a3)
    w = T.chi[_quadratic(T, u, c3, b3, a3)].astype(np.int64)
    q = T.q
    return q * q + q + 1 + int(np.dot(w, lam)) + int(T.chi[c3]) * lam01


def count_bruteforce(X, F) -> int:
    """Sum of 1 + chi(f(P)) over all points P of P^2(F_q); Euler-criterion character."""
    p = X.p if isinstance(X, SurfaceModP) else None
    F = _field(F, p)
    Xp = as_mod_p(X, F.p)
    forms = [tuple(F.element(c) for c in f) for f in Xp.forms]

    def form(f, u, v):
        a, b, c = f
        return a * u * u + b * u * v + c * v * v

    zero, one = F.zero, F.one
    points = [(one, y, z) for y in F.elements() for z in F.elements()]
    points += [(zero, one, z) for z in F.elements()]
    points.append((zero, zero, one))
    total = 0
    for x, y, z in points:
        value = form(forms[0], y, z) * form(forms[1], x, z) * form(forms[2], x, y)
        total += 1 + quad_char(value, F)
    return total


def count_smooth(X, p: int, k: int, node_fix: int) -> int:
    """Count on the minimal resolution: each rational A1 node adds a conic minus its point."""
    return count_singular(X, (p, k)) + p**k * node_fix
