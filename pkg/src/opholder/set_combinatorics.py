"""Index-set calculus behind the binomial expansion of f(U_1), .., f(U_N).

Sets are tuples of strictly increasing positive integers.  A_N is the family
of sets with maximum N.  J1 is an ancestor of J2 when J2 splits into a
nonempty head and tail (every head element below every tail element) with
J1 = head | (tail - 1); the number of such splits is the evidence count.
"""
from __future__ import annotations

import csv
import math
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from .functions import FunctionModel
from .matrix_calc import laurent_func_of, moi, spectral_norm, unitary_eig

N_MAX = 16


def index_set(items) -> tuple:
    s = tuple(sorted(set(int(i) for i in items)))
    if not s or s[0] < 1:
        raise ValueError("index sets are nonempty sets of positive integers")
    return s


def family(N: int) -> list:
    """All sets with maximum N, enumerated through bitmasks of {1..N-1}."""
    if not 1 <= N <= N_MAX:
        raise ValueError(f"N must lie in [1, {N_MAX}]")
    out = []
    for mask in range(1 << (N - 1)):
        out.append(tuple(i + 1 for i in range(N - 1) if mask >> i & 1) + (N,))
    return sorted(out, key=lambda s: (len(s), s))


def evidence_count(J1: Sequence[int], J2: Sequence[int]) -> int:
    """Number of head/tail splits of J2 with J1 = head | (tail - 1)."""
    J1, J2 = set(J1), tuple(sorted(J2))
    count = 0
    for s in range(1, len(J2)):
        if J1 == set(J2[:s]) | {j - 1 for j in J2[s:]}:
            count += 1
    return count


def ancestors(J: Sequence[int]) -> dict:
    """Map ancestor -> evidence count."""
    J = tuple(sorted(J))
    out = {}
    for s in range(1, len(J)):
        anc = tuple(sorted(set(J[:s]) | {j - 1 for j in J[s:]}))
        out[anc] = out.get(anc, 0) + 1
    return out


@lru_cache(maxsize=None)
def _kappa_rec(J: tuple) -> int:
    if J == (1,):
        return 1
    if len(J) == 1:
        return 0  # a singleton other than {1} has no ancestors
    return sum(c * _kappa_rec(a) for a, c in ancestors(J).items())


def kappa_closed(J: Sequence[int]) -> int:
    """(j_d - j_1)! / prod (j_s - j_{s-1})!."""
    J = tuple(sorted(J))
    gaps = [b - a for a, b in zip(J, J[1:])]
    return math.factorial(J[-1] - J[0]) // math.prod(math.factorial(g) for g in gaps)


def kappa(J: Sequence[int], mode: str = "recursive", n_max: int = N_MAX) -> int:
    J = index_set(J)
    if J[-1] > n_max:
        raise ValueError(f"max J = {J[-1]} exceeds the configured bound {n_max}")
    if mode == "recursive":
        return _kappa_rec(J)
    if mode == "closed":
        return kappa_closed(J)
    raise ValueError(f"unknown mode {mode!r}")


def kappa_table(n_max: int) -> dict:
    return {J: _kappa_rec(J) for N in range(1, n_max + 1) for J in family(N)}


def export_kappa_csv(path, n_max: int = 8):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["set", "kappa_recursive", "kappa_closed"])
        for J, k in kappa_table(n_max).items():
            out.writerow(["{" + ",".join(map(str, J)) + "}", k, kappa_closed(J)])
    return path


# ---------------------------------------------------------------------------
# operator terms


def t_factor(Us: Sequence[np.ndarray], j: int, k: int) -> np.ndarray:
    """T(j, k) = sum_s (-1)^s C(k-j, s) U_{j+s}; unitaries are 1-indexed."""
    if not 1 <= j < k <= len(Us):
        raise ValueError(f"need 1 <= j < k <= {len(Us)}, got ({j}, {k})")
    return sum((-1) ** s * math.comb(k - j, s) * Us[j + s - 1] for s in range(k - j + 1))


def i_j_term(Us: Sequence[np.ndarray], J: Sequence[int], f: FunctionModel, specs=None) -> np.ndarray:
    """Multiple integral of D^{d-1} f over E_{j1}, .., E_{jd} with factors T(j_{s-1}, j_s)."""
    J = index_set(J)
    if J[-1] > len(Us):
        raise ValueError("index set exceeds the number of unitaries")
    if len(J) == 1:
        return laurent_func_of(Us[J[0] - 1], f)
    specs = specs or [unitary_eig(U) for U in Us]
    factors = [t_factor(Us, a, b) for a, b in zip(J, J[1:])]
    return moi(f, len(J) - 1, [specs[j - 1] for j in J], factors, max_order=N_MAX)


def binomial_side(Us, f: FunctionModel, N: int) -> np.ndarray:
    return sum((-1) ** (j - 1) * math.comb(N - 1, j - 1) * laurent_func_of(Us[j - 1], f)
               for j in range(1, N + 1))


def verify_gen(N: int, Us: Sequence[np.ndarray], f: FunctionModel) -> float:
    """|| sum_j (-1)^(j-1) C(N-1,j-1) f(U_j) - sum_{J in A_N} kappa_J I_J ||."""
    if not 2 <= N <= 6:
        raise ValueError("N must lie in [2, 6]")
    specs = [unitary_eig(U) for U in Us[:N]]
    rhs = sum(_kappa_rec(J) * i_j_term(Us, J, f, specs) for J in family(N) if _kappa_rec(J))
    return spectral_norm(binomial_side(Us, f, N) - rhs)


def proper_prefixes(J: Sequence[int]) -> list:
    J = tuple(sorted(J))
    return [J[:s] for s in range(1, len(J))]


def oj_sides(J: Sequence[int], Us, f: FunctionModel):
    """Both sides of I_J - I_{J+1} = sum over prefixes L of (I_{L u (L°+1)} + I_{L u (L•+1)}) + I_{J u {N}}.

    Here L° = J minus L, L• = L° plus max L, and N = max J + 1.
    """
    J = index_set(J)
    specs = [unitary_eig(U) for U in Us]
    shift = tuple(j + 1 for j in J)
    lhs = i_j_term(Us, J, f, specs) - i_j_term(Us, shift, f, specs)
    rhs = i_j_term(Us, J + (J[-1] + 1,), f, specs)
    for L in proper_prefixes(J):
        rest = tuple(j for j in J if j not in L)
        rest_plus = tuple(sorted(rest + (max(L),)))
        rhs = rhs + i_j_term(Us, L + tuple(j + 1 for j in rest), f, specs)
        rhs = rhs + i_j_term(Us, tuple(sorted(set(L) | {j + 1 for j in rest_plus})), f, specs)
    return lhs, rhs


def verify_oj(J: Sequence[int], Us, f: FunctionModel) -> float:
    lhs, rhs = oj_sides(J, Us, f)
    return spectral_norm(lhs - rhs)


def ancestor_structure_violations(n_max: int = 8) -> list:
    """Pairs breaking the size/maximum rules that every ancestor relation obeys."""
    bad = []
    sets = [J for N in range(1, n_max + 1) for J in family(N)]
    for J2 in sets:
        for J1, c in ancestors(J2).items():
            d1, d2 = len(J1), len(J2)
            if max(J2) != 1 + max(J1) or not 0 <= d2 - d1 <= 1 or (d1 == d2 and c != 1):
                bad.append((J1, J2, c))
    return bad


def all_subsets(n: int):
    for d in range(1, n + 1):
        yield from combinations(range(1, n + 1), d)
