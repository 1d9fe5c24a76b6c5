"""Compiled inner loop of the message-passing machine for untraced runs.

Performs the same vector operations as ``mp_machine.mp_step`` (codeword
equality tests, norm comparisons, argmax, pair swap) on plain arrays, in place.
Kept step-for-step identical to the traced path; ``tests/test_mp_machine.py``
pins the two together.
"""

import numba
import numpy as np

RUNNING = 0
FIXED_POINT = 1
CORRUPT = -1
DOMAIN = -2


@numba.njit(cache=True)
def run_block(lit_emb, clause_emb, true_codes, false_codes, clause_codes,
              clause_lits, clause_len, occ_ptr, occ, draws, tie_lowest):
    """Run up to ``draws.shape[0]`` iterations.

    Returns ``(status, iterations_done, flips)``. On FIXED_POINT the last
    iteration counted is the one that found every literal message zero.
    """
    n, d = true_codes.shape
    m = clause_codes.shape[0]
    nl = 2 * n
    lit_true = np.empty(nl, np.bool_)
    zero = np.empty(m, np.bool_)
    flips = 0
    for k in range(draws.shape[0]):
        # literal u is true iff its embedding is the "true" codeword of its variable
        for i in range(n):
            pt = True
            pf = True
            nt = True
            nf = True
            for c in range(d):
                if lit_emb[2 * i, c] != true_codes[i, c]:
                    pt = False
                if lit_emb[2 * i, c] != false_codes[i, c]:
                    pf = False
                if lit_emb[2 * i + 1, c] != true_codes[i, c]:
                    nt = False
                if lit_emb[2 * i + 1, c] != false_codes[i, c]:
                    nf = False
            if not ((pt and nf) or (pf and nt)):
                return CORRUPT, k, flips
            lit_true[2 * i] = pt
            lit_true[2 * i + 1] = nt
        # clause phase: aggregate (oracle verdict) then combine
        for j in range(m):
            sat = False
            for q in range(clause_len[j]):
                if lit_true[clause_lits[j, q]]:
                    sat = True
            prev_norm = 0.0
            msg_norm = 0.0
            equal = True
            prev_is_code = True
            prev_is_zero = True
            for c in range(d):
                mc = clause_codes[j, c] if sat else 0.0
                pc = clause_emb[j, c]
                prev_norm += pc * pc
                msg_norm += mc * mc
                if pc != mc:
                    equal = False
                if pc != clause_codes[j, c]:
                    prev_is_code = False
                if pc != 0.0:
                    prev_is_zero = False
            if not (prev_is_code or prev_is_zero):
                return DOMAIN, k, flips
            if equal:
                pass
            elif np.sqrt(prev_norm) < np.sqrt(msg_norm):
                for c in range(d):
                    clause_emb[j, c] = clause_codes[j, c]
            else:
                for c in range(d):
                    clause_emb[j, c] = 0.0
            z = True
            for c in range(d):
                if clause_emb[j, c] != 0.0:
                    z = False
            zero[j] = z
        # literal phase: message norm is the draw when a neighbour clause is zero
        best = -1
        best_norm = 0.0
        for v in range(nl):
            hit = False
            for p in range(occ_ptr[v], occ_ptr[v + 1]):
                if zero[occ[p]]:
                    hit = True
            if not hit:
                continue
            nv = abs(draws[k, v])
            if nv > best_norm or (nv == best_norm and nv > 0.0 and not tie_lowest):
                best = v
                best_norm = nv
        if best < 0:
            return FIXED_POINT, k + 1, flips
        w = best ^ 1
        for c in range(d):
            t = lit_emb[best, c]
            lit_emb[best, c] = lit_emb[w, c]
            lit_emb[w, c] = t
        flips += 1
    return RUNNING, draws.shape[0], flips
