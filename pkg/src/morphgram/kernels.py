"""Hot training kernels: numba-jitted loops with a pure-numpy fallback.

Both backends consume an identical xorshift32 draw sequence, so token
subsampling, window sizes and negative draws match exactly between them;
float results agree to rounding. The backend is picked at import time:
``MORPHGRAM_PURE_NUMPY=1`` (or a missing numba) selects the numpy path.

Shared state passed as 1-element arrays (progress, step count, loss EMA,
RNG state) is mutated in place so hogwild workers can race on it; see
``benchmarks/bench_kernels.py`` for a speed comparison of the two paths.
"""

from __future__ import annotations

import math
import os

import numpy as np

_MASK32 = 0xFFFFFFFF
_INV_2_32 = 1.0 / 4294967296.0
_MAX_RESAMPLE = 1024  # bounds negative-draw retries so a one-word table cannot hang
_LR_FLOOR = 1e-4  # final lr is lr0 * this


def seed_state(seed: int, stream: int) -> np.ndarray:
    """Per-worker xorshift32 state derived from (seed, stream), never zero."""
    s = (seed & _MASK32) ^ 0x9E3779B9
    s = (s + stream * 0x632BE59B) & _MASK32
    if s == 0:
        s = 0x6C078965
    for _ in range(10):
        s ^= (s << 13) & _MASK32
        s ^= s >> 17
        s ^= (s << 5) & _MASK32
    return np.array([s], dtype=np.int64)


class Xorshift32:
    """Python twin of the in-kernel generator (numpy backend and tests)."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = int(state)

    def next_u32(self) -> int:
        x = self.state
        x ^= (x << 13) & _MASK32
        x ^= x >> 17
        x ^= (x << 5) & _MASK32
        self.state = x
        return x

    def next_float(self) -> float:
        return self.next_u32() * _INV_2_32


def _draw_negatives(rng: Xorshift32, table: np.ndarray, context: int,
                    k: int, targets: np.ndarray) -> int:
    """Fill ``targets[1:]`` with up to k table draws, none equal to context.

    Returns the total number of target rows (context plus used negatives).
    A draw equal to the context word is resampled; after ``_MAX_RESAMPLE``
    failures that negative is skipped.
    """
    table_len = len(table)
    n_targets = 1
    for _ in range(k):
        for _ in range(_MAX_RESAMPLE):
            neg = int(table[rng.next_u32() % table_len])
            if neg != context:
                targets[n_targets] = neg
                n_targets += 1
                break
    return n_targets


def sgns_epoch_numpy(inp, out, tokens, line_offsets, line_start, line_end,
                     sub_flat, sub_offsets, keep_prob, neg_table, window,
                     negatives, lr0, total_scheduled, progress, step_count,
                     rng_state, ema) -> int:
    """Vectorized-per-pair skip-gram negative-sampling pass over lines.

    Returns 0, or 1 when a NaN loss was produced (training must abort).
    """
    rng = Xorshift32(rng_state[0])
    table_len = len(neg_table)
    targets = np.empty(negatives + 1, dtype=np.int64)
    lr_floor = lr0 * _LR_FLOOR
    status = 0
    for line in range(line_start, line_end):
        start, end = line_offsets[line], line_offsets[line + 1]
        progress[0] += end - start
        lr = lr0 * (1.0 - (1.0 - _LR_FLOOR) * (progress[0] / total_scheduled))
        if lr < lr_floor:
            lr = lr_floor
        kept = [int(t) for t in tokens[start:end]
                if rng.next_float() < keep_prob[t]]
        n = len(kept)
        for i in range(n):
            b = 1 + rng.next_u32() % window
            center = kept[i]
            rows = sub_flat[sub_offsets[center]:sub_offsets[center + 1]]
            h = None
            for j in range(max(0, i - b), min(n, i + b + 1)):
                if j == i:
                    continue
                context = kept[j]
                targets[0] = context
                n_t = _draw_negatives(rng, neg_table, context, negatives,
                                      targets)
                if h is None:
                    h = inp[rows].sum(axis=0)
                tg = targets[:n_t]
                scores = out[tg] @ h
                sig_pos = 1.0 / (1.0 + math.exp(-scores[0]))
                sig_neg = 1.0 / (1.0 + np.exp(scores[1:]))
                loss = -math.log(sig_pos) - np.log(sig_neg).sum()
                gs = np.empty(n_t)
                gs[0] = sig_pos - 1.0
                gs[1:] = 1.0 - sig_neg
                if ema[1] == 0.0:
                    ema[0] = loss
                    ema[1] = 1.0
                else:
                    ema[0] = ema[0] * 0.999 + 0.001 * loss
                step_count[0] += 1
                if math.isnan(loss):
                    status = 1
                    break
                neu = gs @ out[tg]
                np.add.at(out, tg, (-lr) * np.outer(gs, h))
                np.add.at(inp, rows, (-lr) * neu)
                h = None  # center rows changed; recompose for the next pair
            if status:
                break
        if status:
            break
    rng_state[0] = rng.state
    return status


def _sgns_epoch_loops(inp, out, tokens, line_offsets, line_start, line_end,
                      sub_flat, sub_offsets, keep_prob, neg_table, window,
                      negatives, lr0, total_scheduled, progress, step_count,
                      rng_state, ema, max_line_len) -> int:
    # Scalar-loop twin of sgns_epoch_numpy; identical draw sequence.
    dim = inp.shape[1]
    table_len = neg_table.shape[0]
    state = rng_state[0]
    kept = np.empty(max_line_len, dtype=np.int32)
    targets = np.empty(negatives + 1, dtype=np.int64)
    gs = np.empty(negatives + 1)
    h = np.empty(dim)
    neu = np.empty(dim)
    lr_floor = lr0 * _LR_FLOOR
    status = 0
    for line in range(line_start, line_end):
        start = line_offsets[line]
        end = line_offsets[line + 1]
        progress[0] += end - start
        lr = lr0 * (1.0 - (1.0 - _LR_FLOOR) * (progress[0] / total_scheduled))
        if lr < lr_floor:
            lr = lr_floor
        n = 0
        for p in range(start, end):
            t = tokens[p]
            state ^= (state << 13) & _MASK32
            state ^= state >> 17
            state ^= (state << 5) & _MASK32
            if state * _INV_2_32 < keep_prob[t]:
                kept[n] = t
                n += 1
        for i in range(n):
            state ^= (state << 13) & _MASK32
            state ^= state >> 17
            state ^= (state << 5) & _MASK32
            b = 1 + state % window
            center = kept[i]
            r0 = sub_offsets[center]
            r1 = sub_offsets[center + 1]
            h_valid = False
            j_lo = i - b
            if j_lo < 0:
                j_lo = 0
            j_hi = i + b + 1
            if j_hi > n:
                j_hi = n
            for j in range(j_lo, j_hi):
                if j == i:
                    continue
                context = kept[j]
                targets[0] = context
                n_t = 1
                for _ in range(negatives):
                    for _ in range(_MAX_RESAMPLE):
                        state ^= (state << 13) & _MASK32
                        state ^= state >> 17
                        state ^= (state << 5) & _MASK32
                        neg = neg_table[state % table_len]
                        if neg != context:
                            targets[n_t] = neg
                            n_t += 1
                            break
                if not h_valid:
                    for d in range(dim):
                        h[d] = 0.0
                    for r in range(r0, r1):
                        row = sub_flat[r]
                        for d in range(dim):
                            h[d] += inp[row, d]
                    h_valid = True
                loss = 0.0
                for t in range(n_t):
                    row = targets[t]
                    s = 0.0
                    for d in range(dim):
                        s += out[row, d] * h[d]
                    if t == 0:
                        sig = 1.0 / (1.0 + math.exp(-s))
                        loss += -math.log(sig)
                        gs[0] = sig - 1.0
                    else:
                        sig = 1.0 / (1.0 + math.exp(s))  # sigma(-s)
                        loss += -math.log(sig)
                        gs[t] = 1.0 - sig
                if ema[1] == 0.0:
                    ema[0] = loss
                    ema[1] = 1.0
                else:
                    ema[0] = ema[0] * 0.999 + 0.001 * loss
                step_count[0] += 1
                if math.isnan(loss):
                    status = 1
                    break
                for d in range(dim):
                    neu[d] = 0.0
                for t in range(n_t):
                    row = targets[t]
                    g = gs[t]
                    for d in range(dim):
                        neu[d] += g * out[row, d]
                for t in range(n_t):
                    row = targets[t]
                    glr = lr * gs[t]
                    for d in range(dim):
                        out[row, d] -= glr * h[d]
                for r in range(r0, r1):
                    row = sub_flat[r]
                    for d in range(dim):
                        inp[row, d] -= lr * neu[d]
                h_valid = False
            if status:
                break
        if status:
            break
    rng_state[0] = state
    return status


def tagger_epoch_numpy(E, pad, unk, W1, b1, W2, b2, tok, lab, offsets, order,
                       window, lr, loss_out) -> int:
    """Per-token SGD pass of the window tagger, vectorized per token."""
    dim = pad.shape[0]
    hw = window // 2
    wd = window * dim
    for s in order:
        start, end = int(offsets[s]), int(offsets[s + 1])
        n = end - start
        for i in range(n):
            slot_ids = np.empty(window, dtype=np.int64)
            x = np.empty(wd)
            for p in range(window):
                q = i - hw + p
                sid = -2 if (q < 0 or q >= n) else int(tok[start + q])
                slot_ids[p] = sid
                if sid == -2:
                    x[p * dim:(p + 1) * dim] = pad
                elif sid == -1:
                    x[p * dim:(p + 1) * dim] = unk
                else:
                    x[p * dim:(p + 1) * dim] = E[sid]
            z = np.tanh(W1.T @ x + b1)
            logits = W2.T @ z + b2
            m = logits.max()
            exps = np.exp(logits - m)
            total = exps.sum()
            y = int(lab[start + i])
            loss = math.log(total) + m - logits[y]
            loss_out[0] += loss
            if math.isnan(loss):
                return 1
            dlogits = exps / total
            dlogits[y] -= 1.0
            dz = W2 @ dlogits
            W2 -= lr * np.outer(z, dlogits)
            b2 -= lr * dlogits
            da = (1.0 - z * z) * dz
            gx = W1 @ da
            W1 -= lr * np.outer(x, da)
            b1 -= lr * da
            for p in range(window):
                sid = slot_ids[p]
                if sid == -2:
                    pad -= lr * gx[p * dim:(p + 1) * dim]
                elif sid == -1:
                    unk -= lr * gx[p * dim:(p + 1) * dim]
    return 0


def _tagger_epoch_loops(E, pad, unk, W1, b1, W2, b2, tok, lab, offsets, order,
                        window, lr, loss_out) -> int:
    # Scalar-loop twin of tagger_epoch_numpy.
    dim = pad.shape[0]
    hidden = W1.shape[1]
    n_labels = W2.shape[1]
    hw = window // 2
    wd = window * dim
    slot_ids = np.empty(window, dtype=np.int64)
    x = np.empty(wd)
    z = np.empty(hidden)
    logits = np.empty(n_labels)
    dlogits = np.empty(n_labels)
    da = np.empty(hidden)
    gx = np.empty(wd)
    for oi in range(order.shape[0]):
        s = order[oi]
        start = offsets[s]
        end = offsets[s + 1]
        n = end - start
        for i in range(n):
            for p in range(window):
                q = i - hw + p
                if q < 0 or q >= n:
                    sid = -2
                else:
                    sid = tok[start + q]
                slot_ids[p] = sid
                base = p * dim
                if sid == -2:
                    for d in range(dim):
                        x[base + d] = pad[d]
                elif sid == -1:
                    for d in range(dim):
                        x[base + d] = unk[d]
                else:
                    for d in range(dim):
                        x[base + d] = E[sid, d]
            for hh in range(hidden):
                acc = b1[hh]
                for j in range(wd):
                    acc += W1[j, hh] * x[j]
                z[hh] = math.tanh(acc)
            m = -1.0e308
            for ll in range(n_labels):
                acc = b2[ll]
                for hh in range(hidden):
                    acc += W2[hh, ll] * z[hh]
                logits[ll] = acc
                if acc > m:
                    m = acc
            total = 0.0
            for ll in range(n_labels):
                dlogits[ll] = math.exp(logits[ll] - m)
                total += dlogits[ll]
            y = lab[start + i]
            loss = math.log(total) + m - logits[y]
            loss_out[0] += loss
            if math.isnan(loss):
                return 1
            for ll in range(n_labels):
                dlogits[ll] /= total
            dlogits[y] -= 1.0
            for hh in range(hidden):
                acc = 0.0
                for ll in range(n_labels):
                    acc += W2[hh, ll] * dlogits[ll]
                da[hh] = (1.0 - z[hh] * z[hh]) * acc
            for hh in range(hidden):
                zlr = lr * z[hh]
                for ll in range(n_labels):
                    W2[hh, ll] -= zlr * dlogits[ll]
            for ll in range(n_labels):
                b2[ll] -= lr * dlogits[ll]
            for j in range(wd):
                acc = 0.0
                for hh in range(hidden):
                    acc += W1[j, hh] * da[hh]
                gx[j] = acc
            for j in range(wd):
                xlr = lr * x[j]
                for hh in range(hidden):
                    W1[j, hh] -= xlr * da[hh]
            for hh in range(hidden):
                b1[hh] -= lr * da[hh]
            for p in range(window):
                sid = slot_ids[p]
                base = p * dim
                if sid == -2:
                    for d in range(dim):
                        pad[d] -= lr * gx[base + d]
                elif sid == -1:
                    for d in range(dim):
                        unk[d] -= lr * gx[base + d]
    return 0


def _want_numba() -> bool:
    return os.environ.get("MORPHGRAM_PURE_NUMPY", "").strip().lower() not in (
        "1", "true", "yes", "on")


sgns_epoch_numba = None
tagger_epoch_numba = None
if _want_numba():
    try:
        from numba import njit
    except ImportError:
        njit = None
    if njit is not None:
        sgns_epoch_numba = njit(cache=True, nogil=True)(_sgns_epoch_loops)
        tagger_epoch_numba = njit(cache=True, nogil=True)(_tagger_epoch_loops)

USE_NUMBA = sgns_epoch_numba is not None


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def sgns_epoch(inp, out, tokens, line_offsets, line_start, line_end, sub_flat,
               sub_offsets, keep_prob, neg_table, window, negatives, lr0,
               total_scheduled, progress, step_count, rng_state, ema,
               max_line_len) -> int:
    """Run one chunk of SGNS training on the selected backend."""
    if USE_NUMBA:
        return sgns_epoch_numba(inp, out, tokens, line_offsets, line_start,
                                line_end, sub_flat, sub_offsets, keep_prob,
                                neg_table, window, negatives, lr0,
                                total_scheduled, progress, step_count,
                                rng_state, ema, max_line_len)
    return sgns_epoch_numpy(inp, out, tokens, line_offsets, line_start,
                            line_end, sub_flat, sub_offsets, keep_prob,
                            neg_table, window, negatives, lr0,
                            total_scheduled, progress, step_count, rng_state,
                            ema)


def tagger_epoch(E, pad, unk, W1, b1, W2, b2, tok, lab, offsets, order,
                 window, lr, loss_out) -> int:
    """Run one tagger training epoch on the selected backend."""
    if USE_NUMBA:
        return tagger_epoch_numba(E, pad, unk, W1, b1, W2, b2, tok, lab,
                                  offsets, order, window, lr, loss_out)
    return tagger_epoch_numpy(E, pad, unk, W1, b1, W2, b2, tok, lab, offsets,
                              order, window, lr, loss_out)
