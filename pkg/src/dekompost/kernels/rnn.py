"""Single-direction recurrences over a time-major batch.

Written in the numpy subset numba understands so the same source serves as
the jitted kernel and as the fallback. Gate layout along the first axis of
``W``/``U``/``b``: vanilla ``[a]``; GRU ``[z, r, n]``; LSTM ``[i, f, g, o]``.

Sigmoids use the tanh form 0.5 * (1 + tanh(x / 2)), which never overflows.

GRU:  h' = z * h + (1 - z) * tanh(W_n x + U_n (r * h) + b_n)
LSTM: c' = f * c + i * g,  h' = o * tanh(c')
"""

import numpy as np

VANILLA = 0
GRU = 1
LSTM = 2

N_GATES = (1, 3, 4)


def rnn_forward(kind, xs, W, U, b):
    """Run the recurrence from zero state.

    xs: (T, B, E). Returns hs (T+1, B, H) and cs (T+1, B, H) with the zero
    initial state at index 0, plus post-activation gates (T, B, G*H).
    """
    T = xs.shape[0]
    B = xs.shape[1]
    H = U.shape[1]
    G = U.shape[0] // H
    hs = np.zeros((T + 1, B, H))
    cs = np.zeros((T + 1, B, H))
    gates = np.zeros((T, B, G * H))
    if kind == GRU:
        U_zr = np.ascontiguousarray(U[: 2 * H])
        U_n = np.ascontiguousarray(U[2 * H :])
    else:
        U_zr = U
        U_n = U
    for t in range(T):
        h = hs[t]
        pre = np.dot(xs[t], W.T) + b
        if kind == VANILLA:
            a = np.tanh(pre + np.dot(h, U.T))
            gates[t] = a
            hs[t + 1] = a
        elif kind == GRU:
            zr = 0.5 * (1.0 + np.tanh(0.5 * (pre[:, : 2 * H] + np.dot(h, U_zr.T))))
            z = zr[:, :H]
            r = zr[:, H:]
            n = np.tanh(pre[:, 2 * H :] + np.dot(r * h, U_n.T))
            gates[t, :, : 2 * H] = zr
            gates[t, :, 2 * H :] = n
            hs[t + 1] = z * h + (1.0 - z) * n
        else:
            a = pre + np.dot(h, U.T)
            i = 0.5 * (1.0 + np.tanh(0.5 * a[:, :H]))
            f = 0.5 * (1.0 + np.tanh(0.5 * a[:, H : 2 * H]))
            g = np.tanh(a[:, 2 * H : 3 * H])
            o = 0.5 * (1.0 + np.tanh(0.5 * a[:, 3 * H :]))
            c = f * cs[t] + i * g
            gates[t, :, :H] = i
            gates[t, :, H : 2 * H] = f
            gates[t, :, 2 * H : 3 * H] = g
            gates[t, :, 3 * H :] = o
            cs[t + 1] = c
            hs[t + 1] = o * np.tanh(c)
    return hs, cs, gates


def rnn_backward(kind, xs, W, U, hs, cs, gates, dH):
    """Backpropagate output gradients dH (T, B, H) through the recurrence.

    Parameter gradients are accumulated one time step at a time, last step
    first, so zero-gradient padding steps leave every sum bit-identical.
    Returns dxs (T, B, E), dW, dU, db.
    """
    T = xs.shape[0]
    B = xs.shape[1]
    H = U.shape[1]
    G = U.shape[0] // H
    dxs = np.zeros(xs.shape)
    dW = np.zeros(W.shape)
    dU = np.zeros(U.shape)
    db = np.zeros(G * H)
    dh_next = np.zeros((B, H))
    dc_next = np.zeros((B, H))
    da = np.zeros((B, G * H))
    if kind == GRU:
        U_zr = np.ascontiguousarray(U[: 2 * H])
        U_n = np.ascontiguousarray(U[2 * H :])
    else:
        U_zr = U
        U_n = U
    for t in range(T - 1, -1, -1):
        h_prev = hs[t]
        dh = dH[t] + dh_next
        if kind == VANILLA:
            a = gates[t]
            da = dh * (1.0 - a * a)
            dW += np.dot(da.T, xs[t])
            dU += np.dot(da.T, h_prev)
            db += np.sum(da, axis=0)
            dxs[t] = np.dot(da, W)
            dh_next = np.dot(da, U)
        elif kind == GRU:
            z = gates[t, :, :H]
            r = gates[t, :, H : 2 * H]
            n = gates[t, :, 2 * H :]
            dz = dh * (h_prev - n)
            dn = dh * (1.0 - z)
            dan = dn * (1.0 - n * n)
            drh = np.dot(dan, U_n)
            dr = drh * h_prev
            daz = dz * z * (1.0 - z)
            dar = dr * r * (1.0 - r)
            da[:, :H] = daz
            da[:, H : 2 * H] = dar
            da[:, 2 * H :] = dan
            da_zr = np.ascontiguousarray(da[:, : 2 * H])
            dW += np.dot(da.T, xs[t])
            dU[: 2 * H] += np.dot(da_zr.T, h_prev)
            dU[2 * H :] += np.dot(dan.T, r * h_prev)
            db += np.sum(da, axis=0)
            dxs[t] = np.dot(da, W)
            dh_next = dh * z + drh * r + np.dot(da_zr, U_zr)
        else:
            i = gates[t, :, :H]
            f = gates[t, :, H : 2 * H]
            g = gates[t, :, 2 * H : 3 * H]
            o = gates[t, :, 3 * H :]
            tc = np.tanh(cs[t + 1])
            dc = dc_next + dh * o * (1.0 - tc * tc)
            da[:, :H] = dc * g * i * (1.0 - i)
            da[:, H : 2 * H] = dc * cs[t] * f * (1.0 - f)
            da[:, 2 * H : 3 * H] = dc * i * (1.0 - g * g)
            da[:, 3 * H :] = dh * tc * o * (1.0 - o)
            dW += np.dot(da.T, xs[t])
            dU += np.dot(da.T, h_prev)
            db += np.sum(da, axis=0)
            dxs[t] = np.dot(da, W)
            dh_next = np.dot(da, U)
            dc_next = dc * f
    return dxs, dW, dU, db
