"""Vectorized grid classification for parameter and dynamical planes.

The scalar classifier in orbits.py is authoritative; these kernels trade its
cycle-refinement polish for throughput so that full tiles render in seconds.
Component verdicts agree with the scalar path away from component boundaries,
which is all rendering needs; analysis code re-classifies interesting pixels
at analysis grade through the scalar path.
"""

from __future__ import annotations

import numpy as np

from .families import Family, Parameter

# component codes for parameter-plane rasters
KIND_UNDECIDED = 0
KIND_PRINCIPAL = 1
KIND_CAPTURE = 2
KIND_MANDELBROT = 3
KIND_TRICORN = 4
KIND_OUTSIDE = 5

KIND_NAMES = {
    KIND_UNDECIDED: "Undecided",
    KIND_PRINCIPAL: "Principal",
    KIND_CAPTURE: "Capture",
    KIND_MANDELBROT: "Mandelbrot",
    KIND_TRICORN: "Tricorn",
    KIND_OUTSIDE: "OutsideDomain",
}

# basin codes for dynamical-plane rasters
BASIN_UNDECIDED = 0
BASIN_FIXED_BASE = 1    # 1 + target index
BASIN_CYCLE_BASE = 100  # 100 + cycle slot

TARGET_RADIUS = 1e-8
ESCAPE_RADIUS = 1e6
NEAR_RETURN = 1e-6
CHECK_EVERY = 8


def newton_step(Z: np.ndarray, r, m) -> np.ndarray:
    with np.errstate(all="ignore"):
        num = ((3.0 * Z - 4.0 * r) * Z + (m - 1.0)) * Z * Z + m
        den = ((4.0 * Z - 6.0 * r) * Z + 2.0 * (m - 1.0)) * Z + 2.0 * r
        return num / den


def antipodal_step(Z: np.ndarray, q: complex) -> np.ndarray:
    with np.errstate(all="ignore"):
        return Z * Z * (q - Z) / (1.0 + np.conj(q) * Z)


def newton_c_plus(A: np.ndarray) -> np.ndarray:
    """Vectorized upper-half-plane free critical point, valid inside U."""
    r = A.real
    m = A.real ** 2 + A.imag ** 2
    rad = 24.0 * (m - 1.0) - 36.0 * r * r
    return (6.0 * r + 1j * np.sqrt(np.maximum(rad, 0.0))) / 12.0


def antipodal_c_plus(Q: np.ndarray) -> np.ndarray:
    m = Q.real ** 2 + Q.imag ** 2
    s = m - 3.0
    root = np.sqrt(s * s + 16.0 * m)
    with np.errstate(all="ignore"):
        return (s + root) / (4.0 * np.conj(Q))


def _family_step(family: Family, Z, P):
    if family is Family.NEWTON:
        return newton_step(Z, P.real, P.real ** 2 + P.imag ** 2)
    return antipodal_step(Z, P)


def _segment_immediate(family: Family, P: np.ndarray, start: np.ndarray,
                       target_kind: np.ndarray, budget: int,
                       samples: int = 16) -> np.ndarray:
    """Vector analog of the scalar segment heuristic for immediacy.

    target_kind: 0 for the basin of 1 (Newton) / 0 (antipodal), 1 for the
    basin of -1 (Newton) / infinity (antipodal).  Infinity targets are
    transported through the involution to the basin of 0.
    """
    n = P.size
    if n == 0:
        return np.zeros(0, dtype=bool)
    if family is Family.NEWTON:
        tgt = np.where(target_kind == 0, 1.0 + 0j, -1.0 + 0j)
        s0 = start
    else:
        tgt = np.zeros(n, dtype=complex)
        with np.errstate(all="ignore"):
            s0 = np.where(target_kind == 0, start, -1.0 / np.conj(start))
    ks = (np.arange(1, samples + 1) / samples)[:, None]
    Z = (tgt[None, :] + (s0 - tgt)[None, :] * ks).ravel()    # samples*n flat
    Pm = np.broadcast_to(P, (samples, n)).ravel().copy()
    Tm = np.broadcast_to(tgt, (samples, n)).ravel().copy()
    ok = np.zeros(samples * n, dtype=bool)
    idx = np.arange(samples * n)
    if family is Family.NEWTON:
        Om = np.broadcast_to(np.where(target_kind == 0, -1.0 + 0j, 1.0 + 0j),
                             (samples, n)).ravel().copy()
    per_point = max(200, budget // samples)
    for _ in range(per_point):
        if not idx.size:
            break
        Z = _family_step(family, Z, Pm)
        dead = ~np.isfinite(Z.real) | ~np.isfinite(Z.imag)
        hit = (np.abs(Z - Tm) < TARGET_RADIUS) & ~dead
        if family is Family.NEWTON:
            dead |= np.abs(Z - Om) < TARGET_RADIUS
            dead |= np.abs(Z - Pm) < TARGET_RADIUS
            dead |= np.abs(Z - np.conj(Pm)) < TARGET_RADIUS
        else:
            dead |= np.abs(Z) > ESCAPE_RADIUS
        ok[idx[hit]] = True
        done = hit | dead
        if done.any():
            keep = ~done
            idx = idx[keep]
            Z = Z[keep]
            Pm = Pm[keep]
            Tm = Tm[keep]
            if family is Family.NEWTON:
                Om = Om[keep]
    return ok.reshape(samples, n).all(axis=0)


def classify_grid(family: Family, params: np.ndarray, budget: int) -> tuple[np.ndarray, np.ndarray]:
    """Component kind and period for each parameter in a flat complex array."""
    flat = params.ravel()
    n = flat.size
    kind = np.zeros(n, dtype=np.uint8)
    period = np.zeros(n, dtype=np.int32)

    if family is Family.NEWTON:
        inside = (2.0 * flat.imag ** 2 - flat.real ** 2 - 2.0 > 0.0) & (flat.imag > 0.0)
        kind[~inside] = KIND_OUTSIDE
        idx = np.nonzero(inside)[0]
        P = flat[idx]
        Z = newton_c_plus(P)
    else:
        degenerate = np.abs(flat) < 1e-12
        kind[degenerate] = KIND_OUTSIDE
        idx = np.nonzero(~degenerate)[0]
        P = flat[idx]
        Z = antipodal_c_plus(P)

    # fixed-basin candidates gathered for a batched immediacy test at the end
    fixed_idx: list = []
    fixed_target_kind: list = []

    # cycle bookkeeping inside detection windows
    window_starts = {w for w in (256, 1024, 4096, 16384, 65536) if w + 130 <= budget}
    window_starts.add(max(0, budget - 131))

    snap = None          # window-start positions
    first_p = None       # first near-return step within window
    first_z = None
    t_in_window = 0
    in_window = False

    cycles_found = {}    # pixel position in idx -> (period, lam, z)

    # parameter-derived constants for the in-place step, sliced on retirement
    if family is Family.NEWTON:
        r = P.real.copy()
        m = r * r + P.imag ** 2
        aux = {"r2": 2.0 * r, "r4": 4.0 * r, "r6": 6.0 * r,
               "m": m, "m1": m - 1.0, "m2": 2.0 * (m - 1.0)}
    else:
        aux = {"qc": np.conj(P)}
    buf = [np.empty(idx.size, complex), np.empty(idx.size, complex)]

    def step_inplace():
        A, B = buf
        with np.errstate(all="ignore"):
            if family is Family.NEWTON:
                np.multiply(Z, 3.0, out=A)
                np.subtract(A, aux["r4"], out=A)
                np.multiply(A, Z, out=A)
                np.add(A, aux["m1"], out=A)
                np.multiply(A, Z, out=A)
                np.multiply(A, Z, out=A)
                np.add(A, aux["m"], out=A)
                np.multiply(Z, 4.0, out=B)
                np.subtract(B, aux["r6"], out=B)
                np.multiply(B, Z, out=B)
                np.add(B, aux["m2"], out=B)
                np.multiply(B, Z, out=B)
                np.add(B, aux["r2"], out=B)
                np.divide(A, B, out=Z)
            else:
                np.multiply(Z, Z, out=A)
                np.subtract(P, Z, out=B)
                np.multiply(A, B, out=A)
                np.multiply(aux["qc"], Z, out=B)
                np.add(B, 1.0, out=B)
                np.divide(A, B, out=Z)

    def retire(mask_local, new_kind, new_period=None):
        nonlocal idx, P, Z, snap, first_p, first_z
        pos = np.nonzero(mask_local)[0]
        if pos.size == 0:
            return
        if new_kind is not None:
            kind[idx[pos]] = new_kind
        if new_period is not None:
            period[idx[pos]] = new_period
        keep = np.ones(idx.size, dtype=bool)
        keep[pos] = False
        idx = idx[keep]
        P = P[keep]
        Z = Z[keep]
        for k in aux:
            aux[k] = aux[k][keep]
        buf[0] = np.empty(idx.size, complex)
        buf[1] = np.empty(idx.size, complex)
        if snap is not None:
            snap = snap[keep]
            first_p = first_p[keep]
            first_z = first_z[keep]

    confirmed: list = []  # (global index array, period, lam array, z array)

    t = 0
    while t < budget and idx.size:
        # open a cycle-detection window at checkpoints
        if not in_window and t in window_starts:
            snap = Z.copy()
            first_p = np.zeros(idx.size, dtype=np.int32)
            first_z = np.zeros(idx.size, dtype=complex)
            t_in_window = 0
            in_window = True

        step_inplace()
        t += 1

        # Hit tests run every step inside a detection window, else on an
        # interval.  Both fixed targets are superattracting so membership in
        # the capture disks cannot be transient, and non-finite values
        # persist, so delayed checks reach the same verdicts.
        if in_window or t % CHECK_EVERY == 0:
            bad = ~np.isfinite(Z.real) | ~np.isfinite(Z.imag)
            if family is Family.NEWTON:
                hit1 = np.abs(Z - 1.0) < TARGET_RADIUS
                hit2 = np.abs(Z + 1.0) < TARGET_RADIUS
                hita = np.abs(Z - P) < TARGET_RADIUS
                hitc = np.abs(Z - np.conj(P)) < TARGET_RADIUS
                root_pair = (hit1 | hit2) & ~bad
                other = (hita | hitc) & ~bad & ~root_pair
            else:
                hit1 = np.abs(Z) < TARGET_RADIUS
                # overflow to inf/nan only happens on the way to infinity,
                # whose basin this is
                hit2 = (np.abs(Z) > ESCAPE_RADIUS) | bad
                bad = np.zeros_like(hit1)
                root_pair = hit1 | hit2
                other = np.zeros_like(root_pair)

            if root_pair.any():
                pos = np.nonzero(root_pair)[0]
                fixed_idx.append(idx[pos].copy())
                fixed_target_kind.append(np.where(hit1[pos], 0, 1).astype(np.int8))
            if other.any():
                kind[idx[other]] = KIND_CAPTURE
                period[idx[other]] = 1
            done = root_pair | other | bad
            if done.any():
                retire(done, None)

        if in_window:
            t_in_window += 1
            close = np.abs(Z - snap) < NEAR_RETURN * np.maximum(1.0, np.abs(snap))
            newfirst = close & (first_p == 0)
            first_p[newfirst] = t_in_window
            first_z[newfirst] = Z[newfirst]
            second = close & (first_p > 0) & (first_p * 2 == t_in_window)
            if second.any():
                pos = np.nonzero(second)[0]
                d1 = np.abs(first_z[pos] - snap[pos])
                d2 = np.abs(Z[pos] - first_z[pos])
                with np.errstate(all="ignore"):
                    lam = np.where(d1 > 0, d2 / np.maximum(d1, 1e-300), 0.0)
                okc = (lam < 1.0 - 1e-9) | (d1 < 1e-12)
                sel = pos[okc]
                if sel.size:
                    confirmed.append((idx[sel].copy(), first_p[sel].copy(),
                                      Z[sel].copy()))
                    mask = np.zeros(idx.size, dtype=bool)
                    mask[sel] = True
                    retire(mask, KIND_UNDECIDED)  # kind patched below
            if t_in_window >= 130:
                in_window = False
                snap = first_p = first_z = None

    # decide tricorn vs mandelbrot for the confirmed cycles, grouped by period
    for gidx, periods, zs in confirmed:
        for p in np.unique(periods):
            sel = periods == p
            gi = gidx[sel]
            z = zs[sel]
            pars = flat[gi]
            pts = np.empty((p, gi.size), dtype=complex)
            cur = z.copy()
            for j in range(p):
                pts[j] = cur
                cur = _family_step(family, cur, pars)
            if family is Family.NEWTON:
                imgs = np.conj(pts)
            else:
                with np.errstate(all="ignore"):
                    imgs = -1.0 / np.conj(pts)
            dmin = np.zeros(gi.size)
            for j in range(p):
                dj = np.min(np.abs(imgs[j][None, :] - pts), axis=0)
                dmin = np.maximum(dmin, dj)
            selfsym = dmin < 1e-4
            tric = selfsym & (p % 2 == 0)
            kind[gi[tric]] = KIND_TRICORN
            kind[gi[~tric]] = KIND_MANDELBROT
            period[gi] = int(p)

    # batched principal/capture decision for fixed-basin pixels
    if fixed_idx:
        fi = np.concatenate(fixed_idx)
        ft = np.concatenate(fixed_target_kind)
        if family is Family.NEWTON:
            starts = newton_c_plus(flat[fi])
        else:
            starts = antipodal_c_plus(flat[fi])
        imm = _segment_immediate(family, flat[fi], starts, ft, budget)
        kind[fi[imm]] = KIND_PRINCIPAL
        kind[fi[~imm]] = KIND_CAPTURE
        period[fi] = 1

    return kind.reshape(params.shape), period.reshape(params.shape)


def basin_grid(param: Parameter, Z0: np.ndarray, budget: int,
               cycle: list | None = None,
               cycle_eps: float = 1e-6) -> np.ndarray:
    """Basin class per starting point of the dynamical plane.

    Codes: 0 undecided, 1 + target index for fixed basins (Newton targets
    [1, -1, a, conj a]; antipodal [0, infinity]), 100 + slot for the Fatou
    component cycle slots of a supplied attracting cycle.
    """
    flat = Z0.ravel()
    out = np.zeros(flat.size, dtype=np.int16)
    idx = np.arange(flat.size)
    Z = flat.copy()
    fam = param.family
    a = param.value
    if fam is Family.NEWTON:
        targets = [1.0 + 0j, -1.0 + 0j, a, np.conj(a)]
    else:
        targets = [0j]
    cyc = np.array(cycle, dtype=complex) if cycle else None
    p = len(cycle) if cycle else 0

    for t in range(budget):
        if not idx.size:
            break
        Z = _family_step(fam, Z, a)
        bad = ~np.isfinite(Z.real) | ~np.isfinite(Z.imag)
        codes = np.zeros(idx.size, dtype=np.int16)
        for k, tgt in enumerate(targets):
            hit = (np.abs(Z - tgt) < TARGET_RADIUS) & ~bad & (codes == 0)
            codes[hit] = BASIN_FIXED_BASE + k
        if fam is Family.ANTIPODAL:
            esc = (np.abs(Z) > ESCAPE_RADIUS) & ~bad & (codes == 0)
            codes[esc] = BASIN_FIXED_BASE + 1
        if cyc is not None:
            dists = np.abs(Z[None, :] - cyc[:, None])
            jmin = np.argmin(dists, axis=0)
            dmin = np.min(dists, axis=0)
            hit = (dmin < cycle_eps) & ~bad & (codes == 0)
            slots = (jmin - (t + 1)) % p
            codes[hit] = (BASIN_CYCLE_BASE + slots[hit]).astype(np.int16)
        done = bad | (codes != 0)
        if done.any():
            pos = np.nonzero(done)[0]
            out[idx[pos]] = codes[pos]  # bad pixels keep code 0
            keep = ~done
            idx = idx[keep]
            Z = Z[keep]
    return out.reshape(Z0.shape)
