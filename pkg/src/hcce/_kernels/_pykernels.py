"""Pure numpy versions of the compiled kernels.

Same traversal and arithmetic order as ``_ckernels.pyx``: per triangle,
a vectorized Moller-Trumbore test over the pixels of its projected
bounding box.
"""

import math

import numpy as np

PARALLEL_EPS = 1e-9
MIN_HIT_T = 1e-6
FRONT_Z_EPS = 1e-9


def raycast_surfaces(cam_vertices, triangles, fx, fy, cx, cy, width, height):
    t_near = np.full((height, width), np.inf)
    t_far = np.full((height, width), -np.inf)
    dx_all = (np.arange(width) + 0.5 - cx) / fx
    dy_all = (np.arange(height) + 0.5 - cy) / fy

    for ia, ib, ic in triangles:
        a, b, q = cam_vertices[ia], cam_vertices[ib], cam_vertices[ic]
        if a[2] <= 0 and b[2] <= 0 and q[2] <= 0:
            continue
        tri = np.stack([a, b, q])
        if np.all(tri[:, 2] > FRONT_Z_EPS):
            pu = fx * tri[:, 0] / tri[:, 2] + cx
            pv = fy * tri[:, 1] / tri[:, 2] + cy
            c0 = max(math.ceil(pu.min() - 0.5) - 1, 0)
            c1 = min(math.floor(pu.max() - 0.5) + 1, width - 1)
            r0 = max(math.ceil(pv.min() - 0.5) - 1, 0)
            r1 = min(math.floor(pv.max() - 0.5) + 1, height - 1)
            if c0 > c1 or r0 > r1:
                continue
        else:
            c0, c1, r0, r1 = 0, width - 1, 0, height - 1

        e1x, e1y, e1z = b[0] - a[0], b[1] - a[1], b[2] - a[2]
        e2x, e2y, e2z = q[0] - a[0], q[1] - a[1], q[2] - a[2]
        sx, sy, sz = -a[0], -a[1], -a[2]
        dx = dx_all[c0:c1 + 1][None, :]
        dy = dy_all[r0:r1 + 1][:, None]

        px = dy * e2z - e2y
        py = e2x - dx * e2z
        pz = dx * e2y - dy * e2x
        det = e1x * px + e1y * py + e1z * pz
        ok = np.abs(det) >= PARALLEL_EPS
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / det
            u = (sx * px + sy * py + sz * pz) * inv
            hx = sy * e1z - sz * e1y
            hy = sz * e1x - sx * e1z
            hz = sx * e1y - sy * e1x
            v = (dx * hx + dy * hy + hz) * inv
            t = (e2x * hx + e2y * hy + e2z * hz) * inv
        ok &= (u >= 0.0) & (u <= 1.0) & (v >= 0.0) & (u + v <= 1.0) & (t >= MIN_HIT_T)
        if not ok.any():
            continue
        t_hit = np.broadcast_to(t, ok.shape)
        block_near = t_near[r0:r1 + 1, c0:c1 + 1]
        block_far = t_far[r0:r1 + 1, c0:c1 + 1]
        np.minimum(block_near, np.where(ok, t_hit, np.inf), out=block_near)
        np.maximum(block_far, np.where(ok, t_hit, -np.inf), out=block_far)
    return t_near, t_far


def hcce_to_binary(codes):
    n, levels = codes.shape
    out = np.zeros((n, levels), dtype=np.uint8)
    prev = np.zeros(n, dtype=np.uint8)
    for j in range(levels):
        g = (codes[:, j] >= 0.5).astype(np.uint8)
        prev = g ^ prev
        out[:, j] = prev
    return out


def gauss_newton_betas(g, rho, betas, iters):
    b = betas.copy()
    for _ in range(iters):
        gb = g @ b
        res = np.einsum("pn,n->p", gb, b) - rho
        jac = 2.0 * gb
        try:
            step = np.linalg.solve(jac.T @ jac, -(jac.T @ res))
        except np.linalg.LinAlgError:
            break
        b = b + step
    return b


# --------------------------------------------------------------------------
# EPnP
# --------------------------------------------------------------------------

COLLINEAR_LAMBDA = 1e-14
PLANAR_LAMBDA = 1e-10
MIN_DEPTH = 1e-9


def _epnp_control_points(pw):
    center = pw.mean(axis=0)
    centered = pw - center
    lam, vec = np.linalg.eigh(centered.T @ centered)
    if not lam[2] > 0 or lam[1] <= COLLINEAR_LAMBDA * lam[2]:
        return None
    k = 3 if lam[0] <= PLANAR_LAMBDA * lam[2] else 4
    order = [2, 1, 0][: k - 1]
    scale = np.sqrt(lam[order] / len(pw))
    axes = vec[:, order].T
    ctrl = np.vstack([center, center + scale[:, None] * axes])
    rest = (centered @ axes.T) / scale
    return ctrl, np.column_stack([1.0 - rest.sum(axis=1), rest])


def _epnp_init_betas(g, rho, n_case, n_total):
    betas = np.zeros(n_total)
    if n_case == 1:
        d = np.sqrt(np.maximum(g[:, 0, 0], 0))
        denom = d @ d
        if denom <= 0:
            return None
        betas[0] = (d @ np.sqrt(rho)) / denom
        return betas
    if n_case == n_total == 4:
        idx = [(0, 0), (0, 1), (0, 2), (0, 3)]
    else:
        idx = [(a, b) for a in range(n_case) for b in range(a, n_case)]
    lin = np.column_stack([g[:, a, b] * (1 if a == b else 2) for a, b in idx])
    if lin.shape[0] < lin.shape[1]:
        return None
    try:
        prod = np.linalg.solve(lin.T @ lin, lin.T @ rho)
    except np.linalg.LinAlgError:
        return None
    betas[0] = np.sqrt(abs(prod[0]))
    for m in range(1, n_case):
        if betas[0] > 1e-12:
            betas[m] = prod[idx.index((0, m))] / betas[0]
        elif (m, m) in idx:
            betas[m] = np.sqrt(abs(prod[idx.index((m, m))]))
    return betas


def epnp(points, pixels, fx, fy, cx, cy, gn_iters):
    """Same contract as the compiled ``epnp``: (status, R, t, rms)."""
    pw, uv = points, pixels
    zero_r, zero_t = np.zeros((3, 3)), np.zeros(3)
    if len(pw) < 4:
        return 2, zero_r, zero_t, np.inf
    cp = _epnp_control_points(pw)
    if cp is None:
        return 1, zero_r, zero_t, np.inf
    ctrl, alphas = cp
    k = len(ctrl)
    xn = np.column_stack([(uv[:, 0] - cx) / fx, (uv[:, 1] - cy) / fy])
    m = np.zeros((2 * len(pw), 3 * k))
    m[0::2, 0::3] = alphas
    m[0::2, 2::3] = -alphas * xn[:, :1]
    m[1::2, 1::3] = alphas
    m[1::2, 2::3] = -alphas * xn[:, 1:]
    _, eigvec = np.linalg.eigh(m.T @ m)
    n_null = 4 if k == 4 else 2
    null_vecs = eigvec[:, :n_null]

    vecs = null_vecs.T.reshape(n_null, k, 3)
    pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
    diffs = np.stack([vecs[:, a] - vecs[:, b] for a, b in pairs])
    g = np.einsum("pmi,pni->pmn", diffs, diffs)
    rho = np.array([np.sum((ctrl[a] - ctrl[b]) ** 2) for a, b in pairs])

    cands = []
    for n_case in range(1, n_null + 1):
        betas = _epnp_init_betas(g, rho, n_case, n_null)
        if betas is not None and np.all(np.isfinite(betas)):
            cands.append(gauss_newton_betas(g, rho, betas, gn_iters))
    if not cands:
        return 2, zero_r, zero_t, np.inf
    betas = np.array(cands)
    cc = (betas @ null_vecs.T).reshape(len(betas), k, 3)
    pc = np.einsum("nk,ckj->cnj", alphas, cc)
    pc[pc[:, :, 2].sum(axis=1) < 0] *= -1
    pc = pc[np.all(np.isfinite(pc), axis=(1, 2))]
    if not len(pc):
        return 2, zero_r, zero_t, np.inf

    # batched rigid Procrustes pw -> pc[c]
    cw = pw.mean(axis=0)
    pcm = pc.mean(axis=1)
    h = np.einsum("ni,cnj->cij", pw - cw, pc - pcm[:, None])
    u, _, vt = np.linalg.svd(h)
    v = np.swapaxes(vt, 1, 2)
    ut = np.swapaxes(u, 1, 2)
    r = v @ ut
    neg = np.linalg.det(r) < 0
    v[neg, :, 2] *= -1
    r = v @ ut
    t = pcm - np.einsum("cij,j->ci", r, cw)

    cam = np.einsum("cij,nj->cni", r, pw) + t[:, None]
    z = cam[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        du = fx * cam[..., 0] / z + cx - uv[:, 0]
        dv = fy * cam[..., 1] / z + cy - uv[:, 1]
        rms = np.sqrt(np.mean(du * du + dv * dv, axis=1))
    rms[np.any(~(z > MIN_DEPTH), axis=1) | ~np.isfinite(rms)] = np.inf
    best = int(np.argmin(rms))
    if not np.isfinite(rms[best]):
        return 3, zero_r, zero_t, np.inf
    return 0, r[best], t[best], float(rms[best])
