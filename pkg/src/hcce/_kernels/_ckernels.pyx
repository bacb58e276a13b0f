# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Must stay numerically in step with ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, ceil, fabs, INFINITY

cnp.import_array()

cdef double PARALLEL_EPS = 1e-9
cdef double MIN_HIT_T = 1e-6
cdef double FRONT_Z_EPS = 1e-9


def raycast_surfaces(cnp.ndarray[double, ndim=2, mode="c"] cam_vertices,
                     cnp.ndarray[long long, ndim=2, mode="c"] triangles,
                     double fx, double fy, double cx, double cy,
                     int width, int height):
    """Nearest and farthest ray parameter per pixel.

    ``cam_vertices`` are already in the camera frame. The ray through pixel
    (col, row) is t * ((col + 0.5 - cx) / fx, (row + 0.5 - cy) / fy, 1), so
    the ray parameter equals camera depth.
    """
    cdef cnp.ndarray[double, ndim=2] t_near = np.full((height, width), INFINITY)
    cdef cnp.ndarray[double, ndim=2] t_far = np.full((height, width), -INFINITY)
    cdef double[:, ::1] vv = cam_vertices
    cdef long long[:, ::1] tri = triangles
    cdef double[:, ::1] tn = t_near
    cdef double[:, ::1] tf = t_far
    cdef Py_ssize_t k, ntri = tri.shape[0]
    cdef int row, col, r0, r1, c0, c1, j
    cdef double ax, ay, az, bx, by, bz, qx, qy, qz
    cdef double e1x, e1y, e1z, e2x, e2y, e2z
    cdef double px, py, pz, sx, sy, sz, hx, hy, hz
    cdef double dx, dy, det, inv, u, v, t
    cdef double umin, umax, vmin, vmax, pu, pv
    cdef int n_front
    cdef long long ia, ib, ic

    with nogil:
        for k in range(ntri):
            ia = tri[k, 0]
            ib = tri[k, 1]
            ic = tri[k, 2]
            ax = vv[ia, 0]; ay = vv[ia, 1]; az = vv[ia, 2]
            bx = vv[ib, 0]; by = vv[ib, 1]; bz = vv[ib, 2]
            qx = vv[ic, 0]; qy = vv[ic, 1]; qz = vv[ic, 2]

            if az <= 0 and bz <= 0 and qz <= 0:
                continue
            n_front = (az > FRONT_Z_EPS) + (bz > FRONT_Z_EPS) + (qz > FRONT_Z_EPS)
            if n_front == 3:
                umin = INFINITY; umax = -INFINITY; vmin = INFINITY; vmax = -INFINITY
                for j in range(3):
                    if j == 0:
                        pu = fx * ax / az + cx; pv = fy * ay / az + cy
                    elif j == 1:
                        pu = fx * bx / bz + cx; pv = fy * by / bz + cy
                    else:
                        pu = fx * qx / qz + cx; pv = fy * qy / qz + cy
                    if pu < umin: umin = pu
                    if pu > umax: umax = pu
                    if pv < vmin: vmin = pv
                    if pv > vmax: vmax = pv
                # one-pixel margin absorbs rounding at bbox edges
                c0 = <int>ceil(umin - 0.5) - 1
                c1 = <int>floor(umax - 0.5) + 1
                r0 = <int>ceil(vmin - 0.5) - 1
                r1 = <int>floor(vmax - 0.5) + 1
                if c0 < 0: c0 = 0
                if r0 < 0: r0 = 0
                if c1 > width - 1: c1 = width - 1
                if r1 > height - 1: r1 = height - 1
                if c0 > c1 or r0 > r1:
                    continue
            else:
                c0 = 0; c1 = width - 1; r0 = 0; r1 = height - 1

            e1x = bx - ax; e1y = by - ay; e1z = bz - az
            e2x = qx - ax; e2y = qy - ay; e2z = qz - az
            sx = -ax; sy = -ay; sz = -az
            for row in range(r0, r1 + 1):
                dy = (row + 0.5 - cy) / fy
                for col in range(c0, c1 + 1):
                    dx = (col + 0.5 - cx) / fx
                    # p = d x e2, d = (dx, dy, 1)
                    px = dy * e2z - e2y
                    py = e2x - dx * e2z
                    pz = dx * e2y - dy * e2x
                    det = e1x * px + e1y * py + e1z * pz
                    if fabs(det) < PARALLEL_EPS:
                        continue
                    inv = 1.0 / det
                    u = (sx * px + sy * py + sz * pz) * inv
                    if u < 0.0 or u > 1.0:
                        continue
                    # h = s x e1
                    hx = sy * e1z - sz * e1y
                    hy = sz * e1x - sx * e1z
                    hz = sx * e1y - sy * e1x
                    v = (dx * hx + dy * hy + hz) * inv
                    if v < 0.0 or u + v > 1.0:
                        continue
                    t = (e2x * hx + e2y * hy + e2z * hz) * inv
                    if t < MIN_HIT_T:
                        continue
                    if t < tn[row, col]:
                        tn[row, col] = t
                    if t > tf[row, col]:
                        tf[row, col] = t
    return t_near, t_far


def hcce_to_binary(cnp.ndarray[double, ndim=2, mode="c"] codes):
    """Mirror-reversing binarization of (n, levels) continuous codes."""
    cdef Py_ssize_t n = codes.shape[0], levels = codes.shape[1], i, j
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((n, levels), dtype=np.uint8)
    cdef double[:, ::1] c = codes
    cdef cnp.uint8_t[:, ::1] o = out
    cdef cnp.uint8_t prev, g
    with nogil:
        for i in range(n):
            prev = 0
            for j in range(levels):
                g = <cnp.uint8_t>(c[i, j] >= 0.5) ^ prev  # branchless: inputs are random
                o[i, j] = g
                prev = g
    return out


cdef int _solve_small(double* a, double* b, int n) noexcept nogil:
    """Gaussian elimination with partial pivoting, in place; b gets x."""
    cdef int i, j, k, piv
    cdef double m, tmp
    for k in range(n):
        piv = k
        for i in range(k + 1, n):
            if fabs(a[i * n + k]) > fabs(a[piv * n + k]):
                piv = i
        if fabs(a[piv * n + k]) < 1e-300:
            return 0
        if piv != k:
            for j in range(n):
                tmp = a[k * n + j]; a[k * n + j] = a[piv * n + j]; a[piv * n + j] = tmp
            tmp = b[k]; b[k] = b[piv]; b[piv] = tmp
        for i in range(k + 1, n):
            m = a[i * n + k] / a[k * n + k]
            for j in range(k, n):
                a[i * n + j] -= m * a[k * n + j]
            b[i] -= m * b[k]
    for i in range(n - 1, -1, -1):
        tmp = b[i]
        for j in range(i + 1, n):
            tmp -= a[i * n + j] * b[j]
        b[i] = tmp / a[i * n + i]
    return 1


def gauss_newton_betas(cnp.ndarray[double, ndim=3, mode="c"] g,
                       cnp.ndarray[double, ndim=1, mode="c"] rho,
                       cnp.ndarray[double, ndim=1, mode="c"] betas,
                       int iters):
    """Fit b so that b^T G_p b = rho_p for every control-point pair p."""
    cdef Py_ssize_t npair = g.shape[0], nb = g.shape[1], p, m, n, it
    cdef cnp.ndarray[double, ndim=1] out = betas.copy()
    cdef double[::1] b = out
    cdef double[:, :, ::1] gg = g
    cdef double[::1] rr = rho
    cdef double jac[4]
    cdef double jtj[16]
    cdef double jtr[4]
    cdef double res
    if nb > 4:
        raise ValueError("at most 4 betas")
    with nogil:
        for it in range(iters):
            for m in range(nb * nb):
                jtj[m] = 0.0
            for m in range(nb):
                jtr[m] = 0.0
            for p in range(npair):
                res = -rr[p]
                for m in range(nb):
                    jac[m] = 0.0
                    for n in range(nb):
                        jac[m] += gg[p, m, n] * b[n]
                    res += jac[m] * b[m]
                    jac[m] *= 2.0
                for m in range(nb):
                    jtr[m] -= jac[m] * res
                    for n in range(nb):
                        jtj[m * nb + n] += jac[m] * jac[n]
            if not _solve_small(jtj, jtr, <int>nb):
                break
            for m in range(nb):
                b[m] += jtr[m]
    return out


# --------------------------------------------------------------------------
# EPnP
# --------------------------------------------------------------------------

from scipy.linalg.cython_lapack cimport dsyev, dgesvd
from libc.math cimport sqrt
from libc.stdlib cimport malloc, free

cdef double COLLINEAR_LAMBDA = 1e-14
cdef double PLANAR_LAMBDA = 1e-10
cdef double MIN_DEPTH = 1e-9


cdef int _sym_eig(double* a, int n, double* w) noexcept nogil:
    """Eigen-decomposition of a symmetric n x n matrix; eigenvectors overwrite a
    (column j = a[j*n:(j+1)*n]), eigenvalues ascending in w."""
    cdef char jobz = b'V'
    cdef char uplo = b'L'
    cdef int lwork = 64 * n, info = 0
    cdef double* work = <double*>malloc(lwork * sizeof(double))
    if work == NULL:
        return 0
    dsyev(&jobz, &uplo, &n, a, &n, w, work, &lwork, &info)
    free(work)
    return info == 0


cdef int _svd3(double* h, double* u, double* s, double* vt) noexcept nogil:
    """SVD of a column-major 3x3 matrix h (destroyed)."""
    cdef char job = b'A'
    cdef int three = 3, lwork = 64, info = 0
    cdef double work[64]
    dgesvd(&job, &job, &three, &three, h, &three, s, u, &three, vt, &three, work, &lwork, &info)
    return info == 0


cdef double _det3(double* m) noexcept nogil:
    # row-major
    return (m[0] * (m[4] * m[8] - m[5] * m[7])
            - m[1] * (m[3] * m[8] - m[5] * m[6])
            + m[2] * (m[3] * m[7] - m[4] * m[6]))


cdef void _gn(double* g, double* rho, int npair, int nb, double* b, int iters) noexcept nogil:
    cdef int it, p, m, n
    cdef double jac[4]
    cdef double jtj[16]
    cdef double jtr[4]
    cdef double res
    for it in range(iters):
        for m in range(nb * nb):
            jtj[m] = 0.0
        for m in range(nb):
            jtr[m] = 0.0
        for p in range(npair):
            res = -rho[p]
            for m in range(nb):
                jac[m] = 0.0
                for n in range(nb):
                    jac[m] += g[(p * nb + m) * nb + n] * b[n]
                res += jac[m] * b[m]
                jac[m] *= 2.0
            for m in range(nb):
                jtr[m] -= jac[m] * res
                for n in range(nb):
                    jtj[m * nb + n] += jac[m] * jac[n]
        if not _solve_small(jtj, jtr, nb):
            break
        for m in range(nb):
            b[m] += jtr[m]


cdef int _init_betas(double* g, double* rho, int npair, int nb, int ncase, double* b) noexcept nogil:
    """Linearized initial betas for the first ``ncase`` null vectors."""
    cdef int ia[6]
    cdef int ib[6]
    cdef int nu = 0, a, c, p, i, j
    cdef double ata[36]
    cdef double atb[6]
    cdef double row[6]
    cdef double num = 0.0, den = 0.0, d
    for i in range(nb):
        b[i] = 0.0
    if ncase == 1:
        for p in range(npair):
            d = g[(p * nb) * nb]
            if d < 0:
                d = 0
            d = sqrt(d)
            num += d * sqrt(rho[p])
            den += d * d
        if den <= 0:
            return 0
        b[0] = num / den
        return 1
    if ncase == 4 and nb == 4:
        for a in range(4):
            ia[nu] = 0; ib[nu] = a; nu += 1
    else:
        for a in range(ncase):
            for c in range(a, ncase):
                ia[nu] = a; ib[nu] = c; nu += 1
    if npair < nu:
        return 0
    for i in range(nu * nu):
        ata[i] = 0.0
    for i in range(nu):
        atb[i] = 0.0
    for p in range(npair):
        for i in range(nu):
            row[i] = g[(p * nb + ia[i]) * nb + ib[i]] * (1.0 if ia[i] == ib[i] else 2.0)
        for i in range(nu):
            atb[i] += row[i] * rho[p]
            for j in range(nu):
                ata[i * nu + j] += row[i] * row[j]
    if not _solve_small(ata, atb, nu):
        return 0
    b[0] = sqrt(fabs(atb[0]))
    for a in range(1, ncase):
        if b[0] > 1e-12:
            for i in range(nu):
                if ia[i] == 0 and ib[i] == a:
                    b[a] = atb[i] / b[0]
        else:
            for i in range(nu):
                if ia[i] == a and ib[i] == a:
                    b[a] = sqrt(fabs(atb[i]))
    return 1


def epnp(cnp.ndarray[double, ndim=2, mode="c"] points,
         cnp.ndarray[double, ndim=2, mode="c"] pixels,
         double fx, double fy, double cx, double cy, int gn_iters):
    """Returns (status, R (3x3), t (3,), rms). status: 0 ok, 1 collinear,
    2 rank deficient, 3 every candidate behind the camera."""
    cdef Py_ssize_t n = points.shape[0]
    cdef double[:, ::1] pw = points
    cdef double[:, ::1] uv = pixels
    cdef cnp.ndarray[double, ndim=2] r_out = np.zeros((3, 3))
    cdef cnp.ndarray[double, ndim=1] t_out = np.zeros(3)
    cdef double[:, ::1] ro = r_out
    cdef double[::1] to = t_out
    cdef double cen[3]
    cdef double cov[9]
    cdef double lam[3]
    cdef double axes[9]
    cdef double scale[3]
    cdef double ctrl[12]
    cdef double mtm[144]
    cdef double mw[12]
    cdef double row1[12]
    cdef double row2[12]
    cdef double g[6 * 16]
    cdef double rho[6]
    cdef double betas[4]
    cdef double cc[12]
    cdef double h[9]
    cdef double uu[9]
    cdef double ss[3]
    cdef double vt[9]
    cdef double rr[9]
    cdef double tt[3]
    cdef double pcm[3]
    cdef double best_r[9]
    cdef double best_t[3]
    cdef double best_err = INFINITY
    cdef double* alphas
    cdef double* pc
    cdef int k, dim, nnull, npair, p, a, b, i, j, m, q, ncase, status = 2, ok
    cdef double xi, yi, d, zsum, err, x, y, z, du, dv, sgn
    cdef int pa[6]
    cdef int pb[6]
    cdef int nfront_ok

    if n < 4:
        return 2, r_out, t_out, INFINITY
    alphas = <double*>malloc(n * 4 * sizeof(double))
    pc = <double*>malloc(n * 3 * sizeof(double))
    if alphas == NULL or pc == NULL:
        free(alphas); free(pc)
        raise MemoryError()
    with nogil:
        for j in range(3):
            cen[j] = 0.0
        for i in range(n):
            for j in range(3):
                cen[j] += pw[i, j]
        for j in range(3):
            cen[j] /= n
        for j in range(9):
            cov[j] = 0.0
        for i in range(n):
            for a in range(3):
                for b in range(3):
                    cov[a * 3 + b] += (pw[i, a] - cen[a]) * (pw[i, b] - cen[b])
        ok = _sym_eig(cov, 3, lam)
        # lam ascending: principal axes are columns 2, 1, 0
        if not ok or lam[2] <= 0 or lam[1] <= COLLINEAR_LAMBDA * lam[2]:
            status = 1
        else:
            k = 3 if lam[0] <= PLANAR_LAMBDA * lam[2] else 4
            for j in range(k - 1):
                scale[j] = sqrt(lam[2 - j] / n)
                for a in range(3):
                    axes[j * 3 + a] = cov[(2 - j) * 3 + a]
            for a in range(3):
                ctrl[a] = cen[a]
            for j in range(k - 1):
                for a in range(3):
                    ctrl[(j + 1) * 3 + a] = cen[a] + scale[j] * axes[j * 3 + a]
            for i in range(n):
                d = 0.0
                for j in range(k - 1):
                    x = 0.0
                    for a in range(3):
                        x += (pw[i, a] - cen[a]) * axes[j * 3 + a]
                    alphas[i * 4 + j + 1] = x / scale[j]
                    d += x / scale[j]
                alphas[i * 4] = 1.0 - d

            dim = 3 * k
            for j in range(dim * dim):
                mtm[j] = 0.0
            for i in range(n):
                xi = (uv[i, 0] - cx) / fx
                yi = (uv[i, 1] - cy) / fy
                for j in range(k):
                    row1[3 * j] = alphas[i * 4 + j]
                    row1[3 * j + 1] = 0.0
                    row1[3 * j + 2] = -alphas[i * 4 + j] * xi
                    row2[3 * j] = 0.0
                    row2[3 * j + 1] = alphas[i * 4 + j]
                    row2[3 * j + 2] = -alphas[i * 4 + j] * yi
                for a in range(dim):
                    for b in range(dim):
                        mtm[a * dim + b] += row1[a] * row1[b] + row2[a] * row2[b]
            ok = _sym_eig(mtm, dim, mw)
            if ok:
                nnull = 4 if k == 4 else 2
                npair = 0
                for a in range(k):
                    for b in range(a + 1, k):
                        pa[npair] = a; pb[npair] = b; npair += 1
                for p in range(npair):
                    rho[p] = 0.0
                    for q in range(3):
                        d = ctrl[pa[p] * 3 + q] - ctrl[pb[p] * 3 + q]
                        rho[p] += d * d
                    for m in range(nnull):
                        for j in range(nnull):
                            d = 0.0
                            for q in range(3):
                                d += ((mtm[m * dim + pa[p] * 3 + q] - mtm[m * dim + pb[p] * 3 + q])
                                      * (mtm[j * dim + pa[p] * 3 + q] - mtm[j * dim + pb[p] * 3 + q]))
                            g[(p * nnull + m) * nnull + j] = d

                status = 3
                for ncase in range(1, nnull + 1):
                    if not _init_betas(g, rho, npair, nnull, ncase, betas):
                        continue
                    _gn(g, rho, npair, nnull, betas, gn_iters)
                    for j in range(dim):
                        cc[j] = 0.0
                        for m in range(nnull):
                            cc[j] += betas[m] * mtm[m * dim + j]
                    zsum = 0.0
                    for i in range(n):
                        for q in range(3):
                            d = 0.0
                            for j in range(k):
                                d += alphas[i * 4 + j] * cc[j * 3 + q]
                            pc[i * 3 + q] = d
                        zsum += pc[i * 3 + 2]
                    sgn = -1.0 if zsum < 0 else 1.0
                    for q in range(3):
                        pcm[q] = 0.0
                    for i in range(n):
                        for q in range(3):
                            pc[i * 3 + q] *= sgn
                            pcm[q] += pc[i * 3 + q]
                    for q in range(3):
                        pcm[q] /= n
                    # h = sum (pw - cen)(pc - pcm)^T, stored column-major
                    for j in range(9):
                        h[j] = 0.0
                    for i in range(n):
                        for a in range(3):
                            for b in range(3):
                                h[b * 3 + a] += (pw[i, a] - cen[a]) * (pc[i * 3 + b] - pcm[b])
                    if not _svd3(h, uu, ss, vt):
                        continue
                    # column-major U, Vt -> R = V diag(1,1,d) U^T (row-major rr)
                    for a in range(3):
                        for b in range(3):
                            rr[a * 3 + b] = 0.0
                            for q in range(3):
                                rr[a * 3 + b] += vt[a * 3 + q] * uu[q * 3 + b]
                    if _det3(rr) < 0:
                        for a in range(3):
                            for b in range(3):
                                rr[a * 3 + b] -= 2.0 * vt[a * 3 + 2] * uu[2 * 3 + b]
                    for a in range(3):
                        tt[a] = pcm[a]
                        for b in range(3):
                            tt[a] -= rr[a * 3 + b] * cen[b]
                    err = 0.0
                    nfront_ok = 1
                    for i in range(n):
                        x = tt[0]; y = tt[1]; z = tt[2]
                        for b in range(3):
                            x += rr[0 * 3 + b] * pw[i, b]
                            y += rr[1 * 3 + b] * pw[i, b]
                            z += rr[2 * 3 + b] * pw[i, b]
                        if not z > MIN_DEPTH:
                            nfront_ok = 0
                            break
                        du = fx * x / z + cx - uv[i, 0]
                        dv = fy * y / z + cy - uv[i, 1]
                        err += du * du + dv * dv
                    if not nfront_ok:
                        continue
                    err = sqrt(err / n)
                    if err < best_err:
                        best_err = err
                        for j in range(9):
                            best_r[j] = rr[j]
                        for j in range(3):
                            best_t[j] = tt[j]
                        status = 0
    free(alphas)
    free(pc)
    if status == 0:
        for a in range(3):
            for b in range(3):
                ro[a, b] = best_r[a * 3 + b]
            to[a] = best_t[a]
    return status, r_out, t_out, best_err
