"""Independent model of the convex guidance subproblem on the three-node toy
instance of tests/toy_transcription.hpp.

The pointing cones are rebuilt here from the rotation itself (polarisation of
r . R(q) nu), not from the C++ factorisation, and the problem is stated
constraint by constraint with cvxpy. Prints the optimal objective and the
primal in the stacked per-node order [x; u; gamma; zeta; eta; rho; dx; du].
"""

import numpy as np
import cvxpy as cp

N, NW = 3, 2
NX = 7 + NW
DEG = np.pi / 180.0


def qmul(p, q):
    pv, ps = p[:3], p[3]
    qv, qs = q[:3], q[3]
    return np.concatenate([ps * qv + qs * pv + np.cross(pv, qv), [ps * qs - pv @ qv]])


def cos_form(r, nu):
    """Symmetric S with q^T S q = r . (q (x) [nu;0] (x) q*)_vec for any q."""
    def f(q):
        qc = np.concatenate([-q[:3], [q[3]]])
        return r @ qmul(qmul(q, np.concatenate([nu, [0.0]])), qc)[:3]

    e = np.eye(4)
    S = np.zeros((4, 4))
    for i in range(4):
        for j in range(4):
            S[i, j] = 0.5 * (f(e[i] + e[j]) - f(e[i]) - f(e[j]))
    return S


def factor(M):
    w, V = np.linalg.eigh(M)
    w = np.clip(w, 0.0, None)
    return np.diag(np.sqrt(w)) @ V.T


def unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


x_init = np.concatenate([unit([0.1, -0.2, 0.3, 0.9]), [0.1, -0.05, 0.02, 0.2, -0.1]])
A = [np.eye(NX) + 0.05 * np.fromfunction(lambda i, j: np.sin(1 + i + 2 * j + 3 * k), (NX, NX)) for k in range(N - 1)]
Bm = [0.1 * np.fromfunction(lambda i, j: np.cos(i + 3 * j + k), (NX, NW)) for k in range(N - 1)]
Bp = [0.1 * np.fromfunction(lambda i, j: np.cos(2 + i + 3 * j + k), (NX, NW)) for k in range(N - 1)]
s = [0.01 * np.sin(2 * np.arange(NX) + k) for k in range(N - 1)]
xbar = [x_init + 0.02 * np.sin(np.arange(NX) + k) for k in range(N)]
ubar = [0.1 * np.sin(np.arange(NW) + k + 1) for k in range(N)]
gbar = [1.0, 0.5, 0.0]
zbar = [1.0, 0.2, 0.0]
eps = 1e-3
beta = [1.0, 1.0, 0.1, 0.01, 0.1, 0.1]
trust_x, trust_u = 0.5, 0.5
nu = np.array([1.0, 0.0, 0.0])
sun = np.array([0.0, 0.0, -1.0])

x = [cp.Variable(NX) for _ in range(N)]
u = [cp.Variable(NW) for _ in range(N)]
g, z, eta, rho, dx, du = (cp.Variable(N) for _ in range(6))

cons = [x[0] == x_init]
cost = 0
for k in range(N):
    q = x[k][:4]
    target = unit([np.cos(0.3 * k), np.sin(0.3 * k), 0.1])
    C_t = cos_form(target, nu)   # cos(theta) = q^T C q
    C_s = cos_form(sun, nu)
    N_t = factor(np.eye(4) - C_t)  # ||N q||^2 = 1 - cos
    M_s = factor(np.eye(4) + C_s)  # ||M q||^2 = 1 + cos
    if k + 1 < N:
        cons.append(x[k + 1] == A[k] @ x[k] + Bm[k] @ u[k] + Bp[k] @ u[k + 1] + s[k])
    cons += [g[k] >= 0, z[k] >= 0]
    cons += [cp.abs(u[k]) <= 1.0, cp.abs(x[k][7:]) <= 0.97, cp.abs(x[k][4:7]) <= 0.97]
    cons += [dx[k] <= trust_x, du[k] <= trust_u]
    cons.append(cp.norm(M_s @ q) <= np.sqrt(1 + np.cos(60 * DEG)))
    cons.append(cp.norm(N_t @ q) <= eta[k])
    cons.append(cp.norm(N_t @ q) <= np.sqrt(1 - np.cos(5 * DEG)) + g[k])
    cons.append(cp.norm(factor(np.eye(4) - C_t) @ q) <= np.sqrt(1 - np.cos(20 * DEG)) + z[k])
    cons.append(cp.norm(u[k]) <= rho[k])
    cons.append(cp.norm(u[k] - ubar[k]) <= du[k])
    cons.append(cp.norm(x[k] - xbar[k]) <= dx[k])
    cost += (beta[0] / (eps + gbar[k]) * g[k] + beta[1] / (eps + zbar[k]) * z[k] + beta[2] * eta[k]
             + beta[3] * rho[k] + beta[4] * dx[k] + beta[5] * du[k])

prob = cp.Problem(cp.Minimize(cost), cons)
prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12, max_iter=200)
print("status", prob.status)
print("objective %.12f" % prob.value)
primal = []
for k in range(N):
    primal += list(x[k].value) + list(u[k].value)
    primal += [g.value[k], z.value[k], eta.value[k], rho.value[k], dx.value[k], du.value[k]]
print("primal", ", ".join("%.9f" % v for v in primal))
