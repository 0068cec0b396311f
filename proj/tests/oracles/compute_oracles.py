"""Independent reference values for the C++ test suites.

Everything here is computed with numpy/scipy from first principles: exact
(analytic) state derivatives, eigenvalue-formula Fisher information and
multi-start numerical optimization over Bloch vectors.  The printed values
are frozen into the C++ tests.
"""
import numpy as np
from scipy.optimize import minimize

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = [X, Y, Z]


def qfi(rho, drho, tol=1e-12):
    p, v = np.linalg.eigh(rho)
    d = v.conj().T @ drho @ v
    s = 0.0
    for i in range(len(p)):
        for j in range(len(p)):
            if p[i] + p[j] > tol:
                s += 2 * abs(d[i, j]) ** 2 / (p[i] + p[j])
    return s


def depol(rho, eps, dim_a=1):
    ks = [np.sqrt(1 - 0.75 * eps) * I2] + [np.sqrt(eps) / 2 * s for s in PAULI]
    ks = [np.kron(k, np.eye(dim_a)) for k in ks]
    return sum(k @ rho @ k.conj().T for k in ks)


def ddepol(rho, dim_a=1):
    # d/deps of (1 - 3eps/4) rho + eps/4 sum s rho s
    ks = [np.kron(s, np.eye(dim_a)) for s in PAULI]
    return -0.75 * rho + 0.25 * sum(k @ rho @ k for k in ks)


def leading(ms, x):
    rho = 0.5 * (I2 + sum(x[a] * PAULI[a] for a in range(3)))
    return sum(np.trace(rho @ m.conj().T @ m).real - abs(np.trace(rho @ m)) ** 2 for m in ms)


def maximize(ms, ball):
    best = (-np.inf, None)
    rng = np.random.default_rng(0)
    for _ in range(60):
        if ball:
            f = lambda y: -leading(ms, y / max(1.0, np.linalg.norm(y)))
            y0 = rng.normal(size=3)
            y0 *= rng.uniform() / np.linalg.norm(y0)
        else:
            f = lambda y: -leading(ms, y / np.linalg.norm(y))
            y0 = rng.normal(size=3)
        r = minimize(f, y0, method="Nelder-Mead", options=dict(xatol=1e-13, fatol=1e-15, maxiter=20000))
        if -r.fun > best[0]:
            best = (-r.fun, r.x)
    return best[0]


print("# depolarizing, |0> input")
rho0 = np.diag([1.0, 0.0]).astype(complex)
for eps in (0.05, 0.1, 0.2):
    print(eps, qfi(depol(rho0, eps), ddepol(rho0)), 1 / (eps * (2 - eps)))
print("depol eps=0.1 on |0><0| diag:", np.diag(depol(rho0, 0.1)).real)

print("# depolarizing (x) id, Bell input")
bell = np.zeros(4, dtype=complex)
bell[0] = bell[3] = 1 / np.sqrt(2)
B = np.outer(bell, bell.conj())
for eps in (0.05, 0.1, 0.2):
    print(eps, qfi(depol(B, eps, 2), ddepol(B, 2)), 3 / (eps * (4 - 3 * eps)))

print("# GAD geometry, betaE = 1")
e = np.exp(-1.0)
k1, k2 = np.sqrt(1 / (1 + e)), np.sqrt(e / (1 + e))
M1 = k1 * np.array([[0, 1], [0, 0]], dtype=complex)
M2 = k2 * np.array([[0, 0], [1, 0]], dtype=complex)
print("tanh(0.5)/4 =", np.tanh(0.5) / 4, "(1-e)/(4(1+e)) =", (1 - e) / (4 * (1 + e)))
print("F(0,0,-1) =", leading([M1, M2], [0, 0, -1]), "1/(1+e^-1) =", 1 / (1 + e))

print("# GAD QFI, |1> input, eps = 0.1 (classical two-outcome family)")
eps = 0.1
p = k1**2 * eps
print("J_S =", k1**2 / eps + k1**4 / (1 - p))

print("# fixed noise-operator sets for eta")
FIXED = {
    "A": [np.array([[0.3 + 0.1j, 0.2], [0.5j, -0.1]]), np.array([[0.0, 0.4 - 0.2j], [0.1, 0.25j]]),
          np.array([[0.2, -0.1j], [0.3, 0.1 + 0.3j]])],
    "B": [np.array([[0.5, 0.0], [0.0, -0.5]]), np.array([[0.0, 0.6], [0.0, 0.0]])],
    "C": [0.5 * X, 0.5 * Y + 0.3 * Z, 0.2j * Z],
}
for name, ms in FIXED.items():
    ljs = maximize(ms, ball=False)
    ljsa = maximize(ms, ball=True)
    print(name, "L_JS =", repr(ljs), "L_JSA =", repr(ljsa), "eta =", repr(ljsa / ljs))

print("# sphere minimum of (x+k)H(x+k), H = diag(1,2,3)")
H = np.diag([1.0, 2.0, 3.0])
for k in ([0, 0, 0], [0.5, 0, 0], [0.2, -0.4, 0.3]):
    k = np.array(k, float)
    best = np.inf
    rng = np.random.default_rng(1)
    for _ in range(40):
        f = lambda y: (y / np.linalg.norm(y) + k) @ H @ (y / np.linalg.norm(y) + k)
        r = minimize(f, rng.normal(size=3), method="Nelder-Mead", options=dict(xatol=1e-13, fatol=1e-16, maxiter=20000))
        best = min(best, r.fun)
    print(k, repr(best))
