"""Independent dense 1D oracle for the values frozen into the unit tests.

Builds the P1-P1 matrices by hand, applies the theta method to the
differential-algebraic system M y' = A y + f in (u, p) with a Lagrange
multiplier for the pressure mean, and prints the quantities the C++ tests
compare against. Run: python3 tests/oracles/frozen_values.py
"""
import numpy as np
import scipy.linalg as sla


def assemble(n, lam=1.0, mu=1.0, kappa=1.0):
    h = 1.0 / n
    N = n + 1
    Mp = np.zeros((N, N))
    K1 = np.zeros((N, N))
    Dd = np.zeros((N, N))
    for e in range(n):
        i, j = e, e + 1
        Mp[np.ix_([i, j], [i, j])] += h / 6 * np.array([[2, 1], [1, 2]])
        K1[np.ix_([i, j], [i, j])] += 1 / h * np.array([[1, -1], [-1, 1]])
        for a in (i, j):
            Dd[a, i] += -0.5
            Dd[a, j] += 0.5
    I = np.arange(1, n)
    return dict(
        Mp=Mp,
        Ap=kappa * K1,
        Ke=(lam + 2 * mu) * K1[np.ix_(I, I)],
        Mu=Mp[np.ix_(I, I)],
        Dd=Dd[:, I],
        x=np.linspace(0, 1, N),
        h=h,
        I=I,
    )


def zero_mean(o, p):
    w = o["Mp"].sum(axis=0)
    return p - w @ p / w.sum()


def theta_run(o, c0, d1, alpha, dt, steps, p0, u0, theta=0.5):
    Ke, Mp, Ap, Dd, Mu = o["Ke"], o["Mp"], o["Ap"], o["Dd"], o["Mu"]
    nu, np_ = Ke.shape[0], Mp.shape[0]
    G = -Dd.T
    M = np.block([[d1 * Ke, np.zeros((nu, np_))], [alpha * Dd, c0 * Mp]])
    A = np.block([[-Ke, -alpha * G], [np.zeros((np_, nu)), -Ap]])
    w = Mp.sum(axis=0)
    L = np.zeros((nu + np_ + 1, nu + np_ + 1))
    L[: nu + np_, : nu + np_] = M - theta * dt * A
    L[nu:nu + np_, -1] = w
    L[-1, nu:nu + np_] = w
    R = M + (1 - theta) * dt * A
    y = np.r_[u0, p0]
    for _ in range(steps):
        rhs = np.r_[R @ y, 0.0]
        y = np.linalg.solve(L, rhs)[:-1]
    return y[:nu], y[nu:]


def mnorm(M, v):
    return float(np.sqrt(v @ M @ v))


def main():
    np.set_printoptions(precision=17)
    # discrete Poincare-Korn constant, 1D n = 128
    o = assemble(128)
    ev = sla.eigh(o["Ke"], o["Mu"], eigvals_only=True)
    print("poincare_korn_n128 = %.17g" % (1.0 / ev.min()))

    # B on phi_1, n = 32
    o = assemble(32)
    x = o["x"]
    p = zero_mean(o, np.sqrt(2) * np.cos(np.pi * x))
    Bd = o["Dd"] @ np.linalg.solve(o["Ke"], o["Dd"].T)
    Bp = zero_mean(o, np.linalg.solve(o["Mp"], Bd @ p))
    print("b_identity_err_n32_k1 = %.17g" % (mnorm(o["Mp"], Bp - p / 3) / mnorm(o["Mp"], p)))

    # theta = 1/2 visco run, c0 = 0.1, delta1 = 0.5, n = 16, dt = 0.01, 10 steps
    o = assemble(16)
    x = o["x"]
    p0 = zero_mean(o, np.sqrt(2) * np.cos(np.pi * x))
    u0 = 0.3 * np.sqrt(2) * np.sin(np.pi * x[o["I"]])
    u, p = theta_run(o, 0.1, 0.5, 1.0, 0.01, 10, p0, u0)
    print("visco_n16_p_l2 = %.17g" % mnorm(o["Mp"], p))
    print("visco_n16_u_l2 = %.17g" % mnorm(o["Mu"], u))
    print("visco_n16_p_node0 = %.17g" % p[0])

    # backward Euler, same data
    u, p = theta_run(o, 0.1, 0.5, 1.0, 0.01, 10, p0, u0, theta=1.0)
    print("visco_n16_be_p_l2 = %.17g" % mnorm(o["Mp"], p))
    print("visco_n16_be_u_l2 = %.17g" % mnorm(o["Mu"], u))


if __name__ == "__main__":
    main()
