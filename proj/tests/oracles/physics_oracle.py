"""Independent scipy oracle for frozen expected values in the C++ tests.

Run: python3 tests/oracles/physics_oracle.py
"""
import numpy as np
from scipy import integrate, special, linalg

KB_GHZ = 20.836619
EJ, EC, D, DD, XRES = 6.24, 0.357, 46.0, 4.52, 5.6e-10


def kt(T):
    return KB_GHZ * T


def transmon(ej, ec, ng_eff, n=30, k=6):
    N = np.arange(-n, n + 1)
    d = 4 * ec * (N - ng_eff) ** 2
    e = -ej / 2 * np.ones(2 * n)
    w, v = linalg.eigh_tridiagonal(d, e)
    return w[:k], v[:, :k], N


def f01_avg(ej, ec, ng):
    fs = []
    for P in (+1, -1):
        w, _, _ = transmon(ej, ec, ng - P / 4)
        fs.append(w[1] - w[0])
    return np.mean(fs), fs


def levels_avg(ej, ec, ng):
    ws = [transmon(ej, ec, ng - P / 4)[0] for P in (+1, -1)]
    return np.mean([w - w[0] for w in ws], axis=0)


def dispersion(ej, ec):
    g = np.linspace(0, 1, 401)
    f = [transmon(ej, ec, x)[0] for x in g]
    f01 = np.array([w[1] - w[0] for w in f])
    return f01.max() - f01.min()


def matrix_elements(ej, ec, ng, i, f, n=30):
    # initial in parity +1 (charges N+1/4), final in parity -1 (charges M-1/4)
    _, vp, N = transmon(ej, ec, ng - 0.25, n, 8)
    _, vm, _ = transmon(ej, ec, ng + 0.25, n, 8)
    c = vp[:, i]
    d = vm[:, f]
    # q = N + 1/4 ; q+1/2 -> M = N+1 ; q-1/2 -> M = N
    dp1 = np.append(d[1:], 0.0)
    cos = 0.5 * np.dot(c, dp1 + d)
    sin = 0.5 * np.dot(c, dp1 - d)
    return cos ** 2, sin ** 2


def matrix_elements_avg(ej, ec, ng, i, f, n=30):
    # average of initial parity +1 (above) and initial parity -1
    c_p, s_p = matrix_elements(ej, ec, ng, i, f, n)
    _, vm, _ = transmon(ej, ec, ng + 0.25, n, 8)
    _, vp, _ = transmon(ej, ec, ng - 0.25, n, 8)
    c = vm[:, i]
    d = vp[:, f]
    # q = N - 1/4 ; q+1/2 -> M = N ; q-1/2 -> M = N-1
    dm1 = np.insert(d[:-1], 0, 0.0)
    cos = 0.5 * np.dot(c, d + dm1)
    sin = 0.5 * np.dot(c, d - dm1)
    return 0.5 * (c_p + cos ** 2), 0.5 * (s_p + sin ** 2)


def state_rate(state, T, ng=0.163):
    lv = levels_avg(EJ, EC, ng)
    finals = {0: [0, 1], 1: [0, 1, 2], 2: [1, 2, 3]}[state]
    total = 0.0
    for f in finals:
        c2, s2 = matrix_elements_avg(EJ, EC, ng, state, f)
        ffi = lv[f] - lv[state]
        for dirn in ("LR", "RL"):
            total += c2 * sf_numeric(dirn, -1, ffi, T) + s2 * sf_numeric(dirn, +1, ffi, T)
    return 16 * EJ * 1e9 * total


def xqp(T, x=XRES, d=D):
    return x + np.sqrt(d / (2 * np.pi * kt(T))) * np.exp(-d / kt(T))


def zeta(T, vr=1.0, dd=DD):
    return 1 / (1 + vr * np.exp(-dd / kt(T)))


def F(eps, T, x=XRES, d=D, dd=DD):
    k = kt(T)
    return zeta(T, 1.0, dd) * x * np.sqrt(d / (2 * np.pi * k)) * np.exp(-(eps - d) / k) + np.exp(-eps / k)


def sf_numeric(direction, sign, f, T, x=XRES, d=D, dd=DD):
    k = kt(T)
    d2 = d + dd
    if direction == "LR":
        lo = max(d, d2 + f)
        def g(e):
            return ((e * (e - f) + sign * d * d2) / (np.sqrt(e * e - d * d) * np.sqrt((e - f) ** 2 - d2 ** 2))
                    * F(e, T, x, d, dd) * (1 - F(e - f, T, x, d, dd)))
    else:
        lo = max(d, d2 - f)
        def g(e):
            return ((e * (e + f) + sign * d * d2) / (np.sqrt(e * e - d * d) * np.sqrt((e + f) ** 2 - d2 ** 2))
                    * F(e + f, T, x, d, dd) * (1 - F(e, T, x, d, dd)))
    # substitution e = lo + u^2
    h = lambda u: 2 * u * g(lo + u * u)
    val, _ = integrate.quad(h, 0, np.sqrt(60 * k), epsabs=0, epsrel=1e-11, limit=400)
    return val / (d + dd / 2)


def sf_bessel(direction, sign, f, T, x=XRES, d=D, dd=DD):
    k = kt(T)
    A = zeta(T, 1.0, dd) * x * np.sqrt(d / (2 * np.pi * k)) + np.exp(-d / k)
    a = dd + f if direction == "LR" else dd - f
    z = a / (2 * k)
    pre = np.exp(-(dd + f) / (2 * k))
    if sign > 0:
        return A * pre * special.k0(z)
    return A * 0.5 * a / d * pre * special.k1(z)


if __name__ == "__main__":
    fq, fs = f01_avg(EJ, EC, 0.163)
    print("f01 avg", fq, fs)
    lv = levels_avg(EJ, EC, 0.163)
    print("levels avg", lv)
    print("dispersion", dispersion(EJ, EC))
    print("dispersion EJ/EC=100", dispersion(100 * EC, EC))
    w, _, _ = transmon(50 * EC, EC, 0.0)
    print("EJ/EC=50 f01", w[1] - w[0], np.sqrt(8 * 50 * EC * EC) - EC)
    for (i, f) in [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 3)]:
        print("me", i, f, matrix_elements(EJ, EC, 0.163, i, f))
    for (i, f) in [(0, 0), (0, 1), (1, 1), (1, 2), (2, 3)]:
        print("me avg", i, f, matrix_elements_avg(EJ, EC, 0.163, i, f))
    for T in [0.02, 0.06]:
        print("state rates numeric", T, [state_rate(s_, T) for s_ in (0, 1, 2)])
    print("zeta 20mK,100mK", zeta(0.02), zeta(0.1))
    print("xqp 100mK", xqp(0.1), xqp(0.1) - XRES)
    print("F(D,20mK)", F(D, 0.02))
    f10 = lv[1]; f21 = lv[2] - lv[1]; f32 = lv[3] - lv[2]
    print("f10,f21,f32", f10, f21, f32)
    for T in [0.02, 0.04, 0.06]:
        for f in [-fq, 0.0, fq]:
            for dirn in ("LR", "RL"):
                for s in (+1, -1):
                    n = sf_numeric(dirn, s, f, T); b = sf_bessel(dirn, s, f, T)
                    print(f"T={T} f={f:+.3f} {dirn} {s:+d} num={n:.6e} bes={b:.6e} rel={(n-b)/b:+.4f}")
