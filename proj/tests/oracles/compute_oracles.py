"""Independent high-precision oracles for frozen test constants.

Run with: python3 tests/oracles/compute_oracles.py
Every value printed here is pasted into the C++ tests as a literal.
"""
import mpmath as mp

mp.mp.dps = 40

# E|g| for g ~ N(0,1), by quadrature of |x| * phi(x).
phi = lambda x: mp.exp(-x * x / 2) / mp.sqrt(2 * mp.pi)
e_abs_gauss = 2 * mp.quad(lambda x: x * phi(x), [0, mp.inf])
print("E|g|                    =", e_abs_gauss)
print("2*E|g|                  =", 2 * e_abs_gauss)

# E|L| for Laplace(0,1), by quadrature.
e_abs_laplace = mp.quad(lambda x: abs(x) * mp.exp(-abs(x)) / 2, [-mp.inf, 0, mp.inf])
print("E|Laplace(1)|           =", e_abs_laplace)

# Chernoff rate I(0.5, 0.25) from the two-term formula.
I = lambda b, p: b * mp.log(b / p) + (1 - b) * mp.log((1 - b) / (1 - p))
print("I(0.5,0.25)             =", I(mp.mpf("0.5"), mp.mpf("0.25")))
print("I(1e-12,0.5)            =", I(mp.mpf("1e-12"), mp.mpf("0.5")), " ln2 =", mp.log(2))
print("I(0.25,0.5)             =", I(mp.mpf("0.25"), mp.mpf("0.5")))
print("I(0.75,0.5)             =", I(mp.mpf("0.75"), mp.mpf("0.5")))

# c4 = (2/3) * int_1^inf 2^{-(t+1)/2} dt, by quadrature.
c4 = mp.mpf(2) / 3 * mp.quad(lambda t: mp.power(2, -(t + 1) / 2), [1, mp.inf])
print("c4                      =", c4, " closed (2/3)/ln2 =", mp.mpf(2) / 3 / mp.log(2))
print("gamma = 1/(1+c4)        =", 1 / (1 + c4))

# 2/3-quantile of |g|: solve P(|g| <= q) = 2/3 using quadrature CDF.
cdf_abs = lambda q: 2 * mp.quad(phi, [0, q])
q23 = mp.findroot(lambda q: cdf_abs(q) - mp.mpf(2) / 3, 1.0)
print("q_{2/3}(|g|)            =", q23)
print("q_{2/3}(|g|)/E|g|       =", q23 / e_abs_gauss)

# Parameter plan: c_delta at delta=0.5, c3=0.1.
print("(0.1*0.5)^(1+2/0.5)     =", mp.power(mp.mpf("0.05"), 5))

# Bernstein examples.
print("2e^-20                  =", 2 * mp.exp(-20))
print("2e^-2.5                 =", 2 * mp.exp(mp.mpf("-2.5")))

# Kahane exact ratio: orthonormal frame, l2, x = ones/sqrt(n), n = 10, p = 2.
# ||sum eps_i x_i e_i||_2 = ||x||_2 = 1 for every sign pattern, so ratio = 1.
import itertools
n = 10
x = [1 / mp.sqrt(n)] * n
vals = []
for eps in itertools.product([-1, 1], repeat=n):
    vals.append(mp.sqrt(sum((e * xi) ** 2 for e, xi in zip(eps, x))))
avg1 = sum(vals) / len(vals)
avg2 = mp.sqrt(sum(v ** 2 for v in vals) / len(vals))
print("kahane n=10 ones ratio  =", avg2 / avg1)

# Same unit vector twice: values {2,0,0,2}/4 -> 1.
print("rademacher v1=v2        =", (2 + 0 + 0 + 2) / mp.mpf(4))

# Psi_1 estimator on centered Exponential(1): sup_q (E|X|^q)^{1/q}/q, q=1..10
# with E|X - 1|^q computed by quadrature.
best = 0
for q in range(1, 11):
    m = mp.quad(lambda y: abs(y - 1) ** q * mp.exp(-y), [0, 1, mp.inf])
    best = max(best, m ** (mp.mpf(1) / q) / q)
print("psi1 moment sup exp(1)c =", best)

# Borell empirical check: cube n=5 shrunk to measure 2/3.
s = mp.power(mp.mpf(2) / 3, mp.mpf(1) / 5)
print("cube shrink factor      =", s)
for t in [1.5, 2, 3]:
    ts = t * s
    tail = 0 if ts >= 1 else 1 - ts ** 5
    print("cube tail t=%s          =" % t, tail, " bound", mp.mpf(2) / 3 * mp.power(2, -(t + 1) / 2))

# Orlicz psi_1 norm of X = E - 1, E ~ Exp(1): inf{K : E exp(|X|/K) <= 2}.
def orlicz_gap(K):
    K = mp.mpf(K)
    left = mp.quad(lambda y: mp.exp((1 - y) / K - y), [0, 1])
    right = mp.quad(lambda y: mp.exp((y - 1) / K - y), [1, mp.inf])
    return left + right - 2
psi1_exact = mp.findroot(orlicz_gap, 1.5)
print("psi1 norm of Exp(1)-1   =", psi1_exact)
