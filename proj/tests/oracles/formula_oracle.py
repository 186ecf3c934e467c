#!/usr/bin/env python3
"""High-precision reference values for the cost formulas and metric spot checks.

Run standalone; the printed values are frozen into tests/test_formulas.cpp and
tests/acceptance.cpp. Independent of the C++ engine.
"""
from mpmath import mp, mpf, exp, tanh, sqrt, log10

mp.dps = 40


def structural(s):
    return 1 / (1 + exp(-5 * (mpf(s) - mpf("0.5"))))


def statistical(delta):
    return -tanh(abs(mpf(delta))) + 1


def distance(d, n, k, gamma=mpf("0.3"), sigma=mpf(1)):
    return -gamma * tanh(mpf(d) / (sigma * mpf(n) / k)) + 1


def ssim_constants(a, b, k1=mpf("0.01"), k2=mpf("0.03")):
    c1 = (k1 * 1) ** 2
    c2 = (k2 * 1) ** 2
    a, b = mpf(a), mpf(b)
    return (2 * a * b + c1) / (a * a + b * b + c1) * (c2 / c2)


if __name__ == "__main__":
    for s in ("0", "0.5", "1"):
        print(f"structural S={s}: {mp.nstr(structural(s), 20)}")
    for d in ("0", "0.5", "1"):
        print(f"statistical |dv|={d}: {mp.nstr(statistical(d), 20)}")
    print(f"statistical 0.2 vs 0.7: {mp.nstr(statistical(mpf('0.7') - mpf('0.2')), 20)}")
    print(f"distance d=0: {mp.nstr(distance(0, 100, 10), 20)}")
    print(f"distance d=n/k (n=100,k=10): {mp.nstr(distance(10, 100, 10), 20)}")
    print(f"distance d=1e6: {mp.nstr(distance(10**6, 100, 10), 20)}")
    print(f"cosine (1,0)·(1,1): {mp.nstr(1 / sqrt(2), 20)}")
    print(f"rmse (0,0) vs (1,0): {mp.nstr(sqrt(mpf(1) / 2), 20)}")
    print(f"psnr mse=0.01: {mp.nstr(10 * log10(1 / mpf('0.01')), 20)}")
    print(f"ssim const 0.25 vs 0.75: {mp.nstr(ssim_constants('0.25', '0.75'), 20)}")
    # combined cost example: alpha=1, beta=0, identical codes, |i-j|=10, n=100, k=10
    print(f"combined a=1 identical d=n/k: {mp.nstr(structural(1) + distance(10, 100, 10), 20)}")
