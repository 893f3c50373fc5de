"""Regenerates diagnostics_fixture.json: AR(1) chains plus split R-hat and
effective sample size computed by an independent NumPy implementation of
the BDA3 / Stan definitions."""
import json
from pathlib import Path

import numpy as np


def split_rhat(chains):
    half = chains.shape[1] // 2
    s = np.concatenate([chains[:, :half], chains[:, -half:]])
    n = s.shape[1]
    w = s.var(axis=1, ddof=1).mean()
    b = n * s.mean(axis=1).var(ddof=1)
    return float(np.sqrt(((n - 1) / n * w + b / n) / w))


def autocov(x):
    n = len(x)
    xc = x - x.mean()
    return np.array([np.dot(xc[: n - k], xc[k:]) / n for k in range(n)])


def ess(chains):
    m, n = chains.shape
    acov = np.array([autocov(c) for c in chains])
    chain_mean = chains.mean(axis=1)
    mean_var = acov[:, 0].mean() * n / (n - 1)
    var_plus = mean_var * (n - 1) / n
    if m > 1:
        var_plus += chain_mean.var(ddof=1)
    rho = np.zeros(n)
    rho_even, rho_odd = 1.0, 1.0 - (mean_var - acov[:, 1].mean()) / var_plus
    rho[0], rho[1] = rho_even, rho_odd
    t = 1
    while t < n - 4 and rho_even + rho_odd > 0:
        rho_even = 1.0 - (mean_var - acov[:, t + 1].mean()) / var_plus
        rho_odd = 1.0 - (mean_var - acov[:, t + 2].mean()) / var_plus
        if rho_even + rho_odd >= 0:
            rho[t + 1], rho[t + 2] = rho_even, rho_odd
        t += 2
    max_t = t
    if rho[max_t] > 0:
        rho[max_t + 1] = rho[max_t]
    t = 1
    while t <= max_t - 3:
        if rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]:
            rho[t + 1] = (rho[t - 1] + rho[t]) / 2
            rho[t + 2] = rho[t + 1]
        t += 2
    tau = -1 + 2 * rho[:max_t].sum() + rho[max_t + 1]
    total = m * n
    return float(total / max(tau, 1 / np.log10(total)))


def main():
    rng = np.random.default_rng(17)
    cases = []
    for phi, m, n, shift in [(0.0, 4, 300, 0.0), (0.6, 3, 250, 0.0), (0.9, 4, 400, 0.0), (0.3, 2, 200, 1.5)]:
        chains = np.zeros((m, n))
        for c in range(m):
            x = rng.normal()
            for i in range(n):
                x = phi * x + np.sqrt(1 - phi * phi) * rng.normal()
                chains[c, i] = x + (shift if c == 0 else 0.0)
        chains = np.round(chains, 12)
        cases.append({"chains": chains.tolist(), "rhat": split_rhat(chains), "ess": ess(chains)})
    Path(__file__).with_name("diagnostics_fixture.json").write_text(json.dumps(cases))
    for c in cases:
        print(round(c["rhat"], 6), round(c["ess"], 3))


if __name__ == "__main__":
    main()
