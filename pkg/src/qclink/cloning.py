"""Optimal copying fidelity and its optical-amplifier counterpart.

fidelity_opt gives the best mean fraction of correct copies when N
identical inputs are turned into M > N outputs,

    F(N, M) = (M N + M + N) / (M (N + 2)).

fidelity_classical is the measured-intensity analogue for an amplifier
taking mean intensity mu_in to mu_out with quality Q in [0, 1],

    F = (Q mu_out mu_in + mu_out + mu_in) / (Q mu_out mu_in + 2 mu_out),

which reproduces F(N, M) exactly at Q = 1 with integer intensities.
The gain process itself is simulated as a birth chain: each new photon
joins mode k with probability proportional to n_k + 1, the stimulated
plus spontaneous emission weights. A Poisson mixture over input photon
number and a least-squares recovery of Q from fidelity-vs-intensity
records round out the analysis tools.
"""

import csv
import warnings

import numpy as np
from scipy.stats import poisson

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def fidelity_opt(n, m):
    """Optimal N-to-M copying fidelity (MN + M + N) / (M (N + 2))."""
    if int(n) != n or int(m) != m:
        raise ValueError(f"copy counts must be integers, got ({n}, {m})")
    n, m = int(n), int(m)
    if not 1 <= n <= m:
        raise ValueError(f"need M >= N >= 1, got ({n}, {m})")
    return (m * n + m + n) / (m * (n + 2))


def fidelity_classical(mu_in, mu_out, q):
    """Amplifier fidelity at mean intensities (mu_in, mu_out), quality q."""
    if mu_in <= 0.0 or mu_out <= 0.0:
        raise ValueError(f"intensities must be positive, got ({mu_in}, {mu_out})")
    if mu_in > mu_out:
        raise ValueError(f"mu_in {mu_in} exceeds mu_out {mu_out}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"quality {q} outside [0, 1]")
    core = q * mu_out * mu_in
    return (core + mu_out + mu_in) / (core + 2.0 * mu_out)


def birth_process_exact(n, m):
    """Mean signal fraction of the birth chain, by exact state enumeration.

    The chain starts at (n, 0) photons in (signal, orthogonal) modes and
    adds photons one at a time with weight n_k + 1 until m photons exist.
    """
    if int(n) != n or int(m) != m or not 1 <= n <= m:
        raise ValueError(f"need integer M >= N >= 1, got ({n}, {m})")
    n, m = int(n), int(m)
    probs = {n: 1.0}  # n_signal -> probability, total photon count implicit
    for total in range(n, m):
        nxt = {}
        for ns, p in probs.items():
            p_sig = (ns + 1) / (total + 2)
            nxt[ns + 1] = nxt.get(ns + 1, 0.0) + p * p_sig
            nxt[ns] = nxt.get(ns, 0.0) + p * (1.0 - p_sig)
        probs = nxt
    return sum(ns * p for ns, p in probs.items()) / m


def birth_process_mc(n, m, trials, seed=0):
    """Monte Carlo mean and standard error of the birth-chain fidelity."""
    if trials < 10 ** 4:
        raise ValueError(f"need at least 1e4 trials, got {trials}")
    if int(n) != n or int(m) != m or not 1 <= n <= m:
        raise ValueError(f"need integer M >= N >= 1, got ({n}, {m})")
    n, m = int(n), int(m)
    rng = np.random.default_rng(seed)
    n_sig = np.full(trials, n, dtype=np.int64)
    for total in range(n, m):
        grow = rng.random(trials) < (n_sig + 1) / (total + 2)
        n_sig += grow
    samples = n_sig / m
    se = samples.std(ddof=1) / np.sqrt(trials) if m > n else 0.0
    return float(samples.mean()), float(se)


def poisson_mixture_fidelity(mu_in, gain):
    """Poisson-averaged copying fidelity at fixed gain.

    Mixes fidelity_opt(N, max(N, round(gain N))) over a Poisson photon
    number N >= 1 (the vacuum term carries no polarization and is
    excluded), truncating the tail at cumulative weight 1 - 1e-12. A
    diagnostic value to compare against the amplifier formula; no
    identity between the two is implied.
    """
    if not 0.0 < mu_in <= 50.0:
        raise ValueError(f"mu_in {mu_in} outside (0, 50]")
    if gain < 1.0:
        raise ValueError(f"gain {gain} below 1")
    n_hi = int(poisson.ppf(1.0 - 1e-12, mu_in)) + 1
    ns = np.arange(1, n_hi + 1)
    weights = poisson.pmf(ns, mu_in)
    weights = weights / weights.sum()
    fids = np.array([
        fidelity_opt(n, max(n, int(np.floor(gain * n + 0.5)))) for n in ns])
    return float(weights @ fids)


def _as_records(data):
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("dataset must be an (k, 3) array of "
                         "(mu_in, mu_out, fidelity) records")
    if np.any(arr[:, :2] <= 0.0):
        raise ValueError("intensities must be positive")
    if np.any((arr[:, 2] <= 0.0) | (arr[:, 2] > 1.0)):
        raise ValueError("fidelities must lie in (0, 1]")
    return arr


def fit_q(data):
    """Least-squares quality estimate from (mu_in, mu_out, fidelity) rows.

    Scans a 101-point grid over [0, 1] and refines the best bracket by
    golden-section search down to 1e-6 in Q. Returns (q_hat, residual
    sum of squares). A dataset with a single distinct mu_in is flagged
    as degenerate with a warning but still fitted.
    """
    arr = _as_records(data)
    if arr.shape[0] < 3:
        raise ValueError(f"need at least 3 records, got {arr.shape[0]}")
    if np.unique(arr[:, 0]).size == 1:
        warnings.warn("all records share one mu_in; the fit is degenerate",
                      stacklevel=2)
    mu_in, mu_out, fid = arr.T

    def rss(q):
        core = q * mu_out * mu_in
        model = (core + mu_out + mu_in) / (core + 2.0 * mu_out)
        return float(((model - fid) ** 2).sum())

    grid = np.linspace(0.0, 1.0, 101)
    values = [rss(q) for q in grid]
    best = int(np.argmin(values))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, 100)]

    # Golden-section refinement on the bracketing interval.
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = rss(c), rss(d)
    while hi - lo > 1e-6:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = rss(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = rss(d)
    q_hat = 0.5 * (lo + hi)
    return float(q_hat), rss(q_hat)


def generate_fidelity_dataset(q, mu_in, gain=10.0, noise_sigma=0.0, seed=0):
    """Synthetic (mu_in, mu_out, fidelity) records from the amplifier law.

    mu_out = gain * mu_in; optional additive Gaussian noise on the
    fidelities, clipped into (0, 1].
    """
    mu_in = np.asarray(mu_in, dtype=float)
    mu_out = gain * mu_in
    fid = np.array([fidelity_classical(a, b, q) for a, b in zip(mu_in, mu_out)])
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        fid = fid + rng.normal(0.0, noise_sigma, size=fid.shape)
        fid = np.clip(fid, 1e-9, 1.0)
    return np.column_stack([mu_in, mu_out, fid])


CSV_HEADER = ("mu_in", "mu_out", "fidelity")


def save_fidelity_csv(path, data):
    """Write records as CSV with header mu_in,mu_out,fidelity."""
    arr = _as_records(data)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in arr:
            writer.writerow([repr(float(v)) for v in row])


def load_fidelity_csv(path):
    """Read a mu_in,mu_out,fidelity CSV into an (k, 3) array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ValueError(
                f"{path}: expected header {','.join(CSV_HEADER)}, got {header}")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return _as_records(np.array(rows))
