"""Entanglement-based key distribution under a one-parameter individual
attack.

The eavesdropper holds a purification of a Bell-diagonal pair state with
weights lam(D) = ((1-D)^2, D(1-D), D(1-D), D^2), which reproduces the
observed error rate D in both protocol bases. After basis announcement
she measures each probe individually, either with the optimal binary
(Helstrom) guess of the sender's bit or with the four-outcome square-root
measurement on her conditional probe states. The module derives the
post-sifting classical distribution P(A, B, E), the mutual informations,
and the critical disturbances for one-way key extraction, CHSH violation
and entanglement.
"""

from dataclasses import dataclass

import numpy as np

from . import qcore

HELSTROM_BINARY = "helstrom_binary"
SQUARE_ROOT_4 = "square_root_4"
EVE_MEASUREMENTS = (HELSTROM_BINARY, SQUARE_ROOT_4)

BASES = ("z", "x")
_BASIS_KETS = {
    "z": (qcore.KET_0, qcore.KET_1),
    "x": (qcore.KET_PLUS, qcore.KET_MINUS),
}


@dataclass(frozen=True)
class AttackParams:
    """Attack strength D (the error rate it causes) and Eve's measurement."""

    disturbance: float
    eve_measurement: str = HELSTROM_BINARY

    def __post_init__(self):
        if not 0.0 <= self.disturbance <= 0.5:
            raise ValueError(
                f"disturbance {self.disturbance} outside [0, 0.5]")
        if self.eve_measurement not in EVE_MEASUREMENTS:
            raise ValueError(
                f"unknown eve_measurement {self.eve_measurement!r}; "
                f"choose from {EVE_MEASUREMENTS}")


@dataclass(frozen=True)
class SymbolDistribution:
    """Joint table P(a, b, e) after sifting, shape (2, 2, |E|)."""

    table: np.ndarray
    basis: str = "z"
    eve_measurement: str = HELSTROM_BINARY
    disturbance: float = np.nan

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 3 or t.shape[:2] != (2, 2) or t.shape[2] not in (2, 4):
            raise ValueError(f"expected table of shape (2, 2, 2|4), got {t.shape}")
        if np.any(t < 0.0):
            raise ValueError("negative probability in symbol table")
        if abs(t.sum() - 1.0) > 1e-12:
            raise ValueError(f"symbol table sums to {t.sum()!r}, not 1")
        pa = t.sum(axis=(1, 2))
        if np.max(np.abs(pa - 0.5)) > 1e-10:
            raise ValueError(f"sender marginal {pa} is not uniform")
        object.__setattr__(self, "table", t)

    @property
    def num_eve_symbols(self):
        return self.table.shape[2]


def bell_weights(d):
    """Bell-basis weights ((1-D)^2, D(1-D), D(1-D), D^2) of the pair state."""
    if not 0.0 <= d <= 0.5:
        raise ValueError(f"disturbance {d} outside [0, 0.5]")
    return np.array([(1 - d) ** 2, d * (1 - d), d * (1 - d), d ** 2])


def attack_state(params):
    """Three-party pure state sum_i sqrt(lam_i) |Bell_i>_AB |e_i>_E.

    The 16 amplitudes are ordered with Eve's 4-dim register as the fastest
    index. Tracing out Eve returns the Bell-diagonal pair state.
    """
    lam = bell_weights(params.disturbance)
    psi = np.zeros(16, dtype=complex)
    for i, (w, bell) in enumerate(zip(lam, qcore.BELL_BASIS)):
        probe = np.zeros(4, dtype=complex)
        probe[i] = 1.0
        psi += np.sqrt(w) * np.kron(bell, probe)
    return psi


def trace_out_eve(psi_abe):
    """Pair state of the two partners, Tr_E |Psi><Psi|."""
    psi = np.asarray(psi_abe, dtype=complex)
    if psi.shape != (16,):
        raise ValueError(f"expected 16 amplitudes, got shape {psi.shape}")
    m = psi.reshape(4, 4)
    return m @ m.conj().T


def rho_ab(d):
    """Pair state seen by the partners at disturbance d."""
    return qcore.bell_diagonal(bell_weights(d))


def conditional_probes(psi_abe, basis="z"):
    """Eve's unnormalised probe vector for each sifted outcome pair.

    Returns a dict (a, b) -> 4-component vector v with |v|^2 = P(a, b).
    """
    if basis not in BASES:
        raise ValueError(f"basis must be one of {BASES}, got {basis!r}")
    kets = _BASIS_KETS[basis]
    psi = np.asarray(psi_abe, dtype=complex).reshape(2, 2, 4)
    probes = {}
    for a, ka in enumerate(kets):
        for b, kb in enumerate(kets):
            probes[a, b] = np.einsum("i,j,ijk->k", ka.conj(), kb.conj(), psi)
    return probes


def helstrom(rho0, rho1, prior0=0.5):
    """Optimal two-outcome discrimination of rho0 vs rho1.

    Returns (success_probability, (Pi0, Pi1)). Pi0 projects on the
    positive eigenspace of prior0*rho0 - prior1*rho1, so the success
    probability equals (1 + ||prior0 rho0 - prior1 rho1||_1) / 2 at
    equal-dimension inputs.
    """
    if not 0.0 <= prior0 <= 1.0:
        raise ValueError(f"prior {prior0} outside [0, 1]")
    rho0 = np.asarray(rho0, dtype=complex)
    rho1 = np.asarray(rho1, dtype=complex)
    if rho0.shape != rho1.shape:
        raise ValueError(f"dimension mismatch: {rho0.shape} vs {rho1.shape}")
    gamma = prior0 * rho0 - (1.0 - prior0) * rho1
    vals, vecs = qcore.eig_hermitian(gamma)
    plus = vecs[:, vals > 0.0]
    pi0 = plus @ plus.conj().T
    pi1 = np.eye(rho0.shape[0], dtype=complex) - pi0
    success = prior0 * np.trace(pi0 @ rho0).real \
        + (1.0 - prior0) * np.trace(pi1 @ rho1).real
    return float(success), (pi0, pi1)


def square_root_povm(states, priors):
    """Square-root (pretty good) measurement for an ensemble of kets.

    states: sequence of normalised vectors, priors: their probabilities.
    Returns the list of POVM elements Pi_i = p_i S^-1/2 |s_i><s_i| S^-1/2
    completed with the projector on the unused subspace added to the last
    element, so the elements always sum to the identity.
    """
    states = [np.asarray(s, dtype=complex) for s in states]
    priors = np.asarray(priors, dtype=float)
    dim = states[0].shape[0]
    s = np.zeros((dim, dim), dtype=complex)
    for p, v in zip(priors, states):
        s += p * np.outer(v, v.conj())
    vals, vecs = qcore.eig_hermitian(s)
    inv_sqrt = np.zeros_like(vals)
    support = vals > 1e-14
    inv_sqrt[support] = 1.0 / np.sqrt(vals[support])
    s_inv_sqrt = (vecs * inv_sqrt) @ vecs.conj().T
    povm = []
    for p, v in zip(priors, states):
        w = s_inv_sqrt @ v
        povm.append(p * np.outer(w, w.conj()))
    # Complete on the kernel of S (never hit by the ensemble).
    kernel = vecs[:, ~support]
    if kernel.shape[1]:
        povm[-1] = povm[-1] + kernel @ kernel.conj().T
    return povm


def _eve_povm(probes, eve_measurement):
    """Eve's POVM for the sifted-basis ensemble of conditional probes."""
    p_ab = {ab: float(np.vdot(v, v).real) for ab, v in probes.items()}
    if eve_measurement == HELSTROM_BINARY:
        # Discriminate her state conditioned on the sender's bit.
        rho = []
        prior = []
        for a in (0, 1):
            pa = p_ab[a, 0] + p_ab[a, 1]
            state = sum(np.outer(probes[a, b], probes[a, b].conj())
                        for b in (0, 1))
            rho.append(state / pa)
            prior.append(pa)
        _, povm = helstrom(rho[0], rho[1], prior0=prior[0])
        return list(povm)
    # Four-outcome square-root measurement on the conditional pure probes,
    # outcome index e = 2a + b.
    order = [(0, 0), (0, 1), (1, 0), (1, 1)]
    states, priors = [], []
    for ab in order:
        v, p = probes[ab], p_ab[ab]
        states.append(v / np.sqrt(p) if p > 0 else np.zeros_like(v))
        priors.append(p)
    return square_root_povm(states, priors)


def symbol_distribution(params, basis="z"):
    """Classical joint distribution P(a, b, e) after sifting.

    The partners measure the announced basis; Eve applies her chosen
    measurement to the conditional probe left by the outcome pair.
    """
    psi = attack_state(params)
    probes = conditional_probes(psi, basis)
    povm = _eve_povm(probes, params.eve_measurement)
    table = np.zeros((2, 2, len(povm)))
    for (a, b), v in probes.items():
        for e, pi in enumerate(povm):
            table[a, b, e] = max(float(np.real(v.conj() @ pi @ v)), 0.0)
    return SymbolDistribution(table, basis=basis,
                              eve_measurement=params.eve_measurement,
                              disturbance=params.disturbance)


def error_rate(dist):
    """P(a != b) of a symbol distribution."""
    t = dist.table
    return float(t[0, 1].sum() + t[1, 0].sum())


def binary_entropy(p):
    """h2(p) in bits with the 0 log 0 = 0 convention."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def _entropy(p):
    p = p[p > 0.0]
    return float(-(p * np.log2(p)).sum())


def mutual_information(dist, pair="ab"):
    """I(X;Y) in bits for pair 'ab' (partners) or 'ae' (sender vs Eve)."""
    t = dist.table
    if pair == "ab":
        joint = t.sum(axis=2)
    elif pair == "ae":
        joint = t.sum(axis=1)
    else:
        raise ValueError(f"pair must be 'ab' or 'ae', got {pair!r}")
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    return _entropy(px) + _entropy(py) - _entropy(joint.ravel())


THRESHOLD_KINDS = ("one_way", "chsh", "entanglement")


def threshold(kind, tol=1e-6, eve_measurement=HELSTROM_BINARY):
    """Critical disturbance, located by bisection on [0, 0.5].

    kind "one_way": I(A;B) = I(A;E) under the chosen Eve measurement;
    kind "chsh": maximal CHSH value of the pair state crosses 2;
    kind "entanglement": smallest partial-transpose eigenvalue crosses 0.
    The returned midpoint brackets the root within tol.
    """
    if kind not in THRESHOLD_KINDS:
        raise ValueError(f"kind must be one of {THRESHOLD_KINDS}, got {kind!r}")
    if tol < 1e-6:
        raise ValueError(f"tolerance {tol} below the supported 1e-6")

    if kind == "one_way":
        def f(d):
            dist = symbol_distribution(
                AttackParams(d, eve_measurement=eve_measurement))
            return mutual_information(dist, "ab") - mutual_information(dist, "ae")
    elif kind == "chsh":
        def f(d):
            return qcore.chsh_max(rho_ab(d)) - 2.0
    else:
        def f(d):
            return -qcore.is_entangled(rho_ab(d))[1]

    lo, hi = 0.0, 0.5
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise RuntimeError(
            f"no sign change for {kind} threshold on [0, 0.5]; "
            "the attack family is broken")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
