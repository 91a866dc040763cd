"""Two-qubit state toolbox: tensor algebra, partial trace/transpose,
entanglement (PPT) and maximal CHSH value, standard state constructors.

States are plain numpy arrays: kets as complex vectors, density matrices
as complex square matrices. Validators raise ValueError when an input
breaks the contract of the operation that asked for it.
"""

import numpy as np

# Validation tolerances.
TRACE_ATOL = 1e-10
HERM_ATOL = 1e-10
EIG_ATOL = 1e-10
NORM_ATOL = 1e-12
WEIGHT_ATOL = 1e-12

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)

# Bell basis, ordered (Phi+, Phi-, Psi+, Psi-).
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
BELL_BASIS = (PHI_PLUS, PHI_MINUS, PSI_PLUS, PSI_MINUS)


def tensor(a, b):
    """Kronecker product of two kets or two operators."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dm(psi):
    """Density matrix |psi><psi| of a ket."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def dag(m):
    return np.asarray(m).conj().T


def is_hermitian(m, atol=HERM_ATOL):
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T)) <= atol


def check_pure_state(psi, atol=NORM_ATOL):
    """Validate a ket (norm 1 within atol) and return it as a complex array."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError("pure state must be a 1-d amplitude vector")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"state norm {norm!r} is not 1 within {atol}")
    return psi


def check_density_matrix(rho):
    """Validate trace one, Hermiticity and positivity of a 2- or 4-dim state.

    Returns the validated array. Tolerances: trace and Hermiticity 1e-10,
    smallest eigenvalue >= -1e-10.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if rho.shape[0] not in (2, 4):
        raise ValueError(f"unsupported dimension {rho.shape[0]} (need 2 or 4)")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"trace {tr!r} is not 1 within {TRACE_ATOL}")
    if not is_hermitian(rho):
        raise ValueError("density matrix is not Hermitian within 1e-10")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -EIG_ATOL:
        raise ValueError(f"smallest eigenvalue {lo} below -{EIG_ATOL}")
    return rho


def eig_hermitian(m):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvectors as columns). Raises
    ValueError for non-Hermitian input.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m):
        raise ValueError("input is not Hermitian within 1e-10")
    vals, vecs = np.linalg.eigh(m)
    return vals, vecs


def partial_trace(rho, keep="A"):
    """Trace out one qubit of a two-qubit operator.

    keep="A" returns the first-factor state, keep="B" the second.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"partial trace needs a 4x4 matrix, got {rho.shape}")
    r = rho.reshape(2, 2, 2, 2)  # indices (a, b, a', b')
    if keep in ("A", 0):
        return np.einsum("abcb->ac", r)
    if keep in ("B", 1):
        return np.einsum("abac->bc", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose(rho):
    """Transpose the second qubit of a two-qubit operator."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"partial transpose needs a 4x4 matrix, got {rho.shape}")
    if not is_hermitian(rho):
        raise ValueError("partial transpose expects a Hermitian input")
    return rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def is_entangled(rho):
    """PPT test for a two-qubit state.

    Returns (flag, min_eigenvalue) where flag is True iff the smallest
    eigenvalue of the partial transpose is below -1e-9. Necessary and
    sufficient in dimension 2x2.
    """
    rho = check_density_matrix(rho)
    if rho.shape != (4, 4):
        raise ValueError("entanglement test is defined for two qubits")
    lo = float(np.linalg.eigvalsh(partial_transpose(rho))[0])
    return lo < -1e-9, lo


def correlation_tensor(rho):
    """3x3 matrix T_ij = Tr(rho sigma_i x sigma_j)."""
    rho = np.asarray(rho, dtype=complex)
    t = np.empty((3, 3))
    for i, si in enumerate(PAULIS):
        for j, sj in enumerate(PAULIS):
            t[i, j] = np.trace(rho @ np.kron(si, sj)).real
    return t


def chsh_max(rho):
    """Largest CHSH value reachable with projective measurements on rho.

    Equals 2*sqrt(u1 + u2) with u1, u2 the two largest eigenvalues of
    T^T T; the state violates the inequality iff the value exceeds 2.
    """
    rho = check_density_matrix(rho)
    if rho.shape != (4, 4):
        raise ValueError("CHSH value is defined for two qubits")
    t = correlation_tensor(rho)
    u = np.linalg.eigvalsh(t.T @ t)
    return float(2.0 * np.sqrt(max(u[-1] + u[-2], 0.0)))


def bell_diagonal(weights):
    """Mixture of the four Bell states with the given probabilities.

    Order (Phi+, Phi-, Psi+, Psi-). Weights must be nonnegative and sum
    to 1 within 1e-12.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (4,):
        raise ValueError("need exactly four Bell weights")
    if np.any(w < -WEIGHT_ATOL):
        raise ValueError(f"negative Bell weight in {w}")
    if abs(w.sum() - 1.0) > WEIGHT_ATOL:
        raise ValueError(f"Bell weights sum to {w.sum()!r}, not 1")
    w = np.clip(w, 0.0, None)
    rho = np.zeros((4, 4), dtype=complex)
    for wi, ket in zip(w, BELL_BASIS):
        rho += wi * dm(ket)
    return rho


def werner(p):
    """p |Phi+><Phi+| + (1-p) I/4 for p in [0, 1]; entangled iff p > 1/3."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"werner parameter {p} outside [0, 1]")
    return p * dm(PHI_PLUS) + (1.0 - p) * np.eye(4, dtype=complex) / 4.0


def singlet_fidelity(rho):
    """Overlap <Phi+|rho|Phi+> of a two-qubit state with the target pair."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("singlet fidelity is defined for two qubits")
    return float(np.real(PHI_PLUS.conj() @ rho @ PHI_PLUS))
