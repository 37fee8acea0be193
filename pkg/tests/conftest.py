import numpy as np
import pytest

# Dense precoder of the worked example and its exact sparsification.
W_EXAMPLE = 0.5 * np.array([[1, -1j, 1, -1j], [1, -1j, -1, 1j]]).T
P_EXAMPLE = np.array([[1, -1j, 0, 0], [0, 0, 1, -1j]]).T / np.sqrt(2)

_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def w_example():
    return W_EXAMPLE.copy()


@pytest.fixture
def p_example():
    return P_EXAMPLE.copy()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion(request):
    """Record and print one pass/fail line for an acceptance criterion."""
    log = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(num, ok, detail):
        line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        log.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE_KEY, [])
    if log:
        terminalreporter.section("acceptance criteria")
        for line in sorted(log, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)


def power_iteration(a, tol=1e-14, max_iter=500_000, seed=0):
    """Top eigenpair of a Hermitian PSD matrix by plain power iteration."""
    r = np.random.default_rng(seed)
    x = r.standard_normal(a.shape[0]) + 1j * r.standard_normal(a.shape[0])
    x /= np.linalg.norm(x)
    for _ in range(max_iter):
        y = a @ x
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0, x
        y /= ny
        done = np.linalg.norm(y - x) < tol
        x = y
        if done:
            break
    return float(np.real(np.vdot(x, a @ x))), x


def haar_point(r, nt, ns):
    """Independent Haar sampler (SVD polar factor), not the library's QR path."""
    g = r.standard_normal((nt, ns)) + 1j * r.standard_normal((nt, ns))
    u, _, vh = np.linalg.svd(g, full_matrices=False)
    return u @ vh


def random_sparse_candidates(r, nt, ns, count, patterns):
    """Random semi-unitary matrices, each supported on a random valid pattern."""
    out = np.zeros((count, nt, ns), dtype=complex)
    which = r.integers(len(patterns), size=count)
    vals = r.standard_normal((count, nt)) + 1j * r.standard_normal((count, nt))
    for k, pat in enumerate(patterns):
        sel = np.flatnonzero(which == k)
        for j, block in enumerate(pat.blocks):
            out[np.ix_(sel, list(block), [j])] = vals[np.ix_(sel, list(block))][..., None]
    out /= np.linalg.norm(out, axis=1, keepdims=True)
    return out
