import numpy as np
import pytest

from frugalboost import _kernels
from frugalboost.cart import TreeBuilder

BACKENDS = _kernels.available_backends()


def test_python_backend_always_available():
    assert "python" in BACKENDS


def kernel_out(backend, X, r, pen, threads):
    b = _kernels.load_backend(backend)
    n, d = X.shape
    Xt = np.ascontiguousarray(X.T)
    order = np.argsort(Xt, axis=1, kind="stable").astype(np.intp)
    out = np.empty((d, n - 1))
    dev = r - r.mean()
    b.split_scores(Xt, r, order, 0, n, float(r.mean()), float(dev @ dev), float(dev.sum()), pen, 1, out, threads)
    return out


@pytest.mark.parametrize("threads", [1, 3])
def test_split_scores_identical(threads):
    rng = np.random.default_rng(0)
    X = np.round(rng.normal(size=(300, 7)), 1)
    r = rng.normal(size=300)
    pen = rng.uniform(0, 2, size=7)
    ref = kernel_out("python", X, r, pen, 1)
    for b in BACKENDS:
        assert kernel_out(b, X, r, pen, threads).tobytes() == ref.tobytes()


@pytest.mark.parametrize("threads", [1, 3])
def test_partition_identical(threads):
    rng = np.random.default_rng(1)
    order = np.argsort(rng.normal(size=(4, 50)), axis=1).astype(np.intp)
    go_left = (rng.random(50) < 0.4).astype(np.uint8)
    results = []
    for b in BACKENDS:
        o = order.copy()
        _kernels.load_backend(b).partition(o, 5, 45, go_left, threads)
        results.append(o.tobytes())
        seg = o[:, 5:45]
        for row in seg:
            left = go_left[row].astype(bool)
            nl = left.sum()
            assert left[:nl].all() and not left[nl:].any()
    assert len(set(results)) == 1


def test_trees_identical_across_backends():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(400, 5))
    r = np.sin(X[:, 0]) + X[:, 1] * X[:, 2]
    pen = np.array([0.0, 1.0, 0.5, 3.0, 0.0])
    trees = [TreeBuilder(X, n_threads=t, backend=_kernels.load_backend(b)).build(r, pen, depth=5)
             for b in BACKENDS for t in (1, 2)]
    assert all(t.equals(trees[0]) for t in trees)


def test_unknown_backend():
    with pytest.raises((ValueError, ImportError)):
        _kernels.load_backend("fortran")
