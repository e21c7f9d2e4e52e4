import mpmath as mp
import numpy as np
import pytest

from elastic_inclusion import _specfun_py, specfun

try:
    from elastic_inclusion import _specfun_ext
except ImportError:  # pragma: no cover - unbuilt extension
    _specfun_ext = None

BACKENDS = [pytest.param(_specfun_py, id="python")]
if _specfun_ext is not None:
    BACKENDS.append(pytest.param(_specfun_ext, id="cython"))

mp.mp.dps = 40


def _oracle(x):
    x = mp.mpf(float(x))
    return [float(f(n, x)) for f, n in ((mp.besselj, 0), (mp.besselj, 1), (mp.bessely, 0), (mp.bessely, 1))]


def _j0_series(x, terms=40):
    """Power series summed in extended precision."""
    x = mp.mpf(x)
    return mp.nsum(lambda k: (-1) ** int(k) * (x / 2) ** (2 * k) / mp.factorial(k) ** 2, [0, terms])


def _y0_series(x, terms=40):
    x = mp.mpf(x)
    H = lambda k: mp.harmonic(k)
    s = mp.nsum(lambda k: (-1) ** (int(k) + 1) * H(k) * (x / 2) ** (2 * k) / mp.factorial(k) ** 2, [1, terms])
    return 2 / mp.pi * ((mp.log(x / 2) + mp.euler) * _j0_series(x) + s)


def test_series_oracles_give_published_digits():
    assert float(_j0_series(1)) == pytest.approx(0.76519768655796655, rel=1e-16)
    assert float(_y0_series(1)) == pytest.approx(0.08825696421567696, rel=1e-15)


@pytest.mark.parametrize("impl", BACKENDS)
def test_values_at_one_match_series(impl):
    j0, j1, y0, y1 = impl.bessel01(np.array([1.0]))
    assert j0[0] == pytest.approx(float(_j0_series(1)), rel=1e-13)
    assert y0[0] == pytest.approx(float(_y0_series(1)), rel=1e-13)


@pytest.mark.parametrize("impl", BACKENDS)
def test_against_extended_precision(impl):
    # spans all three evaluation regimes and both sides of each switch
    xs = np.concatenate([np.geomspace(1e-6, 2, 25), np.linspace(2.0001, 25, 40), np.linspace(25.01, 200, 40)])
    got = np.array(impl.bessel01(xs))
    want = np.array([_oracle(x) for x in xs]).T
    # relative to the local envelope, since relative error is unbounded at the zeros
    env = np.maximum(np.sqrt(2 / (np.pi * xs)), np.abs(want))
    assert np.max(np.abs(got - want) / env) < 1e-13


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("x", [0.1, 1.0, 10.0, 100.0])
def test_wronskian(impl, x):
    j0, j1, y0, y1 = (v[0] for v in impl.bessel01(np.array([x])))
    assert j1 * y0 - j0 * y1 == pytest.approx(2 / (np.pi * x), rel=1e-12)


def test_backends_agree():
    if _specfun_ext is None:
        pytest.skip("compiled backend not built")
    x = np.random.default_rng(0).uniform(1e-4, 150, 2000)
    for a, b in zip(_specfun_py.bessel01(x), _specfun_ext.bessel01(x)):
        assert np.allclose(a, b, rtol=0, atol=1e-14)


def test_public_wrappers():
    assert specfun.bessel_j0(0.0) == 1.0
    assert specfun.bessel_j1(0.0) == 0.0
    h0 = specfun.hankel1(0, 1.0)
    h1 = specfun.hankel1(1, 1.0)
    assert h0 == pytest.approx(0.7651976866 + 0.0882569642j, abs=1e-10)
    assert h1 == pytest.approx(0.4400505857 - 0.7812128213j, abs=1e-10)
    assert specfun.bessel_y1(2.0) == pytest.approx(float(mp.bessely(1, 2)), rel=1e-14)
    assert specfun.BACKEND in ("cython", "python")


@pytest.mark.parametrize("fn", [specfun.bessel_y0, specfun.bessel_y1, lambda x: specfun.hankel1(0, x)])
@pytest.mark.parametrize("x", [0.0, -1.0])
def test_domain_errors(fn, x):
    with pytest.raises(ValueError):
        fn(x)


def test_domain_errors_j_and_order():
    with pytest.raises(ValueError):
        specfun.bessel_j0(-1.0)
    with pytest.raises(ValueError):
        specfun.hankel1(2, 1.0)


def test_small_argument_log_behaviour():
    x = 1e-6
    y0, j0 = specfun.bessel_y0(x), specfun.bessel_j0(x)
    assert y0 - 2 / np.pi * np.log(x / 2) * j0 == pytest.approx(2 * np.euler_gamma / np.pi, abs=1e-11)


def test_h1_is_minus_derivative_of_h0():
    x = np.array([0.5, 3.0, 30.0])
    errs = []
    for h in (1e-3, 5e-4):
        dh0 = (specfun.hankel1(0, x + h) - specfun.hankel1(0, x - h)) / (2 * h)
        errs.append(np.abs(dh0 + specfun.hankel1(1, x)).max())
    assert errs[0] < 1e-5
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.05)


def test_large_argument_amplitude():
    assert abs(specfun.hankel1(0, 100.0)) == pytest.approx(np.sqrt(2 / (np.pi * 100)), rel=1e-2)


def test_array_shapes_preserved():
    x = np.linspace(0.5, 3, 12).reshape(3, 4)
    out = specfun.bessel01(x)
    assert all(v.shape == (3, 4) for v in out)
