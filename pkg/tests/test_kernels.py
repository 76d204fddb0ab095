"""Backend equivalence of the estimator kernels."""

import math

import numpy as np
import pytest
from scipy.special import erfc

from tailsum._kernels import available_backends

BACKENDS = available_backends()


def make_conditional_inputs(m=4096, d=3, rho=0.5, u=30.0, mix=0.5, seed=5):
    rng = np.random.default_rng(seed)
    sig = np.full((d, d), rho)
    np.fill_diagonal(sig, 1.0)
    chol = np.linalg.cholesky(sig)
    y = np.ascontiguousarray(rng.standard_normal((m, d)) @ chol.T)
    umix = np.ascontiguousarray(rng.random((m, d)))
    lam = np.full(d, 1.0)
    bg = np.full(d, 1.0)
    others = np.array([[i for i in range(d) if i != j] for j in range(d)],
                      dtype=np.int64)
    alpha = np.empty((d, d - 1))
    cond_sd = np.empty(d)
    shift = np.full((d, d - 1), 1.3)
    tilt_vec = np.empty((d, d - 1))
    tilt_const = np.empty(d)
    for j in range(d):
        sub = sig[np.ix_(others[j], others[j])]
        cross = sig[others[j], j]
        alpha[j] = np.linalg.solve(sub, cross)
        cond_sd[j] = math.sqrt(1.0 - cross @ alpha[j])
        tilt_vec[j] = np.linalg.solve(sub, shift[j])
        tilt_const[j] = 0.5 * shift[j] @ tilt_vec[j]
    return dict(y=y, umix=umix, u=u, lam=lam, bg=bg, others=others,
                alpha=alpha, cond_sd=cond_sd, shift=shift,
                tilt_vec=tilt_vec, tilt_const=tilt_const, mix=mix)


def run_conditional(mod, inputs):
    out = np.empty(inputs["y"].shape[0])
    mod.conditional_chunk(inputs["y"], inputs["umix"], out, inputs["u"],
                          inputs["lam"], inputs["bg"], inputs["others"],
                          inputs["alpha"], inputs["cond_sd"], inputs["shift"],
                          inputs["tilt_vec"], inputs["tilt_const"],
                          inputs["mix"])
    return out


class TestCrudeChunk:
    @pytest.mark.parametrize("name", sorted(BACKENDS))
    def test_matches_reference(self, name):
        rng = np.random.default_rng(0)
        x = np.ascontiguousarray(np.exp(rng.standard_normal((10_000, 2))))
        expected = int((x.sum(axis=1) > 3.0).sum())
        assert BACKENDS[name].crude_chunk(x, 3.0) == expected

    def test_backends_agree(self):
        if len(BACKENDS) < 2:
            pytest.skip("compiled backend not built")
        rng = np.random.default_rng(1)
        x = np.ascontiguousarray(np.exp(rng.standard_normal((50_000, 3))))
        counts = {n: mod.crude_chunk(x, 4.0) for n, mod in BACKENDS.items()}
        assert len(set(counts.values())) == 1


class TestConditionalChunk:
    def test_backends_agree(self):
        if len(BACKENDS) < 2:
            pytest.skip("compiled backend not built")
        inputs = make_conditional_inputs()
        outs = [run_conditional(mod, inputs) for mod in BACKENDS.values()]
        np.testing.assert_allclose(outs[0], outs[1], rtol=1e-12, atol=0.0)

    def test_backends_agree_untilted(self):
        if len(BACKENDS) < 2:
            pytest.skip("compiled backend not built")
        inputs = make_conditional_inputs(mix=0.0)
        outs = [run_conditional(mod, inputs) for mod in BACKENDS.values()]
        np.testing.assert_allclose(outs[0], outs[1], rtol=1e-12, atol=0.0)

    @pytest.mark.parametrize("name", sorted(BACKENDS))
    def test_untilted_matches_direct_formula(self, name):
        # plain (mix=0) integrand recomputed straight from the definition
        inputs = make_conditional_inputs(m=512, d=2, rho=0.3, u=8.0, mix=0.0)
        out = run_conditional(BACKENDS[name], inputs)
        y = inputs["y"]
        expected = np.zeros(len(y))
        for j in range(2):
            yo = y[:, 1 - j]
            xo = np.exp(yo)
            t = np.maximum(xo, 8.0 - xo)
            z = (np.log(t) - 0.3 * yo) / math.sqrt(1 - 0.09)
            expected += 0.5 * erfc(z / math.sqrt(2))
        np.testing.assert_allclose(out, expected, rtol=1e-12)

    @pytest.mark.parametrize("name", sorted(BACKENDS))
    def test_weights_bounded_by_mixture(self, name):
        inputs = make_conditional_inputs(mix=0.5)
        out = run_conditional(BACKENDS[name], inputs)
        d = inputs["y"].shape[1]
        # each of the d per-margin terms is (weight <= 1/(1-mix)) * prob <= 2
        assert np.all(out >= 0.0)
        assert np.all(out <= 2.0 * d)

    @pytest.mark.parametrize("name", sorted(BACKENDS))
    def test_extreme_tilt_argument_stable(self, name):
        inputs = make_conditional_inputs(m=256, mix=0.5)
        inputs["shift"] = np.full_like(inputs["shift"], 40.0)
        for j in range(inputs["shift"].shape[0]):
            sub_idx = inputs["others"][j]
            sig = np.full((len(sub_idx), len(sub_idx)), 0.5)
            np.fill_diagonal(sig, 1.0)
            inputs["tilt_vec"][j] = np.linalg.solve(sig, inputs["shift"][j])
            inputs["tilt_const"][j] = 0.5 * inputs["shift"][j] @ inputs["tilt_vec"][j]
        out = run_conditional(BACKENDS[name], inputs)
        assert np.all(np.isfinite(out))
