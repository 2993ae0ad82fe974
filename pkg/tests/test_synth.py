import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tonguecurve.errors import ParameterError
from tonguecurve.extract import ExtractConfig, extract_contour
from tonguecurve.formats import read_contour_csv, read_manifest, read_pgm
from tonguecurve.rasterize import rasterize_contour
from tonguecurve.synth import (
    SplitMix64,
    SynthParams,
    corrupt,
    corrupt_detailed,
    gaussian_kernel,
    gen_curve,
    make_sample,
    splitmix64,
    trace_mask,
    write_dataset,
)
from tonguecurve.types import BinaryMask, Contour


def reference_splitmix(seed, n):
    out, state = [], seed
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & (2**64 - 1)
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & (2**64 - 1)
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & (2**64 - 1)
        out.append(z ^ (z >> 31))
    return out


@pytest.mark.parametrize("seed", [0, 1, 42, 2**64 - 1])
def test_splitmix_matches_scalar_reference(seed):
    assert splitmix64(seed, 8).tolist() == reference_splitmix(seed, 8)


def test_splitmix_known_value():
    # first output for seed 0 of the standard generator
    assert int(splitmix64(0, 1)[0]) == 0xE220A8397B1DCDAF


def test_generator_continues_sequence():
    rng = SplitMix64(7)
    a = np.concatenate([rng.u64(3), rng.u64(5)])
    assert a.tolist() == reference_splitmix(7, 8)
    u = SplitMix64(7).uniform(1000)
    assert np.all((u >= 0) & (u < 1))
    b = SplitMix64(7)
    assert all(0 <= b.below(5) < 5 for _ in range(200))


def test_params_validation():
    for bad in ({"blur_sigma": -1}, {"gap_count": -1}, {"gap_length_px": 0},
                {"spur_size_px": 0}, {"noise_amplitude": 1.0}):
        with pytest.raises(ParameterError):
            SynthParams(**bad)


@pytest.mark.parametrize("seed", range(0, 1000, 7))
def test_curve_is_valid_and_wide(seed):
    c = gen_curve(SynthParams(seed=seed))
    assert isinstance(c, Contour) and len(c) >= 2
    assert c.within(128, 128)
    xs = c.points[:, 0]
    assert xs.max() - xs.min() >= 64 - 1
    steps = np.abs(np.diff(c.points, axis=0)).max(axis=1)
    assert steps.max() <= 1


def test_curve_determinism():
    p = SynthParams(seed=123, blur_sigma=1, gap_count=2, gap_length_px=3, spur_count=1,
                    spur_size_px=5, noise_amplitude=0.2)
    a, b = make_sample(p), make_sample(p)
    assert a.curve == b.curve
    assert a.prob.values.tobytes() == b.prob.values.tobytes()
    assert make_sample(SynthParams(seed=124)).curve != a.curve


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_identity_corruption(seed):
    p = SynthParams(seed=seed)
    mask = rasterize_contour(gen_curve(p), 128, 128)
    prob = corrupt(mask, p)
    assert np.array_equal(prob.values, mask.labels.astype(float))


def test_gap_on_fifty_pixel_curve():
    curve = Contour([(10 + i, 20) for i in range(50)])
    mask = rasterize_contour(curve, 80, 40)
    p = SynthParams(seed=5, gap_count=1, gap_length_px=3)
    out = corrupt_detailed(mask, p, curve)
    on_curve = out.prob.values[mask.labels == 1]
    assert int(np.sum(on_curve < 0.4)) == 3
    xs = sorted(out.gap_pixels[:, 0].tolist())
    assert xs == list(range(xs[0], xs[0] + 3))
    assert 10 < xs[0] and xs[-1] < 59


def test_gaps_without_curve_order():
    curve = Contour([(10 + i, 20) for i in range(50)])
    mask = rasterize_contour(curve, 80, 40)
    out = corrupt_detailed(mask, SynthParams(seed=5, gap_count=2, gap_length_px=3))
    assert len(out.gap_pixels) == 6
    assert int(np.sum(out.prob.values)) == 44


def test_gaps_too_long():
    curve = Contour([(i, 0) for i in range(10)])
    mask = rasterize_contour(curve, 10, 1)
    with pytest.raises(ParameterError):
        corrupt(mask, SynthParams(gap_count=3, gap_length_px=3), curve)


def test_trace_mask_walks_the_line():
    curve = Contour([(3, 3), (20, 9)])
    mask = rasterize_contour(curve, 25, 12)
    order = trace_mask(mask)
    assert len(order) == int(mask.labels.sum())
    assert np.abs(np.diff(order, axis=0)).max() <= 1


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
def test_kernel_sums_to_one(sigma):
    assert abs(gaussian_kernel(sigma).sum() - 1.0) <= 1e-9


@pytest.mark.parametrize("seed", range(15))
def test_ridge_survives_blur(seed):
    p = SynthParams(seed=seed, blur_sigma=1.0)
    sample = make_sample(p)
    c = sample.curve.points
    ridge = sample.prob.values[c[:, 1], c[:, 0]]
    # the two end pixels only get support from one side
    assert ridge[1:-1].min() >= 0.8
    assert min(ridge[0], ridge[-1]) >= 0.75


@pytest.mark.parametrize("seed", range(15))
def test_spur_distance_and_size(seed):
    p = SynthParams(seed=seed, spur_count=2, spur_size_px=5, spur_min_dist_px=15)
    sample = make_sample(p)
    spurs = sample.corruption.spur_pixels
    assert len(spurs) == 10
    curve = sample.mask.points()
    d = np.sqrt(((spurs[:, None, :] - curve[None, :, :]) ** 2).sum(-1)).min(axis=1)
    assert d.min() >= 15
    assert np.all(sample.prob.values[spurs[:, 1], spurs[:, 0]] == 1.0)


@pytest.mark.parametrize("seed", range(20))
def test_sharp_spur_dropped_by_default_config(seed):
    p = SynthParams(seed=seed, spur_count=1, spur_size_px=5)
    sample = make_sample(p)
    out = extract_contour(sample.prob, ExtractConfig())
    spur = {tuple(q) for q in sample.corruption.spur_pixels.tolist()}
    assert not spur & {tuple(q) for q in out.points.tolist()}


def test_noise_bounded():
    p = SynthParams(seed=3, noise_amplitude=0.3)
    v = make_sample(p).prob.values
    off = v[make_sample(SynthParams(seed=3)).mask.labels == 0]
    assert off.min() >= 0 and off.max() <= 0.3
    assert v.max() == 1.0


def test_write_dataset(tmp_path):
    entries = write_dataset(tmp_path, 3, SynthParams(seed=10, blur_sigma=1))
    assert [e.id for e in entries] == ["synth_000010", "synth_000011", "synth_000012"]
    assert read_manifest((tmp_path / "manifest.json").read_text()) == entries
    e = entries[1]
    truth = read_contour_csv((tmp_path / e.truth_contour_path).read_text())
    assert truth == gen_curve(SynthParams(seed=11))
    prob = read_pgm((tmp_path / e.prob_path).read_bytes())
    assert np.max(np.abs(prob.values - make_sample(SynthParams(seed=11, blur_sigma=1)).prob.values)) <= 0.5 / 65535 + 1e-12
    again = tmp_path / "again"
    write_dataset(again, 3, SynthParams(seed=10, blur_sigma=1))
    for name in ("manifest.json", e.prob_path, e.image_path, e.truth_contour_path):
        assert (again / name).read_bytes() == (tmp_path / name).read_bytes()
