import json
import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
import torch
from hypothesis import given, settings
from hypothesis import strategies as st

from gokuui.data import (
    SyntheticDatasetSpec,
    build_dataset,
    generate_latent,
    ingest_csv,
    load_dataset,
    make_projection,
    plan_manifest,
    project,
    sample_generator_params,
    save_dataset,
)
from gokuui.errors import CorruptDatasetError, DegenerateInputError, InvalidArgumentError, ParseError
from gokuui.sde import OscillatorNetworkParams, SolverConfig, integrate, sl_drift

TINY = SyntheticDatasetSpec(
    n_oscillators=1, output_dim=4, n_train=2, n_test=2, total_time=5.0, trim_steps=10, master_seed=3
)


def tree_bytes(root):
    root = Path(root)
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


class TestSpec:
    def test_defaults(self):
        s = SyntheticDatasetSpec().validate()
        assert (s.n_oscillators, s.output_dim, s.n_train, s.n_test) == (3, 784, 5000, 900)
        assert s.growth_range == (-0.2, 0.2)
        assert s.frequency_range == pytest.approx((0.08 * math.pi, 0.14 * math.pi))
        assert s.coupling_range == (0.0, 0.2)
        assert (s.global_coupling, s.noise_intensity) == (0.1, 0.02)
        assert s.init_range == (0.3, 0.4)
        assert (s.n_saved, s.n_time) == (700, 600)

    @pytest.mark.parametrize(
        "change",
        [
            {"n_train": 0},
            {"n_test": -1},
            {"trim_steps": 700},
            {"growth_range": (0.3, 0.1)},
            {"total_time": 35.02},
            {"noise_intensity": -0.1},
        ],
    )
    def test_invalid(self, change):
        with pytest.raises(InvalidArgumentError):
            replace(SyntheticDatasetSpec(), **change).validate()

    def test_default_manifest_shapes(self):
        shapes = plan_manifest(SyntheticDatasetSpec())["shapes"]
        assert shapes["train"] == [5000, 784, 600]
        assert shapes["test"] == [900, 784, 600]
        assert shapes["projection"] == [784, 6]


class TestSampling:
    def test_zero_width_growth(self):
        s = replace(SyntheticDatasetSpec(n_train=5, n_test=5), growth_range=(0.1, 0.1))
        for i in range(10):
            assert (sample_generator_params(s, i).growth == 0.1).all()

    def test_within_ranges(self):
        s = SyntheticDatasetSpec()
        for i in range(0, 5900, 97):
            p = sample_generator_params(s, i)
            assert ((-0.2 <= p.growth) & (p.growth <= 0.2)).all()
            assert ((0.08 * math.pi <= p.frequency) & (p.frequency <= 0.14 * math.pi)).all()
            assert ((0 <= p.coupling) & (p.coupling <= 0.2)).all()
            assert ((0.3 <= p.z0) & (p.z0 <= 0.4)).all()
            assert p.coupling.shape == (3, 3) and p.z0.shape == (6,)

    def test_deterministic_and_distinct(self):
        s = SyntheticDatasetSpec()
        a, b = sample_generator_params(s, 17), sample_generator_params(s, 17)
        assert a.record() == b.record()
        assert a.record() != sample_generator_params(s, 18).record()
        assert a.record() != sample_generator_params(replace(s, master_seed=1), 17).record()

    def test_index_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            sample_generator_params(TINY, 4)


class TestLatent:
    def test_default_length(self):
        z = generate_latent(SyntheticDatasetSpec(), 0)
        assert z.shape == (600, 6) and np.isfinite(z).all()

    def test_untrimmed_length(self):
        s = replace(TINY, trim_steps=0)
        assert generate_latent(s, 0).shape == (100, 2)

    def _cycle_radius(self, substeps):
        s = replace(
            TINY, noise_intensity=0.0, growth_range=(0.04, 0.04), trim_steps=0, substeps=substeps
        )
        sample = sample_generator_params(s, 0)
        sample.z0[:] = [0.2, 0.0]
        z = generate_latent(s, 0, sample)
        return s, sample, np.hypot(z[:, 0], z[:, 1])

    def test_noiseless_limit_cycle(self):
        # node started on its cycle, compared with rk4 at a tenth of the save interval
        s_default = SyntheticDatasetSpec().substeps
        s, sample, rho = self._cycle_radius(s_default)
        p = OscillatorNetworkParams(
            torch.tensor(sample.growth), torch.tensor(sample.frequency), torch.tensor(sample.coupling),
            s.global_coupling, 0.0, s.rate_scale,
        )
        cfg = SolverConfig("rk4_deterministic", s.dt / 10, s.dt, 0)
        ref = integrate(lambda v: sl_drift(v, p), None, torch.tensor([0.2, 0.0], dtype=torch.float64),
                        (0.0, s.total_time), cfg).states[1:].numpy()
        ref_rho = np.hypot(ref[:, 0], ref[:, 1])
        assert np.abs(ref_rho - 0.2).max() < 1e-6
        # Euler-Maruyama is first order; at the default step the radius bias stays near 1%
        assert np.abs(rho - ref_rho).max() < 3e-3

    def test_radius_error_is_first_order(self):
        e1 = np.abs(self._cycle_radius(50)[2] - 0.2).max()
        e2 = np.abs(self._cycle_radius(100)[2] - 0.2).max()
        assert 1.8 < e1 / e2 < 2.2

    def test_stays_bounded(self):
        z = generate_latent(SyntheticDatasetSpec(), 123)
        assert np.abs(z).max() < 2.0


class TestProjection:
    def test_all_ones(self):
        P = make_projection(replace(TINY, projection_range=(1.0, 1.0)), 0)
        assert P.shape == (4, 2) and (P == 1.0).all()

    def test_default_shape_and_range(self):
        P = make_projection(SyntheticDatasetSpec(), 0)
        assert P.shape == (784, 6)
        assert P.min() >= -1 and P.max() <= 1

    def test_deterministic(self):
        assert np.array_equal(make_projection(TINY, 5), make_projection(TINY, 5))
        assert not np.array_equal(make_projection(TINY, 5), make_projection(TINY, 6))

    @given(st.floats(-3, 3), st.integers(0, 1000))
    @settings(max_examples=30, deadline=None)
    def test_linearity(self, alpha, seed):
        rng = np.random.default_rng(seed)
        P = rng.uniform(-1, 1, (5, 4))
        u, v = rng.normal(size=(7, 4)), rng.normal(size=(7, 4))
        np.testing.assert_allclose(project(alpha * u + v, P), alpha * project(u, P) + project(v, P), atol=1e-12)


class TestBuild:
    def test_matrix_oracle(self):
        train, test, manifest = build_dataset(TINY)
        P = manifest["projection"]
        assert train.data.shape == (2, 4, 90) and test.data.shape == (2, 4, 90)
        for batch in (train, test):
            for s in range(2):
                for t in range(90):
                    want = (P @ batch.latents[s, t]).astype(np.float32)
                    np.testing.assert_array_equal(batch.data[s, :, t], want)

    def test_zero_projection(self):
        train, test, _ = build_dataset(TINY, projection=np.zeros((4, 2)))
        assert not train.data.any() and not test.data.any()

    def test_disjoint_indices_and_ground_truth(self):
        train, test, manifest = build_dataset(TINY)
        assert manifest["sample_index_ranges"] == {"train": [0, 2], "test": [2, 4]}
        assert manifest["ground_truth"]["test"][0] == sample_generator_params(TINY, 2).record()
        np.testing.assert_array_equal(test.latents[0], generate_latent(TINY, 2))

    def test_reduced_default_recipe(self):
        spec = SyntheticDatasetSpec(n_train=20, n_test=2)
        train, test, _ = build_dataset(spec)
        assert train.data.shape == (20, 784, 600) and test.data.shape == (2, 784, 600)
        assert train.data.dtype == np.float32 and np.isfinite(train.data).all()


class TestStorage:
    def test_round_trip(self, tmp_path):
        train, test, manifest = build_dataset(TINY)
        save_dataset(tmp_path / "d", train, test, manifest)
        tr2, te2, man2 = load_dataset(tmp_path / "d")
        assert tr2.data.tobytes() == train.data.tobytes()
        assert te2.data.tobytes() == test.data.tobytes()
        np.testing.assert_array_equal(man2["projection"], manifest["projection"].astype(np.float32))
        assert tr2.channel_labels == train.channel_labels
        assert man2["ground_truth"] == manifest["ground_truth"]

    def test_little_endian_layout(self, tmp_path):
        train, test, manifest = build_dataset(TINY)
        save_dataset(tmp_path / "d", train, test, manifest)
        raw = (tmp_path / "d" / "train.f32").read_bytes()
        assert raw == train.data.astype("<f4").tobytes(order="C")
        assert np.array_equal(np.frombuffer(raw, dtype="<f4").reshape(2, 4, 90), train.data)

    def test_byte_reproducible(self, tmp_path):
        for name in ("a", "b"):
            tr, te, man = build_dataset(TINY)
            save_dataset(tmp_path / name, tr, te, man)
        assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")

    def test_manifest_shape_edit(self, tmp_path):
        tr, te, man = build_dataset(TINY)
        save_dataset(tmp_path / "d", tr, te, man)
        mpath = tmp_path / "d" / "manifest.json"
        doc = json.loads(mpath.read_text())
        doc["shapes"]["train"] = [2, 4, 91]
        mpath.write_text(json.dumps(doc))
        with pytest.raises(CorruptDatasetError):
            load_dataset(tmp_path / "d")

    def test_flipped_byte(self, tmp_path):
        tr, te, man = build_dataset(TINY)
        save_dataset(tmp_path / "d", tr, te, man)
        f = tmp_path / "d" / "test.f32"
        raw = bytearray(f.read_bytes())
        raw[5] ^= 0xFF
        f.write_bytes(bytes(raw))
        with pytest.raises(CorruptDatasetError):
            load_dataset(tmp_path / "d")

    def test_truncated(self, tmp_path):
        tr, te, man = build_dataset(TINY)
        save_dataset(tmp_path / "d", tr, te, man)
        f = tmp_path / "d" / "train.f32"
        f.write_bytes(f.read_bytes()[:-4])
        with pytest.raises(CorruptDatasetError):
            load_dataset(tmp_path / "d", verify=False)

    def test_declared_shape_mismatch_on_save(self, tmp_path):
        tr, te, man = build_dataset(TINY)
        man["shapes"]["train"] = [3, 4, 90]
        with pytest.raises(CorruptDatasetError):
            save_dataset(tmp_path / "d", tr, te, man)


def write_csv(path, data, header=None):
    header = header or [f"c{i}" for i in range(data.shape[1])]
    lines = [",".join(header)] + [",".join(repr(float(v)) for v in row) for row in data]
    Path(path).write_text("\n".join(lines) + "\n")


class TestCsv:
    def test_split_114(self, tmp_path):
        rng = np.random.default_rng(0)
        data = rng.normal(size=(160, 11))
        write_csv(tmp_path / "s.csv", data)
        train, test = ingest_csv(tmp_path / "s.csv", 3.0, 114)
        assert train.data.shape == (1, 11, 114) and test.data.shape == (1, 11, 46)
        std = data[:114].std()
        np.testing.assert_array_equal(train.data[0], data[:114].T / std)
        np.testing.assert_array_equal(test.data[0], data[114:].T / std)
        assert train.dt_seconds == 3.0

    def test_known_std_halves(self, tmp_path):
        # training split alternates +-2: mean 0, population std exactly 2
        train_part = np.tile([[2.0, -2.0], [-2.0, 2.0]], (5, 1))
        data = np.vstack([train_part, [[6.0, 1.0], [-4.0, 3.0]]])
        write_csv(tmp_path / "s.csv", data)
        train, test = ingest_csv(tmp_path / "s.csv", 1.0, 10)
        np.testing.assert_array_equal(train.data[0], train_part.T / 2)
        np.testing.assert_array_equal(test.data[0], np.array([[3.0, -2.0], [0.5, 1.5]]))

    def test_fraction_split(self, tmp_path):
        write_csv(tmp_path / "s.csv", np.arange(20.0).reshape(10, 2))
        train, test = ingest_csv(tmp_path / "s.csv", 1.0, 0.7)
        assert train.n_time == 7 and test.n_time == 3

    def test_directory_of_samples(self, tmp_path):
        rng = np.random.default_rng(1)
        for i in range(3):
            write_csv(tmp_path / f"{i}.csv", rng.normal(size=(20, 4)))
        train, test = ingest_csv(tmp_path, 2.0, 15)
        assert train.data.shape == (3, 4, 15) and test.data.shape == (3, 4, 5)

    def test_per_channel(self, tmp_path):
        data = np.column_stack([np.tile([1.0, -1.0], 5), np.tile([3.0, -3.0], 5)])
        write_csv(tmp_path / "s.csv", data)
        train, _ = ingest_csv(tmp_path / "s.csv", 1.0, 8, per_channel=True)
        np.testing.assert_array_equal(np.abs(train.data), 1.0)

    def test_zero_std(self, tmp_path):
        write_csv(tmp_path / "s.csv", np.zeros((10, 3)))
        with pytest.raises(DegenerateInputError):
            ingest_csv(tmp_path / "s.csv", 1.0, 5)

    def test_ragged_row(self, tmp_path):
        (tmp_path / "s.csv").write_text("a,b\n1,2\n3\n")
        with pytest.raises(ParseError) as err:
            ingest_csv(tmp_path / "s.csv", 1.0, 1)
        assert err.value.row == 3

    def test_non_numeric(self, tmp_path):
        (tmp_path / "s.csv").write_text("a,b\n1,2\n3,x\n")
        with pytest.raises(ParseError) as err:
            ingest_csv(tmp_path / "s.csv", 1.0, 1)
        assert (err.value.row, err.value.column) == (3, 2)
        assert "row 3" in str(err.value) and "column 2" in str(err.value)

    def test_bad_split(self, tmp_path):
        write_csv(tmp_path / "s.csv", np.arange(20.0).reshape(10, 2))
        with pytest.raises(InvalidArgumentError):
            ingest_csv(tmp_path / "s.csv", 1.0, 10)
