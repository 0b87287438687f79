import math

import numpy as np
import pytest
import torch
from hypothesis import given, settings
from hypothesis import strategies as st

from gokuui.data import TrajectoryBatch
from gokuui.errors import DegenerateInputError, InvalidArgumentError, InvalidPlanError
from gokuui.models import ModelSpec
from gokuui.training import (
    TrainConfig,
    TrainState,
    compute_loss,
    continuity_penalty,
    fit,
    init_model,
    kl_term,
    lr_schedule,
    plan_windows,
    reconstruction_loss,
    sample_training_window,
    single_shooting,
)

F64 = torch.float64


class TestWindows:
    def test_paper_plan(self):
        plan = plan_windows(46, 10)
        assert (plan.n_windows, plan.n_junctions, plan.overlap) == (5, 4, 1)
        assert plan.windows == [(0, 10), (9, 19), (18, 28), (27, 37), (36, 46)]
        assert plan.junction_index_pairs == [(9, 9), (18, 18), (27, 27), (36, 36)]

    def test_single(self):
        plan = plan_windows(10, 10)
        assert (plan.n_windows, plan.n_junctions) == (1, 0)
        assert single_shooting(46) == plan_windows(46, 46)

    def test_three_windows(self):
        assert plan_windows(28, 10).n_windows == 3

    def test_invalid_names_neighbours(self):
        with pytest.raises(InvalidPlanError) as err:
            plan_windows(47, 10)
        assert "[46, 55]" in str(err.value)
        with pytest.raises(InvalidPlanError):
            plan_windows(5, 10)
        with pytest.raises(InvalidPlanError):
            plan_windows(5, 1)

    def test_all_pairs_up_to_200(self):
        for window in range(2, 201):
            for seq in range(window, 201):
                valid = (seq - window) % (window - 1) == 0
                if not valid:
                    with pytest.raises(InvalidPlanError):
                        plan_windows(seq, window)
                    continue
                p = plan_windows(seq, window)
                assert seq == window + (p.n_windows - 1) * (window - 1)
                assert p.n_junctions == p.n_windows - 1
                assert p.windows[0][0] == 0 and p.windows[-1][1] == seq
                assert all(e - s == window for s, e in p.windows)
                assert all(a == b for a, b in p.junction_index_pairs)

    @given(st.integers(2, 200), st.integers(2, 200))
    @settings(max_examples=200, deadline=None)
    def test_nearest_values_are_valid(self, seq, window):
        if seq < window or (seq - window) % (window - 1) == 0:
            return
        with pytest.raises(InvalidPlanError) as err:
            plan_windows(seq, window)
        near = [int(v) for v in str(err.value).split("[")[-1].rstrip("]").split(",")]
        for v in near:
            plan_windows(v, window)
        assert min(near) < seq < max(near)


class TestLosses:
    def test_reconstruction(self):
        t = torch.randn(2, 3, 4, dtype=F64)
        assert reconstruction_loss(t, t).item() == 0.0
        assert reconstruction_loss(torch.zeros(5, dtype=F64), torch.ones(5, dtype=F64)).item() == 1.0
        rng = np.random.default_rng(0)
        p, q = rng.normal(size=(3, 7)), rng.normal(size=(3, 7))
        sq = sum((a - b) ** 2 for a, b in zip(p.ravel(), q.ravel())) / p.size
        scale = sum(abs(v) for v in q.ravel()) / q.size
        assert reconstruction_loss(torch.tensor(p), torch.tensor(q)).item() == pytest.approx(sq / scale, rel=1e-12)

    def test_reconstruction_degenerate(self):
        with pytest.raises(DegenerateInputError):
            reconstruction_loss(torch.ones(3), torch.zeros(3))

    def test_continuity_zero_when_continuous(self):
        plan = plan_windows(19, 10)
        traj = torch.randn(2, 10, 6, dtype=F64)
        z0 = torch.stack([traj[0, 0], traj[0, -1]])
        assert continuity_penalty(traj, z0, plan, 2.0).item() == 0.0

    def test_single_gap(self):
        plan = plan_windows(19, 10)
        traj = torch.zeros(2, 10, 6, dtype=F64)
        z0 = torch.zeros(2, 6, dtype=F64)
        z0[1, 0] = -0.1
        assert continuity_penalty(traj, z0, plan, 2.0).item() == pytest.approx(0.02, abs=1e-12)

    def test_three_junction_oracle(self):
        plan = plan_windows(28, 7 + 3)
        rng = np.random.default_rng(3)
        traj = rng.normal(size=(2, 3, 10, 4))
        z0 = rng.normal(size=(2, 3, 4))
        want = 0.0
        for b in range(2):
            for j in range(2):
                want += sum((traj[b, j, -1, k] - z0[b, j + 1, k]) ** 2 for k in range(4))
        want = 1.5 / 2 * want / 2
        got = continuity_penalty(torch.tensor(traj), torch.tensor(z0), plan, 1.5).item()
        assert got == pytest.approx(want, rel=1e-12)

    def test_single_window_zero(self):
        assert continuity_penalty(torch.randn(1, 5, 2), torch.randn(1, 2), single_shooting(5), 2.0).item() == 0.0

    @given(st.floats(0, 10), st.floats(0.1, 10), st.integers(0, 1000))
    @settings(max_examples=50, deadline=None)
    def test_scaling(self, lam, alpha, seed):
        plan = plan_windows(28, 10)
        g = torch.Generator().manual_seed(seed)
        traj = torch.randn(2, 3, 10, 4, generator=g, dtype=F64)
        z0 = torch.randn(2, 3, 4, generator=g, dtype=F64)
        base = continuity_penalty(traj, z0, plan, 1.0).item()
        assert base >= 0
        assert continuity_penalty(traj, z0, plan, lam).item() == pytest.approx(lam * base, rel=1e-12, abs=1e-300)
        # scale every gap by alpha: move the next-window starts along the gaps
        gaps = traj[:, :-1, -1] - z0[:, 1:]
        z0s = z0.clone()
        z0s[:, 1:] = traj[:, :-1, -1] - alpha * gaps
        assert continuity_penalty(traj, z0s, plan, 1.0).item() == pytest.approx(alpha**2 * base, rel=1e-9)

    def test_kl(self):
        assert kl_term(torch.zeros(4), torch.zeros(4)).item() == 0.0
        assert kl_term(torch.ones(1), torch.zeros(1)).item() == 0.5
        rng = np.random.default_rng(1)
        mu, lv = rng.normal(size=(5, 3)), rng.normal(size=(5, 3))
        want = np.mean([sum(0.5 * (m * m + math.exp(l) - 1 - l) for m, l in zip(mu[b], lv[b])) for b in range(5)])
        assert kl_term(torch.tensor(mu), torch.tensor(lv)).item() == pytest.approx(want, rel=1e-12)


class TestSchedule:
    def test_anchors(self):
        assert lr_schedule(0) == 1e-7
        assert lr_schedule(20) == 0.005251
        assert lr_schedule(10) == pytest.approx(2.62555e-3, rel=1e-12)
        assert lr_schedule(10) == 1e-7 + (0.005251 - 1e-7) / 2

    def test_plateau_phase(self):
        state = TrainState(plateau_epoch=100)
        assert lr_schedule(99, state) == 0.005251
        assert lr_schedule(100, state) == pytest.approx(0.005251, rel=1e-15)
        # half a period later the arch is at its floor; a full period later the peak is halved
        assert lr_schedule(125, state) == pytest.approx(1e-7, rel=1e-9)
        assert lr_schedule(150, state) == pytest.approx(1e-7 + (0.005251 - 1e-7) / 2, rel=1e-12)

    def test_continuity_at_boundaries(self):
        state = TrainState(plateau_epoch=80)
        eps = 1e-6
        assert abs(lr_schedule(20 - eps) - lr_schedule(20)) < 1e-8
        assert abs(lr_schedule(80 - eps, state) - lr_schedule(80 + eps, state)) < 1e-8

    def test_bounded_10k(self):
        rng = np.random.default_rng(0)
        for p in [None, 20, 57, 300, 9000]:
            state = TrainState(plateau_epoch=p)
            for e in range(10_000):
                lr = lr_schedule(e, state)
                assert 1e-7 <= lr <= 0.005251
        for _ in range(200):
            e = float(rng.uniform(0, 1e4))
            assert 1e-7 <= lr_schedule(e, TrainState(plateau_epoch=int(rng.integers(20, 1000)))) <= 0.005251

    def test_plateau_detection(self):
        state = TrainState()
        for e in range(25):
            state.record_validation(e, 1.0 - 0.01 * e, 20, 5)
        assert state.plateau_epoch is None
        for e in range(25, 30):
            state.record_validation(e, 5.0, 20, 5)
        assert state.plateau_epoch == 30

    def test_no_plateau_during_warmup(self):
        state = TrainState()
        for e in range(12):
            state.record_validation(e, 1.0, 20, 5)
        assert state.plateau_epoch is None


class TestTrainingWindow:
    def test_identity(self):
        x = np.arange(46.0).reshape(1, 46)
        assert np.array_equal(sample_training_window(x, 46, np.random.default_rng(0)), x)

    def test_range_and_reproducible(self):
        x = np.arange(600.0)
        starts = {int(sample_training_window(x, 46, np.random.default_rng(s))[0]) for s in range(3000)}
        assert min(starts) == 0 and max(starts) == 554
        a = sample_training_window(x, 46, np.random.default_rng(9))
        assert np.array_equal(a, sample_training_window(x, 46, np.random.default_rng(9)))

    def test_too_short(self):
        with pytest.raises(InvalidArgumentError):
            sample_training_window(np.zeros(10), 46, np.random.default_rng(0))


def tiny_data(n=6, d=4, t=30, seed=0):
    rng = np.random.default_rng(seed)
    tt = np.arange(t) * 0.3
    data = np.stack([np.outer(rng.uniform(-1, 1, d), np.sin(tt + rng.uniform(0, 6))) for _ in range(n)])
    return TrajectoryBatch(data.astype(np.float32))


def tiny_config(**kw):
    base = dict(batch_size=3, seq_len=10, window_len=4, max_epochs=3, warmup_epochs=2, seed=5)
    base.update(kw)
    return TrainConfig(**base)


class TestFit:
    def test_deterministic(self, tmp_path):
        spec = ModelSpec(input_dim=4, n_oscillators=1)
        runs = []
        for k in range(2):
            model = init_model(spec, 5)
            res = fit(model, tiny_data(), tiny_config(), tmp_path / str(k))
            runs.append((res.state.loss_history, res.state.val_history, (tmp_path / str(k) / "train_log.jsonl").read_text()))
        assert runs[0][0] == runs[1][0] and runs[0][1] == runs[1][1]
        strip = lambda txt: [{k: v for k, v in __import__("json").loads(l).items() if k != "wall_time"} for l in txt.splitlines()]
        assert strip(runs[0][2]) == strip(runs[1][2])
        assert len(runs[0][2].splitlines()) == 3

    def test_log_and_checkpoint(self, tmp_path):
        import json

        res = fit(init_model(ModelSpec(input_dim=4, n_oscillators=1), 0), tiny_data(), tiny_config(), tmp_path)
        lines = [json.loads(l) for l in (tmp_path / "train_log.jsonl").read_text().splitlines()]
        assert [l["epoch"] for l in lines] == [0, 1, 2]
        assert {"lr", "train_loss", "reconstruction", "continuity", "val_loss", "wall_time"} <= set(lines[0])
        assert lines[0]["lr"] == 1e-7
        assert (tmp_path / "checkpoint" / "manifest.json").exists()
        assert res.state.epoch == 3

    def test_descent_step(self):
        spec = ModelSpec(input_dim=4, n_oscillators=1, stochastic=False)
        model = init_model(spec, 1, F64)
        x = torch.tensor(tiny_data(n=1).data[:, :, :10], dtype=F64)
        cfg = tiny_config()
        loss = compute_loss(model, x, cfg.plan, cfg)["total"]
        params = list(model.parameters())
        grads = torch.autograd.grad(loss, params)
        # the step direction is a descent direction: directional derivative = -|g|^2
        gnorm2 = sum((g * g).sum() for g in grads).item()
        eps = 1e-6
        with torch.no_grad():
            for p, g in zip(params, grads):
                p.add_(g, alpha=-eps)
        lower = compute_loss(model, x, cfg.plan, cfg)["total"].item()
        assert lower < loss.item()
        assert (loss.item() - lower) / eps == pytest.approx(gnorm2, rel=1e-3)

    def test_single_window_equivalence(self):
        spec = ModelSpec(input_dim=4, n_oscillators=1)
        x = torch.tensor(tiny_data(n=2).data[:, :, :10], dtype=F64)
        out = []
        for lam in (0.0, 2.0):
            model = init_model(spec, 2, F64)
            cfg = tiny_config(window_len=10, continuity_coeff=lam)
            g = torch.Generator().manual_seed(0)
            loss = compute_loss(model, x, plan_windows(10, 10), cfg, g)["total"]
            grads = torch.autograd.grad(loss, list(model.parameters()))
            out.append((loss, grads))
        assert torch.equal(out[0][0], out[1][0])
        assert all(torch.equal(a, b) for a, b in zip(out[0][1], out[1][1]))

    def test_train_size_and_errors(self):
        model = init_model(ModelSpec(input_dim=4, n_oscillators=1), 0)
        with pytest.raises(InvalidArgumentError):
            fit(model, tiny_data(), tiny_config(train_size=99))
        with pytest.raises(InvalidArgumentError):
            fit(init_model(ModelSpec(input_dim=5, n_oscillators=1), 0), tiny_data(), tiny_config())
        with pytest.raises(InvalidArgumentError):
            tiny_config(continuity_coeff=-1).validate()
        with pytest.raises(InvalidArgumentError):
            tiny_config(lr_floor=1.0).validate()

    def test_naive_skips_training(self, tmp_path):
        from gokuui.models import build_model

        res = fit(build_model(ModelSpec(variant="naive", input_dim=4)), tiny_data(), tiny_config(), tmp_path)
        assert res.state.epoch == 0


class TestContinuityWarmup:
    def test_coefficient_steps(self):
        cfg = tiny_config(continuity_warmup_epochs=3, continuity_ramp_epochs=1)
        assert [cfg.continuity_at(e) for e in range(5)] == [0.0, 0.0, 0.0, 2.0, 2.0]
        assert tiny_config(continuity_warmup_epochs=0, continuity_ramp_epochs=1).continuity_at(0) == 2.0
        with pytest.raises(InvalidArgumentError):
            tiny_config(continuity_warmup_epochs=-1).validate()
        with pytest.raises(InvalidArgumentError):
            tiny_config(continuity_ramp_epochs=0).validate()

    def test_linear_ramp(self):
        cfg = tiny_config(continuity_warmup_epochs=2, continuity_ramp_epochs=4)
        assert [cfg.continuity_at(e) for e in range(8)] == [0.0, 0.0, 0.5, 1.0, 1.5, 2.0, 2.0, 2.0]

    def test_fit_switches_penalty_and_resets_best(self, tmp_path):
        import json

        cfg = tiny_config(max_epochs=4, continuity_warmup_epochs=2, continuity_ramp_epochs=1)
        res = fit(init_model(ModelSpec(input_dim=4, n_oscillators=1), 0), tiny_data(), cfg, tmp_path)
        log = [json.loads(l) for l in (tmp_path / "train_log.jsonl").read_text().splitlines()]
        assert [r["continuity_coeff"] for r in log] == [0.0, 0.0, 2.0, 2.0]
        assert [r["continuity"] for r in log[:2]] == [0.0, 0.0]
        assert all(r["continuity"] > 0 for r in log[2:])
        # the best checkpoint comes from the penalised phase
        assert res.state.best_epoch >= 2
        assert res.state.best_val_loss == min(r["val_loss"] for r in log[2:])
