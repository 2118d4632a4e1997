import io
import json

import numpy as np
import pytest

from dirac_sink.errors import InvalidGrid, UnknownFigure
from dirac_sink.params import ModelParams
from dirac_sink.spectral import spectrum
from dirac_sink.sweep import (
    FigureDataset,
    GridAxis,
    SweepGrid,
    figure_dataset,
    resolve_workers,
    run_sweep,
    sweep_header,
)


def csv_text(result):
    buf = io.StringIO()
    result.to_csv(buf)
    return buf.getvalue()


class TestGridAxis:
    def test_linear(self):
        ax = GridAxis.linear("gamma1", 0, 2, 3)
        assert ax.values == (0.0, 1.0, 2.0)

    def test_log_requires_positive(self):
        with pytest.raises(InvalidGrid):
            GridAxis.log("gamma1", 0, 2, 3)

    def test_count_floor(self):
        with pytest.raises(InvalidGrid):
            GridAxis.linear("gamma1", 0, 2, 1)
        with pytest.raises(InvalidGrid):
            GridAxis.explicit("gamma1", [1.0])

    def test_unknown_parameter(self):
        with pytest.raises(InvalidGrid):
            GridAxis.linear("temperature", 0, 2, 5)


class TestSweepGrid:
    def test_three_axes_rejected(self):
        axes = (
            GridAxis.linear("gamma1", 0, 2, 3),
            GridAxis.linear("gamma2", 0, 2, 3),
            GridAxis.linear("eps", 0, 2, 3),
        )
        with pytest.raises(InvalidGrid):
            SweepGrid(axes=axes, task="spectrum", fixed={"v_re": 2.0})

    def test_unknown_task(self):
        with pytest.raises(InvalidGrid):
            SweepGrid(axes=(), task="bandstructure", fixed={})

    def test_duplicate_axis(self):
        axes = (GridAxis.linear("gamma1", 0, 2, 3), GridAxis.linear("gamma1", 0, 1, 2))
        with pytest.raises(InvalidGrid):
            SweepGrid(axes=axes, task="spectrum",
                      fixed={"eps": 0.0, "gamma2": 0.0, "v_re": 2.0})

    def test_axis_also_fixed(self):
        with pytest.raises(InvalidGrid):
            SweepGrid(
                axes=(GridAxis.linear("gamma1", 0, 2, 3),),
                task="spectrum",
                fixed={"gamma1": 1.0, "eps": 0.0, "gamma2": 0.0, "v_re": 2.0},
            )

    def test_missing_model_parameters(self):
        with pytest.raises(InvalidGrid):
            SweepGrid(axes=(GridAxis.linear("gamma1", 0, 2, 3),),
                      task="spectrum", fixed={"eps": 0.0})

    def test_efficiency_needs_init(self):
        with pytest.raises(InvalidGrid):
            SweepGrid(
                axes=(GridAxis.linear("gamma1", 0, 2, 3),),
                task="efficiency",
                fixed={"eps": 0.0, "gamma2": 1.0, "v_re": 2.0},
            )

    def test_noisy_needs_noise_parameters(self):
        with pytest.raises(InvalidGrid):
            SweepGrid(
                axes=(GridAxis.linear("gamma1", 0, 2, 3),),
                task="noisy-efficiency",
                fixed={"eps": 0.0, "gamma2": 1.0, "v_re": 2.0, "init": "siteB"},
            )

    def test_cell_order_row_major(self):
        grid = SweepGrid(
            axes=(GridAxis.explicit("eps", [0.0, 1.0]),
                  GridAxis.explicit("gamma1", [2.0, 3.0])),
            task="spectrum",
            fixed={"gamma2": 0.0, "v_re": 2.0},
        )
        cells = list(grid.cells())
        assert [(c["eps"], c["gamma1"]) for c in cells] == [
            (0.0, 2.0), (0.0, 3.0), (1.0, 2.0), (1.0, 3.0),
        ]


class TestRunSweep:
    def grid(self):
        return SweepGrid(
            axes=(GridAxis.linear("gamma1", 0.0, 6.0, 7),),
            task="spectrum",
            fixed={"eps": 0.0, "gamma2": 0.0, "v_re": 2.0},
        )

    def test_deterministic_csv(self):
        a = csv_text(run_sweep(self.grid(), seed=1))
        b = csv_text(run_sweep(self.grid(), seed=1))
        assert a == b

    def test_worker_count_invariance(self):
        a = run_sweep(self.grid(), workers=1)
        b = run_sweep(self.grid(), workers=2)
        assert a.rows == b.rows

    def test_single_cell_matches_direct_call(self):
        grid = SweepGrid(
            axes=(), task="spectrum",
            fixed={"eps": 2.0, "gamma1": 5.3, "gamma2": 0.0, "v_re": 2.0},
        )
        res = run_sweep(grid)
        assert len(res.rows) == 1
        cs = spectrum(ModelParams.symmetric(2.0, 5.3, 0.0, 2.0))
        row = dict(zip(res.header, res.rows[0]))
        assert row["Y1"] == cs.y1 and row["Y2"] == cs.y2 and row["E1"] == cs.e1

    def test_header_and_error_column(self):
        res = run_sweep(self.grid())
        assert res.header == sweep_header("spectrum")
        assert res.header[-1] == "error"
        assert all(r[-1] == "" for r in res.rows)

    def test_flagged_rows_do_not_abort(self):
        # eta0 cells on the singular boundary come back flagged, not raised
        grid = SweepGrid(
            axes=(GridAxis.explicit("gamma1", [0.0, 2.0]),),
            task="eta0",
            fixed={"eps": 0.0, "gamma2": 0.0, "v_re": 2.0},
        )
        res = run_sweep(grid)
        rows = [dict(zip(res.header, r)) for r in res.rows]
        assert rows[0]["valid"] is False and np.isnan(rows[0]["eta0"])
        assert rows[1]["valid"] is True and rows[1]["eta0"] == pytest.approx(1.0)

    def test_bad_cells_carry_error_token(self):
        grid = SweepGrid(
            axes=(GridAxis.explicit("gamma1", [1.0, 2.0]),),
            task="noisy-efficiency",
            fixed={"eps": 0.0, "gamma2": 1.0, "v_re": 2.0, "init": "siteB",
                   "d": 5.0, "gamma_noise": -1.0},
        )
        res = run_sweep(grid)
        assert all(r[-1] == "ValueError" for r in res.rows)

    def test_unresolvable_cell_flagged_not_fatal(self):
        # first cell has a negative escape rate; the sweep must finish
        grid = SweepGrid(
            axes=(GridAxis.explicit("gamma1", [2.0, -1.0]),),
            task="spectrum",
            fixed={"eps": 0.0, "gamma2": 0.0, "v_re": 2.0},
        )
        res = run_sweep(grid)
        assert res.rows[0][-1] == ""
        assert res.rows[1][-1] == "ValueError"
        row = dict(zip(res.header, res.rows[1]))
        assert row["gamma1"] == -1.0 and np.isnan(row["Y1"])

    def test_manifest_keys(self):
        res = run_sweep(self.grid(), seed=11)
        assert set(res.manifest) == {"config", "seed", "version", "started_at", "elapsed_s"}
        assert res.manifest["seed"] == 11
        assert res.manifest["config"]["task"] == "spectrum"

    def test_manifest_roundtrip(self, tmp_path):
        res = run_sweep(self.grid(), seed=11)
        path = tmp_path / "m.json"
        res.write_manifest(path)
        assert json.loads(path.read_text())["seed"] == 11

    def test_efficiency_task_values(self):
        from dirac_sink.dynamics import IntegratorConfig, propagate

        grid = SweepGrid(
            axes=(GridAxis.explicit("gamma1", [1.0, 2.0]),),
            task="efficiency",
            fixed={"eps": 0.1, "gamma2": 1.0, "v_re": 2.0, "init": "siteB",
                   "t_final": 5.0},
        )
        res = run_sweep(grid)
        row = dict(zip(res.header, res.rows[1]))
        rec = propagate(ModelParams.symmetric(0.1, 2.0, 1.0, 2.0), "siteB",
                        IntegratorConfig(t_final=5.0))
        assert row["eta1"] == rec.eta1[-1]
        assert row["t_final"] == 5.0


class TestResolveWorkers:
    def test_default_sequential(self, monkeypatch):
        monkeypatch.delenv("DIRAC_SINK_THREADS", raising=False)
        assert resolve_workers(None) == 1
        assert resolve_workers(4) == 4

    def test_env_cap(self, monkeypatch):
        monkeypatch.setenv("DIRAC_SINK_THREADS", "2")
        assert resolve_workers(None) == 2
        assert resolve_workers(8) == 2


class TestFigureDatasets:
    def test_unknown_figure(self):
        with pytest.raises(UnknownFigure):
            figure_dataset(12)

    def test_fig4_caption_parameters(self):
        ds = figure_dataset(4)
        assert isinstance(ds, FigureDataset)
        (grid,) = ds.grids
        assert grid.task == "spectrum"
        assert grid.fixed["gamma2"] == 0.0 and grid.fixed["v_re"] == 2.0
        eps_axis = grid.axes[0]
        assert eps_axis.values == (0.0, 0.1, 0.5, 2.0, 4.0)
        assert len(grid.axes[1].values) >= 200

    def test_fig8_caption_parameters(self):
        (grid,) = figure_dataset(8).grids
        assert grid.task == "eta0"
        assert grid.fixed == {"gamma2": 1.0, "v_re": 2.0, "v_im": 0.0}
        assert {a.name for a in grid.axes} == {"gamma1", "eps"}

    def test_fig9_caption_parameters(self):
        (grid,) = figure_dataset(9).grids
        assert grid.task == "noisy-efficiency"
        assert grid.axes[0].values == (0.0, 5.0, 10.0, 20.0)
        assert grid.fixed["gamma_noise"] == 10.0
        assert grid.fixed["gamma2"] == 1.0
        assert grid.fixed["eps"] == 0.0
        assert grid.fixed["init"] == "siteB"

    def test_fig6_family_of_initial_states(self):
        ds = figure_dataset(6)
        assert [g.fixed["init"] for g in ds.grids] == ["siteB", "siteA", "plus", "minus"]
        assert all(g.fixed["gamma2"] == 1.0 and g.fixed["eps"] == 0.1 for g in ds.grids)

    def test_fig3_and_fig5_families(self):
        assert [g.fixed["eps"] for g in figure_dataset(3).grids] == [0.0, 2.0]
        ds5 = figure_dataset(5)
        assert [g.fixed["eps"] for g in ds5.grids] == [0.0, 0.25]
        assert all({a.name for a in g.axes} == {"v_re", "v_im"} for g in ds5.grids)
        assert all(g.fixed["gamma1"] == 2.0 and g.fixed["gamma2"] == 0.0
                   for g in ds5.grids)

    def test_points_override(self):
        ds = figure_dataset(4, points=11)
        (grid,) = ds.grids
        assert len(grid.axes[1].values) == 11
        assert len(grid.axes[0].values) == 5  # explicit axes untouched

    def test_fig4_run_small(self):
        res = figure_dataset(4, points=5).run()
        assert len(res.rows) == 25
        assert all(r[-1] == "" for r in res.rows)
        row = dict(zip(res.header, res.rows[0]))
        cs = spectrum(ModelParams.symmetric(0.0, 0.0, 0.0, 2.0))
        assert row["Y1"] == cs.y1 and row["width_sum"] == cs.width_sum

    def test_fig6_run_small_concatenates(self):
        res = figure_dataset(6, points=2).run()
        assert len(res.rows) == 8
        inits = {dict(zip(res.header, r))["init"] for r in res.rows}
        assert inits == {"siteB", "siteA", "plus", "minus"}

    def test_fig3_run_small_covers_both_eps(self):
        res = figure_dataset(3, points=3).run()
        assert len(res.rows) == 18
        rows = [dict(zip(res.header, r)) for r in res.rows]
        assert {r["eps"] for r in rows} == {0.0, 2.0}
        probe = rows[4]  # eps=0 grid, gamma1=3, gamma2=3
        cs = spectrum(ModelParams.symmetric(0.0, probe["gamma1"],
                                            probe["gamma2"], 2.0))
        assert probe["Y1"] == cs.y1 and probe["Y2"] == cs.y2
