"""End-to-end experiment runs: CSV contracts, reports, determinism."""

import dataclasses

import numpy as np
import pytest

from vardyn import exact_diagonalize
from vardyn.config import load_config, parse_config
from vardyn.experiments import (
    build_h2_hamiltonian,
    ground_manifold_reachable,
    h2_split,
    read_coefficients_file,
    run_generic,
    run_h2_curve,
    run_pt_compare,
    run_rabi_sweep,
    two_level_drive,
    two_level_h0,
)

from helpers import CONFIG_DIR, DATA_DIR, dense_from_letters


def small_rabi_config(tmp_path, points: int = 5, dt: float = 2e-3, **experiment_extra):
    extra = "".join(f"{k} = {v}\n" for k, v in experiment_extra.items())
    text = (
        f"[experiment]\nkind = rabi_sweep\noutput_dir = {tmp_path / 'out'}\n{extra}"
        f"[evolution]\ndt = {dt}\nt_final = 1.0\n"
        f"[sweep]\nparameter = omega\nstart = 0.8\nstop = 1.2\npoints = {points}\n"
    )
    return parse_config(text, base_dir=tmp_path)


def test_two_level_h0_dense():
    h0 = two_level_h0(0.0, 1.0)
    assert np.allclose(h0.to_dense(), np.diag([0.0, 1.0]), atol=1e-15)


def test_two_level_drive_matches_complex_form():
    delta, omega = 0.07, 1.3
    drive = two_level_drive(delta, omega)
    for t in (0.0, 0.4, 2.1):
        want = np.array(
            [[0, delta * np.exp(1j * omega * t)], [delta * np.exp(-1j * omega * t), 0]]
        )
        got = drive.pauli_sum_at(t).to_dense()
        assert np.max(np.abs(got - want)) < 1e-12


def test_build_h2_hamiltonian_dense():
    g = np.array([-0.25, 0.4, -0.4, 0.01, 0.18, 0.18])
    h = build_h2_hamiltonian(g)
    oracle = sum(
        c * dense_from_letters(l) for c, l in zip(g, ("II", "ZI", "IZ", "ZZ", "YY", "XX"))
    )
    assert np.max(np.abs(h.to_dense() - oracle)) < 1e-14
    h0, hp = h2_split(g)
    assert np.max(np.abs((h0.to_dense() + hp.to_dense()) - oracle)) < 1e-14
    assert np.max(np.abs(h0.to_dense() - np.diag(np.diag(h0.to_dense())))) == 0


def test_read_coefficients_file_shipped():
    rows = read_coefficients_file(DATA_DIR / "h2_coefficients.txt")
    assert len(rows) == 8
    assert rows[0][0] == "0.50"
    assert rows[0][1].shape == (6,)


def test_read_coefficients_file_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("r1 1 2 3\n")
    with pytest.raises(ValueError, match="label g0"):
        read_coefficients_file(bad)
    bad.write_text("r1 1 2 3 4 5 nan\n")
    with pytest.raises(ValueError, match="finite"):
        read_coefficients_file(bad)
    bad.write_text("# only comments\n")
    with pytest.raises(ValueError, match="no coefficient rows"):
        read_coefficients_file(bad)


def test_ground_manifold_reachable_cases():
    # Shipped-style row: ground lives in the real |01>/|10> plane.
    assert ground_manifold_reachable(build_h2_hamiltonian([-0.25, 0.4, -0.4, 0.01, 0.18, 0.18]))
    # Ground at |00> is outside the manifold.
    assert not ground_manifold_reachable(build_h2_hamiltonian([0.0, -1.0, -1.0, 0.0, 0.1, 0.1]))
    # Degenerate ground space that intersects the manifold counts as reachable:
    # +Z0Z1 penalizes aligned pairs, so |01> and |10> span its ground space.
    assert ground_manifold_reachable(build_h2_hamiltonian([0.0, 0.0, 0.0, 1.0, 0.0, 0.0]))
    # ... while -Z0Z1 grounds the |00>/|11> pair, which the manifold misses.
    assert not ground_manifold_reachable(build_h2_hamiltonian([0.0, 0.0, 0.0, -1.0, 0.0, 0.0]))


def test_run_rabi_sweep_small_grid(tmp_path):
    cfg = small_rabi_config(tmp_path)
    report = run_rabi_sweep(cfg, figures=False)
    assert report.passed
    assert len(report.points) == 5
    csv_path = tmp_path / "out" / "rabi_sweep.csv"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "omega,p1_var,p2_var,p1_exact,p2_exact,abs_dev"
    assert len(lines) == 6
    # report invariants: max dominates every per-point deviation
    for point in report.points:
        assert report.max_deviation >= point.deviation
    assert report.passed == (report.max_deviation <= report.tolerance)
    assert (tmp_path / "out" / "rabi_sweep_report.txt").exists()


def test_run_rabi_sweep_zero_drive(tmp_path):
    cfg = small_rabi_config(tmp_path, points=3, dt=5e-3, delta=0.0)
    report = run_rabi_sweep(cfg, figures=False)
    for point in report.points:
        assert point.variational < 1e-6
        assert point.deviation < 1e-6


def test_run_h2_curve_special_rows(tmp_path):
    rows = tmp_path / "rows.txt"
    rows.write_text(
        "\n".join(
            [
                "# label g0 g1 g2 g3 g4 g5",
                "plain 0.0 0.3 -0.2 0.1 0.05 0.05",     # generic reachable row
                "diag 0.0 0.3 -0.2 0.1 0.0 0.0",        # zero perturbation
                "deg 0.0 0.0 0.0 0.5 0.2 0.2",          # degenerate diagonal part
                "outside 0.0 -1.0 -1.0 0.0 0.1 0.1",    # ground state not reachable
            ]
        )
        + "\n"
    )
    text = (
        f"[experiment]\nkind = h2_curve\noutput_dir = {tmp_path / 'out'}\ncoefficients = {rows}\n"
        "[evolution]\ndt = 0.1\nconvergence = 1e-12\n"
    )
    cfg = parse_config(text, base_dir=tmp_path)
    report = run_h2_curve(cfg, figures=False)

    by_label = {p.sweep_value: p for p in report.points}
    # zero perturbation: everything collapses to the smallest diagonal entry
    diag = by_label["diag"]
    assert abs(diag.variational - diag.oracles["exact"]) < 1e-9
    assert abs(diag.oracles["tipt2"] - diag.oracles["exact"]) < 1e-12

    # degenerate diagonal part: no perturbation energy, still exact variationally
    deg = by_label["deg"]
    assert np.isnan(deg.oracles["tipt2"])
    assert abs(deg.oracles["exact"] - (-0.9)) < 1e-12
    assert abs(deg.variational - (-0.9)) < 1e-6
    assert any("deg" in note for note in report.notes)

    # unreachable row is reported, not asserted
    outside = by_label["outside"]
    assert not outside.included
    assert any("outside" in note for note in report.notes)
    assert report.passed  # failing row excluded from the gate

    # variational bound holds row by row
    for point in report.points:
        assert point.variational >= point.oracles["exact"] - 1e-9

    lines = (tmp_path / "out" / "h2_curve.csv").read_text().splitlines()
    assert lines[0] == "label,e_var,e_tipt2,e_exact,dev_var,dev_tipt2"
    assert len(lines) == 5
    assert "nan" in lines[3]


def test_run_h2_curve_shipped_file(tmp_path):
    cfg = load_config(CONFIG_DIR / "h2_curve.ini")
    cfg = dataclasses.replace(cfg, output_dir=str(tmp_path / "out"))
    report = run_h2_curve(cfg, figures=False)
    assert report.passed
    assert all(point.included for point in report.points)


def test_run_pt_compare(tmp_path):
    cfg = load_config(CONFIG_DIR / "pt_compare.ini")
    cfg = dataclasses.replace(cfg, output_dir=str(tmp_path / "out"))
    report = run_pt_compare(cfg, figures=False)
    assert report.passed
    lines = (tmp_path / "out" / "pt_compare.csv").read_text().splitlines()
    assert lines[0] == "lambda,e_exact,e_tipt1,e_tipt2,dev_tipt1,dev_tipt2"
    # order 2 beats order 1 in the perturbative regime
    for point in report.points:
        dev1 = abs(point.oracles["tipt1"] - point.oracles["exact"])
        assert point.deviation <= dev1 + 1e-15


def test_run_generic_evolve_and_manifest(tmp_path):
    cfg = load_config(CONFIG_DIR / "evolve_two_level.ini")
    cfg = dataclasses.replace(cfg, output_dir=str(tmp_path / "out"))
    trajectory = run_generic(cfg, figures=False)
    csv_lines = (tmp_path / "out" / "trajectory.csv").read_text().splitlines()
    assert csv_lines[0] == "t,param_0,param_1,param_2,energy,pop_0,pop_1,fidelity"
    assert len(csv_lines) == trajectory.rows + 1
    manifest = (tmp_path / "out" / "run_manifest.txt").read_text()
    assert "kind = evolve" in manifest
    assert "backend = direct" in manifest
    assert "wall_time_s = " in manifest


def test_run_generic_ground_state_manifest(tmp_path):
    cfg = load_config(CONFIG_DIR / "ground_state_h2.ini")
    cfg = dataclasses.replace(cfg, output_dir=str(tmp_path / "out"))
    run_generic(cfg, figures=False)
    manifest = (tmp_path / "out" / "run_manifest.txt").read_text()
    assert "final_energy = " in manifest
    assert "converged_steps = " in manifest
    exact = exact_diagonalize(cfg.hamiltonian).ground_energy
    final_energy = float(manifest.split("final_energy = ")[1].splitlines()[0])
    assert abs(final_energy - exact) < 1e-6


def test_run_generic_evolve_t_final_single_row(tmp_path):
    text = (
        f"[experiment]\nkind = ground_state\noutput_dir = {tmp_path / 'out'}\n"
        "[hamiltonian]\nterms =\n    1 0 Z\n"
        "[ansatz]\nreference = 0\ninitial_params = 0.3\ngates =\n    - 1 X\n"
        "[evolution]\ndt = 0.1\n"
    )
    cfg = parse_config(text, base_dir=tmp_path)
    trajectory = run_generic(cfg, figures=False)
    energy = trajectory.observables["energy"]
    assert abs(energy[-1] - (-1.0)) < 1e-6


def test_backend_choice_gives_identical_results(tmp_path):
    base = (
        "[experiment]\nkind = evolve\noutput_dir = {out}\n"
        "[hamiltonian]\nterms =\n    0.5 0 I\n    -0.5 0 Z\n"
        "[drive]\nterms =\n    cosine 0.05 1.0 0.0 X\n    sine -0.05 1.0 0.0 Y\n"
        "[ansatz]\nreference = 0\nglobal_phase = true\ngates =\n    + 1 X\n    + 1 Z\n"
        "[evolution]\ndt = 0.01\nt_final = 0.1\nbackend = {backend}\n"
    )
    outputs = {}
    for backend in ("direct", "circuit"):
        out = tmp_path / backend
        cfg = parse_config(base.format(out=out, backend=backend), base_dir=tmp_path)
        run_generic(cfg, figures=False)
        outputs[backend] = (out / "trajectory.csv").read_text().splitlines()
    direct, circuit = outputs["direct"], outputs["circuit"]
    assert direct[0] == circuit[0]
    for row_d, row_c in zip(direct[1:], circuit[1:]):
        for cell_d, cell_c in zip(row_d.split(","), row_c.split(",")):
            assert abs(float(cell_d) - float(cell_c)) <= 1e-9


def test_rabi_sweep_determinism(tmp_path):
    texts = []
    for run in ("one", "two"):
        cfg = small_rabi_config(tmp_path / run, points=3, dt=5e-3)
        run_rabi_sweep(cfg, figures=False)
        texts.append((tmp_path / run / "out" / "rabi_sweep.csv").read_bytes())
    assert texts[0] == texts[1]
