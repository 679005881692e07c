import hashlib
import math
from pathlib import Path

import pytest

from fracplots import FigureSpec, OverlayKind, SchemaError, render
from fracplots.cli import EXIT_OK, EXIT_SCHEMA, EXIT_USAGE, main


def write_trace(path: Path, n=33, truth=True, coincident=False):
    rows = ["t,rho_true,rho_hat,u_star,w_sigma,kernel_v"]
    for i in range(n):
        t = i / (n - 1)
        rt = math.sin(2 * math.pi * t) + 10 * t if truth else float("nan")
        rh = rt if (coincident and truth) else (rt if truth else 1.0) * 0.99 + 0.01
        rows.append(f"{t},{rt if truth else 'nan'},{rh},{0.1*t},{0.1*t},{0.05*t}")
    path.write_text("\n".join(rows) + "\n")


def write_early(path: Path, n=33):
    rows = ["t,rho_m1,rho_m2,rho_m3,rho_m4"]
    for i in range(n):
        t = i / (n - 1)
        rows.append(f"{t},{t},{2*t},{3*t},{4*t}")
    path.write_text("\n".join(rows) + "\n")


def digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture()
def run_dir(tmp_path):
    d = tmp_path / "run"
    d.mkdir()
    write_trace(d / "trace.csv")
    write_early(d / "early_iterates.csv")
    return d


class TestRender:
    def test_truth_vs_recon(self, run_dir, tmp_path):
        out = render(FigureSpec(run_dir / "trace.csv", OverlayKind.TRUTH_VS_RECON,
                                tmp_path / "fig.png"))
        assert out.exists() and out.stat().st_size > 0

    def test_coincident_curves(self, run_dir, tmp_path):
        write_trace(run_dir / "trace.csv", coincident=True)
        out = render(FigureSpec(run_dir / "trace.csv", OverlayKind.TRUTH_VS_RECON,
                                tmp_path / "fig.png"))
        assert out.exists()

    def test_first_iterates(self, run_dir, tmp_path):
        out = render(FigureSpec(run_dir / "trace.csv", OverlayKind.FIRST_ITERATES,
                                tmp_path / "fig.png"))
        assert out.exists() and out.stat().st_size > 0

    def test_truthless_trace_renders(self, run_dir, tmp_path):
        write_trace(run_dir / "trace.csv", truth=False)
        out = render(FigureSpec(run_dir / "trace.csv", OverlayKind.TRUTH_VS_RECON,
                                tmp_path / "fig.png"))
        assert out.exists()

    def test_sweep_panel(self, tmp_path):
        base = tmp_path / "sweep"
        for i, val in enumerate((0.01, 0.05)):
            sub = base / f"sigma_{i:03d}"
            sub.mkdir(parents=True)
            write_trace(sub / "trace.csv")
        (base / "index.csv").write_text(
            "sigma,subdir,iterations_used,converged,relative_l2_error\n"
            "0.01,sigma_000,30,True,0.02\n"
            "0.05,sigma_001,35,True,0.07\n"
        )
        out = render(FigureSpec(base / "index.csv", OverlayKind.SWEEP_PANEL,
                                tmp_path / "panel.png"))
        assert out.exists()

    def test_inputs_unmodified(self, run_dir, tmp_path):
        before = {p.name: digest(p) for p in run_dir.iterdir()}
        render(FigureSpec(run_dir / "trace.csv", OverlayKind.TRUTH_VS_RECON,
                          tmp_path / "a.png"))
        render(FigureSpec(run_dir / "trace.csv", OverlayKind.FIRST_ITERATES,
                          tmp_path / "b.png"))
        after = {p.name: digest(p) for p in run_dir.iterdir()}
        assert before == after

    def test_deterministic_dimensions(self, run_dir, tmp_path):
        from PIL import Image

        a = render(FigureSpec(run_dir / "trace.csv", OverlayKind.TRUTH_VS_RECON,
                              tmp_path / "a.png"))
        write_trace(run_dir / "trace.csv", n=65)
        b = render(FigureSpec(run_dir / "trace.csv", OverlayKind.TRUTH_VS_RECON,
                              tmp_path / "b.png"))
        assert Image.open(a).size == Image.open(b).size

    def test_missing_column_names_it(self, run_dir, tmp_path):
        bad = run_dir / "trace.csv"
        text = bad.read_text().replace("rho_hat", "rho_wat")
        bad.write_text(text)
        with pytest.raises(SchemaError, match="rho_hat"):
            render(FigureSpec(bad, OverlayKind.TRUTH_VS_RECON, tmp_path / "x.png"))


class TestCli:
    def test_render_ok(self, run_dir, tmp_path, capsys):
        rc = main(["render", "--trace", str(run_dir / "trace.csv"),
                   "--kind", "truth_vs_recon", "--out", str(tmp_path / "f.png")])
        assert rc == EXIT_OK
        assert "wrote" in capsys.readouterr().out

    def test_schema_error_exit(self, run_dir, tmp_path, capsys):
        bad = run_dir / "trace.csv"
        bad.write_text(bad.read_text().replace("kernel_v", "kernel"))
        rc = main(["render", "--trace", str(bad),
                   "--kind", "truth_vs_recon", "--out", str(tmp_path / "f.png")])
        assert rc == EXIT_SCHEMA
        assert "kernel_v" in capsys.readouterr().err

    def test_bad_kind_is_usage(self, run_dir, tmp_path):
        rc = main(["render", "--trace", str(run_dir / "trace.csv"),
                   "--kind", "what", "--out", str(tmp_path / "f.png")])
        assert rc == EXIT_USAGE
