import json

import pytest

from evalbench.plotting import plot_report
from evalbench.report import Curve, CurvePoint, EvalReport, load_report, save_report
from utils.errors import DataIntegrityError, InvalidArgumentError


def _point(snr_db, nmse):
    return CurvePoint(snr_db, nmse, 0.0, 0.01, 100, "abc")


@pytest.fixture
def report():
    return EvalReport(
        experiment="snr-sweep",
        seed=3,
        n_mc=100,
        estimators=[{"name": "ls"}, {"name": "mmse-ideal"}],
        curves=[
            Curve("ls", "umi", "h1", [_point(0.0, 1.0), _point(10.0, 0.1)]),
            Curve("mmse-ideal", "umi", "h1", [_point(0.0, 0.5), _point(10.0, 0.05)]),
        ],
        flops={"ls": 10},
    )


def test_round_trip(tmp_path, report):
    path = save_report(report, tmp_path / "report.json")
    assert json.loads(path.read_text())["schema"] == "report/1"
    loaded = load_report(path)
    assert loaded.to_dict() == report.to_dict()
    assert loaded.curve("mmse-ideal").nmse_at(10.0) == 0.05


def test_negative_nmse_is_rejected():
    with pytest.raises(InvalidArgumentError):
        _point(0.0, -0.1)


def test_wrong_schema(tmp_path, report):
    data = report.to_dict()
    data["schema"] = "report/0"
    (tmp_path / "bad.json").write_text(json.dumps(data))
    with pytest.raises(DataIntegrityError):
        load_report(tmp_path / "bad.json")


def test_missing_curve(report):
    with pytest.raises(KeyError):
        report.curve("sf-cnn")


def test_plot_two_curves(tmp_path, report):
    labels = plot_report(report, tmp_path / "fig.svg")
    assert labels == ["ls", "mmse-ideal"]
    assert "<svg" in (tmp_path / "fig.svg").read_text()


def test_plot_png_and_mismatched_labels(tmp_path, report):
    report.curves[1].matched = False
    labels = plot_report(report, tmp_path / "fig.png")
    assert labels[1] == "mmse-ideal on umi"
    assert (tmp_path / "fig.png").read_bytes()[:4] == b"\x89PNG"


def test_plot_rejects_unknown_format(tmp_path, report):
    with pytest.raises(InvalidArgumentError):
        plot_report(report, tmp_path / "fig.pdf")
