import json
import math
import re

import numpy as np
import pytest

from lyapspec.io import csv_text, fmt, json_text, write_output
from lyapspec.plot import EmptyPlotError, Series, emit_plot, pressure_svg, spectrum_svg, svg_plot
from lyapspec.spectrum import spectrum_curve


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(1.0) == "1"
    assert fmt(np.float64(2.5)) == "2.5"
    assert fmt(3) == "3" and fmt(np.int64(4)) == "4"
    assert (fmt(math.inf), fmt(-math.inf), fmt(math.nan)) == ("inf", "-inf", "nan")
    assert fmt("interior") == "interior" and fmt(True) == "true"
    for x in (math.pi, 1e-300, -123456.789e10):
        assert float(fmt(x)) == x


def test_csv_text():
    text = csv_text(["a", "b"], [[1.0, "x,y"], [math.nan, 2]])
    assert text == 'a,b\n1,"x,y"\nnan,2\n'
    assert csv_text(["a"], []) == "a\n"


def test_json_text_sorted_and_strict():
    text = json_text({"b": math.inf, "a": [np.float64(1.5), np.int64(2), np.array([0.5])]})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [1.5, 2, [0.5]], "b": "inf"}


def test_write_output_atomic(tmp_path, capsys):
    p = tmp_path / "x.txt"
    write_output(p, "one\n")
    assert p.read_text() == "one\n"

    class Boom(str):
        pass

    with pytest.raises(TypeError):
        write_output(p, 42)
    assert p.read_text() == "one\n"
    assert sorted(f.name for f in tmp_path.iterdir()) == ["x.txt"]
    write_output("-", "to stdout\n")
    assert capsys.readouterr().out == "to stdout\n"


def _polylines(svg):
    return re.findall(r'<polyline points="([^"]+)"[^>]*?(stroke-dasharray="[^"]+")?/>', svg)


def _points(s):
    return [tuple(map(float, p.split(","))) for p in s.split()]


def test_gauss_pressure_svg(gauss_curve):
    svg = pressure_svg(gauss_curve)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg == pressure_svg(gauss_curve)
    main = [p for p, dash in _polylines(svg) if not dash]
    pts = _points(main[0])
    ys = [y for _, y in pts]  # screen y grows downwards
    assert all(b > a for a, b in zip(ys, ys[1:]))
    # crosses the dotted zero line near t = 1
    zero_y = float(re.search(r'<line x1="\d+" y1="([\d.]+)" x2="\d+" y2="[\d.]+" stroke="#999999"', svg).group(1))
    xs = [x for x, _ in pts]
    i = next(k for k, y in enumerate(ys) if y > zero_y)
    t_cross = np.interp(xs[i], [xs[0], xs[-1]], [gauss_curve.t[0], gauss_curve.t[-1]])
    assert abs(t_cross - 1.0) < 0.06


def test_renyi_pressure_svg_plateau(renyi_curve):
    svg = pressure_svg(renyi_curve)
    main = [p for p, dash in _polylines(svg) if not dash]
    pts = _points(main[0])
    flat = [y for (x, y), t in zip(pts, renyi_curve.t) if t >= 1.0]
    assert len(flat) > 5 and max(flat) - min(flat) < 0.01


def test_logdir5_spectrum_svg_dashed(logdir_curves):
    c = logdir_curves[5]
    pts = spectrum_curve(c, 1.5, 10.0, 30)
    svg = spectrum_svg(pts)
    dashed = [p for p, dash in _polylines(svg) if dash]
    assert dashed, "the boundary hyperbola must be dashed"
    assert svg == spectrum_svg(pts)


def test_emit_plot(tmp_path, gauss_curve):
    out = tmp_path / "g.svg"
    assert emit_plot(gauss_curve, out) == 0
    assert out.read_text().startswith("<svg")
    assert emit_plot([], tmp_path / "empty.svg") == 3
    assert not (tmp_path / "empty.svg").exists()


def test_svg_plot_rejects_non_finite():
    with pytest.raises(EmptyPlotError):
        svg_plot([Series([1.0, 2.0], [math.nan, math.inf])])
    svg = svg_plot([Series([1.0, 2.0, 3.0], [1.0, math.nan, 1.0])])
    assert "<circle" in svg  # isolated points are still drawn
