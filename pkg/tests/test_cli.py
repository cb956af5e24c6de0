import json

import numpy as np
import pytest
import typer
from typer.testing import CliRunner

from hamine import __version__
from hamine.automaton import deserialize_json
from hamine.main import _click_exceptions, app, run
from hamine.traces import load_trace, write_trace

runner = CliRunner()


def invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def last_line(result):
    return result.stdout.strip().splitlines()[-1]


@pytest.fixture
def thermostat_dir(tmp_path):
    out = tmp_path / "traces"
    result = invoke("gen", "thermostat", "--out", out, "--n", 2, "--duration", 4, "--seed", 3)
    assert result.exit_code == 0, result.output
    return out


@pytest.fixture
def model_file(tmp_path, thermostat_dir):
    path = tmp_path / "model.json"
    result = invoke("learn", "--traces", thermostat_dir, "--penalty", 0.1, "--out", path)
    assert result.exit_code == 0, result.output
    return path


def test_version():
    result = invoke("--version")
    assert result.exit_code == 0
    assert __version__ in result.stdout


def test_gen_writes_numbered_traces(thermostat_dir):
    assert sorted(p.name for p in thermostat_dir.iterdir()) == ["trace_000.csv", "trace_001.csv"]

    trace = load_trace(thermostat_dir / "trace_000.csv")
    # runs past the duration up to the next heater switch
    assert 400 <= trace.p < 400 + 103
    assert trace.column("x")[0] == 20.0
    assert trace.schema.header == ["t", "i:clock", "o:x"]


def test_gen_is_reproducible(tmp_path, thermostat_dir):
    again = tmp_path / "again"
    invoke("gen", "thermostat", "--out", again, "--n", 2, "--duration", 4, "--seed", 3)

    for path in thermostat_dir.iterdir():
        assert (again / path.name).read_bytes() == path.read_bytes()


def test_gen_polyplant(tmp_path):
    out = tmp_path / "plant"
    result = invoke("gen", "polyplant", "--out", out, "--n", 1, "--duration", 3)

    assert result.exit_code == 0, result.output
    trace = load_trace(out / "trace_000.csv")
    assert trace.schema.input_names == ["clock", "throttle", "brake", "load"]
    assert trace.schema.clock_names == ["clock"]
    assert trace.p >= 300


def test_gen_thermostat_jitter(tmp_path):
    out = tmp_path / "jitter"
    result = invoke("gen", "thermostat", "--out", out, "--n", 2, "--duration", 2, "--jitter", 0.5)

    assert result.exit_code == 0, result.output
    starts = [load_trace(out / f"trace_00{k}.csv").column("x")[0] for k in range(2)]
    assert starts[0] != starts[1]
    assert all(19.5 <= x <= 20.5 for x in starts)


def test_learn(model_file):
    h = deserialize_json(model_file.read_bytes())

    assert h.modes
    assert h.channels.clock_names == ["clock"]
    assert h.config.penalty == 0.1
    assert h.store is not None and h.store.traces_processed == 2


def test_learn_missing_directory(tmp_path):
    result = invoke("learn", "--traces", tmp_path / "missing")
    assert result.exit_code == 2


def test_learn_empty_directory(tmp_path):
    result = invoke("learn", "--traces", tmp_path)
    assert result.exit_code == 1


def test_unknown_option():
    assert run(["learn", "--bogus"]) == 1


def test_missing_argument():
    assert run(["segment"]) == 1


def test_usage_errors_come_from_the_click_behind_typer():
    errors = _click_exceptions(typer.main.get_command(app))
    assert issubclass(errors.NoSuchOption, errors.UsageError)


def test_learn_with_linear_cost(tmp_path, thermostat_dir):
    path = tmp_path / "linear.json"
    result = invoke("learn", "--traces", thermostat_dir, "--cost", "linear", "--out", path)

    assert result.exit_code == 0, result.output
    h = deserialize_json(path.read_bytes())
    assert h.config.cost == "linear"
    assert 2 <= len(h.modes) <= 3


def test_resume_matches_a_single_session(tmp_path, thermostat_dir):
    first, second = tmp_path / "first", tmp_path / "second"
    first.mkdir()
    second.mkdir()
    (first / "trace_000.csv").write_bytes((thermostat_dir / "trace_000.csv").read_bytes())
    (second / "trace_001.csv").write_bytes((thermostat_dir / "trace_001.csv").read_bytes())

    single, partial, resumed = tmp_path / "single.json", tmp_path / "partial.json", tmp_path / "resumed.json"
    invoke("learn", "--traces", thermostat_dir, "--penalty", 0.1, "--out", single)
    invoke("learn", "--traces", first, "--penalty", 0.1, "--out", partial)
    result = invoke("learn", "--traces", second, "--resume", partial, "--out", resumed)

    assert result.exit_code == 0, result.output
    assert resumed.read_bytes() == single.read_bytes()


def test_eval(model_file, thermostat_dir):
    result = invoke("eval", "--model", model_file, "--traces", thermostat_dir, "--per-trace")

    assert result.exit_code == 0, result.output
    lines = result.stdout.strip().splitlines()
    per_trace = [line for line in lines if line.startswith("trace_")]
    assert len(per_trace) == 2

    cost = float(last_line(result))
    assert cost >= 0
    assert cost == pytest.approx(np.mean([float(line.split()[1]) for line in per_trace]), abs=1e-5)


def test_eval_empty_test_set(tmp_path, model_file):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert invoke("eval", "--model", model_file, "--traces", empty).exit_code == 1


def test_simulate(tmp_path, model_file, thermostat_dir):
    out = tmp_path / "predicted.csv"
    result = invoke("simulate", "--model", model_file, "--input", thermostat_dir / "trace_000.csv", "--out", out)

    assert result.exit_code == 0, result.output
    original = load_trace(thermostat_dir / "trace_000.csv")
    predicted = load_trace(out)
    assert predicted.schema.header == original.schema.header
    np.testing.assert_allclose(predicted.times, original.times)
    np.testing.assert_allclose(predicted.inputs, original.inputs, atol=1e-9)


def test_simulate_without_outputs(tmp_path, model_file):
    inputs = tmp_path / "inputs.csv"
    inputs.write_text("t,clock\n" + "".join(f"{k / 100},{k / 100}\n" for k in range(50)))
    out = tmp_path / "predicted.csv"

    result = invoke("simulate", "--model", model_file, "--input", inputs, "--out", out)
    assert result.exit_code == 0, result.output
    assert np.isfinite(load_trace(out).outputs).all()


def test_missing_model(tmp_path, thermostat_dir):
    result = invoke("eval", "--model", tmp_path / "missing.json", "--traces", thermostat_dir)
    assert result.exit_code == 2


def test_export(tmp_path, model_file):
    dot, document = tmp_path / "model.dot", tmp_path / "copy.json"

    assert invoke("export", "--model", model_file, "--out", dot).exit_code == 0
    assert dot.read_text().startswith("digraph hybrid_automaton {")

    assert invoke("export", "--model", model_file, "--format", "json", "--out", document).exit_code == 0
    assert document.read_bytes() == model_file.read_bytes()

    assert invoke("export", "--model", model_file, "--format", "table").exit_code == 0


def test_segment(tmp_path, step_trace):
    trace, out, segments = tmp_path / "step.csv", tmp_path / "cps.json", tmp_path / "segments"
    write_trace(trace, step_trace)

    result = invoke(
        "segment", trace, "--window", 10, "--penalty", 0.1, "--out", out, "--segments-dir", segments
    )
    assert result.exit_code == 0, result.output

    points = json.loads(out.read_text())
    assert [p["index"] for p in points] == [50, 100]
    assert points[0]["time"] == pytest.approx(5.0)
    assert sorted(p.name for p in segments.iterdir()) == [
        "segment_000.csv",
        "segment_001.csv",
        "segment_002.csv",
    ]
    assert load_trace(segments / "segment_001.csv").p == 50


def test_segment_too_short(tmp_path, make_trace):
    trace = tmp_path / "short.csv"
    write_trace(trace, make_trace({"i:u": np.zeros(10), "o:y": np.zeros(10)}))
    assert invoke("segment", trace, "--window", 10).exit_code == 1


def test_freq(tmp_path, make_trace):
    square = (np.arange(200) % 10 < 5).astype(float)
    trace, out = tmp_path / "square.csv", tmp_path / "freq.csv"
    write_trace(trace, make_trace({"i:s": square, "o:y": square}, period=0.01))

    result = invoke("freq", trace, "--window", 20, "--out", out)
    assert result.exit_code == 0, result.output

    converted = load_trace(out)
    assert converted.p == 181
    rates = converted.column("s")
    assert rates.max() <= 1 / (2 * 0.01)
    assert np.median(rates) == pytest.approx(10.0)


def test_freq_inverse_needs_period(tmp_path, make_trace):
    trace = tmp_path / "square.csv"
    write_trace(trace, make_trace({"i:s": np.zeros(20), "o:y": np.zeros(20)}))
    assert invoke("freq", trace, "--inverse").exit_code == 1


def test_dtw(tmp_path, step_trace):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    write_trace(first, step_trace)
    write_trace(second, step_trace)

    result = invoke("dtw", first, second)
    assert result.exit_code == 0, result.output

    report = json.loads(result.stdout)
    assert report == {"distance": 0.0, "diagonality": 1.0}
