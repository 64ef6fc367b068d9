import json

import numpy as np
import pytest

from busbalance import (
    FormatError,
    GeneratorParams,
    InputError,
    Schedule,
    ScheduleValidationError,
    block,
    generate,
    load_instance,
    load_schedule,
    preset,
    save_instance,
    save_schedule,
    validate_schedule,
)
from busbalance.instances import instance_hash


def test_hcpss_preset_statistics():
    inst = generate(preset("hcpss", seed=11))
    d = inst.durations / 60
    assert inst.n == 994
    assert abs(d.mean() - 25) <= 1.5
    assert d.min() >= 7 and d.max() <= 84
    assert inst.goal == 75 * 60


def test_california_preset():
    inst = generate(preset("california", seed=2))
    d = inst.durations / 60
    assert inst.n == 54
    assert d.min() >= 22 and d.max() <= 66


def test_distribution_sanity():
    p = preset("hcpss", n_trips=10_000, seed=5)
    d = generate(p).durations / 60
    # truncation at [7, 84] barely moves a N(25, 10)
    assert abs(d.mean() - 25) / 25 < 0.05
    assert abs(d.std() - 10) / 10 < 0.05


def test_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    save_instance(generate(preset("hcpss", n_trips=50, seed=9)), a)
    save_instance(generate(preset("hcpss", n_trips=50, seed=9)), b)
    assert a.read_bytes() == b.read_bytes()
    save_instance(generate(preset("hcpss", n_trips=50, seed=10)), b)
    assert a.read_bytes() != b.read_bytes()


def test_single_trip_and_singleton_feasibility():
    inst = generate(preset("hcpss", n_trips=1, seed=0))
    assert inst.n == 1
    assert block(inst) == Schedule([[0]])
    big = generate(preset("hcpss", n_trips=40, seed=1))
    assert validate_schedule(Schedule([[i] for i in range(40)]), big) == []


def test_generated_times_are_bell_slots():
    inst = generate(preset("hcpss", n_trips=200, seed=4))
    starts = inst.starts // 60
    assert (starts % 5 == 0).all()
    assert starts.min() >= 13 * 60 + 30 and starts.max() <= 16 * 60


@pytest.mark.parametrize(
    "kw",
    [
        dict(n_trips=0),
        dict(n_trips=5, duration_min=30, duration_mean=20),
        dict(n_trips=5, n_schools=0),
        dict(n_trips=5, seed=-1),
        dict(n_trips=5, goal=0),
    ],
)
def test_bad_params(kw):
    with pytest.raises(InputError):
        GeneratorParams(**kw)


def test_unreachable_truncation():
    with pytest.raises(InputError):
        generate(GeneratorParams(n_trips=5, duration_mean=7, duration_min=7, duration_max=7.001,
                                 duration_sd=1000))


def test_unknown_preset():
    with pytest.raises(InputError):
        preset("nowhere")


def test_instance_round_trip(e1, tmp_path):
    path = tmp_path / "e1.json"
    save_instance(e1, path)
    assert load_instance(path) == e1
    capped = e1.replace(max_chain=3, bus_penalty=600.0)
    save_instance(capped, path)
    assert load_instance(path) == capped


def test_truncated_file(e1, tmp_path):
    path = tmp_path / "e1.json"
    save_instance(e1, path)
    path.write_text(path.read_text()[:40])
    with pytest.raises(FormatError) as err:
        load_instance(path)
    assert ":1:" in str(err.value)


def test_field_errors_name_the_field(e1, tmp_path):
    path = tmp_path / "x.json"
    d = json.loads(json.dumps({"version": 1, "goal_s": 10, "trips": [{"id": 0, "start_s": "x", "duration_s": 5}],
                               "deadhead_s": [[0]]}))
    path.write_text(json.dumps(d))
    with pytest.raises(FormatError) as err:
        load_instance(path)
    assert "trips[0].start_s" in str(err.value)
    d["version"] = 99
    path.write_text(json.dumps(d))
    with pytest.raises(FormatError):
        load_instance(path)


def test_deadhead_dimension_mismatch(tmp_path):
    d = {"version": 1, "goal_s": 60, "max_chain": None,
         "trips": [{"id": k, "start_s": 0, "duration_s": 60} for k in range(3)],
         "deadhead_s": [[0, 1], [1, 0], [1, 1]]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    with pytest.raises(InputError, match="deadhead dimension"):
        load_instance(path)


def test_schedule_round_trip(e1, tmp_path):
    s = block(e1)
    path = tmp_path / "s.json"
    save_schedule(s, e1, path)
    assert load_schedule(path, e1) == s


def test_schedule_for_wrong_instance(e1, tmp_path):
    path = tmp_path / "s.json"
    other = e1.replace(deadhead=np.full((3, 3), 3600) * (1 - np.eye(3, dtype=int)))
    save_schedule(Schedule([[0, 1, 2]]), e1, path)
    with pytest.raises(ScheduleValidationError, match="incompatible pair"):
        load_schedule(path, other)
    with pytest.raises(ScheduleValidationError, match="hash"):
        load_schedule(path, e1.replace(goal=3600))


def test_schedule_empty_and_unknown(e1, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"version": 1, "instance_hash": instance_hash(e1), "tours": []}))
    with pytest.raises(ScheduleValidationError, match="trip 0 unassigned"):
        load_schedule(path, e1)
    path.write_text(json.dumps({"version": 1, "instance_hash": instance_hash(e1), "tours": [[0, 1, 2], [9]]}))
    with pytest.raises(ScheduleValidationError, match="unknown trip 9"):
        load_schedule(path, e1)
