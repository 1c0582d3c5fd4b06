import csv
import io

import pytest

from conftest import make_graph
from colas.calibration import fit_theta_minimum_distance
from colas.config import ExperimentConfig
from colas.errors import ConfigError
from colas.limits import LimitModel
from colas.report import export_report, flatten, read_csv_rows
from colas.stats import motif_vector, summarize

BASE = """experiment: E3
seed: 3
n: [600, 5000]
rho: 10.0
lam: 10.0
theta: 0.75
replicates: 2
"""


def test_round_trip():
    cfg = ExperimentConfig.from_yaml(BASE)
    assert cfg.theta == [0.75] and cfg.n == [600, 5000]
    again = ExperimentConfig.from_yaml(cfg.to_yaml())
    assert again == cfg
    assert again.to_yaml() == cfg.to_yaml()


def test_zero_replicates_names_line():
    with pytest.raises(ConfigError, match=r"line 7: replicates"):
        ExperimentConfig.from_yaml(BASE.replace("replicates: 2", "replicates: 0"))


def test_unknown_key_and_missing_seed():
    with pytest.raises(ConfigError, match=r"line 8: colour: unknown key"):
        ExperimentConfig.from_yaml(BASE + "colour: blue\n")
    with pytest.raises(ConfigError, match="seed"):
        ExperimentConfig.from_yaml(BASE.replace("seed: 3\n", ""))


@pytest.mark.parametrize("bad,where", [
    ("theta: 1.5", "line 6: theta"),
    ("rho: -1", "line 4: rho"),
    ("n: [0]", "line 3: n"),
])
def test_value_checks(bad, where):
    key = bad.split(":")[0]
    text = "\n".join(bad if ln.startswith(key + ":") else ln for ln in BASE.splitlines()) + "\n"
    with pytest.raises(ConfigError, match=where):
        ExperimentConfig.from_yaml(text)


def test_invalid_yaml():
    with pytest.raises(ConfigError, match="line"):
        ExperimentConfig.from_yaml("experiment: E1\nseed: [1\n")


def _csv_row(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 1
    return rows[0]


@pytest.mark.parametrize("which", ["stats", "fit", "motifs"])
def test_text_and_csv_agree(which, k3):
    obj = {
        "stats": lambda: summarize(k3),
        "fit": lambda: fit_theta_minimum_distance(0.34, 0.33, LimitModel(1.0, 1.0)),
        "motifs": lambda: motif_vector(k3),
    }[which]()
    text = dict(line.split("=", 1) for line in export_report(obj, "text").splitlines())
    row = _csv_row(export_report(obj, "csv"))
    assert text == row
    assert list(text) == list(flatten(obj))


def test_k3_csv_has_unit_transitivity(k3, tmp_path):
    path = tmp_path / "k3.csv"
    export_report(summarize(k3), "csv", path)
    assert float(read_csv_rows(path)[0]["transitivity"]) == 1.0


def test_csv_keeps_full_precision():
    rep = fit_theta_minimum_distance(0.341234567890123, 0.33, LimitModel(1.0, 1.0))
    row = _csv_row(export_report(rep, "csv"))
    assert float(row["c_obs"]) == 0.341234567890123
    assert float(row["theta_hat"]) == rep.theta_hat


def test_bad_format():
    with pytest.raises(ValueError):
        export_report(summarize(make_graph(3, [])), "json")
