import io

import numpy as np
import pandas as pd
import pytest

from forumnet.nodemetrics import (
    NODE_METRICS,
    MetricConfig,
    compute_node_metrics,
    read_node_metrics,
    write_node_metrics,
    zscore_columns,
)
from helpers import msg


def _events():
    return [
        msg("m1", "a", 0, sentiment=0.2, text="hello there"),
        msg("m2", "b", 60, parent="m1", sentiment=0.8, text="hello again"),
        msg("m3", "a", 120, parent="m2"),
        msg("m4", "c", 180),
    ]


def test_table_has_one_row_per_node_and_all_metrics():
    t = compute_node_metrics(_events())
    assert list(t.index) == ["a", "b", "c"]
    assert tuple(t.columns) == NODE_METRICS
    assert t.loc["b", "ego_art"] == 60
    assert t.loc["a", "alter_art"] == 60
    assert np.isnan(t.loc["c", "ego_art"])


def test_round_trip_with_missing_fields():
    t = compute_node_metrics(_events())
    buf = io.StringIO()
    write_node_metrics(t, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "node," + ",".join(NODE_METRICS)
    assert ",," in text  # missing values are empty fields
    back = read_node_metrics(io.StringIO(text))
    pd.testing.assert_frame_equal(back, t, check_names=False)


def test_config_validation():
    with pytest.raises(ValueError):
        MetricConfig(window=0)
    with pytest.raises(ValueError):
        MetricConfig(direction="sideways")
    assert MetricConfig(direction="undirected-projection").direction


def test_zscore_uses_population_std_and_keeps_missing():
    t = pd.DataFrame({"x": [1.0, 3.0, np.nan], "k": [2.0, 2.0, 2.0]})
    z = zscore_columns(t)
    assert z["x"].tolist()[:2] == [-1.0, 1.0]
    assert np.isnan(z["x"].iloc[2])
    assert z["k"].isna().all()
